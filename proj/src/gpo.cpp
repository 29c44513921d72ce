#include "qmereology/gpo.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qm {

namespace {

int mod(int x, int d) { return ((x % d) + d) % d; }

void require_dim(const Operator& M, const GpoSystem& g, const char* what) {
    if (M.rows() != g.d || M.cols() != g.d)
        throw std::invalid_argument(std::string(what) + ": operator dimension does not match GPO dimension " +
                                    std::to_string(g.d));
}

Operator central_block(const Operator& M, int l, int w) { return M.block(l - w, l - w, 2 * w + 1, 2 * w + 1); }

}  // namespace

double default_alpha(int d) { return std::sqrt(2.0 * std::numbers::pi / d); }

GpoSystem build_gpo(int d, std::optional<double> alpha) {
    if (d < 3 || d % 2 == 0) throw std::invalid_argument("build_gpo: odd dimension d >= 3 required, got " + std::to_string(d));
    const double a = alpha.value_or(default_alpha(d));
    if (!(a > 0.0) || !std::isfinite(a)) throw std::invalid_argument("build_gpo: alpha must be positive");

    const double pi = std::numbers::pi;
    GpoSystem g;
    g.d = d;
    g.l = (d - 1) / 2;
    g.alpha = a;
    g.beta = 2.0 * pi / (d * a);
    g.omega = std::polar(1.0, 2.0 * pi / d);

    g.shift_A = Operator::Zero(d, d);
    for (int p = 0; p < d; ++p) g.shift_A((p + 1) % d, p) = 1.0;

    g.clock_B = Operator::Zero(d, d);
    g.phi = Operator::Zero(d, d);
    for (int p = 0; p < d; ++p) {
        const int j = p - g.l;
        g.clock_B(p, p) = std::polar(1.0, 2.0 * pi * j / d);
        g.phi(p, p) = j * 2.0 * pi / (d * g.beta);
    }

    g.pi = Operator::Zero(d, d);
    const cplx scale(0.0, pi / (d * a));
    for (int p = 0; p < d; ++p)
        for (int q = 0; q < d; ++q) {
            if (p == q) continue;
            const int dj = p - q;
            g.pi(p, q) = scale / std::sin(2.0 * pi * g.l * dj / d);
        }

    g.sylvester_S = Operator(d, d);
    const double norm = 1.0 / std::sqrt(static_cast<double>(d));
    for (int p = 0; p < d; ++p)
        for (int q = 0; q < d; ++q)
            g.sylvester_S(p, q) = norm * std::polar(1.0, 2.0 * pi * mod((p - g.l) * (q - g.l), d) / d);
    return g;
}

Operator shift_power(const GpoSystem& g, int a) {
    Operator out = Operator::Zero(g.d, g.d);
    for (int p = 0; p < g.d; ++p) out(mod(p + a, g.d), p) = 1.0;
    return out;
}

Operator clock_power(const GpoSystem& g, int b) {
    Operator out = Operator::Zero(g.d, g.d);
    for (int p = 0; p < g.d; ++p) out(p, p) = std::polar(1.0, 2.0 * std::numbers::pi * mod(b * (p - g.l), g.d) / g.d);
    return out;
}

Operator schwinger_element(const GpoSystem& g, int b, int a) { return clock_power(g, b) * shift_power(g, a); }

SchwingerExpansion schwinger_expand(const Operator& M, const GpoSystem& g) {
    require_dim(M, g, "schwinger_expand");
    const int d = g.d, l = g.l;
    SchwingerExpansion e;
    e.d = d;
    e.l = l;
    e.coeffs.resize(d, d);
    // Tr(A^-a B^-b M) = sum_r omega^(-b j_r) M(r, r - a)
    for (int b = -l; b <= l; ++b)
        for (int a = -l; a <= l; ++a) {
            cplx acc = 0.0;
            for (int r = 0; r < d; ++r) {
                const int phase = mod(-b * (r - l), d);
                acc += std::polar(1.0, 2.0 * std::numbers::pi * phase / d) * M(r, mod(r - a, d));
            }
            e.coeffs(b + l, a + l) = acc / static_cast<double>(d);
        }
    const Eigen::MatrixXd mags = e.coeffs.cwiseAbs();
    const double total = mags.sum();
    e.normalized = total > 0.0 ? Eigen::MatrixXd(mags / total) : Eigen::MatrixXd::Zero(d, d);
    return e;
}

Operator reconstruct(const SchwingerExpansion& e, const GpoSystem& g) {
    if (e.d != g.d) throw std::invalid_argument("reconstruct: expansion dimension does not match GPO dimension");
    Operator out = Operator::Zero(g.d, g.d);
    for (int b = -g.l; b <= g.l; ++b)
        for (int a = -g.l; a <= g.l; ++a) out += e.m(b, a) * schwinger_element(g, b, a);
    return out;
}

ShiftProfile shift_profile(const SchwingerExpansion& e, Axis axis) {
    if (e.normalized.sum() <= 0.0) throw std::invalid_argument("shift_profile: zero operator has no shift profile");
    ShiftProfile p;
    p.axis = axis;
    p.weights = axis == Axis::phi ? Eigen::VectorXd(e.normalized.colwise().sum().transpose())
                                  : Eigen::VectorXd(e.normalized.rowwise().sum());
    p.weights /= p.weights.sum();
    p.collimation = 0.0;
    for (int k = -e.l; k <= e.l; ++k) p.collimation += p.weights(k + e.l) * std::exp(-std::abs(k) / double(e.d));
    return p;
}

double collimation(const Operator& M, const GpoSystem& g, Axis axis) {
    return shift_profile(schwinger_expand(M, g), axis).collimation;
}

Operator nested_commutator(const Operator& X, const Operator& H, int n) {
    if (n < 1) throw std::invalid_argument("nested_commutator: n must be at least 1");
    Operator out = H;
    for (int k = 0; k < n; ++k) out = commutator(X, out);
    return out;
}

namespace {

struct EomMatrices {
    Operator pi_part;
    Operator phi_part;
};

EomMatrices eom_matrices(const Operator& H, const GpoSystem& g, const Operator& dH_dphi, const Operator& dH_dpi) {
    require_dim(H, g, "eom_residual");
    require_dim(dH_dphi, g, "eom_residual");
    require_dim(dH_dpi, g, "eom_residual");
    const cplx i(0.0, 1.0);
    return {i * commutator(H, g.pi) + dH_dphi, i * commutator(H, g.phi) - dH_dpi};
}

}  // namespace

EomResidual eom_residual(const Operator& H, const GpoSystem& g, const Operator& dH_dphi, const Operator& dH_dpi) {
    const EomMatrices m = eom_matrices(H, g, dH_dphi, dH_dpi);
    return {m.pi_part.norm(), m.phi_part.norm()};
}

EomResidual eom_residual_interior(const Operator& H, const GpoSystem& g, const Operator& dH_dphi,
                                  const Operator& dH_dpi, int half_width) {
    if (half_width < 0 || half_width > g.l) throw std::invalid_argument("eom_residual_interior: half width out of range");
    const EomMatrices m = eom_matrices(H, g, dH_dphi, dH_dpi);
    return {central_block(m.pi_part, g.l, half_width).norm(), central_block(m.phi_part, g.l, half_width).norm()};
}

double ccr_block_deviation(const GpoSystem& g, int half_width) {
    if (half_width < 0 || half_width > g.l) throw std::invalid_argument("ccr_block_deviation: half width out of range");
    const Operator c = central_block(commutator(g.phi, g.pi), g.l, half_width);
    const Operator target = cplx(0.0, 1.0) * Operator::Identity(c.rows(), c.cols());
    return (c - target).cwiseAbs().maxCoeff();
}

}  // namespace qm
