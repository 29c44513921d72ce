#include "qmereology/dynamics.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace qm {

namespace {

const cplx I1(0.0, 1.0);

struct FactorMoments {
    Eigen::VectorXd mean;     // <X_a>
    Eigen::MatrixXcd second;  // <X_a X_b>
    Eigen::MatrixXcd cov() const { return second - (mean * mean.transpose()).cast<cplx>(); }
};

template <typename Pick>
FactorMoments moments(const std::vector<InteractionTerm>& terms, const Ket& psi, Pick pick) {
    const int n = static_cast<int>(terms.size());
    Eigen::MatrixXcd v(psi.size(), n);
    for (int a = 0; a < n; ++a) v.col(a) = pick(terms[a]) * psi;
    FactorMoments m;
    m.second = v.adjoint() * v;
    m.mean = (psi.adjoint() * v).transpose().real();
    return m;
}

FactorMoments moments_A(const HamiltonianSplit& s, const ProductState& st) {
    return moments(s.terms, st.psi_A.amplitudes(), [](const InteractionTerm& t) -> const Operator& { return t.A; });
}

FactorMoments moments_B(const HamiltonianSplit& s, const ProductState& st) {
    return moments(s.terms, st.psi_B.amplitudes(), [](const InteractionTerm& t) -> const Operator& { return t.B; });
}

Eigen::VectorXd lambdas(const HamiltonianSplit& s) {
    Eigen::VectorXd l(s.terms.size());
    for (std::size_t a = 0; a < s.terms.size(); ++a) l(a) = s.terms[a].lambda;
    return l;
}

void require_orthonormal(const Operator& basis, int dim, const char* what) {
    if (basis.rows() != dim || basis.cols() != dim)
        throw std::invalid_argument(std::string(what) + ": basis must be a square matrix on the kept factor");
    if ((basis.adjoint() * basis - Operator::Identity(dim, dim)).cwiseAbs().maxCoeff() > kPredicateTol)
        throw std::invalid_argument(std::string(what) + ": basis columns are not orthonormal");
}

Eigen::VectorXd diagonal_in(const Operator& rho, const Operator& basis) {
    return (basis.adjoint() * rho * basis).diagonal().real();
}

// Interaction-weighted mean field sum_a lambda_a <B_a> A_a.
Operator mean_field_A(const HamiltonianSplit& s, const Eigen::VectorXd& meanB) {
    Operator out = Operator::Zero(s.shape.d_A, s.shape.d_A);
    for (std::size_t a = 0; a < s.terms.size(); ++a) out += s.terms[a].lambda * meanB(a) * s.terms[a].A;
    return out;
}

Operator interaction_free_H(const HamiltonianSplit& s) { return s.self_part() + s.interaction; }

}  // namespace

void require_state_matches(const HamiltonianSplit& split, const ProductState& state, const char* what) {
    if (state.psi_A.dim() != split.shape.d_A || state.psi_B.dim() != split.shape.d_B)
        throw std::invalid_argument(std::string(what) + ": state dimensions do not match the split shape");
}

double s_lin_ddot(const HamiltonianSplit& split, const ProductState& state) {
    require_state_matches(split, state, "s_lin_ddot");
    if (split.terms.empty()) return 0.0;
    const Eigen::VectorXd lam = lambdas(split);
    const Eigen::MatrixXcd covA = moments_A(split, state).cov();
    const Eigen::MatrixXcd covB = moments_B(split, state).cov();
    const Eigen::MatrixXd w = lam * lam.transpose();
    return 2.0 * (w.array() * (covA.array() * covB.array()).real()).sum();
}

OracleFit s_lin_oracle(const Operator& H, const ProductState& state, const BipartiteShape& shape, double t_max,
                       int n_points) {
    if (n_points < 5) throw std::invalid_argument("s_lin_oracle: at least 5 sample points required");
    if (!(t_max > 0.0)) throw std::invalid_argument("s_lin_oracle: t_max must be positive");
    if (state.shape().dim() != shape.dim() || H.rows() != shape.dim())
        throw std::invalid_argument("s_lin_oracle: dimension mismatch");
    const Propagator U(H);
    const Ket psi0 = state.joint();

    // Fit in the scaled time s = t / t_max to keep the normal equations well conditioned.
    Eigen::MatrixXd X(n_points, 3);
    Eigen::VectorXd y(n_points);
    for (int k = 1; k <= n_points; ++k) {
        const double s = double(k) / n_points;
        X.row(k - 1) << s * s, s * s * s, s * s * s * s;
        y(k - 1) = linear_entropy(reduced_state(U.apply(psi0, s * t_max), shape, Factor::A));
    }
    const Eigen::Vector3d c = X.colPivHouseholderQr().solve(y);
    OracleFit fit;
    fit.coefficient = c(0) / (t_max * t_max);
    fit.rms_residual = std::sqrt((X * c - y).squaredNorm() / n_points);
    fit.window_ok = t_max * H.norm() <= 0.05 * (1.0 + 1e-12);
    return fit;
}

double variance_rate(const HamiltonianSplit& split, const Operator& O_A, const ProductState& state, VarianceMode mode) {
    require_state_matches(split, state, "variance_rate");
    if (O_A.rows() != split.shape.d_A || O_A.cols() != split.shape.d_A)
        throw std::invalid_argument("variance_rate: observable dimension does not match d_A");
    if (!is_hermitian(O_A)) throw std::invalid_argument("variance_rate: observable is not Hermitian");
    Operator H = split.H_A;
    if (mode == VarianceMode::general && !split.terms.empty()) H += mean_field_A(split, moments_B(split, state).mean);
    const Ket& psi = state.psi_A.amplitudes();
    const Operator O2 = O_A * O_A;
    const cplx first = expectation(Operator(I1 * commutator(H, O2)), psi);
    const cplx drift = expectation(Operator(I1 * commutator(H, O_A)), psi);
    return (first - 2.0 * drift * expectation(O_A, psi)).real();
}

QmlCheck check_qml(const HamiltonianSplit& split, const Operator& O_A, double relative_threshold) {
    if (O_A.rows() != split.shape.d_A || O_A.cols() != split.shape.d_A)
        throw std::invalid_argument("check_qml: observable dimension does not match d_A");
    double sq = 0.0;
    for (const InteractionTerm& t : split.terms) sq += t.lambda * t.lambda * commutator(O_A, t.A).squaredNorm();
    QmlCheck c;
    c.commutator_norm = std::sqrt(sq);
    c.threshold = relative_threshold * O_A.norm() * split.interaction_norm();
    c.holds = c.commutator_norm <= c.threshold;
    return c;
}

PointerDistribution pointer_distribution(const HamiltonianSplit& split, const Operator& basis,
                                         const ProductState& state, int order) {
    require_state_matches(split, state, "pointer_distribution");
    require_orthonormal(basis, split.shape.d_A, "pointer_distribution");
    if (order < 0 || order > 2) throw std::invalid_argument("pointer_distribution: order must be 0, 1 or 2");
    const BipartiteShape& shape = split.shape;
    PointerDistribution dist;
    dist.basis = basis;
    dist.order = order;
    const Ket psi = state.joint();
    dist.p = diagonal_in(reduced_state(psi, shape, Factor::A), basis);
    if (order == 0) return dist;

    // rho' = -i[H, rho] and rho'' = -[H, [H, rho]] for rho = |psi><psi|, traced over B.
    const Operator H = interaction_free_H(split);
    const Ket v = H * psi;
    const Operator rho1 = -I1 * (partial_trace_outer(v, psi, shape, Factor::A) - partial_trace_outer(psi, v, shape, Factor::A));
    dist.p_dot = diagonal_in(rho1, basis);
    if (order == 1) return dist;

    const Ket w = H * v;
    const Operator rho2 = -(partial_trace_outer(w, psi, shape, Factor::A) + partial_trace_outer(psi, w, shape, Factor::A) -
                            2.0 * partial_trace_outer(v, v, shape, Factor::A));
    dist.p_ddot = diagonal_in(rho2, basis);
    return dist;
}

double s_pointer_ddot(const PointerDistribution& dist) {
    if (dist.order < 2 || dist.p_dot.size() != dist.p.size() || dist.p_ddot.size() != dist.p.size())
        throw std::invalid_argument("s_pointer_ddot: distribution lacks second-order derivative data");
    return -2.0 * (dist.p_dot.squaredNorm() + dist.p.dot(dist.p_ddot));
}

double s_pointer_ddot_qml(const HamiltonianSplit& split, const Operator& basis, const ProductState& state) {
    require_state_matches(split, state, "s_pointer_ddot_qml");
    require_orthonormal(basis, split.shape.d_A, "s_pointer_ddot_qml");
    const Ket& psi = state.psi_A.amplitudes();
    const Operator& HA = split.H_A;
    const Operator HA2 = HA * HA;
    const Eigen::VectorXd meanB = split.terms.empty() ? Eigen::VectorXd() : moments_B(split, state).mean;
    Operator drive = Operator::Zero(HA.rows(), HA.cols());
    for (std::size_t a = 0; a < split.terms.size(); ++a)
        drive += split.terms[a].lambda * meanB(a) * commutator(HA, split.terms[a].A);

    double total = 0.0;
    for (int j = 0; j < basis.cols(); ++j) {
        const Operator Oj = basis.col(j) * basis.col(j).adjoint();
        const double pj = std::norm(basis.col(j).dot(psi));
        const cplx flow = expectation(commutator(Oj, HA), psi);
        const cplx spread = expectation(Operator(Oj * HA2 + HA2 * Oj - 2.0 * HA * Oj * HA), psi);
        const cplx mixed = expectation(commutator(Oj, drive), psi);
        total += 2.0 * (flow * flow).real() + 2.0 * pj * spread.real() + 2.0 * pj * mixed.real();
    }
    return total;
}

double pointer_entropy(const Operator& rho_A, const Operator& basis) {
    require_orthonormal(basis, static_cast<int>(rho_A.rows()), "pointer_entropy");
    return 1.0 - diagonal_in(rho_A, basis).squaredNorm();
}

Ket peaked_amplitudes(const Operator& basis, int center, double width) {
    if (center < 0 || center >= basis.cols()) throw std::invalid_argument("peaked_amplitudes: center out of range");
    if (!(width >= 0.0)) throw std::invalid_argument("peaked_amplitudes: width must be nonnegative");
    if (width == 0.0) return basis.col(center);
    Ket out = Ket::Zero(basis.rows());
    for (int k = 0; k < basis.cols(); ++k) {
        const double dk = k - center;
        out += std::exp(-dk * dk / (4.0 * width * width)) * basis.col(k);
    }
    return out / out.norm();
}

Ket uniform_amplitudes(const Operator& basis) {
    return basis.rowwise().sum() / std::sqrt(static_cast<double>(basis.cols()));
}

ReducedEvolution reduced_evolution_terms(const HamiltonianSplit& split, const ProductState& state, double t) {
    require_state_matches(split, state, "reduced_evolution_terms");
    const BipartiteShape& shape = split.shape;
    ReducedEvolution out;
    const Ket psi_t = Propagator(interaction_free_H(split)).apply(state.joint(), t);
    out.rho_A = reduced_state(psi_t, shape, Factor::A);
    const Operator rho0 = state.psi_A.projector();

    out.H_eff_A = split.H_A;
    out.decoherence_part = Operator::Zero(shape.d_A, shape.d_A);
    if (!split.terms.empty()) {
        // <B_a> under the self-evolution of B alone.
        const Ket psiB_t = Propagator(split.H_B).apply(state.psi_B.amplitudes(), t);
        Eigen::VectorXd meanB_t(split.terms.size());
        for (std::size_t a = 0; a < split.terms.size(); ++a) meanB_t(a) = expectation(split.terms[a].B, psiB_t).real();
        out.H_eff_A += mean_field_A(split, meanB_t);

        const Eigen::MatrixXcd covB = moments_B(split, state).cov();
        const int n = static_cast<int>(split.terms.size());
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                const Operator& Aa = split.terms[a].A;
                const Operator& Ab = split.terms[b].A;
                const double ll = split.terms[a].lambda * split.terms[b].lambda;
                out.decoherence_part -= t * ll *
                                        ((Aa * Ab * rho0 - Ab * rho0 * Aa) * covB(a, b) +
                                         (rho0 * Ab * Aa - Aa * rho0 * Ab) * covB(b, a));
            }
    }
    out.unitary_part = -I1 * commutator(out.H_eff_A, out.rho_A);
    return out;
}

Operator joint_pointer_basis(const HamiltonianSplit& split, double commute_tol) {
    if (split.terms.empty()) throw std::invalid_argument("joint_pointer_basis: split has no interaction terms");
    const int n = static_cast<int>(split.terms.size());
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            if (commutator(split.terms[a].A, split.terms[b].A).norm() > commute_tol)
                throw std::invalid_argument("joint_pointer_basis: interaction factors do not commute, no consistent pointer basis");

    // A fixed generic combination separates every joint eigenspace.
    const int dA = split.shape.d_A;
    Operator M = Operator::Zero(dA, dA);
    for (int a = 0; a < n; ++a) M += split.terms[a].A / (a + std::sqrt(2.0));
    Eigen::SelfAdjointEigenSolver<Operator> es(M);
    Operator V = es.eigenvectors();

    Eigen::MatrixXd vals(n, dA);
    for (int a = 0; a < n; ++a)
        for (int j = 0; j < dA; ++j) vals(a, j) = expectation(split.terms[a].A, Ket(V.col(j))).real();
    std::vector<int> order(dA);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
        for (int a = 0; a < n; ++a) {
            if (vals(a, x) < vals(a, y) - 1e-9) return true;
            if (vals(a, y) < vals(a, x) - 1e-9) return false;
        }
        return false;
    });
    Operator out(dA, dA);
    for (int j = 0; j < dA; ++j) out.col(j) = V.col(order[j]);
    fix_column_phases(out);
    return out;
}

DecoherenceModel decoherence_rates(const HamiltonianSplit& split, const ProductState& state) {
    require_state_matches(split, state, "decoherence_rates");
    DecoherenceModel m;
    m.pointer_basis = joint_pointer_basis(split);
    const int n = static_cast<int>(split.terms.size());
    const int dA = split.shape.d_A;
    const FactorMoments mb = moments_B(split, state);
    m.H_eff_A = split.H_A + mean_field_A(split, mb.mean);

    m.pointer_eigenvalues.resize(n, dA);
    for (int a = 0; a < n; ++a)
        for (int j = 0; j < dA; ++j)
            m.pointer_eigenvalues(a, j) = expectation(split.terms[a].A, Ket(m.pointer_basis.col(j))).real();

    m.Gamma = Eigen::MatrixXd::Zero(dA, dA);
    for (int a = 0; a < n; ++a) {
        const double varB = std::max(0.0, mb.second(a, a).real() - mb.mean(a) * mb.mean(a));
        const double w = split.terms[a].lambda * split.terms[a].lambda * varB;
        for (int j = 0; j < dA; ++j)
            for (int k = 0; k < dA; ++k) {
                const double gap = m.pointer_eigenvalues(a, j) - m.pointer_eigenvalues(a, k);
                m.Gamma(j, k) += w * gap * gap;
            }
    }
    m.tau.resize(dA, dA);
    for (int j = 0; j < dA; ++j)
        for (int k = 0; k < dA; ++k)
            m.tau(j, k) = m.Gamma(j, k) > 0.0 ? std::sqrt(2.0 / m.Gamma(j, k)) : std::numeric_limits<double>::infinity();
    return m;
}

}  // namespace qm
