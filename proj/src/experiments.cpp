#include "qmereology/experiments.hpp"

#include "qmereology/dynamics.hpp"
#include "qmereology/factorization.hpp"
#include "qmereology/parallel.hpp"
#include "qmereology/random.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <regex>

namespace qm {

namespace {

std::vector<double> ranks(const std::vector<double>& x) {
    std::vector<int> idx(x.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return x[a] < x[b]; });
    std::vector<double> r(x.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j + 1 < idx.size() && x[idx[j + 1]] == x[idx[i]]) ++j;
        const double avg = 0.5 * (i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
        i = j + 1;
    }
    return r;
}

Operator matrix_power(const Operator& X, int n) {
    Operator out = Operator::Identity(X.rows(), X.cols());
    for (int k = 0; k < n; ++k) out = out * X;
    return out;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

}  // namespace

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("spearman: need two equal-length samples");
    const std::vector<double> rx = ranks(x), ry = ranks(y);
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

Operator parse_operator_spec(const std::string& raw, const GpoSystem& g) {
    const std::string spec = trim(raw);
    static const std::regex power(R"((pi|phi)(\^([0-9]+))?)");
    static const std::regex cosine(R"(cos\((pi|phi)\))");
    static const std::regex random(R"(random\(([0-9]+)\))");
    std::smatch m;
    if (std::regex_match(spec, m, power)) {
        const Operator& base = m[1] == "pi" ? g.pi : g.phi;
        const int n = m[3].matched ? std::stoi(m[3].str()) : 1;
        if (n < 1 || n > 64) throw SpecError("operator spec: exponent out of range in '" + spec + "'", m[3].str());
        return matrix_power(base, n);
    }
    if (std::regex_match(spec, m, cosine)) {
        const Operator& U = m[1] == "pi" ? g.shift_A : g.clock_B;
        return 0.5 * (U + U.adjoint());
    }
    if (std::regex_match(spec, m, random)) {
        Rng rng = make_stream(std::stoull(m[1].str()), 0);
        return random_hermitian(g.d, rng);
    }
    // Name the first token that cannot start a valid spec.
    std::size_t n = 0;
    while (n < spec.size() && (std::isalnum(static_cast<unsigned char>(spec[n])) || spec[n] == '_')) ++n;
    std::string token = n == 0 ? spec.substr(0, 1) : spec.substr(0, n);
    const bool known_head = token == "pi" || token == "phi" || token == "cos" || token == "random";
    if (known_head && n < spec.size()) token = spec.substr(n);
    throw SpecError("operator spec: cannot parse '" + spec + "' at token '" + token + "'", token);
}

Operator unit_traceless(const Operator& M) {
    require_square(M, "unit_traceless");
    const Operator T = M - (M.trace() / double(M.rows())) * identity(static_cast<int>(M.rows()));
    const double n = T.norm();
    if (!(n > 0.0)) throw std::invalid_argument("unit_traceless: operator is proportional to the identity");
    return T / n;
}

CorrelationResult run_correlation(const CorrelationConfig& config, unsigned workers) {
    if (config.ensemble < 5) throw std::invalid_argument("correlate: ensemble size must be at least 5");
    if (!(config.width > 0.0)) throw std::invalid_argument("correlate: width must be positive");
    const GpoSystem gA = build_gpo(config.d_A);
    const GpoSystem gB = build_gpo(config.d_B);
    const BipartiteShape shape{config.d_A, config.d_B};
    const Operator& phi = gA.phi;
    const Operator& pi = gA.pi;

    const Operator pi2 = pi * pi, phi2 = phi * phi;
    const std::vector<std::pair<std::string, Operator>> families = {
        {"pi^2", unit_traceless(pi2)},
        {"pi^2+phi^2", unit_traceless(pi2 + phi2)},
        {"pi^4+phi^2", unit_traceless(pi2 * pi2 + phi2)},
        {"pi^2+0.1phi^4", unit_traceless(pi2 + 0.1 * phi2 * phi2)},
    };

    const Operator pointer_basis = identity(config.d_A);
    const ProductState state(PureState::normalized(peaked_amplitudes(pointer_basis, gA.l, config.width)),
                             PureState::normalized(uniform_amplitudes(identity(config.d_B))));
    const Operator coupling = config.coupling * tensor_product(phi, gB.phi);

    auto split_for = [&](const Operator& HA) { return split_hamiltonian(embed(HA, shape, Factor::A) + coupling, shape); };

    // One random direction per seed, oriented so that it spreads the reference state.
    Rng rng0 = make_stream(config.seed, 0);
    Operator R = unit_traceless(random_hermitian(config.d_A, rng0));
    if (variance_rate(split_for(R), phi, state, VarianceMode::general) < 0.0) R = -R;

    CorrelationResult out;
    out.rows.resize(config.ensemble);
    parallel_for(
        config.ensemble,
        [&](int k) {
            Rng rng = make_stream(config.seed, k + 1);
            const double s = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
            const int f = std::uniform_int_distribution<int>(0, static_cast<int>(families.size()) - 1)(rng);
            const Operator HA = unit_traceless((1.0 - s) * families[f].second + s * R);
            const HamiltonianSplit split = split_for(HA);
            CorrelationRow& row = out.rows[k];
            row.instance = k;
            row.family = families[f].first;
            row.mix = s;
            row.collimation = collimation(split.H_A, gA, Axis::phi);
            row.variance_rate = variance_rate(split, phi, state, VarianceMode::general);
            row.s_pointer_ddot = s_pointer_ddot(pointer_distribution(split, pointer_basis, state, 2));
            row.s_lin_ddot = s_lin_ddot(split, state);
        },
        workers);

    std::vector<double> c, v, p;
    for (const CorrelationRow& r : out.rows) {
        c.push_back(r.collimation);
        v.push_back(r.variance_rate);
        p.push_back(r.s_pointer_ddot);
    }
    out.spearman_collimation_variance = spearman(c, v);
    out.spearman_pointer_variance = spearman(p, v);
    return out;
}

}  // namespace qm
