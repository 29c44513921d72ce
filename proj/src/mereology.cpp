#include "qmereology/mereology.hpp"

#include "qmereology/dynamics.hpp"
#include "qmereology/parallel.hpp"
#include "qmereology/random.hpp"

#include <cmath>
#include <limits>

namespace qm {

OscillatorSystem build_coupled_oscillators(const OscillatorModel& model) {
    if (!(model.mass > 0.0) || !(model.omega > 0.0)) throw std::invalid_argument("oscillators: mass and omega must be positive");
    if (!std::isfinite(model.lambda)) throw std::invalid_argument("oscillators: coupling must be finite");
    OscillatorSystem sys;
    sys.gpo_A = build_gpo(model.d_A, model.alpha);
    sys.gpo_B = build_gpo(model.d_B, model.alpha);
    auto self = [&](const GpoSystem& g) -> Operator {
        return g.pi * g.pi / (2.0 * model.mass) + 0.5 * model.mass * model.omega * model.omega * g.phi * g.phi;
    };
    sys.H_A = self(sys.gpo_A);
    sys.H_B = self(sys.gpo_B);
    const BipartiteShape shape{model.d_A, model.d_B};
    sys.H = embed(sys.H_A, shape, Factor::A) + embed(sys.H_B, shape, Factor::B) +
            model.lambda * tensor_product(sys.gpo_A.phi, sys.gpo_B.phi);
    sys.H = 0.5 * (sys.H + sys.H.adjoint()).eval();
    sys.split = split_hamiltonian(sys.H, shape);
    return sys;
}

std::string flags_string(unsigned flags) {
    std::string out;
    auto add = [&](const char* s) {
        if (!out.empty()) out += '|';
        out += s;
    };
    if (flags & kQmlViolated) add("qml_violated");
    if (flags & kCpoNonconverged) add("cpo_nonconverged");
    return out;
}

SweepRecord evaluate_factorization(const Operator& H, const FactorizationPoint& theta, const BipartiteShape& shape,
                                   const SweepConfig& config, int index) {
    require_shape(shape);
    if (H.rows() != shape.dim()) throw std::invalid_argument("evaluate_factorization: shape does not match Hamiltonian");
    const auto basis = gell_mann_basis(shape.dim());
    const Operator Hp = transform_hamiltonian(H, factorization_unitary(theta, *basis));
    const HamiltonianSplit split = split_hamiltonian(Hp, shape);

    SweepRecord rec;
    rec.index = index;
    rec.theta = theta.theta;
    rec.theta_norm = theta.norm();
    rec.norm_H_A = split.H_A.norm();
    rec.norm_H_B = split.H_B.norm();
    rec.norm_H_int = split.interaction_norm();
    rec.n_int = static_cast<int>(split.terms.size());
    rec.qml_ratio = split.qml_ratio();
    if (!(rec.qml_ratio >= config.qml_guard)) rec.flags |= kQmlViolated;

    if (split.terms.empty()) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        rec.s_lin_ddot_avg = rec.s_pointer_ddot_avg = rec.s_schwinger = rec.cpo_residual = nan;
        return rec;
    }

    CpoOptions cpo_opts = config.cpo;
    cpo_opts.seed = make_stream(config.seed, 2ull * index + 1)();
    const CandidatePointerObservable cpo = find_cpo(split, cpo_opts);
    rec.cpo_residual = cpo.residual;
    if (!cpo.converged) rec.flags |= kCpoNonconverged;

    const PeakedStateSet set = peaked_states(cpo, config.state_width);
    const int n = static_cast<int>(set.states.size());
    double sum_lin = 0.0, sum_ptr = 0.0, sum_max = 0.0;
    if (config.time_mode == TimeMode::coefficient) {
        for (const ProductState& st : set.states) {
            const double sl = s_lin_ddot(split, st);
            const double sp = s_pointer_ddot(pointer_distribution(split, set.basis_A, st, 2));
            sum_lin += sl;
            sum_ptr += sp;
            sum_max += std::max(sl, sp);
        }
    } else {
        const double t0 = 1.0 / Hp.norm();
        const Propagator U(Hp);
        for (const ProductState& st : set.states) {
            const Ket psi0 = st.joint();
            const Operator rho0 = reduced_state(psi0, shape, Factor::A);
            const Operator rho_t = reduced_state(U.apply(psi0, t0), shape, Factor::A);
            const double sl = linear_entropy(rho_t);
            const double sp = pointer_entropy(rho_t, set.basis_A) - pointer_entropy(rho0, set.basis_A);
            sum_lin += sl;
            sum_ptr += sp;
            sum_max += std::max(sl, sp);
        }
    }
    rec.s_lin_ddot_avg = sum_lin / n;
    rec.s_pointer_ddot_avg = sum_ptr / n;
    rec.s_schwinger = sum_max / n;
    return rec;
}

std::vector<Eigen::VectorXd> sample_thetas(int D, const SweepConfig& config) {
    if (config.n_samples < 0) throw std::invalid_argument("sweep: n_samples must be nonnegative");
    if (!(config.step_sigma > 0.0)) throw std::invalid_argument("sweep: step_sigma must be positive");
    const int n = D * D - 1;
    const double sigma = config.step_sigma / std::sqrt(double(n));
    std::vector<Eigen::VectorXd> thetas{Eigen::VectorXd::Zero(n)};
    for (int k = 1; k <= config.n_samples; ++k) {
        Rng rng = make_stream(config.seed, 2ull * k);
        const Eigen::VectorXd inc = random_gaussian(n, sigma, rng);
        thetas.push_back(config.walk_mode == WalkMode::cumulative ? Eigen::VectorXd(thetas.back() + inc) : inc);
    }
    return thetas;
}

namespace {

std::optional<int> pick_argmin(const std::vector<SweepRecord>& records) {
    std::optional<int> best;
    for (const SweepRecord& r : records) {
        if (r.has(kQmlViolated) || !std::isfinite(r.s_schwinger)) continue;
        if (!best || r.s_schwinger < records[*best].s_schwinger) best = r.index;
    }
    return best;
}

}  // namespace

SweepResult sweep(const Operator& H, const BipartiteShape& shape, const SweepConfig& config, unsigned workers) {
    const std::vector<Eigen::VectorXd> thetas = sample_thetas(shape.dim(), config);
    SweepResult out;
    out.records.resize(thetas.size());
    parallel_for(
        static_cast<int>(thetas.size()),
        [&](int k) { out.records[k] = evaluate_factorization(H, FactorizationPoint{thetas[k]}, shape, config, k); },
        workers);
    out.argmin = pick_argmin(out.records);
    return out;
}

SweepResult descend(const Operator& H, const BipartiteShape& shape, const SweepConfig& config) {
    const int n = shape.dim() * shape.dim() - 1;
    const double sigma = config.step_sigma / std::sqrt(double(n));
    SweepResult out;
    Eigen::VectorXd current = Eigen::VectorXd::Zero(n);
    out.records.push_back(evaluate_factorization(H, FactorizationPoint{current}, shape, config, 0));
    double current_value = out.records.back().s_schwinger;
    for (int k = 1; k <= config.n_samples; ++k) {
        Rng rng = make_stream(config.seed, 2ull * k);
        const Eigen::VectorXd proposal = current + random_gaussian(n, sigma, rng);
        SweepRecord rec = evaluate_factorization(H, FactorizationPoint{proposal}, shape, config, k);
        if (!rec.has(kQmlViolated) && rec.s_schwinger < current_value) {
            current = proposal;
            current_value = rec.s_schwinger;
        }
        out.records.push_back(std::move(rec));
    }
    out.argmin = pick_argmin(out.records);
    return out;
}

Operator scramble_hamiltonian(const Operator& H, double theta_norm, std::uint64_t seed) {
    require_square(H, "scramble_hamiltonian");
    const int D = static_cast<int>(H.rows());
    Rng rng = make_stream(seed, 0xC0FFEEull);
    Eigen::VectorXd theta = random_gaussian(D * D - 1, 1.0, rng);
    theta *= theta_norm / theta.norm();
    return transform_hamiltonian(H, factorization_unitary(FactorizationPoint{theta}, *gell_mann_basis(D)));
}

}  // namespace qm
