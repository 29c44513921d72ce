// qmereology command-line front end.
//
// Exit codes: 0 success, 1 expectation failure (--expect-qc), 2 usage or config error.

#include "qmereology/config.hpp"
#include "qmereology/cpo.hpp"
#include "qmereology/csv.hpp"
#include "qmereology/dynamics.hpp"
#include "qmereology/experiments.hpp"
#include "qmereology/gpo.hpp"
#include "qmereology/mereology.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <iostream>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;
using namespace qm;

namespace {

constexpr const char* kOutputEnv = "QMEREOLOGY_OUTPUT_DIR";

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Flag, then environment, then config file, then the built-in default.
fs::path output_dir(const std::string& flag, const std::optional<std::string>& from_config) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv(kOutputEnv); env && *env) return env;
    if (from_config) return *from_config;
    return ExperimentConfig{}.output_directory;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string join_args(const std::vector<std::string>& v) {
    std::string out;
    for (const auto& s : v) out += (out.empty() ? "" : " ") + s;
    return out;
}

ExperimentConfig config_from(const std::string& path) { return path.empty() ? ExperimentConfig{} : load_config(path); }

void write_resolved(const fs::path& dir, const std::string& text) {
    fs::create_directories(dir);
    std::ofstream(dir / "resolved_config.ini") << text;
}

// ---- gpo ----------------------------------------------------------------

struct GpoArgs {
    int dim = 27;
    std::optional<double> alpha;
    std::vector<std::string> operators{"pi^2"};
    std::string axis = "phi";
    std::string output;
};

int run_gpo(const GpoArgs& a) {
    const auto t0 = std::chrono::steady_clock::now();
    if (a.dim < 3 || a.dim % 2 == 0) throw UsageError("gpo: odd dimension required (got " + std::to_string(a.dim) + ")");
    const GpoSystem g = build_gpo(a.dim, a.alpha);
    const Axis axis = a.axis == "pi" ? Axis::pi : Axis::phi;
    std::vector<Operator> ops;
    for (const auto& spec : a.operators) ops.push_back(parse_operator_spec(spec, g));

    const fs::path dir = output_dir(a.output, std::nullopt);
    Manifest m{"gpo", "", 0.0, {}, {}};
    CsvTable summary({"operator", "collimation"});
    for (std::size_t k = 0; k < ops.size(); ++k) {
        const ShiftProfile prof = shift_profile(schwinger_expand(ops[k], g), axis);
        CsvTable table({"a", "weight"});
        for (int s = -g.l; s <= g.l; ++s) table.row({std::to_string(s), format_real(prof.weight(s))});
        const std::string name = "profile_" + std::to_string(k) + ".csv";
        table.write(dir / name);
        m.artifacts.push_back(name);
        summary.row({a.operators[k], format_real(prof.collimation)});
        std::cout << "collimation " << a.operators[k] << " " << format_real(prof.collimation) << "\n";
    }
    summary.write(dir / "collimation.csv");
    m.artifacts.push_back("collimation.csv");
    m.entries = {{"dim", std::to_string(a.dim)},
                 {"alpha", format_real(g.alpha)},
                 {"beta", format_real(g.beta)},
                 {"axis", a.axis},
                 {"operators", join_args(a.operators)}};
    m.runtime_seconds = seconds_since(t0);
    write_manifest(dir, m);
    return 0;
}

// ---- correlate ----------------------------------------------------------

struct CorrelateArgs {
    CorrelationConfig cfg;
    std::string output;
};

int run_correlate(const CorrelateArgs& a) {
    const auto t0 = std::chrono::steady_clock::now();
    if (a.cfg.d_A < 3 || a.cfg.d_A % 2 == 0) throw UsageError("correlate: odd dimension required");
    if (a.cfg.ensemble < 5) throw UsageError("correlate: --ensemble must be at least 5");
    const CorrelationResult r = run_correlation(a.cfg);
    const fs::path dir = output_dir(a.output, std::nullopt);
    CsvTable table({"instance", "collimation", "variance_rate", "s_pointer_ddot", "s_lin_ddot"});
    for (const auto& row : r.rows)
        table.row({std::to_string(row.instance), format_real(row.collimation), format_real(row.variance_rate),
                   format_real(row.s_pointer_ddot), format_real(row.s_lin_ddot)});
    table.write(dir / "correlation.csv");
    std::cout << "spearman(collimation, variance_rate) = " << format_real(r.spearman_collimation_variance) << "\n"
              << "spearman(s_pointer_ddot, variance_rate) = " << format_real(r.spearman_pointer_variance) << "\n";
    Manifest m{"correlate", "", seconds_since(t0), {}, {"correlation.csv"}};
    m.entries = {{"dim", std::to_string(a.cfg.d_A)},
                 {"ensemble", std::to_string(a.cfg.ensemble)},
                 {"seed", std::to_string(a.cfg.seed)},
                 {"width", format_real(a.cfg.width)},
                 {"environment_dim", std::to_string(a.cfg.d_B)},
                 {"spearman_collimation_variance", format_real(r.spearman_collimation_variance)},
                 {"spearman_pointer_variance", format_real(r.spearman_pointer_variance)}};
    write_manifest(dir, m);
    return 0;
}

// ---- sweep --------------------------------------------------------------

struct SweepArgs {
    std::string config;
    bool expect_qc = false;
    bool descent = false;
    std::string output;
};

int run_sweep(const SweepArgs& a) {
    const auto t0 = std::chrono::steady_clock::now();
    const ExperimentConfig cfg = config_from(a.config);
    const OscillatorSystem sys = build_coupled_oscillators(cfg.model);
    const BipartiteShape shape{cfg.model.d_A, cfg.model.d_B};
    if (!(sys.split.qml_ratio() >= cfg.sweep.qml_guard))
        std::cerr << "warning: model qml ratio " << format_real(sys.split.qml_ratio()) << " is below qml_guard "
                  << format_real(cfg.sweep.qml_guard) << "\n";
    const Operator H = cfg.scramble > 0.0 ? scramble_hamiltonian(sys.H, cfg.scramble, cfg.scramble_seed) : sys.H;
    const SweepResult res = a.descent ? descend(H, shape, cfg.sweep) : sweep(H, shape, cfg.sweep);

    const fs::path dir = output_dir(a.output, cfg.output_directory);
    CsvTable table({"index", "theta_norm", "s_lin_ddot_avg", "s_pointer_ddot_avg", "s_schwinger", "cpo_residual",
                    "qml_ratio", "flags", "norm_H_A", "norm_H_B", "norm_H_int", "n_int"});
    for (const SweepRecord& r : res.records)
        table.row({std::to_string(r.index), format_real(r.theta_norm), format_real(r.s_lin_ddot_avg),
                   format_real(r.s_pointer_ddot_avg), format_real(r.s_schwinger), format_real(r.cpo_residual),
                   format_real(r.qml_ratio), flags_string(r.flags), format_real(r.norm_H_A), format_real(r.norm_H_B),
                   format_real(r.norm_H_int), std::to_string(r.n_int)});
    table.write(dir / "sweep.csv");
    Manifest m{"sweep", resolved_config_text(cfg), 0.0, {}, {"sweep.csv", "resolved_config.ini"}};
    if (cfg.emit_plots) {
        CsvTable plot({"index", "theta_norm", "s_schwinger", "s_lin_ddot_avg", "s_pointer_ddot_avg"});
        for (const SweepRecord& r : res.records)
            plot.row({std::to_string(r.index), format_real(r.theta_norm), format_real(r.s_schwinger),
                      format_real(r.s_lin_ddot_avg), format_real(r.s_pointer_ddot_avg)});
        plot.write(dir / "sweep_plot.csv");
        m.artifacts.push_back("sweep_plot.csv");
    }
    write_resolved(dir, m.resolved_config);

    const std::string argmin = res.argmin ? std::to_string(*res.argmin) : "none";
    if (res.argmin)
        std::cout << "argmin = " << argmin << " (s_schwinger = " << format_real(res.records[*res.argmin].s_schwinger)
                  << ")\n";
    else
        std::cout << "argmin = none (every sample violates the qml guard)\n";
    m.entries = {{"mode", a.descent ? "descent" : "sample"}, {"argmin", argmin}};
    m.runtime_seconds = seconds_since(t0);
    write_manifest(dir, m);

    if (a.expect_qc && res.argmin != 0) {
        std::cerr << "expectation failed: argmin is " << argmin << ", not sample 0\n";
        return 1;
    }
    return 0;
}

// ---- decohere -----------------------------------------------------------

struct DecohereArgs {
    std::string config;
    std::optional<double> t_max;
    int n_steps = 200;
    double self_scale = 1.0;
    std::string output;
};

// First time |x(t)| reaches e^{-1} |x(0)|, linearly interpolated; NaN if never.
double first_e_fold(const std::vector<double>& t, const std::vector<double>& x) {
    const double target = x.front() * std::exp(-1.0);
    for (std::size_t k = 1; k < x.size(); ++k)
        if (x[k] <= target) {
            const double f = (x[k - 1] - target) / (x[k - 1] - x[k]);
            return t[k - 1] + f * (t[k] - t[k - 1]);
        }
    return std::nan("");
}

int run_decohere(const DecohereArgs& a) {
    const auto t0 = std::chrono::steady_clock::now();
    if (a.n_steps < 1) throw UsageError("decohere: --n-steps must be at least 1");
    if (!(a.self_scale >= 0.0)) throw UsageError("decohere: --self-scale must be nonnegative");
    if (a.t_max && !(*a.t_max > 0.0)) throw UsageError("decohere: --t-max must be positive");
    const ExperimentConfig cfg = config_from(a.config);
    const OscillatorSystem sys = build_coupled_oscillators(cfg.model);
    const BipartiteShape shape{cfg.model.d_A, cfg.model.d_B};
    const Operator H = a.self_scale * (embed(sys.H_A, shape, Factor::A) + embed(sys.H_B, shape, Factor::B)) +
                       cfg.model.lambda * tensor_product(sys.gpo_A.phi, sys.gpo_B.phi);
    const HamiltonianSplit split = split_hamiltonian(H, shape);

    // Pointer basis from the interaction when there is one, else the phi eigenbasis.
    const Operator basis = split.terms.empty() ? identity(shape.d_A) : joint_pointer_basis(split);
    const ProductState state(PureState::normalized(uniform_amplitudes(basis)),
                             PureState::normalized(uniform_amplitudes(identity(shape.d_B))));
    const int d = shape.d_A;
    Eigen::MatrixXd tau = Eigen::MatrixXd::Constant(d, d, std::numeric_limits<double>::infinity());
    Eigen::MatrixXd gamma = Eigen::MatrixXd::Zero(d, d);
    if (!split.terms.empty()) {
        const DecoherenceModel dm = decoherence_rates(split, state);
        tau = dm.tau;
        gamma = dm.Gamma;
    }
    double tau_min = std::numeric_limits<double>::infinity();
    for (int j = 0; j < d; ++j)
        for (int k = j + 1; k < d; ++k) tau_min = std::min(tau_min, tau(j, k));
    const double t_max = a.t_max ? *a.t_max : (std::isfinite(tau_min) ? 3.0 * tau_min : 1.0);

    std::vector<std::string> header{"t", "s_lin"};
    for (int j = 0; j < d; ++j)
        for (int k = j; k < d; ++k) header.push_back("abs_rho_" + std::to_string(j) + "_" + std::to_string(k));
    CsvTable table(header);
    const Propagator U(H);
    const Ket psi0 = state.joint();
    std::vector<double> times;
    std::vector<std::vector<double>> mags(d * d);
    for (int s = 0; s <= a.n_steps; ++s) {
        const double t = t_max * s / a.n_steps;
        const Operator rho = basis.adjoint() * reduced_state(U.apply(psi0, t), shape, Factor::A) * basis;
        std::vector<std::string> row{format_real(t), format_real(linear_entropy(rho))};
        for (int j = 0; j < d; ++j)
            for (int k = j; k < d; ++k) {
                row.push_back(format_real(std::abs(rho(j, k))));
                mags[j * d + k].push_back(std::abs(rho(j, k)));
            }
        times.push_back(t);
        table.row(std::move(row));
    }
    const fs::path dir = output_dir(a.output, cfg.output_directory);
    table.write(dir / "decohere.csv");

    CsvTable summary({"j", "k", "gamma", "tau_predicted", "tau_extracted"});
    for (int j = 0; j < d; ++j)
        for (int k = j + 1; k < d; ++k)
            summary.row({std::to_string(j), std::to_string(k), format_real(gamma(j, k)), format_real(tau(j, k)),
                         format_real(first_e_fold(times, mags[j * d + k]))});
    summary.write(dir / "decohere_summary.csv");
    std::cout << "shortest predicted tau = " << format_real(tau_min) << ", trajectory to t = " << format_real(t_max)
              << "\n";

    Manifest m{"decohere", resolved_config_text(cfg), 0.0, {}, {"decohere.csv", "decohere_summary.csv", "resolved_config.ini"}};
    write_resolved(dir, m.resolved_config);
    m.entries = {{"t_max", format_real(t_max)},
                 {"n_steps", std::to_string(a.n_steps)},
                 {"self_scale", format_real(a.self_scale)}};
    m.runtime_seconds = seconds_since(t0);
    write_manifest(dir, m);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quasi-classical factorizations of a finite-dimensional Hamiltonian"};
    app.set_version_flag("--version", std::string(QMEREOLOGY_VERSION));
    app.require_subcommand(1);

    GpoArgs gpo;
    auto* c_gpo = app.add_subcommand("gpo", "Shift profile and collimation of operators built from phi and pi");
    c_gpo->add_option("--dim", gpo.dim, "Odd Hilbert-space dimension")->capture_default_str();
    c_gpo->add_option("--alpha", gpo.alpha, "GPO scale (default sqrt(2 pi / d))");
    c_gpo->add_option("--operator", gpo.operators, "pi^N, phi^N, cos(pi), cos(phi) or random(SEED); repeatable")
        ->capture_default_str();
    c_gpo->add_option("--axis", gpo.axis, "Shift axis")->check(CLI::IsMember({"phi", "pi"}))->capture_default_str();
    c_gpo->add_option("--output", gpo.output, "Output directory");

    CorrelateArgs cor;
    auto* c_cor = app.add_subcommand("correlate", "Collimation against variance growth over an ensemble");
    c_cor->add_option("--dim", cor.cfg.d_A, "Odd system dimension")->capture_default_str();
    c_cor->add_option("--ensemble", cor.cfg.ensemble, "Ensemble size, at least 5")->capture_default_str();
    c_cor->add_option("--seed", cor.cfg.seed, "Master seed")->capture_default_str();
    c_cor->add_option("--width", cor.cfg.width, "Width of the reference state")->capture_default_str();
    c_cor->add_option("--output", cor.output, "Output directory");

    SweepArgs sw;
    auto* c_sw = app.add_subcommand("sweep", "Schwinger entropy over sampled factorizations of coupled oscillators");
    c_sw->add_option("--config", sw.config, "Config file")->check(CLI::ExistingFile);
    c_sw->add_flag("--expect-qc", sw.expect_qc, "Exit 1 unless sample 0 is the argmin");
    c_sw->add_flag("--descent", sw.descent, "Greedy accept/reject instead of plain sampling");
    c_sw->add_option("--output", sw.output, "Output directory");

    DecohereArgs dc;
    auto* c_dc = app.add_subcommand("decohere", "Reduced-state trajectory in the pointer basis");
    c_dc->add_option("--config", dc.config, "Config file")->check(CLI::ExistingFile);
    c_dc->add_option("--t-max", dc.t_max, "Final time (default three times the shortest predicted tau)");
    c_dc->add_option("--n-steps", dc.n_steps, "Number of time steps")->capture_default_str();
    c_dc->add_option("--self-scale", dc.self_scale, "Factor applied to both self-Hamiltonians")->capture_default_str();
    c_dc->add_option("--output", dc.output, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*c_gpo) return run_gpo(gpo);
        if (*c_cor) return run_correlate(cor);
        if (*c_sw) return run_sweep(sw);
        if (*c_dc) return run_decohere(dc);
    } catch (const SpecError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
