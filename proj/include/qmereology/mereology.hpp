#pragma once

#include "qmereology/cpo.hpp"
#include "qmereology/factorization.hpp"
#include "qmereology/gpo.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace qm {

struct OscillatorModel {
    int d_A = 5;
    int d_B = 5;
    double mass = 1.0;
    double omega = 1.0;
    double lambda = 20.0;
    std::optional<double> alpha;   // GPO scale, default sqrt(2 pi / d) per factor
};

struct OscillatorSystem {
    Operator H;
    HamiltonianSplit split;
    GpoSystem gpo_A;
    GpoSystem gpo_B;
    Operator H_A;   // pi^2 / 2m + m w^2 phi^2 / 2 before trace removal
    Operator H_B;
};

// H = H_A (x) I + I (x) H_B + lambda phi_A (x) phi_B.
OscillatorSystem build_coupled_oscillators(const OscillatorModel& model);

enum class WalkMode { independent, cumulative };
enum class TimeMode { coefficient, evolved_t0 };

struct SweepConfig {
    std::uint64_t seed = 1;
    int n_samples = 50;
    double step_sigma = 0.05;   // expected norm of one theta increment
    WalkMode walk_mode = WalkMode::cumulative;
    TimeMode time_mode = TimeMode::coefficient;
    double state_width = 0.0;
    double qml_guard = 2.0;
    CpoOptions cpo;
};

enum RecordFlag : unsigned {
    kQmlViolated = 1u << 0,
    kCpoNonconverged = 1u << 1,
};

struct SweepRecord {
    int index = 0;
    Eigen::VectorXd theta;
    double theta_norm = 0.0;
    double s_lin_ddot_avg = 0.0;
    double s_pointer_ddot_avg = 0.0;
    double s_schwinger = 0.0;
    double cpo_residual = 0.0;
    double qml_ratio = 0.0;
    unsigned flags = 0;
    double norm_H_A = 0.0;
    double norm_H_B = 0.0;
    double norm_H_int = 0.0;
    int n_int = 0;

    bool has(RecordFlag f) const { return (flags & f) != 0; }
};

std::string flags_string(unsigned flags);

// Steps 1-4 for one factorization; the CPO stream is derived from (config.seed, index).
SweepRecord evaluate_factorization(const Operator& H, const FactorizationPoint& theta, const BipartiteShape& shape,
                                   const SweepConfig& config, int index = 0);

// Sample 0 is theta = 0. Increments have i.i.d. N(0, sigma^2 / (D^2 - 1)) components.
std::vector<Eigen::VectorXd> sample_thetas(int D, const SweepConfig& config);

struct SweepResult {
    std::vector<SweepRecord> records;
    std::optional<int> argmin;   // empty when every record violates the QML guard
};

SweepResult sweep(const Operator& H, const BipartiteShape& shape, const SweepConfig& config, unsigned workers = 0);

// Greedy variant: a proposal replaces the current point only if it lowers s_schwinger.
SweepResult descend(const Operator& H, const BipartiteShape& shape, const SweepConfig& config);

// H rotated by a random factorization unitary of the given theta norm.
Operator scramble_hamiltonian(const Operator& H, double theta_norm, std::uint64_t seed);

}  // namespace qm
