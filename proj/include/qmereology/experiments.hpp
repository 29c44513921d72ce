#pragma once

#include "qmereology/gpo.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qm {

// Spearman rank correlation with average ranks for ties.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

class SpecError : public std::invalid_argument {
public:
    SpecError(const std::string& message, std::string token)
        : std::invalid_argument(message), token_(std::move(token)) {}
    const std::string& token() const { return token_; }

private:
    std::string token_;
};

// Operator mini-language: pi^N, phi^N, cos(pi), random(SEED).
Operator parse_operator_spec(const std::string& spec, const GpoSystem& g);

// Traceless part scaled to unit Frobenius norm.
Operator unit_traceless(const Operator& M);

struct CorrelationConfig {
    int d_A = 27;
    int ensemble = 30;
    std::uint64_t seed = 1;
    double width = 1.0;      // Gaussian width of the reference state in phi-eigenstate index units
    int d_B = 3;
    double coupling = 1.0;   // lambda of the phi_A (x) phi_B monitoring term
};

struct CorrelationRow {
    int instance = 0;
    std::string family;
    double mix = 0.0;        // weight of the random component
    double collimation = 0.0;
    double variance_rate = 0.0;
    double s_pointer_ddot = 0.0;
    double s_lin_ddot = 0.0;
};

struct CorrelationResult {
    std::vector<CorrelationRow> rows;
    double spearman_collimation_variance = 0.0;
    double spearman_pointer_variance = 0.0;
};

// Self-Hamiltonians interpolating between collimated polynomials in (phi, pi)
// and one random Hermitian direction, each monitored through phi_A (x) phi_B.
CorrelationResult run_correlation(const CorrelationConfig& config, unsigned workers = 0);

}  // namespace qm
