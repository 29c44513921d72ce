#pragma once

#include "qmereology/factorization.hpp"
#include "qmereology/hilbert.hpp"

namespace qm {

struct ProductState {
    PureState psi_A;
    PureState psi_B;

    ProductState(PureState a, PureState b) : psi_A(std::move(a)), psi_B(std::move(b)) {}

    Ket joint() const { return tensor_product(psi_A.amplitudes(), psi_B.amplitudes()); }
    BipartiteShape shape() const { return {psi_A.dim(), psi_B.dim()}; }
};

void require_state_matches(const HamiltonianSplit& split, const ProductState& state, const char* what);

// Coefficient c of S_lin(t) = c t^2 + O(t^3) for the reduced state of A. This
// is the t^2 coefficient itself, not the second derivative (which is 2c).
double s_lin_ddot(const HamiltonianSplit& split, const ProductState& state);

struct OracleFit {
    double coefficient = 0.0;
    double rms_residual = 0.0;
    bool window_ok = true;   // t_max |H|_F <= 0.05
};

// Exact evolution sampled at t_k = k t_max / n, k = 1..n; least squares of
// c2 t^2 + c3 t^3 + c4 t^4 through the origin; returns c2.
OracleFit s_lin_oracle(const Operator& H, const ProductState& state, const BipartiteShape& shape, double t_max,
                       int n_points);

enum class VarianceMode { general, qml };

// d/dt Var(O_A) at t = 0.
double variance_rate(const HamiltonianSplit& split, const Operator& O_A, const ProductState& state, VarianceMode mode);

struct QmlCheck {
    double commutator_norm = 0.0;   // |[O_A (x) I, H_int]|_F = sqrt(sum_a lambda_a^2 |[O_A, A_a]|_F^2)
    double threshold = 0.0;
    bool holds = false;
};

QmlCheck check_qml(const HamiltonianSplit& split, const Operator& O_A, double relative_threshold = 1e-8);

struct PointerDistribution {
    Operator basis;   // columns are the pointer states
    Eigen::VectorXd p;
    Eigen::VectorXd p_dot;
    Eigen::VectorXd p_ddot;
    int order = 0;
};

PointerDistribution pointer_distribution(const HamiltonianSplit& split, const Operator& basis,
                                         const ProductState& state, int order);

// -2 sum_j (p_dot_j^2 + p_j p_ddot_j)
double s_pointer_ddot(const PointerDistribution& dist);
// Closed form valid when every projector onto a basis column commutes with every A_a.
double s_pointer_ddot_qml(const HamiltonianSplit& split, const Operator& basis, const ProductState& state);
double pointer_entropy(const Operator& rho_A, const Operator& basis);

// Discrete Gaussian exp(-(k - j)^2 / (4 w^2)) over the columns of basis; w = 0 gives column j.
Ket peaked_amplitudes(const Operator& basis, int center, double width);
// Equal positive amplitudes on every column of basis.
Ket uniform_amplitudes(const Operator& basis);

struct DecoherenceModel {
    Operator H_eff_A;
    Operator pointer_basis;
    Eigen::MatrixXd pointer_eigenvalues;   // row a holds a_j for term a
    Eigen::MatrixXd Gamma;
    Eigen::MatrixXd tau;                   // infinite where Gamma vanishes
};

struct ReducedEvolution {
    Operator unitary_part;
    Operator decoherence_part;
    Operator rho_A;
    Operator H_eff_A;
};

// Unitary and decoherence pieces of d rho_A / dt at time t, with rho_A(t) from exact evolution.
ReducedEvolution reduced_evolution_terms(const HamiltonianSplit& split, const ProductState& state, double t);

// Common eigenbasis of the interaction factors A_a, sorted by eigenvalue tuple.
Operator joint_pointer_basis(const HamiltonianSplit& split, double commute_tol = 1e-8);
DecoherenceModel decoherence_rates(const HamiltonianSplit& split, const ProductState& state);

}  // namespace qm
