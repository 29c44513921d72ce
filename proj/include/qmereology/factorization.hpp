#pragma once

#include "qmereology/hilbert.hpp"

#include <memory>
#include <vector>

namespace qm {

// Generalized Gell-Mann generators: symmetric, antisymmetric, then diagonal,
// with Tr(L_a L_b) = 2 delta_ab.
struct GellMannBasis {
    int dim = 0;
    std::vector<Operator> generators;
    // Row a holds the coefficients that give Tr(L_a X) against a column-major vec(X).
    Eigen::MatrixXcd trace_rows;

    int size() const { return static_cast<int>(generators.size()); }
    // Coordinates in the orthonormal basis L_a / sqrt(2).
    Eigen::VectorXd coordinates(const Operator& X) const;
    // sum_a c_a L_a / sqrt(2)
    Operator combine(const Eigen::VectorXd& c) const;
};

GellMannBasis build_gell_mann_basis(int D);
// Cached per dimension; entries are never modified after insertion.
std::shared_ptr<const GellMannBasis> gell_mann_basis(int D);

struct FactorizationPoint {
    Eigen::VectorXd theta;

    static FactorizationPoint zero(int D) { return {Eigen::VectorXd::Zero(D * D - 1)}; }
    double norm() const { return theta.norm(); }
};

// exp(i sum_a theta_a L_a)
Operator factorization_unitary(const FactorizationPoint& p, const GellMannBasis& basis);
// U^dagger H U
Operator transform_hamiltonian(const Operator& H, const Operator& U);

struct InteractionTerm {
    double lambda = 0.0;
    Operator A;
    Operator B;
};

struct HamiltonianSplit {
    BipartiteShape shape;
    double trace_term = 0.0;
    Operator H_A;
    Operator H_B;
    Operator interaction;          // exact remainder H - h0/D - H_A (x) I - I (x) H_B
    Eigen::MatrixXd coeff_matrix;  // h_ab in the unnormalized generator basis
    std::vector<InteractionTerm> terms;

    Operator self_part() const;
    Operator reconstruct() const;
    double self_norm() const { return self_part().norm(); }
    double interaction_norm() const { return interaction.norm(); }
    // |H_int|_F / |H_A (x) I + I (x) H_B|_F, infinite without self terms.
    double qml_ratio() const;
};

HamiltonianSplit split_hamiltonian(const Operator& H, const BipartiteShape& shape);

// Flip X so its largest-magnitude entry has positive real part (positive
// imaginary part when that entry is purely imaginary). Returns the sign applied.
double apply_sign_convention(Operator& X);

}  // namespace qm
