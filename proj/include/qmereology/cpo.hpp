#pragma once

#include "qmereology/dynamics.hpp"
#include "qmereology/factorization.hpp"

#include <cstdint>
#include <vector>

namespace qm {

struct CpoOptions {
    int n_restarts = 8;
    int max_iters = 200;
    double tol = 1e-12;
    std::uint64_t seed = 0;
};

struct CandidatePointerObservable {
    Operator O_A_tilde;             // traceless, Hermitian, unit Frobenius norm
    Operator O_B_tilde;
    Eigen::VectorXd coeffs_A;       // orthonormal Gell-Mann coordinates
    Eigen::VectorXd coeffs_B;
    double residual = 0.0;          // |[H_int, O_A (x) O_B]|_F
    int restarts_used = 0;
    int best_restart = 0;
    int iterations = 0;             // alternating sweeps of the winning restart
    bool converged = false;
    bool degenerate_minimum = false;  // the winning restart resolved a degenerate eigenspace by alignment
    bool tie_broken = false;          // several restarts tied on the residual
    std::vector<double> history;    // squared residual after every half-step of the winning restart
};

double cpo_residual(const HamiltonianSplit& split, const Operator& O_A, const Operator& O_B);

// Alternating minimization of |[H_int, O_A (x) O_B]|_F over unit traceless Hermitian factors.
CandidatePointerObservable find_cpo(const HamiltonianSplit& split, const CpoOptions& options = {});

struct PeakedStateSet {
    std::vector<ProductState> states;
    double width = 0.0;
    Operator basis_A;               // eigenvectors of O_A_tilde, ascending eigenvalue
    Operator basis_B;
    Eigen::VectorXd eigenvalues_A;
};

PeakedStateSet peaked_states(const CandidatePointerObservable& cpo, double width);

}  // namespace qm
