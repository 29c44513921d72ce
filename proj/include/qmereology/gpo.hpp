#pragma once

#include "qmereology/hilbert.hpp"

#include <optional>

namespace qm {

// Clock/shift pair on an odd dimension d = 2l + 1 with the conjugate operators
// phi and pi. Basis position p holds the phi eigenvalue with label j = p - l.
struct GpoSystem {
    int d = 0;
    int l = 0;
    double alpha = 0.0;
    double beta = 0.0;
    cplx omega;
    Operator shift_A;
    Operator clock_B;
    Operator phi;
    Operator pi;
    Operator sylvester_S;

    int position(int label) const { return label + l; }
};

double default_alpha(int d);

GpoSystem build_gpo(int d, std::optional<double> alpha = std::nullopt);

// A^a and B^b for any integer exponent (taken mod d).
Operator shift_power(const GpoSystem& g, int a);
Operator clock_power(const GpoSystem& g, int b);
// B^b A^a
Operator schwinger_element(const GpoSystem& g, int b, int a);

struct SchwingerExpansion {
    int d = 0;
    int l = 0;
    Eigen::MatrixXcd coeffs;      // row b + l, column a + l
    Eigen::MatrixXd normalized;   // |m_ba| / sum |m|, zero for the zero operator

    cplx m(int b, int a) const { return coeffs(b + l, a + l); }
    double m_tilde(int b, int a) const { return normalized(b + l, a + l); }
};

SchwingerExpansion schwinger_expand(const Operator& M, const GpoSystem& g);
Operator reconstruct(const SchwingerExpansion& e, const GpoSystem& g);

enum class Axis { phi, pi };

struct ShiftProfile {
    Axis axis = Axis::phi;
    Eigen::VectorXd weights;   // index k + l holds shift k
    double collimation = 0.0;

    double weight(int k) const { return weights(k + (weights.size() - 1) / 2); }
};

// phi marginalizes over b (weights indexed by a), pi over a.
ShiftProfile shift_profile(const SchwingerExpansion& e, Axis axis);
double collimation(const Operator& M, const GpoSystem& g, Axis axis);

Operator nested_commutator(const Operator& X, const Operator& H, int n);

struct EomResidual {
    double r_pi = 0.0;
    double r_phi = 0.0;
};

// r_pi = |i[H, pi] + dH/dphi|_F and r_phi = |i[H, phi] - dH/dpi|_F.
EomResidual eom_residual(const Operator& H, const GpoSystem& g, const Operator& dH_dphi, const Operator& dH_dpi);
// Same residual restricted to the central (2w+1) x (2w+1) block, away from the lattice edges.
EomResidual eom_residual_interior(const Operator& H, const GpoSystem& g, const Operator& dH_dphi,
                                  const Operator& dH_dpi, int half_width);

// max |[phi, pi]_jk - i delta_jk| over the central (2w+1) x (2w+1) block.
double ccr_block_deviation(const GpoSystem& g, int half_width = 1);

}  // namespace qm
