// Slow, direct reference computations used as test oracles. Nothing here calls
// into the library beyond its basic types.
#pragma once

#include "qmereology/hilbert.hpp"
#include "qmereology/random.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <functional>

namespace oracle {

using qm::cplx;
using qm::Ket;
using qm::Operator;

// (X (x) Y)[(i,k),(j,l)] = X[i,j] Y[k,l] with row index i d_Y + k.
inline Operator kron(const Operator& X, const Operator& Y) {
    const int m = static_cast<int>(X.rows()), n = static_cast<int>(Y.rows());
    Operator out(m * n, m * n);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) out(i * n + k, j * n + l) = X(i, j) * Y(k, l);
    return out;
}

inline Ket kron(const Ket& x, const Ket& y) {
    Ket out(x.size() * y.size());
    for (int i = 0; i < x.size(); ++i)
        for (int k = 0; k < y.size(); ++k) out(i * y.size() + k) = x(i) * y(k);
    return out;
}

// Partial traces by the defining index sums.
inline Operator trace_out_B(const Operator& rho, int dA, int dB) {
    Operator out = Operator::Zero(dA, dA);
    for (int i = 0; i < dA; ++i)
        for (int j = 0; j < dA; ++j)
            for (int k = 0; k < dB; ++k) out(i, j) += rho(i * dB + k, j * dB + k);
    return out;
}

inline Operator trace_out_A(const Operator& rho, int dA, int dB) {
    Operator out = Operator::Zero(dB, dB);
    for (int k = 0; k < dB; ++k)
        for (int l = 0; l < dB; ++l)
            for (int i = 0; i < dA; ++i) out(k, l) += rho(i * dB + k, i * dB + l);
    return out;
}

// exp(-iHt) by Pade scaling and squaring, independent of any eigensolver.
inline Operator expm_evolution(const Operator& H, double t) {
    const Operator X = cplx(0.0, -t) * H;
    return X.exp();
}

inline Ket evolve(const Operator& H, const Ket& psi, double t) { return expm_evolution(H, t) * psi; }

inline Operator reduced_A(const Ket& psi, int dA, int dB) {
    return trace_out_B(Operator(psi * psi.adjoint()), dA, dB);
}

inline double linear_entropy(const Operator& rho) { return 1.0 - (rho * rho).trace().real(); }

// Central differences with one Richardson step: error O(h^4).
inline double first_derivative(const std::function<double(double)>& f, double h) {
    auto d = [&](double s) { return (f(s) - f(-s)) / (2.0 * s); };
    return (4.0 * d(h / 2.0) - d(h)) / 3.0;
}

inline double second_derivative(const std::function<double(double)>& f, double h) {
    const double f0 = f(0.0);
    auto d = [&](double s) { return (f(s) - 2.0 * f0 + f(-s)) / (s * s); };
    return (4.0 * d(h / 2.0) - d(h)) / 3.0;
}

inline bool rel_close(double got, double want, double rel, double small_floor, double small_rel) {
    const double tol = std::abs(want) < small_floor ? small_rel : rel;
    return std::abs(got - want) <= tol * std::max(std::abs(want), small_floor);
}

inline Operator random_traceless_hermitian(int d, qm::Rng& rng) {
    Operator X = qm::random_hermitian(d, rng);
    X -= (X.trace() / double(d)) * Operator::Identity(d, d);
    return X;
}

}  // namespace oracle
