#include "qmereology/hilbert.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>

namespace qm {

void require_shape(const BipartiteShape& shape) {
    if (shape.d_A < 1 || shape.d_B < 1) throw std::invalid_argument("bipartite shape: factor dimensions must be positive");
}

PureState::PureState(Ket amplitudes) : amps_(std::move(amplitudes)) {
    if (amps_.size() == 0) throw std::invalid_argument("pure state: empty amplitude vector");
    if (std::abs(amps_.squaredNorm() - 1.0) > kIdentityTol)
        throw std::invalid_argument("pure state: squared norm differs from 1 by more than 1e-12");
}

PureState PureState::normalized(const Ket& v) {
    const double n = v.norm();
    if (!(n > 0.0) || !std::isfinite(n)) throw std::invalid_argument("pure state: cannot normalize a zero vector");
    return PureState(v / n);
}

DensityMatrix::DensityMatrix(Operator rho) : rho_(std::move(rho)) {
    require_square(rho_, "density matrix");
    if (!is_hermitian(rho_)) throw std::invalid_argument("density matrix: not Hermitian");
    if (std::abs(rho_.trace() - cplx(1.0, 0.0)) > kPredicateTol)
        throw std::invalid_argument("density matrix: trace differs from 1");
    Eigen::SelfAdjointEigenSolver<Operator> es(rho_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -kPredicateTol)
        throw std::invalid_argument("density matrix: negative eigenvalue");
}

DensityMatrix DensityMatrix::from_pure(const PureState& psi) { return DensityMatrix(psi.projector()); }

Operator tensor_product(const Operator& X, const Operator& Y) {
    Operator out = Eigen::kroneckerProduct(X, Y).eval();
    return out;
}

Ket tensor_product(const Ket& x, const Ket& y) {
    Ket out(x.size() * y.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) out.segment(i * y.size(), y.size()) = x(i) * y;
    return out;
}

PureState tensor_product(const PureState& x, const PureState& y) {
    return PureState::normalized(tensor_product(x.amplitudes(), y.amplitudes()));
}

DensityMatrix tensor_product(const DensityMatrix& x, const DensityMatrix& y) {
    return DensityMatrix(tensor_product(x.matrix(), y.matrix()));
}

Operator identity(int dim) { return Operator::Identity(dim, dim); }

Operator embed(const Operator& X, const BipartiteShape& shape, Factor on) {
    require_shape(shape);
    if (on == Factor::A) {
        if (X.rows() != shape.d_A) throw std::invalid_argument("embed: operator does not match d_A");
        return tensor_product(X, identity(shape.d_B));
    }
    if (X.rows() != shape.d_B) throw std::invalid_argument("embed: operator does not match d_B");
    return tensor_product(identity(shape.d_A), X);
}

Operator partial_trace(const Operator& rho, const BipartiteShape& shape, Factor keep) {
    require_shape(shape);
    require_square(rho, "partial_trace");
    if (rho.rows() != shape.dim()) throw std::invalid_argument("partial_trace: shape does not match operator dimension");
    const int dA = shape.d_A, dB = shape.d_B;
    if (keep == Factor::A) {
        Operator out(dA, dA);
        for (int i = 0; i < dA; ++i)
            for (int j = 0; j < dA; ++j) out(i, j) = rho.block(i * dB, j * dB, dB, dB).trace();
        return out;
    }
    Operator out = Operator::Zero(dB, dB);
    for (int a = 0; a < dA; ++a) out += rho.block(a * dB, a * dB, dB, dB);
    return out;
}

Operator partial_trace(const DensityMatrix& rho, const BipartiteShape& shape, Factor keep) {
    return partial_trace(rho.matrix(), shape, keep);
}

Operator partial_trace_outer(const Ket& x, const Ket& y, const BipartiteShape& shape, Factor keep) {
    require_shape(shape);
    if (x.size() != shape.dim() || y.size() != shape.dim())
        throw std::invalid_argument("partial_trace: shape does not match state dimension");
    // Column-major (d_B x d_A) view: element (i_B, i_A) is amplitude i_A * d_B + i_B.
    Eigen::Map<const Operator> xt(x.data(), shape.d_B, shape.d_A);
    Eigen::Map<const Operator> yt(y.data(), shape.d_B, shape.d_A);
    if (keep == Factor::A) return xt.transpose() * yt.conjugate();
    return xt * yt.adjoint();
}

Operator reduced_state(const Ket& psi, const BipartiteShape& shape, Factor keep) {
    return partial_trace_outer(psi, psi, shape, keep);
}

Propagator::Propagator(const Operator& H) {
    require_square(H, "evolve");
    if (!is_hermitian(H)) throw std::invalid_argument("evolve: Hamiltonian is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Operator> es(H);
    energies_ = es.eigenvalues();
    vectors_ = es.eigenvectors();
}

Operator Propagator::unitary(double t) const {
    const Ket phases = (energies_.cast<cplx>() * cplx(0.0, -t)).array().exp().matrix();
    return vectors_ * phases.asDiagonal() * vectors_.adjoint();
}

Ket Propagator::apply(const Ket& psi, double t) const {
    if (psi.size() != dim()) throw std::invalid_argument("evolve: state dimension mismatch");
    const Ket phases = (energies_.cast<cplx>() * cplx(0.0, -t)).array().exp().matrix();
    return vectors_ * (phases.asDiagonal() * (vectors_.adjoint() * psi));
}

Operator Propagator::apply(const Operator& rho, double t) const {
    if (rho.rows() != dim()) throw std::invalid_argument("evolve: state dimension mismatch");
    const Operator U = unitary(t);
    return U * rho * U.adjoint();
}

PureState evolve(const Operator& H, const PureState& psi, double t) {
    return PureState(Propagator(H).apply(psi.amplitudes(), t));
}

DensityMatrix evolve(const Operator& H, const DensityMatrix& rho, double t) {
    Operator out = Propagator(H).apply(rho.matrix(), t);
    out = 0.5 * (out + out.adjoint()).eval();
    return DensityMatrix(std::move(out));
}

void fix_column_phases(Operator& V) {
    for (Eigen::Index j = 0; j < V.cols(); ++j)
        for (Eigen::Index k = 0; k < V.rows(); ++k)
            if (std::abs(V(k, j)) > 1e-10) {
                V.col(j) *= std::conj(V(k, j)) / std::abs(V(k, j));
                break;
            }
}

double purity(const Operator& rho) {
    require_square(rho, "purity");
    return (rho.array() * rho.transpose().array()).sum().real();
}

double linear_entropy(const Operator& rho) { return 1.0 - purity(rho); }

double linear_entropy(const DensityMatrix& rho) { return linear_entropy(rho.matrix()); }

}  // namespace qm
