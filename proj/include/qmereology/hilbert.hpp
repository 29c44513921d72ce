#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace qm {

template <typename Real>
using OperatorT = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using KetT = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;

using cplx = std::complex<double>;
using Operator = OperatorT<double>;
using Ket = KetT<double>;

inline constexpr double kPredicateTol = 1e-10;
inline constexpr double kIdentityTol = 1e-12;

struct BipartiteShape {
    int d_A = 0;
    int d_B = 0;

    int dim() const { return d_A * d_B; }
};

enum class Factor { A, B };

void require_shape(const BipartiteShape& shape);

template <typename Derived>
void require_square(const Eigen::MatrixBase<Derived>& X, const char* what) {
    if (X.rows() != X.cols() || X.rows() == 0)
        throw std::invalid_argument(std::string(what) + ": operator must be square and non-empty");
}

template <typename DX, typename DY>
void require_same_dim(const Eigen::MatrixBase<DX>& X, const Eigen::MatrixBase<DY>& Y, const char* what) {
    if (X.rows() != Y.rows() || X.cols() != Y.cols())
        throw std::invalid_argument(std::string(what) + ": dimension mismatch (" + std::to_string(X.rows()) + " vs " +
                                    std::to_string(Y.rows()) + ")");
}

// Entrywise test |X - X^dagger| <= tol.
template <typename Derived>
bool is_hermitian(const Eigen::MatrixBase<Derived>& X, double tol = kPredicateTol) {
    if (X.rows() != X.cols()) return false;
    return (X - X.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

// Entrywise test |U^dagger U - I| <= tol.
template <typename Derived>
bool is_unitary(const Eigen::MatrixBase<Derived>& U, double tol = kPredicateTol) {
    if (U.rows() != U.cols()) return false;
    using Plain = typename Derived::PlainObject;
    return (U.adjoint() * U - Plain::Identity(U.rows(), U.cols())).cwiseAbs().maxCoeff() <= tol;
}

template <typename DX, typename DY>
typename DX::PlainObject commutator(const Eigen::MatrixBase<DX>& X, const Eigen::MatrixBase<DY>& Y) {
    require_same_dim(X, Y, "commutator");
    return X * Y - Y * X;
}

template <typename DX, typename DY>
typename DX::PlainObject anticommutator(const Eigen::MatrixBase<DX>& X, const Eigen::MatrixBase<DY>& Y) {
    require_same_dim(X, Y, "anticommutator");
    return X * Y + Y * X;
}

template <typename Derived>
typename Derived::RealScalar frobenius_norm(const Eigen::MatrixBase<Derived>& X) {
    return X.norm();
}

// <psi|X|psi>
template <typename DX, typename DV>
typename DX::Scalar expectation(const Eigen::MatrixBase<DX>& X, const Eigen::MatrixBase<DV>& psi) {
    static_assert(DV::ColsAtCompileTime == 1, "expectation: expects a column vector");
    if (X.cols() != psi.rows()) throw std::invalid_argument("expectation: dimension mismatch");
    return psi.dot(X * psi);
}

// Tr(X rho); only the diagonal of the product is formed.
template <typename DX, typename DR>
typename DX::Scalar expectation_mixed(const Eigen::MatrixBase<DX>& X, const Eigen::MatrixBase<DR>& rho) {
    require_same_dim(X, rho, "expectation");
    return (X.transpose().array() * rho.array()).sum();
}

class PureState {
public:
    // Throws unless |amplitudes|^2 = 1 within 1e-12.
    explicit PureState(Ket amplitudes);
    static PureState normalized(const Ket& v);

    const Ket& amplitudes() const { return amps_; }
    int dim() const { return static_cast<int>(amps_.size()); }
    Operator projector() const { return amps_ * amps_.adjoint(); }

private:
    Ket amps_;
};

class DensityMatrix {
public:
    // Throws unless Hermitian, unit trace and positive semidefinite within tolerance.
    explicit DensityMatrix(Operator rho);
    static DensityMatrix from_pure(const PureState& psi);

    const Operator& matrix() const { return rho_; }
    int dim() const { return static_cast<int>(rho_.rows()); }

private:
    Operator rho_;
};

Operator tensor_product(const Operator& X, const Operator& Y);
Ket tensor_product(const Ket& x, const Ket& y);
PureState tensor_product(const PureState& x, const PureState& y);
DensityMatrix tensor_product(const DensityMatrix& x, const DensityMatrix& y);

Operator identity(int dim);
// X (x) I_{d_B} or I_{d_A} (x) X depending on the factor X lives on.
Operator embed(const Operator& X, const BipartiteShape& shape, Factor on);

Operator partial_trace(const Operator& rho, const BipartiteShape& shape, Factor keep);
Operator partial_trace(const DensityMatrix& rho, const BipartiteShape& shape, Factor keep);
// Tr_other(|x><y|) without forming the D x D outer product.
Operator partial_trace_outer(const Ket& x, const Ket& y, const BipartiteShape& shape, Factor keep);
Operator reduced_state(const Ket& psi, const BipartiteShape& shape, Factor keep);

// exp(-iHt) from one spectral decomposition, reused across times.
class Propagator {
public:
    explicit Propagator(const Operator& H);

    Operator unitary(double t) const;
    Ket apply(const Ket& psi, double t) const;
    Operator apply(const Operator& rho, double t) const;

    const Eigen::VectorXd& energies() const { return energies_; }
    const Operator& eigenvectors() const { return vectors_; }
    int dim() const { return static_cast<int>(energies_.size()); }

private:
    Eigen::VectorXd energies_;
    Operator vectors_;
};

PureState evolve(const Operator& H, const PureState& psi, double t);
DensityMatrix evolve(const Operator& H, const DensityMatrix& rho, double t);

// Rotate each column so its first entry above 1e-10 in magnitude is real and positive.
void fix_column_phases(Operator& V);

double purity(const Operator& rho);
double linear_entropy(const Operator& rho);
double linear_entropy(const DensityMatrix& rho);

}  // namespace qm
