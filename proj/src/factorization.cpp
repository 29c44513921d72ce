#include "qmereology/factorization.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <map>
#include <mutex>

namespace qm {

namespace {

const double kSqrt2 = std::sqrt(2.0);

Operator hermitian_part(const Operator& X) { return 0.5 * (X + X.adjoint()); }

}  // namespace

GellMannBasis build_gell_mann_basis(int D) {
    if (D < 2) throw std::invalid_argument("gell_mann_basis: dimension must be at least 2");
    GellMannBasis basis;
    basis.dim = D;
    basis.generators.reserve(D * D - 1);
    for (int j = 0; j < D; ++j)
        for (int k = j + 1; k < D; ++k) {
            Operator M = Operator::Zero(D, D);
            M(j, k) = 1.0;
            M(k, j) = 1.0;
            basis.generators.push_back(std::move(M));
        }
    for (int j = 0; j < D; ++j)
        for (int k = j + 1; k < D; ++k) {
            Operator M = Operator::Zero(D, D);
            M(j, k) = cplx(0.0, -1.0);
            M(k, j) = cplx(0.0, 1.0);
            basis.generators.push_back(std::move(M));
        }
    for (int l = 1; l < D; ++l) {
        Operator M = Operator::Zero(D, D);
        const double s = std::sqrt(2.0 / (l * (l + 1.0)));
        for (int j = 0; j < l; ++j) M(j, j) = s;
        M(l, l) = -l * s;
        basis.generators.push_back(std::move(M));
    }

    basis.trace_rows = Eigen::MatrixXcd::Zero(D * D - 1, D * D);
    for (int a = 0; a < basis.size(); ++a) {
        const Operator& L = basis.generators[a];
        for (int j = 0; j < D; ++j)
            for (int i = 0; i < D; ++i) basis.trace_rows(a, i + j * D) = L(j, i);
    }
    return basis;
}

std::shared_ptr<const GellMannBasis> gell_mann_basis(int D) {
    static std::mutex mutex;
    static std::map<int, std::shared_ptr<const GellMannBasis>> cache;
    {
        std::lock_guard<std::mutex> lock(mutex);
        auto it = cache.find(D);
        if (it != cache.end()) return it->second;
    }
    auto built = std::make_shared<const GellMannBasis>(build_gell_mann_basis(D));
    std::lock_guard<std::mutex> lock(mutex);
    return cache.emplace(D, std::move(built)).first->second;
}

Eigen::VectorXd GellMannBasis::coordinates(const Operator& X) const {
    if (X.rows() != dim || X.cols() != dim) throw std::invalid_argument("coordinates: dimension mismatch");
    Eigen::Map<const Eigen::VectorXcd> v(X.data(), X.size());
    return (trace_rows * v).real() / kSqrt2;
}

Operator GellMannBasis::combine(const Eigen::VectorXd& c) const {
    if (c.size() != size()) throw std::invalid_argument("combine: coefficient count does not match basis size");
    Operator out = Operator::Zero(dim, dim);
    for (int a = 0; a < size(); ++a)
        if (c(a) != 0.0) out += (c(a) / kSqrt2) * generators[a];
    return out;
}

Operator factorization_unitary(const FactorizationPoint& p, const GellMannBasis& basis) {
    if (p.theta.size() != basis.size())
        throw std::invalid_argument("factorization_unitary: theta has " + std::to_string(p.theta.size()) +
                                    " entries, basis has " + std::to_string(basis.size()));
    if (!p.theta.allFinite()) throw std::invalid_argument("factorization_unitary: non-finite theta");
    Operator K = Operator::Zero(basis.dim, basis.dim);
    for (int a = 0; a < basis.size(); ++a)
        if (p.theta(a) != 0.0) K += p.theta(a) * basis.generators[a];
    Eigen::SelfAdjointEigenSolver<Operator> es(K);
    const Ket phases = (es.eigenvalues().cast<cplx>() * cplx(0.0, 1.0)).array().exp().matrix();
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

Operator transform_hamiltonian(const Operator& H, const Operator& U) {
    require_same_dim(H, U, "transform_hamiltonian");
    if (!is_unitary(U)) throw std::invalid_argument("transform_hamiltonian: U is not unitary");
    return hermitian_part(U.adjoint() * H * U);
}

Operator HamiltonianSplit::self_part() const { return embed(H_A, shape, Factor::A) + embed(H_B, shape, Factor::B); }

Operator HamiltonianSplit::reconstruct() const {
    Operator H = (trace_term / shape.dim()) * identity(shape.dim()) + self_part();
    for (const InteractionTerm& t : terms) H += t.lambda * tensor_product(t.A, t.B);
    return H;
}

double HamiltonianSplit::qml_ratio() const {
    const double s = self_norm();
    if (s == 0.0) return std::numeric_limits<double>::infinity();
    return interaction_norm() / s;
}

double apply_sign_convention(Operator& X) {
    const double m = X.cwiseAbs().maxCoeff();
    if (m == 0.0) return 1.0;
    for (Eigen::Index i = 0; i < X.rows(); ++i)
        for (Eigen::Index j = 0; j < X.cols(); ++j) {
            const cplx x = X(i, j);
            if (std::abs(x) < m * (1.0 - 1e-9)) continue;
            const double key = std::abs(x.real()) > 1e-12 * m ? x.real() : x.imag();
            const double sign = key < 0.0 ? -1.0 : 1.0;
            if (sign < 0.0) X = -X;
            return sign;
        }
    return 1.0;
}

HamiltonianSplit split_hamiltonian(const Operator& H, const BipartiteShape& shape) {
    require_shape(shape);
    require_square(H, "split_hamiltonian");
    if (H.rows() != shape.dim()) throw std::invalid_argument("split_hamiltonian: shape does not match Hamiltonian dimension");
    if (shape.d_A < 2 || shape.d_B < 2) throw std::invalid_argument("split_hamiltonian: both factors need dimension >= 2");
    if (!is_hermitian(H)) throw std::invalid_argument("split_hamiltonian: Hamiltonian is not Hermitian");

    const int dA = shape.d_A, dB = shape.d_B, D = shape.dim();
    HamiltonianSplit s;
    s.shape = shape;
    s.trace_term = H.trace().real();
    const Operator R = H - (s.trace_term / D) * identity(D);
    s.H_A = hermitian_part(partial_trace(R, shape, Factor::A) / double(dB));
    s.H_B = hermitian_part(partial_trace(R, shape, Factor::B) / double(dA));
    s.interaction = R - s.self_part();

    // Realigned interaction: element ((iA, jA), (iB, jB)) = H_int((iA, iB), (jA, jB)).
    Eigen::MatrixXcd realigned(dA * dA, dB * dB);
    for (int iA = 0; iA < dA; ++iA)
        for (int jA = 0; jA < dA; ++jA)
            for (int iB = 0; iB < dB; ++iB)
                for (int jB = 0; jB < dB; ++jB)
                    realigned(iA + jA * dA, iB + jB * dB) = s.interaction(iA * dB + iB, jA * dB + jB);

    const auto basisA = gell_mann_basis(dA);
    const auto basisB = gell_mann_basis(dB);
    s.coeff_matrix = (basisA->trace_rows * realigned * basisB->trace_rows.transpose()).real() / 4.0;

    // In orthonormal coordinates the coefficient matrix is 2 h_ab.
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(2.0 * s.coeff_matrix, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& sv = svd.singularValues();
    const double lam_max = sv.size() > 0 ? sv(0) : 0.0;
    const double floor = std::max(1e-12 * lam_max, 1e-12 * H.norm());
    for (Eigen::Index k = 0; k < sv.size(); ++k) {
        if (!(sv(k) > floor)) continue;
        InteractionTerm t;
        t.lambda = sv(k);
        t.A = hermitian_part(basisA->combine(svd.matrixU().col(k)));
        t.B = hermitian_part(basisB->combine(svd.matrixV().col(k)));
        if (apply_sign_convention(t.A) < 0.0) t.B = -t.B;
        s.terms.push_back(std::move(t));
    }
    return s;
}

}  // namespace qm
