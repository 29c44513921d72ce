#include "qmereology/cpo.hpp"

#include "qmereology/random.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

namespace qm {

namespace {

struct Entry {
    int row;
    int col;
    cplx value;
};

// Nonzero entries of the orthonormal generators L_a / sqrt(2).
std::vector<std::vector<Entry>> sparse_generators(const GellMannBasis& basis) {
    std::vector<std::vector<Entry>> out(basis.size());
    const double s = 1.0 / std::sqrt(2.0);
    for (int a = 0; a < basis.size(); ++a) {
        const Operator& L = basis.generators[a];
        for (int j = 0; j < L.cols(); ++j)
            for (int i = 0; i < L.rows(); ++i)
                if (L(i, j) != cplx(0.0)) out[a].push_back({i, j, s * L(i, j)});
    }
    return out;
}

struct Problem {
    const Operator& H;
    BipartiteShape shape;
    std::vector<std::vector<Entry>> genA;
    std::vector<std::vector<Entry>> genB;
};

struct HalfStep {
    Eigen::VectorXd x;
    double value = 0.0;
    bool degenerate = false;
};

// Minimizer of the quadratic form G over the unit sphere. A degenerate minimal
// eigenspace is resolved by the direction in it closest to the alignment vector.
HalfStep minimize(const Eigen::MatrixXd& G, const Eigen::VectorXd& align) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
    const Eigen::VectorXd& w = es.eigenvalues();
    const double spread = std::max(std::abs(w(w.size() - 1)), std::numeric_limits<double>::min());
    int n0 = 1;
    while (n0 < w.size() && w(n0) <= w(0) + 1e-9 * spread) ++n0;
    HalfStep h;
    h.degenerate = n0 > 1;
    const Eigen::MatrixXd Q = es.eigenvectors().leftCols(n0);
    const Eigen::VectorXd proj = Q * (Q.transpose() * align);
    if (n0 > 1 && proj.norm() > 1e-12 * std::max(align.norm(), 1e-300))
        h.x = proj / proj.norm();
    else
        h.x = es.eigenvectors().col(0);
    h.value = std::max(0.0, h.x.dot(G * h.x));
    return h;
}

// With O_B fixed: columns vec([H, L_a (x) O_B]) and alignment Re Tr((L_a (x) O_B) H).
HalfStep solve_A(const Problem& p, const Operator& OB) {
    const int dA = p.shape.d_A, dB = p.shape.d_B, D = p.shape.dim();
    const Operator IY = embed(OB, p.shape, Factor::B);
    const Operator P = p.H * IY;
    const Operator Q = IY * p.H;
    const int n = static_cast<int>(p.genA.size());
    Eigen::MatrixXcd L(D * D, n);
    Eigen::VectorXd align(n);
    Operator C(D, D);
    for (int a = 0; a < n; ++a) {
        C.setZero();
        cplx tr = 0.0;
        for (const Entry& e : p.genA[a]) {
            // P (X (x) I): column block e.col gains X(row, col) times column block e.row of P.
            C.middleCols(e.col * dB, dB) += e.value * P.middleCols(e.row * dB, dB);
            // (X (x) I) Q: row block e.row gains X(row, col) times row block e.col of Q.
            C.middleRows(e.row * dB, dB) -= e.value * Q.middleRows(e.col * dB, dB);
            tr += e.value * Q.block(e.col * dB, e.row * dB, dB, dB).trace();
        }
        L.col(a) = Eigen::Map<const Eigen::VectorXcd>(C.data(), C.size());
        align(a) = tr.real();
    }
    (void)dA;
    return minimize((L.adjoint() * L).real(), align);
}

// With O_A fixed: columns vec([H, O_A (x) L_b]) and alignment Re Tr((O_A (x) L_b) H).
HalfStep solve_B(const Problem& p, const Operator& OA) {
    const int dA = p.shape.d_A, dB = p.shape.d_B, D = p.shape.dim();
    const Operator XI = embed(OA, p.shape, Factor::A);
    const Operator P = p.H * XI;
    const Operator Q = XI * p.H;
    const int n = static_cast<int>(p.genB.size());
    Eigen::MatrixXcd L(D * D, n);
    Eigen::VectorXd align(n);
    Operator C(D, D);
    for (int b = 0; b < n; ++b) {
        C.setZero();
        cplx tr = 0.0;
        for (const Entry& e : p.genB[b])
            for (int i = 0; i < dA; ++i) {
                C.col(i * dB + e.col) += e.value * P.col(i * dB + e.row);
                C.row(i * dB + e.row) -= e.value * Q.row(i * dB + e.col);
                tr += e.value * Q(i * dB + e.col, i * dB + e.row);
            }
        L.col(b) = Eigen::Map<const Eigen::VectorXcd>(C.data(), C.size());
        align(b) = tr.real();
    }
    return minimize((L.adjoint() * L).real(), align);
}

struct RestartResult {
    Eigen::VectorXd xA;
    Eigen::VectorXd xB;
    double residual = 0.0;
    double alignment = 0.0;   // |Re Tr((O_A (x) O_B) H_int)|
    int iterations = 0;
    bool converged = false;
    bool degenerate = false;
    std::vector<double> history;
};

bool lex_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        const double x = std::round(a(i) * 1e8), y = std::round(b(i) * 1e8);
        if (x != y) return x < y;
    }
    return false;
}

}  // namespace

double cpo_residual(const HamiltonianSplit& split, const Operator& O_A, const Operator& O_B) {
    return commutator(split.interaction, tensor_product(O_A, O_B)).norm();
}

CandidatePointerObservable find_cpo(const HamiltonianSplit& split, const CpoOptions& options) {
    if (split.terms.empty()) throw std::invalid_argument("find_cpo: split has no interaction terms");
    if (options.n_restarts < 1) throw std::invalid_argument("find_cpo: n_restarts must be at least 1");
    if (options.max_iters < 1) throw std::invalid_argument("find_cpo: max_iters must be at least 1");

    const auto basisA = gell_mann_basis(split.shape.d_A);
    const auto basisB = gell_mann_basis(split.shape.d_B);
    const Problem problem{split.interaction, split.shape, sparse_generators(*basisA), sparse_generators(*basisB)};

    std::vector<RestartResult> results(options.n_restarts);
    for (int r = 0; r < options.n_restarts; ++r) {
        RestartResult& res = results[r];
        // Restart 0 starts from the leading environment factor, the rest from random directions.
        if (r == 0) {
            res.xB = basisB->coordinates(split.terms.front().B);
        } else {
            Rng rng = make_stream(options.seed, r);
            res.xB = random_gaussian(basisB->size(), 1.0, rng);
        }
        res.xB.normalize();
        double prev = std::numeric_limits<double>::infinity();
        for (int it = 0; it < options.max_iters; ++it) {
            const HalfStep a = solve_A(problem, basisB->combine(res.xB));
            res.xA = a.x;
            res.history.push_back(a.value);
            const HalfStep b = solve_B(problem, basisA->combine(res.xA));
            res.xB = b.x;
            res.history.push_back(b.value);
            res.degenerate = a.degenerate || b.degenerate;
            res.iterations = it + 1;
            if (prev - b.value < options.tol) {
                res.converged = true;
                break;
            }
            prev = b.value;
        }
        Operator OA = basisA->combine(res.xA);
        if (apply_sign_convention(OA) < 0.0) {
            res.xA = -res.xA;
            res.xB = -res.xB;
        }
        const Operator P = tensor_product(basisA->combine(res.xA), basisB->combine(res.xB));
        res.residual = commutator(split.interaction, P).norm();
        res.alignment = std::abs((P.transpose().cwiseProduct(split.interaction)).sum().real());
    }

    const double window = options.tol + 1e-12 * split.interaction_norm();
    double best_res = std::numeric_limits<double>::infinity();
    for (const RestartResult& r : results) best_res = std::min(best_res, r.residual);
    int best = -1, tied = 0;
    for (int r = 0; r < options.n_restarts; ++r) {
        if (results[r].residual > best_res + window) continue;
        ++tied;
        if (best < 0) {
            best = r;
            continue;
        }
        // Exact ties can include pairs that anticommute with the interaction factors;
        // the pair carrying the interaction weight wins, then the smaller coefficient vector.
        const RestartResult& c = results[r];
        const RestartResult& b = results[best];
        const double align_tol = 1e-9 * split.interaction_norm();
        if (c.alignment > b.alignment + align_tol) {
            best = r;
            continue;
        }
        if (c.alignment < b.alignment - align_tol) continue;
        if (lex_less(c.xA, b.xA) || (!lex_less(b.xA, c.xA) && lex_less(c.xB, b.xB))) best = r;
    }

    const RestartResult& w = results[best];
    CandidatePointerObservable out;
    out.coeffs_A = w.xA;
    out.coeffs_B = w.xB;
    out.O_A_tilde = basisA->combine(w.xA);
    out.O_B_tilde = basisB->combine(w.xB);
    out.residual = cpo_residual(split, out.O_A_tilde, out.O_B_tilde);
    out.restarts_used = options.n_restarts;
    out.best_restart = best;
    out.iterations = w.iterations;
    out.converged = w.converged;
    out.degenerate_minimum = w.degenerate;
    out.tie_broken = tied > 1;
    out.history = w.history;
    return out;
}

PeakedStateSet peaked_states(const CandidatePointerObservable& cpo, double width) {
    if (!(width >= 0.0)) throw std::invalid_argument("peaked_states: width must be nonnegative");
    PeakedStateSet set;
    set.width = width;
    Eigen::SelfAdjointEigenSolver<Operator> ea(cpo.O_A_tilde);
    Eigen::SelfAdjointEigenSolver<Operator> eb(cpo.O_B_tilde);
    set.eigenvalues_A = ea.eigenvalues();
    set.basis_A = ea.eigenvectors();
    set.basis_B = eb.eigenvectors();
    fix_column_phases(set.basis_A);
    fix_column_phases(set.basis_B);
    const PureState env = PureState::normalized(uniform_amplitudes(set.basis_B));
    for (int j = 0; j < set.basis_A.cols(); ++j)
        set.states.emplace_back(PureState::normalized(peaked_amplitudes(set.basis_A, j, width)), env);
    return set;
}

}  // namespace qm
