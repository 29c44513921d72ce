#include "oracles.hpp"

#include "qmereology/cpo.hpp"
#include "qmereology/random.hpp"

#include <doctest.h>

using namespace qm;

namespace {

Operator unit_traceless(const Operator& X) {
    Operator T = X - (X.trace() / double(X.rows())) * Operator::Identity(X.rows(), X.cols());
    return T / T.norm();
}

// Off-diagonal weight of X in the columns of V.
double off_diagonal(const Operator& X, const Operator& V) {
    Operator Y = V.adjoint() * X * V;
    Y.diagonal().setZero();
    return Y.norm();
}

}  // namespace

TEST_CASE("product interactions give an exact pointer pair") {
    Rng rng = make_stream(51, 0);
    for (auto [m, n] : {std::pair{2, 2}, {3, 2}, {3, 3}, {4, 3}}) {
        const BipartiteShape s{m, n};
        const Operator X = oracle::random_traceless_hermitian(m, rng), Y = oracle::random_traceless_hermitian(n, rng);
        const Operator H = embed(0.1 * oracle::random_traceless_hermitian(m, rng), s, Factor::A) + 2.0 * tensor_product(X, Y);
        const HamiltonianSplit sp = split_hamiltonian(H, s);
        CpoOptions opt;
        opt.seed = 3;
        const CandidatePointerObservable c = find_cpo(sp, opt);
        CHECK(c.residual < 1e-8 * sp.interaction_norm());
        CHECK(c.converged);
        CHECK(c.O_A_tilde.norm() == doctest::Approx(1.0));
        CHECK(std::abs(c.O_A_tilde.trace()) < 1e-12);
        CHECK(is_hermitian(c.O_A_tilde));
        CHECK(c.residual == doctest::Approx(cpo_residual(sp, c.O_A_tilde, c.O_B_tilde)));
        // Eigenvectors of O_A diagonalize the interaction factor.
        const PeakedStateSet set = peaked_states(c, 0.0);
        CHECK(off_diagonal(X, set.basis_A) < 1e-7 * X.norm());
        CHECK(off_diagonal(Y, set.basis_B) < 1e-7 * Y.norm());
    }
}

TEST_CASE("alternating solver beats random product candidates") {
    Rng rng = make_stream(52, 0);
    for (int k = 0; k < 3; ++k) {
        const BipartiteShape s{3, 3};
        const HamiltonianSplit sp = split_hamiltonian(random_hermitian(9, rng), s);
        CpoOptions opt;
        opt.seed = 100 + k;
        const CandidatePointerObservable c = find_cpo(sp, opt);
        double best = std::numeric_limits<double>::infinity();
        for (int r = 0; r < 1000; ++r) {
            const Operator OA = unit_traceless(random_hermitian(3, rng)), OB = unit_traceless(random_hermitian(3, rng));
            best = std::min(best, (sp.interaction * tensor_product(OA, OB) - tensor_product(OA, OB) * sp.interaction).norm());
        }
        CHECK(c.residual <= best);
        // The history is monotone non-increasing within the winning restart.
        for (std::size_t i = 1; i < c.history.size(); ++i) CHECK(c.history[i] <= c.history[i - 1] + 1e-10);
    }
}

TEST_CASE("CPO is deterministic and follows the sign convention") {
    Rng rng = make_stream(53, 0);
    const HamiltonianSplit sp = split_hamiltonian(random_hermitian(6, rng), {3, 2});
    CpoOptions opt;
    opt.seed = 9;
    const CandidatePointerObservable a = find_cpo(sp, opt), b = find_cpo(sp, opt);
    CHECK((a.coeffs_A - b.coeffs_A).norm() == 0.0);
    CHECK((a.coeffs_B - b.coeffs_B).norm() == 0.0);
    Operator O = a.O_A_tilde;
    CHECK(apply_sign_convention(O) == 1.0);
}

TEST_CASE("CPO input validation") {
    const BipartiteShape s{2, 2};
    const HamiltonianSplit empty = split_hamiltonian(Operator(embed(Operator(Eigen::Vector2cd(1, -1).asDiagonal()), s, Factor::A)), s);
    CHECK_THROWS_AS(find_cpo(empty), std::invalid_argument);
    Rng rng = make_stream(54, 0);
    const HamiltonianSplit sp = split_hamiltonian(random_hermitian(4, rng), s);
    CpoOptions bad;
    bad.n_restarts = 0;
    CHECK_THROWS_AS(find_cpo(sp, bad), std::invalid_argument);
}

TEST_CASE("peaked states") {
    Rng rng = make_stream(55, 0);
    const HamiltonianSplit sp = split_hamiltonian(random_hermitian(6, rng), {3, 2});
    const CandidatePointerObservable c = find_cpo(sp);
    const PeakedStateSet set = peaked_states(c, 0.0);
    REQUIRE(set.states.size() == 3);
    for (int j = 0; j < 3; ++j) {
        const Ket& a = set.states[j].psi_A.amplitudes();
        CHECK((c.O_A_tilde * a - set.eigenvalues_A(j) * a).norm() < 1e-10);
        // Environment: equal weight on every O_B eigenvector.
        const Eigen::VectorXd w = (set.basis_B.adjoint() * set.states[j].psi_B.amplitudes()).cwiseAbs2();
        CHECK((w.array() - 0.5).abs().maxCoeff() < 1e-12);
    }
    for (int j = 1; j < 3; ++j) CHECK(set.eigenvalues_A(j) >= set.eigenvalues_A(j - 1));
    CHECK_THROWS_AS(peaked_states(c, -1.0), std::invalid_argument);
}

TEST_CASE("two-level factors prefer the commuting pair over the anticommuting one") {
    // For 2 x 2 factors an anticommuting pair also has zero residual.
    Rng rng = make_stream(56, 0);
    for (int k = 0; k < 12; ++k) {
        const Operator X = oracle::random_traceless_hermitian(2, rng), Y = oracle::random_traceless_hermitian(2, rng);
        const HamiltonianSplit sp = split_hamiltonian(Operator(tensor_product(X, Y)), {2, 2});
        CpoOptions opt;
        opt.seed = k;
        const CandidatePointerObservable c = find_cpo(sp, opt);
        CHECK(c.residual < 1e-12);
        CHECK((X * c.O_A_tilde - c.O_A_tilde * X).norm() < 1e-8);
        CHECK((Y * c.O_B_tilde - c.O_B_tilde * Y).norm() < 1e-8);
    }
}
