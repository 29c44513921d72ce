#include "oracles.hpp"

#include "qmereology/factorization.hpp"
#include "qmereology/gpo.hpp"
#include "qmereology/random.hpp"

#include <doctest.h>

#include <Eigen/SVD>

#include <algorithm>

using namespace qm;

namespace {

// Singular values of the realigned matrix R[(i,j),(k,l)] = X[(i,k),(j,l)], largest first.
Eigen::VectorXd operator_schmidt_values(const Operator& X, int dA, int dB) {
    Eigen::MatrixXcd R(dA * dA, dB * dB);
    for (int i = 0; i < dA; ++i)
        for (int j = 0; j < dA; ++j)
            for (int k = 0; k < dB; ++k)
                for (int l = 0; l < dB; ++l) R(i * dA + j, k * dB + l) = X(i * dB + k, j * dB + l);
    return Eigen::JacobiSVD<Eigen::MatrixXcd>(R).singularValues();
}

}  // namespace

TEST_CASE("Gell-Mann generators") {
    for (int D : {2, 3, 4, 6}) {
        const GellMannBasis b = build_gell_mann_basis(D);
        REQUIRE(b.size() == D * D - 1);
        for (int a = 0; a < b.size(); ++a) {
            CHECK(is_hermitian(b.generators[a]));
            CHECK(std::abs(b.generators[a].trace()) < 1e-14);
            for (int c = 0; c < b.size(); ++c) {
                const cplx tr = (b.generators[a] * b.generators[c]).trace();
                CHECK(std::abs(tr - (a == c ? 2.0 : 0.0)) < 1e-12);
            }
        }
    }
    // D = 2 gives the Pauli matrices in symmetric, antisymmetric, diagonal order.
    const GellMannBasis p = build_gell_mann_basis(2);
    CHECK(std::abs(p.generators[0](0, 1) - 1.0) < 1e-15);
    CHECK(std::abs(p.generators[1](0, 1) - cplx(0, -1)) < 1e-15);
    CHECK(std::abs(p.generators[1](1, 0) - cplx(0, 1)) < 1e-15);
    CHECK(std::abs(p.generators[2](0, 0) - 1.0) < 1e-15);
    CHECK(std::abs(p.generators[2](1, 1) + 1.0) < 1e-15);
    CHECK_THROWS_AS(build_gell_mann_basis(1), std::invalid_argument);
    CHECK(gell_mann_basis(3).get() == gell_mann_basis(3).get());
}

TEST_CASE("Gell-Mann coordinates round-trip traceless Hermitian operators") {
    Rng rng = make_stream(31, 0);
    const auto b = gell_mann_basis(4);
    const Operator X = oracle::random_traceless_hermitian(4, rng);
    const Eigen::VectorXd c = b->coordinates(X);
    CHECK((b->combine(c) - X).norm() < 1e-13);
    CHECK(c.norm() == doctest::Approx(X.norm()));
}

TEST_CASE("factorization unitary") {
    const auto b = gell_mann_basis(4);
    CHECK((factorization_unitary(FactorizationPoint::zero(4), *b) - identity(4)).norm() < 1e-15);
    Rng rng = make_stream(32, 0);
    const Eigen::VectorXd theta = random_gaussian(15, 0.4, rng);
    const Operator U = factorization_unitary({theta}, *b);
    CHECK(is_unitary(U, 1e-12));
    Operator G = Operator::Zero(4, 4);
    for (int a = 0; a < 15; ++a) G += theta(a) * b->generators[a];
    CHECK((U - Operator((cplx(0.0, 1.0) * G).exp())).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(std::abs(U.determinant() - 1.0) < 1e-12);
    CHECK_THROWS_AS(factorization_unitary({Eigen::VectorXd::Zero(3)}, *b), std::invalid_argument);

    const Operator H = random_hermitian(4, rng);
    const Operator Hp = transform_hamiltonian(H, U);
    CHECK((Hp - U.adjoint() * H * U).norm() < 1e-12);
    CHECK(is_hermitian(Hp));
    CHECK_THROWS_AS(transform_hamiltonian(H, H), std::invalid_argument);
}

TEST_CASE("split reconstructs the Hamiltonian") {
    Rng rng = make_stream(33, 0);
    for (auto [m, n] : {std::pair{2, 2}, {2, 3}, {3, 3}, {3, 4}}) {
        const BipartiteShape s{m, n};
        const Operator H = random_hermitian(m * n, rng);
        const HamiltonianSplit sp = split_hamiltonian(H, s);
        CHECK((sp.reconstruct() - H).norm() < 1e-8);
        CHECK(sp.trace_term == doctest::Approx(H.trace().real()));
        CHECK(std::abs(sp.H_A.trace()) < 1e-12);
        CHECK(std::abs(sp.H_B.trace()) < 1e-12);
        CHECK(partial_trace(sp.interaction, s, Factor::A).norm() < 1e-12);
        CHECK(partial_trace(sp.interaction, s, Factor::B).norm() < 1e-12);

        // Term weights are the operator-Schmidt values of the interaction.
        const Eigen::VectorXd sv = operator_schmidt_values(sp.interaction, m, n);
        REQUIRE(sp.terms.size() <= static_cast<std::size_t>(sv.size()));
        for (std::size_t a = 0; a < sp.terms.size(); ++a) CHECK(sp.terms[a].lambda == doctest::Approx(sv(a)).epsilon(1e-10));
        Operator sum = Operator::Zero(m * n, m * n);
        for (const auto& t : sp.terms) {
            CHECK(is_hermitian(t.A));
            CHECK(is_hermitian(t.B));
            CHECK(t.A.norm() == doctest::Approx(1.0));
            CHECK(t.B.norm() == doctest::Approx(1.0));
            CHECK(std::abs(t.A.trace()) < 1e-12);
            sum += t.lambda * tensor_product(t.A, t.B);
        }
        CHECK((sum - sp.interaction).norm() < 1e-8);
        for (std::size_t a = 0; a < sp.terms.size(); ++a)
            for (std::size_t c = a + 1; c < sp.terms.size(); ++c)
                CHECK(std::abs((sp.terms[a].A.adjoint() * sp.terms[c].A).trace()) < 1e-10);
    }
}

TEST_CASE("split of structured Hamiltonians") {
    Rng rng = make_stream(34, 0);
    const BipartiteShape s{3, 2};
    const Operator HA = oracle::random_traceless_hermitian(3, rng), HB = oracle::random_traceless_hermitian(2, rng);
    SUBCASE("no interaction") {
        const HamiltonianSplit sp = split_hamiltonian(Operator(embed(HA, s, Factor::A) + embed(HB, s, Factor::B) + 2.0 * identity(6)), s);
        CHECK(sp.terms.empty());
        CHECK((sp.H_A - HA).norm() < 1e-12);
        CHECK((sp.H_B - HB).norm() < 1e-12);
        CHECK(sp.trace_term == doctest::Approx(12.0));
        CHECK(sp.interaction_norm() < 1e-12);
    }
    SUBCASE("single product term") {
        const Operator X = oracle::random_traceless_hermitian(3, rng), Y = oracle::random_traceless_hermitian(2, rng);
        const HamiltonianSplit sp = split_hamiltonian(Operator(0.7 * tensor_product(X, Y)), s);
        REQUIRE(sp.terms.size() == 1);
        CHECK(sp.terms[0].lambda == doctest::Approx(0.7 * X.norm() * Y.norm()));
        CHECK(std::abs(std::abs((sp.terms[0].A.adjoint() * X).trace()) - X.norm()) < 1e-10);
        CHECK(sp.qml_ratio() == std::numeric_limits<double>::infinity());
    }
    SUBCASE("sign convention") {
        const HamiltonianSplit sp = split_hamiltonian(random_hermitian(6, rng), s);
        for (const auto& t : sp.terms) {
            Eigen::Index r = 0, c = 0;
            Eigen::MatrixXd mags = t.A.cwiseAbs();
            const double mx = mags.maxCoeff();
            bool found = false;
            for (Eigen::Index i = 0; i < mags.rows() && !found; ++i)
                for (Eigen::Index j = 0; j < mags.cols() && !found; ++j)
                    if (mags(i, j) >= mx * (1.0 - 1e-12)) {
                        r = i;
                        c = j;
                        found = true;
                    }
            const cplx e = t.A(r, c);
            CHECK((std::abs(e.real()) > 1e-14 ? e.real() > 0.0 : e.imag() > 0.0));
        }
    }
}

TEST_CASE("coupled oscillator split") {
    const GpoSystem g = build_gpo(5);
    const BipartiteShape s{5, 5};
    const Operator H = embed(Operator(g.pi * g.pi / 2.0 + g.phi * g.phi / 2.0), s, Factor::A) +
                       embed(Operator(g.pi * g.pi / 2.0 + g.phi * g.phi / 2.0), s, Factor::B) +
                       3.0 * tensor_product(g.phi, g.phi);
    const HamiltonianSplit sp = split_hamiltonian(H, s);
    REQUIRE(sp.terms.size() == 1);
    CHECK(sp.terms[0].lambda == doctest::Approx(3.0 * g.phi.squaredNorm()));
    // The sign convention fixes A up to the sign carried by B.
    CHECK(std::abs(std::abs((sp.terms[0].A * g.phi).trace().real()) - g.phi.norm()) < 1e-10);
    CHECK((sp.terms[0].lambda * tensor_product(sp.terms[0].A, sp.terms[0].B) - 3.0 * tensor_product(g.phi, g.phi)).norm() < 1e-9);
}

TEST_CASE("split rejects bad input") {
    CHECK_THROWS_AS(split_hamiltonian(identity(6), {2, 2}), std::invalid_argument);
    Operator N = identity(4);
    N(0, 1) = 1.0;
    CHECK_THROWS_AS(split_hamiltonian(N, {2, 2}), std::invalid_argument);
}
