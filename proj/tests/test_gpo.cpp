#include "oracles.hpp"

#include "qmereology/gpo.hpp"
#include "qmereology/random.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <numbers>

using namespace qm;

namespace {

double max_abs(const Operator& X) { return X.cwiseAbs().maxCoeff(); }

Operator mpow(const Operator& X, int n) {
    Operator out = Operator::Identity(X.rows(), X.cols());
    for (int k = 0; k < n; ++k) out *= X;
    return out;
}

}  // namespace

TEST_CASE("GPO construction at d = 3 matches the explicit matrices") {
    const GpoSystem g = build_gpo(3);
    const cplx w = std::polar(1.0, 2.0 * std::numbers::pi / 3.0);
    CHECK(std::abs(g.clock_B(0, 0) - 1.0 / w) < 1e-15);
    CHECK(std::abs(g.clock_B(1, 1) - 1.0) < 1e-15);
    CHECK(std::abs(g.clock_B(2, 2) - w) < 1e-15);
    // A maps b_j to b_{j+1} cyclically.
    for (int p = 0; p < 3; ++p) {
        Ket e = Ket::Zero(3);
        e(p) = 1.0;
        const Ket out = g.shift_A * e;
        CHECK(std::abs(out((p + 1) % 3) - 1.0) < 1e-15);
    }
    // Off-diagonal pi entry from the cosecant formula with l = 1.
    const double alpha = g.alpha;
    for (int p = 0; p < 3; ++p)
        for (int q = 0; q < 3; ++q) {
            if (p == q) continue;
            const cplx want = cplx(0.0, std::numbers::pi / (3.0 * alpha)) / std::sin(2.0 * std::numbers::pi * (p - q) / 3.0);
            CHECK(std::abs(g.pi(p, q) - want) < 1e-14);
        }
    CHECK(g.alpha * g.beta * g.d == doctest::Approx(2.0 * std::numbers::pi));
    CHECK(g.alpha == doctest::Approx(g.beta));
}

TEST_CASE("GPO invariants") {
    for (int d : {3, 5, 7, 9, 27}) {
        const GpoSystem g = build_gpo(d);
        const Operator I = Operator::Identity(d, d);
        CHECK(max_abs(g.shift_A * g.clock_B - std::conj(g.omega) * g.clock_B * g.shift_A) < 1e-12);
        CHECK(max_abs(mpow(g.shift_A, d) - I) < 1e-10);
        CHECK(max_abs(mpow(g.clock_B, d) - I) < 1e-10);
        CHECK(max_abs(g.sylvester_S * g.shift_A * g.sylvester_S.inverse() - g.clock_B) < 1e-10);
        CHECK(is_hermitian(g.phi));
        CHECK(is_hermitian(g.pi));
        CHECK(g.pi.diagonal().cwiseAbs().maxCoeff() == 0.0);

        Eigen::SelfAdjointEigenSolver<Operator> ephi(g.phi), epi(g.pi);
        for (int j = -g.l; j <= g.l; ++j) {
            CHECK(ephi.eigenvalues()(j + g.l) == doctest::Approx(j * 2.0 * std::numbers::pi / (d * g.beta)));
            CHECK(std::abs(epi.eigenvalues()(j + g.l) - j * 2.0 * std::numbers::pi / (d * g.alpha)) < 1e-10);
        }
        CHECK(max_abs(oracle::expm_evolution(g.pi, g.alpha) - g.shift_A) < 1e-10);
        CHECK(max_abs(Operator((cplx(0.0, g.beta) * g.phi).exp()) - g.clock_B) < 1e-10);
    }
}

TEST_CASE("custom alpha keeps alpha beta d = 2 pi") {
    const GpoSystem g = build_gpo(9, 0.3);
    CHECK(g.alpha * g.beta * 9 == doctest::Approx(2.0 * std::numbers::pi));
    CHECK(max_abs(oracle::expm_evolution(g.pi, g.alpha) - g.shift_A) < 1e-10);
}

TEST_CASE("even or small dimensions are rejected") {
    CHECK_THROWS_AS(build_gpo(4), std::invalid_argument);
    CHECK_THROWS_AS(build_gpo(1), std::invalid_argument);
    CHECK_THROWS_AS(build_gpo(-3), std::invalid_argument);
    CHECK_THROWS_AS(build_gpo(5, -1.0), std::invalid_argument);
}

TEST_CASE("Schwinger expansion of basis elements") {
    const GpoSystem g = build_gpo(5);
    const SchwingerExpansion eI = schwinger_expand(Operator::Identity(5, 5), g);
    CHECK(std::abs(eI.m(0, 0) - 1.0) < 1e-14);
    CHECK(eI.coeffs.cwiseAbs().sum() == doctest::Approx(1.0));

    const Operator M = g.clock_B * g.clock_B * g.shift_A;
    const SchwingerExpansion e = schwinger_expand(M, g);
    for (int b = -2; b <= 2; ++b)
        for (int a = -2; a <= 2; ++a) CHECK(std::abs(e.m(b, a) - ((b == 2 && a == 1) ? 1.0 : 0.0)) < 1e-13);
    // Negative exponents live at the symmetric indices.
    const SchwingerExpansion en = schwinger_expand(schwinger_element(g, -1, -2), g);
    CHECK(std::abs(en.m(-1, -2) - 1.0) < 1e-13);
}

TEST_CASE("Schwinger reconstruction and Hermitian symmetry") {
    Rng rng = make_stream(21, 0);
    for (int d : {3, 5, 9}) {
        const GpoSystem g = build_gpo(d);
        const Operator M = random_hermitian(d, rng);
        const SchwingerExpansion e = schwinger_expand(M, g);
        CHECK(max_abs(reconstruct(e, g) - M) < 1e-10);
        CHECK(e.normalized.sum() == doctest::Approx(1.0).epsilon(1e-12));
        for (int b = -g.l; b <= g.l; ++b)
            for (int a = -g.l; a <= g.l; ++a) {
                const cplx lhs = std::pow(g.omega, -b * a) * std::conj(e.m(-b, -a));
                CHECK(std::abs(lhs - e.m(b, a)) < 1e-10);
            }
        // Trace-inner-product oracle for one coefficient.
        const Operator Bm = schwinger_element(g, 1, 1);
        CHECK(std::abs((Bm.adjoint() * M).trace() / double(d) - e.m(1, 1)) < 1e-12);
    }
    CHECK_THROWS_AS(schwinger_expand(Operator::Identity(4, 4), build_gpo(5)), std::invalid_argument);
}

TEST_CASE("shift profiles") {
    const GpoSystem g = build_gpo(9);
    const ShiftProfile pid = shift_profile(schwinger_expand(Operator::Identity(9, 9), g), Axis::phi);
    CHECK(pid.weight(0) == doctest::Approx(1.0));
    CHECK(pid.collimation == doctest::Approx(1.0));

    const Operator c = 0.5 * (g.shift_A + g.shift_A.adjoint());
    CHECK(max_abs(c - 0.5 * (oracle::expm_evolution(g.pi, g.alpha) + oracle::expm_evolution(g.pi, -g.alpha))) < 1e-10);
    const ShiftProfile pc = shift_profile(schwinger_expand(c, g), Axis::phi);
    CHECK(pc.weight(1) == doctest::Approx(0.5));
    CHECK(pc.weight(-1) == doctest::Approx(0.5));
    CHECK(pc.collimation == doctest::Approx(std::exp(-1.0 / 9.0)));

    // Functions of pi never shift along the clock direction.
    CHECK(collimation(Operator(g.pi * g.pi * g.pi), g, Axis::pi) == doctest::Approx(1.0));
    CHECK(collimation(c, g, Axis::pi) == doctest::Approx(1.0));

    Rng rng = make_stream(22, 0);
    for (int k = 0; k < 10; ++k) {
        const ShiftProfile p = shift_profile(schwinger_expand(random_hermitian(9, rng), g), Axis::phi);
        CHECK(p.weights.minCoeff() >= 0.0);
        CHECK(std::abs(p.weights.sum() - 1.0) < 1e-12);
        double want = 0.0;
        for (int s = -4; s <= 4; ++s) want += p.weight(s) * std::exp(-std::abs(s) / 9.0);
        CHECK(p.collimation == doctest::Approx(want));
        CHECK(p.collimation > std::exp(-4.0 / 9.0));
        CHECK(p.collimation <= 1.0);
    }
    CHECK_THROWS_AS(shift_profile(schwinger_expand(Operator::Zero(9, 9), g), Axis::phi), std::invalid_argument);
}

TEST_CASE("pi squared is the most phi-collimated power at d = 27") {
    const GpoSystem g = build_gpo(27);
    const double c2 = collimation(mpow(g.pi, 2), g, Axis::phi);
    for (int n : {1, 3, 4, 5}) CHECK(c2 > collimation(mpow(g.pi, n), g, Axis::phi));
}

TEST_CASE("nested commutators") {
    Rng rng = make_stream(23, 0);
    const Operator X = random_hermitian(3, rng), H = random_hermitian(3, rng);
    CHECK(max_abs(nested_commutator(X, H, 1) - (X * H - H * X)) < 1e-14);
    const Operator c1 = X * H - H * X, c2 = X * c1 - c1 * X, c3 = X * c2 - c2 * X;
    CHECK(max_abs(nested_commutator(X, H, 3) - c3) < 1e-12);
    const Operator D1 = Eigen::VectorXcd::Random(4).asDiagonal(), D2 = Eigen::VectorXcd::Random(4).asDiagonal();
    CHECK(max_abs(nested_commutator(D1, D2, 4)) == 0.0);
    CHECK_THROWS_AS(nested_commutator(X, H, 0), std::invalid_argument);
}

TEST_CASE("Hamilton residuals") {
    const GpoSystem g = build_gpo(9);
    const Operator H = g.phi * g.phi;
    const EomResidual r = eom_residual(H, g, Operator(2.0 * g.phi), Operator::Zero(9, 9));
    CHECK(r.r_phi == 0.0);
    CHECK(r.r_pi > 0.0);
    CHECK_THROWS_AS(eom_residual(Operator::Identity(3, 3), g, g.phi, g.phi), std::invalid_argument);
}

TEST_CASE("CCR block deviation at d = 3 from the explicit matrix") {
    const GpoSystem g = build_gpo(3);
    const Operator c = g.phi * g.pi - g.pi * g.phi;
    double want = 0.0;
    for (int p = 0; p < 3; ++p)
        for (int q = 0; q < 3; ++q) want = std::max(want, std::abs(c(p, q) - (p == q ? cplx(0.0, 1.0) : cplx(0.0))));
    CHECK(ccr_block_deviation(g, 1) == doctest::Approx(want));
    CHECK_THROWS_AS(ccr_block_deviation(g, 2), std::invalid_argument);
}
