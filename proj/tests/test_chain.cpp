#include "doctest.h"

#include <cmath>
#include <random>

#include "pxp/chain.hpp"
#include "pxp/observables.hpp"

using namespace pxp;

namespace {
double s2(double th) { return std::sin(th / 2) * std::sin(th / 2); }
} // namespace

TEST_CASE("infinite chain is normalized") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> dist(-3.0, 3.0);
    for (int i = 0; i < 50; ++i) {
        VariationalParams p(dist(rng), dist(rng), dist(rng), dist(rng));
        if (s2(p.theta[0]) * s2(p.theta[1]) > 0.98) continue; // degenerate corner
        cplx norm = chain_expect(spec_identity(1), p);
        CHECK(std::abs(norm - cplx(1.0)) < 1e-10);
    }
}

TEST_CASE("density closed form on the chain") {
    // <n_a> = s_A (1 - s_B) / (1 - s_A s_B)
    for (auto [ta, tb] : {std::pair{kPi, 0.0}, {kPi / 2, 0.0}, {1.2, 0.8}, {2.2, -1.4}}) {
        VariationalParams p(ta, tb);
        double na = ObsEngine(1, Backend::chain1d).one_point_n(0, p);
        double expect = s2(ta) * (1 - s2(tb)) / (1 - s2(ta) * s2(tb));
        CHECK(na == doctest::Approx(expect).epsilon(1e-12));
    }
    VariationalParams z2(kPi, 0.0);
    CHECK(ObsEngine(1, Backend::chain1d).one_point_n(0, z2) == doctest::Approx(1.0));
    VariationalParams half(kPi / 2, 0.0);
    CHECK(ObsEngine(1, Backend::chain1d).one_point_n(0, half) == doctest::Approx(0.5));
}

TEST_CASE("sigma_x decouples as sin(phi) and vanishes at phi = 0") {
    ObsEngine eng(1, Backend::chain1d);
    VariationalParams base(1.2, 0.7, 0.0, 0.0);
    CHECK(std::abs(eng.one_point_sx(0, base)) < 1e-12);
    VariationalParams ref(1.2, 0.7, kPi / 2, kPi / 2);
    const double f = eng.one_point_sx(0, ref);
    for (double phi : {kPi / 4, kPi / 2, 0.3}) {
        VariationalParams p(1.2, 0.7, phi, phi);
        CHECK(eng.one_point_sx(0, p) == doctest::Approx(std::sin(phi) * f).epsilon(1e-10));
    }
}

TEST_CASE("F on a product state is sin(theta_A)") {
    ObsEngine eng(1, Backend::chain1d);
    for (double ta : {0.4, 1.1, 2.5}) {
        VariationalParams p(ta, 0.0);
        CHECK(eng.f_pxp(0, p) == doctest::Approx(std::sin(ta)).epsilon(1e-12));
        CHECK(std::abs(eng.f_pxp(1, p)) < 1e-12);
    }
}

TEST_CASE("gram matrix closed forms on the axes") {
    ObsEngine eng(1, Backend::chain1d);
    for (double ta : {0.3, 1.0, 2.1}) {
        VariationalParams p(ta, 0.0);
        CHECK(eng.gram(0, p) == doctest::Approx(0.25).epsilon(1e-12));
        const double c2 = std::cos(ta / 2) * std::cos(ta / 2);
        CHECK(eng.gram(1, p) == doctest::Approx(0.25 * c2).epsilon(1e-12));
    }
    // generic interior point: G = (1/4) c_B / (c_B + c_A s_B)
    VariationalParams p(1.3, 0.9);
    const double ca = 1 - s2(1.3), cb = 1 - s2(0.9);
    CHECK(eng.gram(0, p) == doctest::Approx(0.25 * cb / (cb + ca * s2(0.9))).epsilon(1e-12));
}

TEST_CASE("K and S terms are purely imaginary") {
    ObsEngine eng(1, Backend::chain1d);
    VariationalParams p(1.2, 0.8);
    CHECK(std::abs(eng.k_term(0, p).real()) < 1e-13);
    CHECK(std::abs(eng.s_term(0, p).real()) < 1e-13);
    // K on the axis equals i/2
    VariationalParams ax(1.5, 0.0);
    CHECK(eng.k_term(0, ax).imag() == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::abs(eng.s_term(0, ax)) < 1e-13);
    // anchored on B at (theta_A, 0): (i/2) cos^3(theta_A/2)
    CHECK(eng.k_term(1, ax).imag() == doctest::Approx(0.5 * std::pow(std::cos(0.75), 3)).epsilon(1e-12));
}

TEST_CASE("finite ring matches infinite chain as N grows") {
    VariationalParams p(0.9, 0.5);
    ReducedBlock blk = build_block(spec_n(1), p);
    cplx inf = chain_expect(blk, p);
    cplx fin = chain_expect_finite(blk, p, 30);
    CHECK(std::abs(inf - fin) < 1e-10);
}

TEST_CASE("degenerate transfer matrix is reported") {
    VariationalParams p(kPi, kPi);
    CHECK_THROWS_WITH_AS(static_cast<void>(chain_expect(spec_n(1), p)), doctest::Contains("degenerate"),
                         std::runtime_error);
}

TEST_CASE("two-point function on product states is uncorrelated") {
    ObsEngine eng(1, Backend::chain1d);
    VariationalParams p(1.1, 0.0);
    CHECK(std::abs(eng.two_point_nn_connected(0, {2, 0, 0}, p)) < 1e-12);
    VariationalParams z2(kPi, 0.0);
    CHECK(std::abs(eng.two_point_nn_connected(0, {2, 0, 0}, z2)) < 1e-12);
}

TEST_CASE("connected correlations decay exponentially with the transfer gap") {
    ObsEngine eng(1, Backend::chain1d);
    VariationalParams p(1.9, 1.7);
    double lam2 = chain_second_eigenvalue(p);
    double f2 = eng.two_point_nn_connected(0, {2, 0, 0}, p);
    double f4 = eng.two_point_nn_connected(0, {4, 0, 0}, p);
    double f6 = eng.two_point_nn_connected(0, {6, 0, 0}, p);
    CHECK(f4 / f2 == doctest::Approx(lam2).epsilon(1e-9));
    CHECK(f6 / f4 == doctest::Approx(lam2).epsilon(1e-9));

    CorrelationFit fit = correlation_length(eng, p, 12);
    CHECK(fit.ok);
    CHECK(fit.xi == doctest::Approx(-2.0 / std::log(lam2)).epsilon(1e-6));
}
