#include "doctest.h"

#include <cmath>
#include <random>

#include "pxp/tdvp.hpp"

using namespace pxp;

TEST_CASE("axis equations of motion in all dimensions") {
    for (int dim = 1; dim <= 3; ++dim) {
        Backend be = dim == 1 ? Backend::chain1d : Backend::series;
        Tdvp tdvp(dim, be);
        for (double ta : {0.0, 0.7, 1.9, 2.9}) {
            Velocity v = tdvp.eom(ta, 0.0);
            CHECK(v.a == doctest::Approx(2.0).epsilon(1e-10));
            CHECK(v.b == doctest::Approx(2.0 * std::pow(std::cos(ta / 2), dim)).epsilon(1e-8));
            Velocity w = tdvp.eom(0.0, ta);
            CHECK(w.b == doctest::Approx(2.0).epsilon(1e-10));
            CHECK(w.a == doctest::Approx(2.0 * std::pow(std::cos(ta / 2), dim)).epsilon(1e-8));
        }
        // origin is not stationary
        Velocity o = tdvp.eom(0.0, 0.0);
        CHECK(o.a == doctest::Approx(2.0));
        CHECK(o.b == doctest::Approx(2.0));
    }
}

TEST_CASE("1D closed form matches the numeric equations of motion") {
    Tdvp tdvp(1, Backend::chain1d);
    // sqrt(3) + sqrt(6)/6, from the corrected closed form
    CHECK(eom_1d_closed_form(kPi / 2, kPi / 3) ==
          doctest::Approx(std::sqrt(3.0) + std::sqrt(6.0) / 6.0).epsilon(1e-12));
    std::mt19937 rng(21);
    std::uniform_real_distribution<double> ang(-2.6, 2.6);
    for (int i = 0; i < 60; ++i) {
        double ta = ang(rng), tb = ang(rng);
        if (std::abs(tb) < 0.05 || std::abs(ta) < 0.05) continue;
        Velocity v = tdvp.eom(ta, tb);
        CHECK(v.a == doctest::Approx(eom_1d_closed_form(ta, tb)).epsilon(1e-8));
        CHECK(v.b == doctest::Approx(eom_1d_closed_form(tb, ta)).epsilon(1e-8));
    }
}

TEST_CASE("flow field is symmetric under sublattice exchange") {
    for (int dim : {1, 2}) {
        Backend be = dim == 1 ? Backend::chain1d : Backend::series;
        Tdvp tdvp(dim, be);
        std::mt19937 rng(5 + dim);
        std::uniform_real_distribution<double> ang(-2.0, 2.0);
        for (int i = 0; i < 25; ++i) {
            double ta = ang(rng), tb = ang(rng);
            Velocity v = tdvp.eom(ta, tb);
            Velocity w = tdvp.eom(tb, ta);
            CHECK(v.a == doctest::Approx(w.b).epsilon(1e-10));
            CHECK(v.b == doctest::Approx(w.a).epsilon(1e-10));
        }
    }
}

TEST_CASE("leakage vanishes along the axes") {
    for (int dim = 1; dim <= 3; ++dim) {
        Backend be = dim == 1 ? Backend::chain1d : Backend::series;
        Tdvp tdvp(dim, be);
        for (double ta : {0.3, 1.0, 1.8, 2.6}) {
            CHECK(tdvp.leakage(ta, 0.0) < 1e-8);
            CHECK(tdvp.leakage(0.0, ta) < 1e-8);
        }
    }
}

TEST_CASE("leakage is positive away from the axes") {
    Tdvp tdvp(1, Backend::chain1d);
    CHECK(tdvp.leakage(1.2, 1.0) > 1e-3);
}

TEST_CASE("step halving converges at fourth order") {
    Tdvp tdvp(1, Backend::chain1d);
    auto a = tdvp.integrate(-kPi, 0.0, 2e-3, 1.0, false, 1000000);
    auto b = tdvp.integrate(-kPi, 0.0, 1e-3, 1.0, false, 1000000);
    const double da = std::abs(a.theta_a.back() - b.theta_a.back());
    const double db = std::abs(a.theta_b.back() - b.theta_b.back());
    CHECK(da < 1e-8);
    CHECK(db < 1e-8);
}

TEST_CASE("1D Z2 orbit closes with the quoted period") {
    Tdvp tdvp(1, Backend::chain1d);
    auto orbit = tdvp.z2_orbit(1e-3);
    REQUIRE(orbit.closed);
    CHECK(orbit.period == doctest::Approx(4.820).epsilon(1e-3));
    CHECK(orbit.integrated_leakage == doctest::Approx(0.17).epsilon(0.06));
}

TEST_CASE("1D diagonal path accumulates the quoted leakage") {
    Tdvp tdvp(1, Backend::chain1d);
    auto path = tdvp.diagonal_path(1e-3);
    CHECK(path.integrated_leakage == doctest::Approx(1.28).epsilon(0.016));
}
