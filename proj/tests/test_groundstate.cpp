#include "doctest.h"

#include <cmath>
#include <random>

#include "pxp/groundstate.hpp"

using namespace pxp;

TEST_CASE("energy vanishes at the origin and is negative at the minimum") {
    for (int dim = 1; dim <= 3; ++dim) {
        GroundState gs(ModelParams(dim, 0.0, 0.0), default_gs_backend(dim));
        CHECK(std::abs(gs.energy_per_site(0.0, 0.0)) < 1e-12);
        PhasePoint pt = gs.minimize();
        CHECK(pt.energy < -1e-3);
        CHECK(pt.in_regime);
    }
}

TEST_CASE("1D energy closed form on the product line") {
    GroundState gs(ModelParams(1, 0.7, 0.0), Backend::chain1d);
    for (double ta : {0.5, -1.2, 2.0}) {
        const double expected = 0.5 * (std::sin(ta) - 0.7 * std::pow(std::sin(ta / 2), 2));
        CHECK(gs.energy_per_site(ta, 0.0) == doctest::Approx(expected).epsilon(1e-10));
    }
}

TEST_CASE("energy is symmetric under sublattice exchange") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> ang(-2.2, 2.2);
    GroundState g1(ModelParams(1, 0.4, -0.3), Backend::chain1d);
    GroundState g2(ModelParams(2, 0.4, -0.3), Backend::series);
    for (int i = 0; i < 10; ++i) {
        double ta = ang(rng), tb = ang(rng);
        CHECK(g1.energy_per_site(ta, tb) == doctest::Approx(g1.energy_per_site(tb, ta)).epsilon(1e-10));
        CHECK(g2.energy_per_site(ta, tb) == doctest::Approx(g2.energy_per_site(tb, ta)).epsilon(1e-10));
    }
}

TEST_CASE("series and cylinder energies agree inside the regime") {
    GroundState ser(ModelParams(2, -0.2, 0.1), Backend::series);
    GroundState cyl(ModelParams(2, -0.2, 0.1), Backend::cylinder, 8);
    for (auto [ta, tb] : {std::pair{0.6, 0.4}, {1.2, 0.2}, {-0.8, -0.5}}) {
        CHECK(ser.energy_per_site(ta, tb) == doctest::Approx(cyl.energy_per_site(ta, tb)).epsilon(2e-4));
    }
}

TEST_CASE("deep detuning pushes the minimum to the origin") {
    GroundState gs(ModelParams(1, -8.0, 0.0), Backend::chain1d);
    PhasePoint pt = gs.minimize();
    CHECK(std::abs(pt.theta_a) < 0.2);
    CHECK(std::abs(pt.theta_b) < 0.2);
    CHECK(std::abs(pt.order_parameter) < 1e-6);
}

TEST_CASE("1D transition at V = 0 sits near 0.77 and is continuous") {
    TransitionScan scan = transition_scan(1, 0.0, 0.0, 1.5, 0.25, Backend::chain1d);
    REQUIRE(scan.found);
    CHECK(scan.delta_c == doctest::Approx(0.77).epsilon(0.03));
    CHECK(scan.order == TransitionOrder::second);
}

TEST_CASE("strongly attractive V turns the 1D transition first order") {
    TransitionScan scan = transition_scan(1, -1.6, -2.5, 1.5, 0.25, Backend::chain1d);
    REQUIRE(scan.found);
    CHECK(scan.order == TransitionOrder::first);
}

TEST_CASE("1D critical exponent is the mean-field 1/2") {
    ExponentFit fit = critical_exponent(1, Backend::chain1d);
    REQUIRE(fit.ok);
    CHECK(fit.beta == doctest::Approx(0.5).epsilon(0.1));
    CHECK(fit.r2 > 0.99);
}
