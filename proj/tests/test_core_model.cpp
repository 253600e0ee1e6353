#include "arz/core_model.hpp"
#include "arz/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <string>

using namespace arz;

namespace {

SegmentParams segment(double rho_max, double gamma, double tau, int id) {
    return SegmentParams{45.0, rho_max, gamma, tau, 2000.0, id};
}

}  // namespace

TEST_CASE("equilibrium speed plus pressure equals the free-flow speed") {
    std::mt19937_64 rng(3);
    for (double gamma : {0.5, 1.0, 2.0, 3.7}) {
        const SegmentParams p = segment(0.8, gamma, 60.0, 1);
        std::uniform_real_distribution<double> u(0.0, p.rho_max);
        for (int k = 0; k < 1000; ++k) {
            const double rho = u(rng);
            CHECK(std::abs(equilibrium_velocity(rho, p) + pressure(rho, p) - p.v_max) < 1e-12);
        }
    }
}

TEST_CASE("fundamental diagram endpoints and capacity") {
    const SegmentParams p = segment(0.6667, 1.0, 120.0, 1);
    CHECK(equilibrium_flow(0.0, p) == 0.0);
    CHECK(std::abs(equilibrium_flow(p.rho_max, p)) < 1e-12);
    CHECK(critical_density(p) == doctest::Approx(p.rho_max / 2.0).epsilon(1e-14));
    // Greenshields with gamma = 1: capacity v_max rho_max / 4, about 7.5 veh/s here.
    CHECK(capacity(p) == doctest::Approx(45.0 * 0.6667 / 4.0).epsilon(1e-14));

    const SegmentParams q = segment(0.8, 2.0, 90.0, 2);
    const double rc = critical_density(q);
    CHECK(rc == doctest::Approx(0.8 / std::sqrt(3.0)).epsilon(1e-14));
    const double h = 1e-5;
    CHECK(std::abs(equilibrium_flow(rc + h, q) - equilibrium_flow(rc - h, q)) < 1e-9);
}

TEST_CASE("density outside the physical range is rejected") {
    const SegmentParams p = segment(0.8, 1.0, 90.0, 2);
    CHECK_THROWS_AS(pressure(-0.1, p), ValidationError);
    CHECK_THROWS_AS(equilibrium_velocity(0.9, p), ValidationError);
    CHECK_THROWS_AS(driver_property(1.0, 5.0, p), ValidationError);
    CHECK(driver_property(0.4, 10.0, p) == doctest::Approx(10.0 + 22.5));
}

TEST_CASE("invalid segment parameters are rejected") {
    CHECK_THROWS_AS(segment(0.0, 1.0, 90.0, 1).validate(), ValidationError);
    CHECK_THROWS_AS(segment(0.8, -1.0, 90.0, 1).validate(), ValidationError);
    CHECK_THROWS_AS(segment(0.8, 1.0, 0.0, 1).validate(), ValidationError);
    CHECK_THROWS_AS(segment(0.8, 1.0, 90.0, 3).validate(), ValidationError);
}

TEST_CASE("congested root lies above critical density and reproduces the flux") {
    for (double gamma : {1.0, 0.7, 2.0}) {
        const SegmentParams p = segment(0.75, gamma, 90.0, 1);
        for (double frac : {0.1, 0.5, 0.9, 0.999}) {
            const double q = frac * capacity(p);
            const double rho = congested_density(q, p);
            CHECK(rho > critical_density(p));
            CHECK(rho <= p.rho_max);
            CHECK(std::abs(equilibrium_flow(rho, p) - q) < 1e-12 * q);
        }
    }
}

TEST_CASE("default network steady states") {
    const NetworkParams net = default_network();
    CHECK(net.ss1.rho_star == doctest::Approx(0.482444).epsilon(1e-5));
    CHECK(net.ss1.v_star == doctest::Approx(12.436688).epsilon(1e-6));
    CHECK(net.ss1.r == doctest::Approx(0.617922).epsilon(1e-5));
    CHECK(net.ss2.rho_star == doctest::Approx(0.630940).epsilon(1e-5));
    CHECK(net.ss2.v_star == doctest::Approx(9.509619).epsilon(1e-6));
    CHECK(net.ss2.r == doctest::Approx(0.366025).epsilon(1e-5));
    // Travel time across both characteristic families.
    CHECK(net.ss1.kappa == doctest::Approx(2000.0 / 12.44 + 2000.0 / 20.12).epsilon(1e-3));
    CHECK(net.ss2.kappa == doctest::Approx(2000.0 / 9.51 + 2000.0 / 25.98).epsilon(1e-3));
    for (const SteadyState* ss : {&net.ss1, &net.ss2}) {
        CHECK(std::abs(ss->rho_star * ss->v_star - 6.0) < 1e-12 * 6.0);
        CHECK(ss->r > 0.0);
        CHECK(ss->r < 1.0);
        CHECK(ss->lambda_w == doctest::Approx(ss->v_star));
    }
    CHECK(net.round_trip() == doctest::Approx(net.ss1.kappa + net.ss2.kappa));
}

TEST_CASE("flow at or above capacity names the limiting segment") {
    const SegmentParams s1 = segment(0.6667, 1.0, 120.0, 1);
    const SegmentParams s2 = segment(0.8, 1.0, 90.0, 2);
    try {
        solve_steady_states(7.6, s1, s2);
        FAIL("expected an infeasibility error");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("segment 1") != std::string::npos);
    }
    CHECK_THROWS_AS(solve_steady_states(0.0, s1, s2), ValidationError);
    CHECK_THROWS_AS(solve_steady_states(-1.0, s1, s2), ValidationError);
}

TEST_CASE("ratio r at or above one is rejected with the admissible interval") {
    // For gamma = 2, r < 1 needs p > v_max / 2, which fails just above critical density.
    const SegmentParams s1 = segment(0.8, 2.0, 120.0, 1);
    const SegmentParams s2 = segment(0.8, 2.0, 90.0, 2);
    try {
        solve_steady_states(0.99 * capacity(s1), s1, s2);
        FAIL("expected r >= 1 to be rejected");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("admissible") != std::string::npos);
    }
    CHECK_NOTHROW(solve_steady_states(0.5 * capacity(s1), s1, s2));
}

TEST_CASE("network construction checks shared parameters") {
    SegmentParams s1 = segment(0.6667, 1.0, 120.0, 1);
    SegmentParams s2 = segment(0.8, 1.0, 90.0, 2);
    s2.length = 1000.0;
    CHECK_THROWS_AS(make_network(s1, s2, 6.0), ValidationError);
    s2.length = 2000.0;
    s2.v_max = 40.0;
    CHECK_THROWS_AS(make_network(s1, s2, 6.0), ValidationError);
    s2.v_max = 45.0;
    s2.segment_id = 1;
    CHECK_THROWS_AS(make_network(s1, s2, 6.0), ValidationError);
}
