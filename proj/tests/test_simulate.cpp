#include "arz/errors.hpp"
#include "arz/simulate.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

using namespace arz;

namespace {

const NetworkParams& net() {
    static const NetworkParams n = default_network();
    return n;
}

std::pair<KernelTable, KernelTable> tables(int M) {
    KernelOptions opts;
    opts.M = M;
    const BoundaryRows rows = boundary_rows(net());
    return {solve_kernels(1, net(), rows, opts), solve_kernels(2, net(), rows, opts)};
}

SimConfig short_run(int N, ModelKind model, LoopMode loop, double periods) {
    SimConfig cfg;
    cfg.N = N;
    cfg.model = model;
    cfg.loop = loop;
    cfg.t_final = periods * net().round_trip();
    cfg.record_every = 10;
    return cfg;
}

}  // namespace

TEST_CASE("configuration validation") {
    SimConfig cfg;
    cfg.N = 16;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg.N = 64;
    cfg.cfl = 1.2;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg.cfl = 0.9;
    cfg.ic.epsilon = 0.6;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg.ic.epsilon = 0.05;
    CHECK_NOTHROW(cfg.validate());
    cfg.loop = LoopMode::closed;
    CHECK_THROWS_AS(run_simulation(cfg, net()), ValidationError);  // closed loop needs kernel tables
}

TEST_CASE("initial condition vanishes at the boundaries and the junction") {
    const auto [p1, p2] = initial_condition(InitialCondition{}, net(), 64);
    CHECK(p1.a.front() == doctest::Approx(net().ss1.rho_star).epsilon(1e-14));
    CHECK(p1.a.back() == doctest::Approx(net().ss1.rho_star).epsilon(1e-14));
    CHECK(p2.a.front() == doctest::Approx(net().ss2.rho_star).epsilon(1e-14));
    CHECK(p2.a.back() == doctest::Approx(net().ss2.rho_star).epsilon(1e-14));
    CHECK(p1.a[32] == doctest::Approx(1.05 * net().ss1.rho_star).epsilon(1e-14));
    CHECK(p2.a[32] == doctest::Approx(0.95 * net().ss2.rho_star).epsilon(1e-14));
    for (std::size_t i = 0; i < p1.size(); ++i) {
        CHECK(p1.b[i] == doctest::Approx(equilibrium_velocity(p1.a[i], net().seg1)));
    }
}

TEST_CASE("junction coupling satisfies flux and driver balance") {
    const double rho2 = net().ss2.rho_star * 1.01;
    const double v2 = net().ss2.v_star * 0.99;
    const double U0 = 0.3;
    const auto [rho1, v1] = junction_coupling({rho2, v2}, U0, net());
    CHECK(std::abs(rho1 * v1 - (rho2 * v2 + U0)) < 1e-10);
    CHECK(std::abs(v1 + pressure(rho1, net().seg1) - v2 - pressure(rho2, net().seg2)) < 1e-10);
    CHECK(rho1 > critical_density(net().seg1));
    CHECK_THROWS_AS(junction_coupling({rho2, v2}, 50.0, net()), NumericalError);
    CHECK_THROWS_AS(junction_coupling({-0.1, v2}, 0.0, net()), ValidationError);
}

TEST_CASE("characteristic junction solve agrees with junction coupling") {
    const double w = net().ss2.v_star + pressure(net().ss2.rho_star, net().seg2) + 0.2;
    const double v1 = net().ss1.v_star - 0.3;
    const double U0 = -0.15;
    const JunctionState j = junction_state(w, v1, U0, net());
    const auto [rho1, v1b] = junction_coupling({j.rho2, j.v2}, U0, net());
    CHECK(rho1 == doctest::Approx(j.rho1).epsilon(1e-12));
    CHECK(v1b == doctest::Approx(j.v1).epsilon(1e-12));
    CHECK(j.q1 - j.q2 == doctest::Approx(U0));
}

TEST_CASE("congested root reproduces the flux") {
    const SegmentParams& p = net().seg1;
    const double w = net().ss1.v_star + pressure(net().ss1.rho_star, p);
    const double rho = congested_root(net().q_star(), w, p);
    CHECK(rho == doctest::Approx(net().ss1.rho_star).epsilon(1e-12));
    CHECK_THROWS_AS(congested_root(100.0, w, p), NumericalError);
}

TEST_CASE("zero amplitude stays at equilibrium with zero control") {
    const auto [k1, k2] = tables(64);
    for (ModelKind model : {ModelKind::linear, ModelKind::nonlinear}) {
        SimConfig cfg = short_run(64, model, LoopMode::closed, 0.5);
        cfg.ic.epsilon = 0.0;
        const SimRecord rec = run_simulation(cfg, net(), &k1, &k2);
        for (std::size_t k = 0; k < rec.times.size(); ++k) {
            CHECK(std::abs(rec.control[k]) < 1e-13);
            CHECK(rec.total[k] < 1e-11);  // L2 over 4 km of round-off
            CHECK(relative_deviation(rec.phys1[k], net().ss1) < 1e-13);
            CHECK(relative_deviation(rec.phys2[k], net().ss2) < 1e-13);
        }
    }
}

TEST_CASE("nonlinear scheme accounts for every vehicle") {
    SimConfig cfg = short_run(128, ModelKind::nonlinear, LoopMode::open, 1.0);
    const SimRecord open = run_simulation(cfg, net());
    CHECK(open.max_mass_defect < 1e-12);
    CHECK(open.max_courant <= cfg.cfl + 1e-12);
    // Without ramp flow and with fixed boundary fluxes the vehicle count is constant.
    CHECK(std::abs(open.mass.back() - open.mass.front()) < 1e-9 * open.mass.front());

    const auto [k1, k2] = tables(128);
    cfg.loop = LoopMode::closed;
    const SimRecord closed = run_simulation(cfg, net(), &k1, &k2);
    CHECK(closed.max_mass_defect < 1e-12);
}

TEST_CASE("small-amplitude nonlinear and linear runs agree") {
    SimConfig cfg = short_run(128, ModelKind::linear, LoopMode::open, 0.5);
    cfg.ic.epsilon = 0.01;
    const SimRecord lin = run_simulation(cfg, net());
    cfg.model = ModelKind::nonlinear;
    const SimRecord non = run_simulation(cfg, net());
    double gap = 0.0, size = 0.0;
    for (std::size_t i = 0; i < lin.scaled1.back().size(); ++i) {
        gap = std::max(gap, std::abs(lin.scaled1.back().b[i] - non.scaled1.back().b[i]));
        size = std::max(size, std::abs(lin.scaled1.back().b[i]));
    }
    CHECK(gap < 0.1 * size);
}

TEST_CASE("closed loop decays faster than open loop") {
    const auto [k1, k2] = tables(64);
    SimConfig cfg = short_run(64, ModelKind::linear, LoopMode::closed, 4.0);
    const SimRecord closed = run_simulation(cfg, net(), &k1, &k2);
    cfg.loop = LoopMode::open;
    const SimRecord open = run_simulation(cfg, net());
    const double T = net().round_trip();
    const NormSummary nc = norms_and_rate(closed, T);
    const NormSummary no = norms_and_rate(open, T);
    CHECK(nc.rate > no.rate);
    CHECK(closed.total.back() < open.total.back());
    CHECK(open.control.back() == 0.0);
}

TEST_CASE("recording keeps the final state and writes CSV headers") {
    SimConfig cfg = short_run(32, ModelKind::nonlinear, LoopMode::open, 0.2);
    cfg.record_every = 1000000;
    const SimRecord rec = run_simulation(cfg, net());
    REQUIRE(rec.times.size() == 2);
    CHECK(rec.times.back() == doctest::Approx(cfg.t_final).epsilon(1e-12));
    std::ostringstream a, b;
    write_record_csv(rec, a);
    write_norms_csv(rec, b);
    CHECK(a.str().rfind("time,x,segment,rho,v,wbar,vtilde,U0\n", 0) == 0);
    CHECK(b.str().rfind("time,norm_seg1,norm_seg2,total\n", 0) == 0);
    // Header plus two times of 33 nodes on each segment.
    const std::string text = a.str();
    CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 2 * 2 * 33);
}

TEST_CASE("norm summary needs enough samples") {
    SimRecord rec;
    rec.times = {0.0, 1.0};
    rec.total = {1.0, 0.5};
    CHECK_THROWS_AS(norms_and_rate(rec, 1.0), ValidationError);
}
