#include "arz/errors.hpp"
#include "arz/kernels.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace arz;

namespace {

const NetworkParams& net() {
    static const NetworkParams n = default_network();
    return n;
}

KernelTable solve(int id, int M, double tol = 1e-10) {
    KernelOptions opts;
    opts.M = M;
    opts.tol = tol;
    return solve_kernels(id, net(), boundary_rows(net()), opts);
}

std::string csv(const KernelTable& t) {
    std::ostringstream out;
    write_kernel_csv(t, out);
    return out.str();
}

}  // namespace

TEST_CASE("zero coupling gives zero kernels") {
    KernelProblem pb = kernel_problem(1, net(), boundary_rows(net()));
    pb.source = [](double) { return 0.0; };
    KernelOptions opts;
    opts.M = 32;
    const KernelTable t = solve_kernels(pb, 1, opts);
    CHECK(t.max_abs() == 0.0);
}

TEST_CASE("diagonal and edge conditions hold exactly at the nodes") {
    const BoundaryRows rows = boundary_rows(net());
    for (int id = 1; id <= 2; ++id) {
        const KernelProblem pb = kernel_problem(id, net(), rows);
        const KernelTable t = solve(id, 64);
        const double h = t.step();
        for (int p = 0; p <= 64; ++p) {
            CHECK(t.ref_kvw(p, p) == pb.source(p * h) / (pb.lambda + pb.speed));
            CHECK(t.ref_kvv(p, 64) == pb.edge_gain * t.ref_kvw(p, 64));
        }
        const KernelResidual res = kernel_residual(t, pb);
        CHECK(res.bc <= 1e-12);
    }
    // Junction value of the segment-1 kernel: -(1/tau1) / (gamma1 p1*).
    const KernelTable k1 = solve(1, 64);
    CHECK(k1.kvw(0, 0) == doctest::Approx(-1.0 / (120.0 * net().ss1.p_star)).epsilon(1e-12));
    // With the linearized rows the edge gains equal -1/e1 and -e2.
    const double e1 = std::exp(-2000.0 / (120.0 * net().ss1.v_star));
    const double e2 = std::exp(-2000.0 / (90.0 * net().ss2.v_star));
    CHECK(kernel_problem(1, net(), rows).edge_gain == doctest::Approx(-1.0 / e1));
    CHECK(kernel_problem(2, net(), rows).edge_gain == doctest::Approx(-e2));
}

TEST_CASE("original-coordinate accessors follow the segment orientation") {
    const KernelTable k2 = solve(2, 32);
    CHECK(k2.node(0) == doctest::Approx(-2000.0));
    CHECK(k2.node(32) == doctest::Approx(0.0));
    CHECK(k2.in_domain(32, 0));
    CHECK_FALSE(k2.in_domain(0, 32));
    CHECK(k2.kvw(32, 32) == k2.ref_kvw(0, 0));
    CHECK(k2.kvw(32, 0) == k2.ref_kvw(0, 32));
    const KernelTable k1 = solve(1, 32);
    CHECK(k1.in_domain(0, 32));
    CHECK_FALSE(k1.in_domain(32, 0));
    CHECK(k1.kvv(0, 32) == k1.ref_kvv(0, 32));
}

TEST_CASE("fixed-point iteration contracts and converges") {
    const KernelTable t = solve(1, 64);
    CHECK(t.iterations > 1);
    CHECK(t.iterations < 50);
    REQUIRE(t.change_history.size() >= 3);
    CHECK(t.change_history.back() < 1e-10);
    for (std::size_t k = 2; k < t.change_history.size(); ++k) {
        CHECK(t.change_history[k] < t.change_history[k - 1]);
    }
}

TEST_CASE("grid refinement: residual and table differences shrink") {
    const BoundaryRows rows = boundary_rows(net());
    for (int id = 1; id <= 2; ++id) {
        const KernelProblem pb = kernel_problem(id, net(), rows);
        const KernelTable a = solve(id, 32);
        const KernelTable b = solve(id, 64);
        const KernelTable c = solve(id, 128);
        const double ra = kernel_residual(a, pb).pde;
        const double rb = kernel_residual(b, pb).pde;
        const double rc = kernel_residual(c, pb).pde;
        CHECK(ra / rb >= 1.5);
        CHECK(rb / rc >= 1.5);
        CHECK(table_difference(b, c) < table_difference(a, b) / 1.5);
    }
}

TEST_CASE("different starting guesses reach the same table") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1e-2, 1e-2);
    for (int id = 1; id <= 2; ++id) {
        KernelOptions opts;
        opts.M = 48;
        const KernelTable a = solve_kernels(id, net(), boundary_rows(net()), opts);
        opts.initial_edge.resize(49);
        for (double& e : opts.initial_edge) {
            e = u(rng);
        }
        const KernelTable b = solve_kernels(id, net(), boundary_rows(net()), opts);
        double diff = 0.0;
        for (int p = 0; p <= 48; ++p) {
            for (int q = p; q <= 48; ++q) {
                diff = std::max({diff, std::abs(a.ref_kvw(p, q) - b.ref_kvw(p, q)),
                                 std::abs(a.ref_kvv(p, q) - b.ref_kvv(p, q))});
            }
        }
        CHECK(diff <= 10.0 * opts.tol);
    }
}

TEST_CASE("kernel row interpolation matches grid rows") {
    const KernelTable k1 = solve(1, 32);
    const KernelRow row = interpolate_kernel_row(k1, k1.node(4));
    REQUIRE(row.xi.size() == 29);
    for (std::size_t m = 0; m < row.xi.size(); ++m) {
        CHECK(row.kvw[m] == doctest::Approx(k1.kvw(4, 4 + static_cast<int>(m))));
        CHECK(row.kvv[m] == doctest::Approx(k1.kvv(4, 4 + static_cast<int>(m))));
    }
    CHECK_THROWS_AS(interpolate_kernel_row(k1, -1.0), ValidationError);
}

TEST_CASE("CSV output is deterministic and round trips byte for byte") {
    for (int id = 1; id <= 2; ++id) {
        const KernelTable a = solve(id, 32);
        const std::string first = csv(a);
        CHECK(first.rfind("segment_id,M\n", 0) == 0);
        CHECK(first.find("x,xi,Kvw,Kvv\n") != std::string::npos);
        CHECK(csv(solve(id, 32)) == first);
        std::istringstream in(first);
        const KernelTable b = read_kernel_csv(in);
        CHECK(b.segment_id() == id);
        CHECK(b.M() == 32);
        CHECK(b.length() == doctest::Approx(2000.0));
        CHECK(csv(b) == first);
    }
    std::istringstream bad("segment_id,M\n1,4\nx,xi,Kvw,Kvv\n0,0,1\n");
    CHECK_THROWS_AS(read_kernel_csv(bad), ValidationError);
}

TEST_CASE("invalid kernel options") {
    KernelOptions opts;
    opts.M = 8;
    CHECK_THROWS_AS(solve_kernels(1, net(), boundary_rows(net()), opts), ValidationError);
    opts.M = 32;
    opts.tol = 0.0;
    CHECK_THROWS_AS(solve_kernels(1, net(), boundary_rows(net()), opts), ValidationError);
}
