#include "arz/errors.hpp"
#include "arz/stability.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

using namespace arz;

TEST_CASE("sp1 of trivial matrices") {
    CouplingMatrix zero;
    CHECK(sp1(zero) == doctest::Approx(0.0));
    CouplingMatrix diag;
    diag(0, 0) = 0.5;
    diag(1, 1) = 0.2;
    diag(2, 2) = 0.1;
    diag(3, 3) = 0.3;
    CHECK(sp1(diag) == doctest::Approx(0.5).epsilon(1e-9));
    CouplingMatrix bad;
    bad(1, 2) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(sp1(bad), ValidationError);
}

TEST_CASE("default network: closed form and sp1 agree below one") {
    const NetworkParams net = default_network();
    const ClosedForm cf = closed_form_condition(net);
    CHECK(cf.applicable);
    CHECK(cf.a == doctest::Approx(0.0394).epsilon(5e-3));
    CHECK(cf.b == doctest::Approx(std::exp(-2.337 - 1.340)).epsilon(2e-3));
    // Derived from the solved steady states; the rounded hand value is about 0.427.
    CHECK(cf.value == doctest::Approx(0.4242145697).epsilon(1e-9));
    const double s = sp1(coupling_matrix(net));
    CHECK(std::abs(s - cf.value) < 1e-6);
    CHECK(s < 1.0);
}

TEST_CASE("sp1 bounds the spectral radius from above") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        CouplingMatrix H;
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < 4; ++j) {
                H(i, j) = u(rng);
            }
        }
        CHECK(sp1(H) >= spectral_radius(H) - 1e-9);
        CouplingMatrix A;
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < 4; ++j) {
                A(i, j) = std::abs(H(i, j));
            }
        }
        CHECK(sp1(A) >= abs_spectral_radius(A) - 1e-9);
    }
    // For the nonnegative test matrix the bound is attained.
    const CouplingMatrix D = coupling_matrix(default_network());
    CHECK(std::abs(sp1(D) - abs_spectral_radius(D)) < 1e-6);
}

TEST_CASE("sp1 is invariant under a diagonal similarity") {
    const NetworkParams net = default_network();
    const CouplingMatrix H = coupling_matrix(net);
    const double d[4] = {1.0, 3.0, 0.2, 7.5};
    CouplingMatrix G;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            G(i, j) = d[i] * H(i, j) / d[j];
        }
    }
    CHECK(std::abs(sp1(G) - sp1(H)) < 1e-6);

    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    CouplingMatrix R;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            R(i, j) = u(rng);
        }
    }
    CouplingMatrix RS;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            RS(i, j) = d[i] * R(i, j) / d[j];
        }
    }
    CHECK(std::abs(sp1(RS) - sp1(R)) < 1e-6);
}

TEST_CASE("scaled norm at zero log-scales is the plain 2-norm") {
    CouplingMatrix H;
    H(0, 3) = 2.0;
    H(1, 0) = 1.0;
    CHECK(scaled_norm(H, {0.0, 0.0, 0.0}) == doctest::Approx(2.0));
}

TEST_CASE("closed form limits") {
    SegmentParams s1{45.0, 0.8, 1.0, 90.0, 2000.0, 1};
    SegmentParams s2{45.0, 0.8, 1.0, 90.0, 2000.0, 2};
    const NetworkParams same = make_network(s1, s2, 6.0);
    const ClosedForm cf = closed_form_condition(same);
    CHECK(cf.applicable);
    CHECK(cf.a == 0.0);
    CHECK(cf.value == doctest::Approx(std::pow(cf.b, 0.25)));
    CHECK(cf.value < 1.0);
    CHECK(std::abs(sp1(coupling_matrix(same)) - cf.value) < 1e-6);

    s1.length = s2.length = 2.0e5;
    const NetworkParams far = make_network(s1, s2, 6.0);
    CHECK(closed_form_condition(far).value < 1e-10);

    // r1 < r2 flags the closed form as inapplicable.
    const SegmentParams a{45.0, 0.8, 1.0, 120.0, 2000.0, 1};
    const SegmentParams b{45.0, 0.6667, 1.0, 90.0, 2000.0, 2};
    const NetworkParams swapped = make_network(a, b, 6.0);
    CHECK(swapped.ss1.r < swapped.ss2.r);
    CHECK_FALSE(closed_form_condition(swapped).applicable);
}

TEST_CASE("difference model coefficients") {
    const NetworkParams net = default_network();
    const DifferenceModel m = build_difference_model(net);
    CHECK(m.kappa1 == doctest::Approx(260.2).epsilon(1e-3));
    CHECK(m.kappa2 == doctest::Approx(287.3).epsilon(1e-3));
    CHECK(m.coef_long == doctest::Approx(closed_form_condition(net).b).epsilon(1e-14));
    const double e2 = std::exp(-2000.0 / (90.0 * net.ss2.v_star));
    const double r1 = net.ss1.r;
    const double r2 = net.ss2.r;
    CHECK(m.coef_short == doctest::Approx(e2 * (r1 - r2) / ((1.0 - r1) * r2)).epsilon(1e-14));

    const SegmentParams s1{45.0, 0.8, 1.0, 90.0, 2000.0, 1};
    const SegmentParams s2{45.0, 0.8, 1.0, 90.0, 2000.0, 2};
    const DifferenceModel same = build_difference_model(make_network(s1, s2, 6.0));
    CHECK(same.coef_short == 0.0);
    CHECK(same.coef_long < 1.0);
}

TEST_CASE("difference recurrence: zero history and pure delay staircase") {
    DifferenceModel m;
    m.kappa1 = 100.0;
    m.kappa2 = 150.0;
    m.coef_long = 0.5;
    const DifferenceSeries zero = simulate_difference(m, [](double) { return 0.0; }, 1000.0, 0.5);
    for (double x : zero.x) {
        CHECK(x == 0.0);
    }
    const DifferenceSeries stairs = simulate_difference(m, [](double) { return 1.0; }, 1000.0, 0.5);
    CHECK(stairs.delay_error < 1e-12);
    for (std::size_t k = 0; k < stairs.t.size(); k += 37) {
        const double t = stairs.t[k];
        const double expect = std::pow(0.5, std::floor(t / m.period() + 1e-9) + 1.0);
        CHECK(stairs.x[k] == doctest::Approx(expect));
    }
    CHECK_FALSE(stairs.diverged);
}

TEST_CASE("difference recurrence for the default network decays at least as fast as the closed form") {
    const NetworkParams net = default_network();
    const DifferenceModel m = build_difference_model(net);
    const double T = m.period();
    const DifferenceSeries s = simulate_difference(m, [](double) { return 1.0; }, 8.0 * T, m.kappa2 / 400.0);
    const double cf = closed_form_condition(net).value;
    std::vector<double> peaks(8, 0.0);
    for (std::size_t k = 0; k < s.t.size(); ++k) {
        const auto w = static_cast<std::size_t>(std::min(7.0, std::floor(s.t[k] / T)));
        peaks[w] = std::max(peaks[w], std::abs(s.x[k]));
    }
    // First round trip from a constant history contracts by coef_short + coef_long; later ones
    // settle to the dominant root and contract by at most the squared closed-form value.
    CHECK(peaks[1] / peaks[0] == doctest::Approx(m.coef_short + m.coef_long).epsilon(1e-9));
    for (std::size_t w = 1; w < peaks.size(); ++w) {
        CHECK(peaks[w] <= peaks[w - 1]);
    }
    for (std::size_t w = 2; w < peaks.size(); ++w) {
        CHECK(peaks[w] <= cf * cf * peaks[w - 1]);
    }
    CHECK(s.rate > 0.0);
}

TEST_CASE("envelope fit recovers a known decay rate") {
    std::vector<double> t, x;
    for (int k = 0; k <= 20000; ++k) {
        t.push_back(0.1 * k);
        x.push_back(std::exp(-0.01 * t.back()) * std::cos(1.3 * t.back()));
    }
    const double rate = fit_envelope_rate(t, x, 50.0);
    CHECK(rate == doctest::Approx(0.01).epsilon(0.01));
    CHECK(fit_envelope_rate({0.0, 1.0}, {1.0, 0.5}, 10.0) == 0.0);
}
