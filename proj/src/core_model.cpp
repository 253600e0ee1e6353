#include "arz/core_model.hpp"

#include "arz/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

namespace arz {

namespace {

void check_density(double rho, const SegmentParams& params) {
    if (!(rho >= 0.0 && rho <= params.rho_max)) {
        std::ostringstream msg;
        msg << "density " << rho << " outside [0, " << params.rho_max << "] on segment "
            << params.segment_id;
        throw ValidationError(msg.str());
    }
}

// Density at which r = 1, i.e. 2 V(rho) = gamma p(rho).
double unit_ratio_density(const SegmentParams& p) {
    return p.rho_max * std::pow(2.0 / (2.0 + p.gamma), 1.0 / p.gamma);
}

}  // namespace

double SegmentParams::pressure_coeff() const { return v_max / std::pow(rho_max, gamma); }

void SegmentParams::validate() const {
    auto require = [&](bool ok, const char* field) {
        if (!ok) {
            throw ValidationError("segment " + std::to_string(segment_id) + ": " + field +
                                  " must be finite and positive");
        }
    };
    require(std::isfinite(v_max) && v_max > 0.0, "v_max");
    require(std::isfinite(rho_max) && rho_max > 0.0, "rho_max");
    require(std::isfinite(gamma) && gamma > 0.0, "gamma");
    require(std::isfinite(tau) && tau > 0.0, "tau");
    require(std::isfinite(length) && length > 0.0, "length");
    if (segment_id != 1 && segment_id != 2) {
        throw ValidationError("segment_id must be 1 or 2");
    }
}

double pressure(double rho, const SegmentParams& params) {
    check_density(rho, params);
    return params.pressure_coeff() * std::pow(rho, params.gamma);
}

double equilibrium_velocity(double rho, const SegmentParams& params) {
    check_density(rho, params);
    return params.v_max * (1.0 - std::pow(rho / params.rho_max, params.gamma));
}

double equilibrium_flow(double rho, const SegmentParams& params) {
    return rho * equilibrium_velocity(rho, params);
}

double critical_density(const SegmentParams& params) {
    params.validate();
    return params.rho_max / std::pow(1.0 + params.gamma, 1.0 / params.gamma);
}

double driver_property(double rho, double v, const SegmentParams& params) {
    return v + pressure(rho, params);
}

double capacity(const SegmentParams& params) {
    return equilibrium_flow(critical_density(params), params);
}

double congested_density(double q, const SegmentParams& params) {
    params.validate();
    const double rho_c = critical_density(params);
    if (params.gamma == 1.0) {
        const double disc = params.rho_max * params.rho_max - 4.0 * q * params.rho_max / params.v_max;
        if (disc < 0.0) {
            throw ValidationError("flux exceeds capacity of segment " +
                                  std::to_string(params.segment_id));
        }
        return 0.5 * (params.rho_max + std::sqrt(disc));
    }
    if (q > capacity(params)) {
        throw ValidationError("flux exceeds capacity of segment " + std::to_string(params.segment_id));
    }
    // Q is decreasing on [rho_c, rho_max].
    double lo = rho_c;
    double hi = params.rho_max;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        if (equilibrium_flow(mid, params) > q) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

SteadyState riemann_coefficients(SteadyState ss, const SegmentParams& params) {
    const double lambda_v = params.gamma * ss.p_star - ss.v_star;
    if (!(lambda_v > 0.0)) {
        throw ValidationError("segment " + std::to_string(params.segment_id) +
                              " steady state is not congested (gamma p* - v* <= 0)");
    }
    ss.lambda_w = ss.v_star;
    ss.lambda_v = lambda_v;
    ss.r = ss.v_star / lambda_v;
    if (!(ss.r > 0.0 && ss.r < 1.0)) {
        std::ostringstream msg;
        msg << "assumption-violating steady state on segment " << params.segment_id << ": r = " << ss.r
            << " not in (0, 1)";
        throw ValidationError(msg.str());
    }
    ss.kappa = params.length / ss.lambda_w + params.length / ss.lambda_v;
    return ss;
}

std::pair<SteadyState, SteadyState> solve_steady_states(double q_star, const SegmentParams& seg1,
                                                        const SegmentParams& seg2) {
    seg1.validate();
    seg2.validate();
    if (!(std::isfinite(q_star) && q_star > 0.0)) {
        throw ValidationError("q_star must be positive (a jammed steady state has r undefined)");
    }
    for (const SegmentParams* seg : {&seg1, &seg2}) {
        const double cap = capacity(*seg);
        if (q_star >= cap) {
            std::ostringstream msg;
            msg << "infeasible q_star = " << q_star << " veh/s: segment " << seg->segment_id
                << " capacity is " << cap << " veh/s";
            throw ValidationError(msg.str());
        }
    }
    double q_admissible = capacity(seg1);
    for (const SegmentParams* seg : {&seg1, &seg2}) {
        q_admissible = std::min(q_admissible, equilibrium_flow(unit_ratio_density(*seg), *seg));
    }
    auto solve_one = [&](const SegmentParams& seg) {
        SteadyState ss;
        ss.rho_star = congested_density(q_star, seg);
        ss.v_star = equilibrium_velocity(ss.rho_star, seg);
        ss.p_star = pressure(ss.rho_star, seg);
        ss.q_star = q_star;
        const double lambda_v = seg.gamma * ss.p_star - ss.v_star;
        if (lambda_v > 0.0 && ss.v_star / lambda_v >= 1.0) {
            std::ostringstream msg;
            msg << "assumption-violating steady state on segment " << seg.segment_id
                << ": r >= 1; admissible q_star interval is (0, " << q_admissible << ") veh/s";
            throw ValidationError(msg.str());
        }
        return riemann_coefficients(ss, seg);
    };
    return {solve_one(seg1), solve_one(seg2)};
}

NetworkParams make_network(const SegmentParams& seg1, const SegmentParams& seg2, double q_star) {
    if (seg1.segment_id != 1 || seg2.segment_id != 2) {
        throw ValidationError("network expects segment ids 1 and 2");
    }
    if (seg1.v_max != seg2.v_max) {
        throw ValidationError("both segments must share v_max");
    }
    if (seg1.length != seg2.length) {
        throw ValidationError("both segments must share the same length");
    }
    NetworkParams net;
    net.seg1 = seg1;
    net.seg2 = seg2;
    auto [s1, s2] = solve_steady_states(q_star, seg1, seg2);
    net.ss1 = s1;
    net.ss2 = s2;
    return net;
}

NetworkParams default_network() {
    SegmentParams s1{45.0, 0.6667, 1.0, 120.0, 2000.0, 1};
    SegmentParams s2{45.0, 0.8, 1.0, 90.0, 2000.0, 2};
    return make_network(s1, s2, 6.0);
}

}  // namespace arz
