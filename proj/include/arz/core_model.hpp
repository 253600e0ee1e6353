#pragma once

#include <utility>

namespace arz {

// One road segment. Segment 1 is downstream on [0, L], segment 2 upstream on [-L, 0].
struct SegmentParams {
    double v_max = 45.0;      // m/s
    double rho_max = 0.8;     // veh/m
    double gamma = 1.0;       // pressure exponent
    double tau = 120.0;       // relaxation time, s
    double length = 2000.0;   // m
    int segment_id = 1;

    double pressure_coeff() const;  // v_max / rho_max^gamma
    void validate() const;          // throws ValidationError
};

// Congested equilibrium of one segment plus its characteristic data.
struct SteadyState {
    double rho_star = 0.0;
    double v_star = 0.0;
    double p_star = 0.0;
    double q_star = 0.0;
    double r = 0.0;         // v* / (gamma p* - v*), in (0, 1)
    double lambda_w = 0.0;  // v*
    double lambda_v = 0.0;  // gamma p* - v*
    double kappa = 0.0;     // L / lambda_w + L / lambda_v
};

struct NetworkParams {
    SegmentParams seg1;
    SegmentParams seg2;
    SteadyState ss1;
    SteadyState ss2;

    const SegmentParams& seg(int id) const { return id == 1 ? seg1 : seg2; }
    const SteadyState& ss(int id) const { return id == 1 ? ss1 : ss2; }
    double length() const { return seg1.length; }
    double q_star() const { return ss1.q_star; }
    // One full loop of both segments: kappa_1 + kappa_2.
    double round_trip() const { return ss1.kappa + ss2.kappa; }
};

double pressure(double rho, const SegmentParams& params);
double equilibrium_velocity(double rho, const SegmentParams& params);
double equilibrium_flow(double rho, const SegmentParams& params);
double critical_density(const SegmentParams& params);
double driver_property(double rho, double v, const SegmentParams& params);

// Capacity of a segment: equilibrium flow at critical density.
double capacity(const SegmentParams& params);

// Congested-branch root of Q(rho) = q on (rho_c, rho_max].
double congested_density(double q, const SegmentParams& params);

// Fills r, lambda_w, lambda_v, kappa from rho*, v*, p*.
SteadyState riemann_coefficients(SteadyState ss, const SegmentParams& params);

std::pair<SteadyState, SteadyState> solve_steady_states(double q_star, const SegmentParams& seg1,
                                                        const SegmentParams& seg2);

// Validates both segments, solves the steady states, and checks the shared invariants.
NetworkParams make_network(const SegmentParams& seg1, const SegmentParams& seg2, double q_star);

// Default two-segment network: L = 2 km, v_max = 45 m/s, rho_max = (0.6667, 0.8) veh/m,
// gamma = 1, tau = (120, 90) s, q* = 6 veh/s.
NetworkParams default_network();

}  // namespace arz
