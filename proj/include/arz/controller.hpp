#pragma once

#include "arz/core_model.hpp"
#include "arz/kernels.hpp"
#include "arz/linearize.hpp"

#include <vector>

namespace arz {

// Target variables: alpha_i = w_bar_i, beta_i = v~_i minus the kernel integral.
struct TargetState {
    std::vector<double> alpha1, beta1;  // on [0, L]
    std::vector<double> alpha2, beta2;  // on [-L, 0]
};

// Composite trapezoid of uniformly spaced samples.
double trapezoid(const std::vector<double>& y, double h);

TargetState backstepping_transform(const FieldState& seg1, const FieldState& seg2,
                                   const KernelTable& k1, const KernelTable& k2);

// Recovers the scaled states from (alpha, beta) by substitution along the grid.
std::pair<FieldState, FieldState> inverse_transform(const TargetState& target, const KernelTable& k1,
                                                    const KernelTable& k2);

// Kernel integrals at the junction:
//   seg1 = int_0^L  K1vw(0, xi) w_bar1 + K1vv(0, xi) v~1 dxi
//   seg2 = int_-L^0 K2vw(0, xi) w_bar2 + K2vv(0, xi) v~2 dxi
struct JunctionIntegrals {
    double seg1 = 0.0;
    double seg2 = 0.0;
};

JunctionIntegrals junction_integrals(const FieldState& seg1, const FieldState& seg2,
                                     const KernelTable& k1, const KernelTable& k2);

// Feedback law U0 = (seg2 integral - junction_v1 * seg1 integral) / control_gain. It turns the
// junction row into beta2(0) = junction_v1 beta1(0) + junction_w2 alpha2(0).
double control_input(const FieldState& seg1, const FieldState& seg2, const KernelTable& k1,
                     const KernelTable& k2, const BoundaryRows& rows);
double control_input(const FieldState& seg1, const FieldState& seg2, const KernelTable& k1,
                     const KernelTable& k2, const NetworkParams& net,
                     RowModel model = RowModel::linearized);

struct TargetResidual {
    double transport = 0.0;  // sup of upwind transport residuals of alpha_i and beta_i
    double boundary = 0.0;   // sup of the four boundary relation defects
    double total() const { return transport > boundary ? transport : boundary; }
};

// Residual of the decoupled target system along a recorded trajectory with uniform time step.
TargetResidual target_residual(const std::vector<double>& times, const std::vector<TargetState>& states,
                               const NetworkParams& net, const BoundaryRows& rows);

// Smoothly corrects v~2 so that the closed-loop junction relation already holds at t = 0.
// The correction profile vanishes, with zero slope, at the inlet.
void make_compatible(const FieldState& seg1, FieldState& seg2, const KernelTable& k1,
                     const KernelTable& k2, const BoundaryRows& rows);

}  // namespace arz
