#pragma once

#include "arz/core_model.hpp"
#include "arz/linearize.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

namespace arz {

// Boundary coupling matrix acting on (w_bar1, w_bar2, v~1, v~2) boundary values.
struct CouplingMatrix {
    std::array<std::array<double, 4>, 4> entries{};
    double& operator()(int i, int j) { return entries[i][j]; }
    double operator()(int i, int j) const { return entries[i][j]; }
};

// Boundary stability test matrix of the two-segment network (zero-based indices):
// H(0,3) = 1, H(1,2) = r2/r1, H(1,3) = (r1 - r2)/(1 - r1), H(2,0) = e1/r2, H(3,1) = r1 e2,
// with e_i = exp(-L / (tau_i v_i*)).
CouplingMatrix coupling_matrix(const NetworkParams& net);

// Matrix mapping outgoing to incoming boundary values under the given rows,
// ordered (w_bar1, w_bar2, v~1, v~2).
CouplingMatrix row_coupling_matrix(const BoundaryRows& rows);

struct Sp1Options {
    int restarts = 16;
    double tol = 1e-9;
    std::uint64_t seed = 1;
};

// Infimum over positive diagonal similarities of the induced 2-norm.
double sp1(const CouplingMatrix& H, const Sp1Options& opts = {});

// Induced 2-norm of D H D^-1 with D = diag(exp(0), exp(t1), exp(t2), exp(t3)).
double scaled_norm(const CouplingMatrix& H, const std::array<double, 3>& log_scales);

// Spectral radius of H, a lower bound for sp1.
double spectral_radius(const CouplingMatrix& H);

// Spectral radius of |H|; equals sp1 when H is nonnegative and irreducible.
double abs_spectral_radius(const CouplingMatrix& H);

struct ClosedForm {
    double value = 0.0;
    double a = 0.0;
    double b = 0.0;
    bool applicable = true;  // false when r1 < r2
};

ClosedForm closed_form_condition(const NetworkParams& net);

// Closed-loop recurrence for the target state at the junction:
// x(t) = coef_short x(t - kappa2) + coef_long x(t - kappa1 - kappa2).
struct DifferenceModel {
    double coef_short = 0.0;
    double coef_long = 0.0;
    double kappa1 = 0.0;
    double kappa2 = 0.0;
    double period() const { return kappa1 + kappa2; }
};

DifferenceModel build_difference_model(const NetworkParams& net,
                                       RowModel model = RowModel::published);
DifferenceModel difference_model_from_rows(const BoundaryRows& rows, const NetworkParams& net);

struct DifferenceSeries {
    std::vector<double> t;
    std::vector<double> x;
    double dt = 0.0;
    double rate = 0.0;             // fitted exponential decay rate, 1/s
    double delay_error = 0.0;      // max |rounded delay - true delay|, s
    bool diverged = false;
};

// history(t) is sampled on [-(kappa1 + kappa2), 0]; output covers [0, horizon].
DifferenceSeries simulate_difference(const DifferenceModel& model,
                                     const std::function<double(double)>& history,
                                     double horizon, double dt);

// Least-squares decay rate on the log of window peaks of |x|; window = period.
// Windows whose peak falls below floor are ignored. Returns 0 if fewer than two windows remain.
double fit_envelope_rate(const std::vector<double>& t, const std::vector<double>& x, double window,
                         double floor = 0.0);

}  // namespace arz
