#pragma once

#include "arz/controller.hpp"
#include "arz/core_model.hpp"
#include "arz/kernels.hpp"
#include "arz/linearize.hpp"

#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace arz {

// rho_i(x, 0) = rho_i* (1 + epsilon sin(2 pi k_i x / L + phase_i)), v_i = V_i(rho_i).
// The defaults give a half-wave density bump on segment 1 and a dip on segment 2, both vanishing
// at x = -L, 0, L, so the data match every boundary relation and change the total vehicle count.
struct InitialCondition {
    double epsilon = 0.05;
    double k1 = 0.5;
    double k2 = 0.5;
    double phase1 = 0.0;
    double phase2 = 0.0;
};

enum class LoopMode { open, closed };
enum class ModelKind { linear, nonlinear };

struct SimConfig {
    int N = 128;
    double cfl = 0.9;
    double t_final = 1000.0;
    LoopMode loop = LoopMode::closed;
    ModelKind model = ModelKind::nonlinear;
    InitialCondition ic;
    int record_every = 1;
    RowModel rows = RowModel::linearized;
    // Linear closed loop only: correct v~2 so the junction relation holds at t = 0.
    bool compatible_start = false;

    void validate() const;
};

struct SimRecord {
    double h = 0.0;
    std::vector<double> times;
    std::vector<FieldState> phys1, phys2;      // (rho, v) at the nodes
    std::vector<FieldState> scaled1, scaled2;  // (w_bar, v~) at the nodes
    std::vector<double> control;
    std::vector<double> norm1, norm2, total;
    std::vector<double> mass;                  // vehicles on both segments (nonlinear only)
    double max_mass_defect = 0.0;              // per-step relative accounting error (nonlinear only)
    double max_courant = 0.0;
    long steps = 0;
};

// Called after every accepted step with the nodal scaled states.
using StepObserver =
    std::function<void(double t, const FieldState& seg1, const FieldState& seg2, double control)>;

// Nodal initial data in physical variables.
std::pair<FieldState, FieldState> initial_condition(const InitialCondition& ic, const NetworkParams& net,
                                                    int N);

SimRecord run_linear(const SimConfig& cfg, const NetworkParams& net, const KernelTable* k1 = nullptr,
                     const KernelTable* k2 = nullptr, const StepObserver& observer = {});

SimRecord run_nonlinear(const SimConfig& cfg, const NetworkParams& net, const KernelTable* k1 = nullptr,
                        const KernelTable* k2 = nullptr, const StepObserver& observer = {});

// Dispatches on cfg.model.
SimRecord run_simulation(const SimConfig& cfg, const NetworkParams& net, const KernelTable* k1 = nullptr,
                         const KernelTable* k2 = nullptr, const StepObserver& observer = {});

// Given the trace (rho2, v2) just upstream of the junction and the ramp inflow U0, returns
// (rho1, v1) just downstream: rho1 v1 = rho2 v2 + U0 and v1 + p1(rho1) = v2 + p2(rho2),
// on the congested branch.
std::pair<double, double> junction_coupling(std::pair<double, double> left_trace, double U0,
                                            const NetworkParams& net);

// Characteristic junction solve used by the finite-volume scheme: the driver property w
// arrives from upstream and the downstream speed v1 arrives from segment 1.
struct JunctionState {
    double rho1 = 0.0, v1 = 0.0, rho2 = 0.0, v2 = 0.0;
    double q1 = 0.0, q2 = 0.0, w = 0.0;
};
JunctionState junction_state(double w_upstream, double v_downstream, double U0, const NetworkParams& net);

// Congested root of rho (w - p(rho)) = q at driver level w.
double congested_root(double q, double w, const SegmentParams& params);

// Sup over nodes of |rho - rho*| / rho* and |v - v*| / v* for one recorded time.
double relative_deviation(const FieldState& phys, const SteadyState& ss);

struct NormSummary {
    std::vector<double> total;
    double rate = 0.0;
    bool converged = false;  // final norm at most 1e-6 of the initial norm
};

NormSummary norms_and_rate(const SimRecord& record, double window);

void write_record_csv(const SimRecord& record, std::ostream& out);
void write_norms_csv(const SimRecord& record, std::ostream& out);

}  // namespace arz
