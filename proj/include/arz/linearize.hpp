#pragma once

#include "arz/core_model.hpp"

#include <vector>

namespace arz {

enum class Representation { physical, riemann, scaled };

// Nodal profiles on one segment. Physical: (rho, v). Riemann: (w~, v~). Scaled: (w_bar, v~).
struct FieldState {
    int segment_id = 1;
    std::vector<double> grid;
    std::vector<double> a;
    std::vector<double> b;
    Representation rep = Representation::physical;

    std::size_t size() const { return grid.size(); }
    void validate() const;
};

// N + 1 uniform nodes on [0, L] (segment 1) or [-L, 0] (segment 2).
std::vector<double> segment_grid(int segment_id, double length, int n_cells);

FieldState make_field(int segment_id, double length, int n_cells, Representation rep);

FieldState to_riemann(const FieldState& phys, const SteadyState& ss, const SegmentParams& params);
FieldState from_riemann(const FieldState& riem, const SteadyState& ss, const SegmentParams& params);
FieldState scale_w(const FieldState& riem, const SteadyState& ss, const SegmentParams& params);
FieldState unscale_w(const FieldState& scaled, const SteadyState& ss, const SegmentParams& params);

// Pointwise helpers shared by the field-level maps.
double riemann_w(double rho, double v, const SteadyState& ss, const SegmentParams& params);
double scale_factor(double x, const SteadyState& ss, const SegmentParams& params);

// Source coefficient of the scaled velocity equation, -(1/tau) exp(-x / (tau v*)).
double coupling_coefficient(double x, const SteadyState& ss, const SegmentParams& params);

// Linear boundary relations of the scaled system:
//   v~1(L)  = outlet * w_bar1(L)
//   w_bar2(-L) = inlet * v~2(-L)
//   w_bar1(0) = junction_w * w_bar2(0)
//   v~2(0)  = junction_v1 * v~1(0) + junction_w2 * w_bar2(0) + control_gain * U0
struct BoundaryRows {
    double outlet = 0.0;
    double inlet = 0.0;
    double junction_w = 1.0;
    double junction_v1 = 0.0;
    double junction_w2 = 0.0;
    double control_gain = 0.0;
};

enum class RowModel {
    linearized,  // Jacobian of the nonlinear boundary and junction laws (default)
    published    // closed-form reflection gains of the reference design
};

BoundaryRows boundary_rows(const NetworkParams& net, RowModel model = RowModel::linearized);

}  // namespace arz
