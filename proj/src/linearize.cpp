#include "arz/linearize.hpp"

#include "arz/errors.hpp"

#include <cmath>
#include <sstream>
#include <string>

namespace arz {

namespace {

void require_rep(const FieldState& f, Representation want, const char* op) {
    f.validate();
    if (f.rep != want) {
        throw ValidationError(std::string(op) + ": representation mismatch");
    }
}

void check_position(double x, const SegmentParams& params) {
    const double tol = 1e-9 * params.length;
    const double lo = params.segment_id == 1 ? 0.0 : -params.length;
    const double hi = params.segment_id == 1 ? params.length : 0.0;
    if (!(x >= lo - tol && x <= hi + tol)) {
        std::ostringstream msg;
        msg << "position " << x << " outside segment " << params.segment_id << " interval [" << lo
            << ", " << hi << "]";
        throw ValidationError(msg.str());
    }
}

}  // namespace

void FieldState::validate() const {
    if (grid.size() < 2 || a.size() != grid.size() || b.size() != grid.size()) {
        throw ValidationError("field arrays must share the grid length (>= 2)");
    }
}

std::vector<double> segment_grid(int segment_id, double length, int n_cells) {
    if (n_cells < 1) {
        throw ValidationError("grid needs at least one cell");
    }
    std::vector<double> x(static_cast<std::size_t>(n_cells) + 1);
    const double h = length / n_cells;
    const double x0 = segment_id == 1 ? 0.0 : -length;
    for (int i = 0; i <= n_cells; ++i) {
        x[i] = x0 + i * h;
    }
    x.back() = segment_id == 1 ? length : 0.0;
    return x;
}

FieldState make_field(int segment_id, double length, int n_cells, Representation rep) {
    FieldState f;
    f.segment_id = segment_id;
    f.grid = segment_grid(segment_id, length, n_cells);
    f.a.assign(f.grid.size(), 0.0);
    f.b.assign(f.grid.size(), 0.0);
    f.rep = rep;
    return f;
}

double riemann_w(double rho, double v, const SteadyState& ss, const SegmentParams& params) {
    const double gp = params.gamma * ss.p_star;
    return (gp / ss.q_star) * (rho * v - ss.q_star) - (v - ss.v_star) / ss.r;
}

double scale_factor(double x, const SteadyState& ss, const SegmentParams& params) {
    return std::exp(x / (params.tau * ss.v_star));
}

FieldState to_riemann(const FieldState& phys, const SteadyState& ss, const SegmentParams& params) {
    require_rep(phys, Representation::physical, "to_riemann");
    FieldState out = phys;
    out.rep = Representation::riemann;
    for (std::size_t i = 0; i < phys.size(); ++i) {
        out.a[i] = riemann_w(phys.a[i], phys.b[i], ss, params);
        out.b[i] = phys.b[i] - ss.v_star;
    }
    return out;
}

FieldState from_riemann(const FieldState& riem, const SteadyState& ss, const SegmentParams& params) {
    require_rep(riem, Representation::riemann, "from_riemann");
    const double gp = params.gamma * ss.p_star;
    FieldState out = riem;
    out.rep = Representation::physical;
    for (std::size_t i = 0; i < riem.size(); ++i) {
        const double v = ss.v_star + riem.b[i];
        const double flux = ss.q_star + (ss.q_star / gp) * (riem.a[i] + riem.b[i] / ss.r);
        if (!(v > 0.0)) {
            throw ValidationError("from_riemann: recovered speed is not positive (outside linearization range)");
        }
        const double rho = flux / v;
        if (!(rho > 0.0 && rho < params.rho_max)) {
            throw ValidationError("from_riemann: recovered density outside (0, rho_max)");
        }
        out.a[i] = rho;
        out.b[i] = v;
    }
    return out;
}

FieldState scale_w(const FieldState& riem, const SteadyState& ss, const SegmentParams& params) {
    require_rep(riem, Representation::riemann, "scale_w");
    FieldState out = riem;
    out.rep = Representation::scaled;
    for (std::size_t i = 0; i < riem.size(); ++i) {
        out.a[i] = scale_factor(riem.grid[i], ss, params) * riem.a[i];
    }
    return out;
}

FieldState unscale_w(const FieldState& scaled, const SteadyState& ss, const SegmentParams& params) {
    require_rep(scaled, Representation::scaled, "unscale_w");
    FieldState out = scaled;
    out.rep = Representation::riemann;
    for (std::size_t i = 0; i < scaled.size(); ++i) {
        out.a[i] = scaled.a[i] / scale_factor(scaled.grid[i], ss, params);
    }
    return out;
}

double coupling_coefficient(double x, const SteadyState& ss, const SegmentParams& params) {
    check_position(x, params);
    return -std::exp(-x / (params.tau * ss.v_star)) / params.tau;
}

BoundaryRows boundary_rows(const NetworkParams& net, RowModel model) {
    const double L = net.length();
    const SteadyState& s1 = net.ss1;
    const SteadyState& s2 = net.ss2;
    const double e1 = std::exp(-L / (net.seg1.tau * s1.v_star));
    const double e2 = std::exp(-L / (net.seg2.tau * s2.v_star));
    BoundaryRows rows;
    rows.junction_w = 1.0;
    if (model == RowModel::published) {
        if (s1.r == 1.0) {
            throw ValidationError("junction row degenerate: r_1 = 1");
        }
        rows.outlet = s1.r * e1;
        rows.inlet = e2 / s2.r;
        rows.junction_v1 = s2.r / s1.r;
        rows.junction_w2 = (s1.r - s2.r) / (1.0 - s1.r);
        rows.control_gain = s2.v_star * (1.0 - s2.r) / s2.q_star;
        return rows;
    }
    // Fixed outlet flux: d(rho v) = 0 at x = L. Fixed inlet flux: same at x = -L.
    rows.outlet = -s1.r * e1;
    rows.inlet = -e2 / s2.r;
    // Junction: w continuous, flux jumps by U0; ratio of the two pressure slopes enters.
    const double slope_ratio = (net.seg2.gamma * s2.p_star) / (net.seg1.gamma * s1.p_star);
    rows.junction_v1 = (s2.r / s1.r) * slope_ratio;
    rows.junction_w2 = s2.r * (slope_ratio - 1.0);
    rows.control_gain = -s2.v_star * (1.0 + s2.r) / s2.q_star;
    return rows;
}

}  // namespace arz
