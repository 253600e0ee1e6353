#include "arz/simulate.hpp"

#include "arz/errors.hpp"
#include "arz/stability.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <sstream>

namespace arz {

namespace {

constexpr double kRhoFloor = 1e-6;

// Pressure without the domain check; the caller guards the density range.
double pressure_raw(double rho, const SegmentParams& p) {
    const double c = p.pressure_coeff();
    return p.gamma == 1.0 ? c * rho : c * std::pow(rho, p.gamma);
}

double eq_velocity_raw(double rho, const SegmentParams& p) {
    return p.v_max - pressure_raw(rho, p);
}

double segment_norm(const FieldState& s, double h) {
    std::vector<double> e(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        e[i] = s.a[i] * s.a[i] + s.b[i] * s.b[i];
    }
    return std::sqrt(trapezoid(e, h));
}

FieldState physical_to_scaled(const FieldState& phys, const NetworkParams& net) {
    const int id = phys.segment_id;
    FieldState out = phys;
    out.rep = Representation::scaled;
    const SteadyState& ss = net.ss(id);
    const SegmentParams& seg = net.seg(id);
    for (std::size_t i = 0; i < phys.size(); ++i) {
        out.a[i] = scale_factor(phys.grid[i], ss, seg) * riemann_w(phys.a[i], phys.b[i], ss, seg);
        out.b[i] = phys.b[i] - ss.v_star;
    }
    return out;
}

// Affine inverse of the linear maps without range checks (used for reporting linear runs).
FieldState scaled_to_physical(const FieldState& scaled, const NetworkParams& net) {
    const int id = scaled.segment_id;
    FieldState out = scaled;
    out.rep = Representation::physical;
    const SteadyState& ss = net.ss(id);
    const SegmentParams& seg = net.seg(id);
    const double gp = seg.gamma * ss.p_star;
    for (std::size_t i = 0; i < scaled.size(); ++i) {
        const double wt = scaled.a[i] / scale_factor(scaled.grid[i], ss, seg);
        const double v = ss.v_star + scaled.b[i];
        const double flux = ss.q_star + (ss.q_star / gp) * (wt + scaled.b[i] / ss.r);
        out.a[i] = flux / v;
        out.b[i] = v;
    }
    return out;
}

void push_record(SimRecord& rec, double t, const FieldState& phys1, const FieldState& phys2,
                 const FieldState& sc1, const FieldState& sc2, double control) {
    rec.times.push_back(t);
    rec.phys1.push_back(phys1);
    rec.phys2.push_back(phys2);
    rec.scaled1.push_back(sc1);
    rec.scaled2.push_back(sc2);
    rec.control.push_back(control);
    const double n1 = segment_norm(sc1, rec.h);
    const double n2 = segment_norm(sc2, rec.h);
    rec.norm1.push_back(n1);
    rec.norm2.push_back(n2);
    rec.total.push_back(std::sqrt(n1 * n1 + n2 * n2));
}

void require_tables(const SimConfig& cfg, const KernelTable* k1, const KernelTable* k2) {
    if (cfg.loop != LoopMode::closed) {
        return;
    }
    if (k1 == nullptr || k2 == nullptr) {
        throw ValidationError("closed-loop simulation requires kernel tables");
    }
    if (k1->M() != cfg.N || k2->M() != cfg.N || k1->segment_id() != 1 || k2->segment_id() != 2) {
        throw ValidationError("kernel tables must match the simulation grid (M = N)");
    }
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace

void SimConfig::validate() const {
    if (N < 32) {
        throw ValidationError("N must be at least 32");
    }
    if (!(cfl > 0.0 && cfl <= 0.95)) {
        throw ValidationError("cfl must lie in (0, 0.95]");
    }
    if (!(t_final > 0.0)) {
        throw ValidationError("t_final must be positive");
    }
    if (!(ic.epsilon >= 0.0 && ic.epsilon < 0.5)) {
        throw ValidationError("initial amplitude epsilon must lie in [0, 0.5)");
    }
    if (record_every < 1) {
        throw ValidationError("record_every must be at least 1");
    }
}

std::pair<FieldState, FieldState> initial_condition(const InitialCondition& ic, const NetworkParams& net,
                                                    int N) {
    if (!(ic.epsilon >= 0.0 && ic.epsilon < 0.5)) {
        throw ValidationError("initial amplitude epsilon must lie in [0, 0.5)");
    }
    const double L = net.length();
    auto build = [&](int id, double k, double phase) {
        FieldState f = make_field(id, L, N, Representation::physical);
        const SteadyState& ss = net.ss(id);
        const SegmentParams& seg = net.seg(id);
        for (std::size_t i = 0; i < f.size(); ++i) {
            const double rho =
                ss.rho_star * (1.0 + ic.epsilon * std::sin(2.0 * std::numbers::pi * k * f.grid[i] / L + phase));
            if (!(rho > 0.0 && rho < seg.rho_max)) {
                throw ValidationError("initial density leaves (0, rho_max) on segment " + std::to_string(id));
            }
            f.a[i] = rho;
            f.b[i] = equilibrium_velocity(rho, seg);
        }
        return f;
    };
    return {build(1, ic.k1, ic.phase1), build(2, ic.k2, ic.phase2)};
}

SimRecord run_linear(const SimConfig& cfg, const NetworkParams& net, const KernelTable* k1,
                     const KernelTable* k2, const StepObserver& observer) {
    cfg.validate();
    require_tables(cfg, k1, k2);
    const bool closed = cfg.loop == LoopMode::closed;
    const BoundaryRows rows = boundary_rows(net, cfg.rows);
    const int N = cfg.N;
    const double L = net.length();
    const double h = L / N;

    auto [p1, p2] = initial_condition(cfg.ic, net, N);
    FieldState s1 = scale_w(to_riemann(p1, net.ss1, net.seg1), net.ss1, net.seg1);
    FieldState s2 = scale_w(to_riemann(p2, net.ss2, net.seg2), net.ss2, net.seg2);
    if (closed && cfg.compatible_start) {
        make_compatible(s1, s2, *k1, *k2, rows);
    }

    std::vector<double> c1(N + 1), c2(N + 1);
    for (int i = 0; i <= N; ++i) {
        c1[i] = coupling_coefficient(s1.grid[i], net.ss1, net.seg1);
        c2[i] = coupling_coefficient(s2.grid[i], net.ss2, net.seg2);
    }
    const double v1 = net.ss1.lambda_w, v2 = net.ss2.lambda_w;
    const double l1 = net.ss1.lambda_v, l2 = net.ss2.lambda_v;
    const double amax = std::max({v1, v2, l1, l2});
    const long nsteps = static_cast<long>(std::ceil(cfg.t_final / (cfg.cfl * h / amax)));
    const double dt = cfg.t_final / nsteps;

    SimRecord rec;
    rec.h = h;
    rec.max_courant = dt * amax / h;
    double U = closed ? control_input(s1, s2, *k1, *k2, rows) : 0.0;
    push_record(rec, 0.0, scaled_to_physical(s1, net), scaled_to_physical(s2, net), s1, s2, U);

    FieldState n1 = s1, n2 = s2;
    // Trapezoid end weight of v~2(0) inside the segment-2 junction integral.
    const double self_weight = closed ? 0.5 * h * k2->kvv(N, N) : 0.0;
    for (long step = 1; step <= nsteps; ++step) {
        for (int i = 1; i <= N; ++i) {
            n1.a[i] = s1.a[i] - v1 * dt / h * (s1.a[i] - s1.a[i - 1]);
            n2.a[i] = s2.a[i] - v2 * dt / h * (s2.a[i] - s2.a[i - 1]);
        }
        for (int i = 0; i < N; ++i) {
            n1.b[i] = s1.b[i] + l1 * dt / h * (s1.b[i + 1] - s1.b[i]) + dt * c1[i] * s1.a[i];
            n2.b[i] = s2.b[i] + l2 * dt / h * (s2.b[i + 1] - s2.b[i]) + dt * c2[i] * s2.a[i];
        }
        n1.a[0] = rows.junction_w * n2.a[N];
        n2.a[0] = rows.inlet * n2.b[0];
        n1.b[N] = rows.outlet * n1.a[N];
        const double passive = rows.junction_v1 * n1.b[0] + rows.junction_w2 * n2.a[N];
        if (closed) {
            // The junction value enters its own feedback integral; solve that scalar relation exactly.
            n2.b[N] = 0.0;
            const JunctionIntegrals I = junction_integrals(n1, n2, *k1, *k2);
            n2.b[N] = (passive + I.seg2 - rows.junction_v1 * I.seg1) / (1.0 - self_weight);
            U = (I.seg2 + self_weight * n2.b[N] - rows.junction_v1 * I.seg1) / rows.control_gain;
        } else {
            n2.b[N] = passive;
            U = 0.0;
        }
        std::swap(s1, n1);
        std::swap(s2, n2);
        const double t = step * dt;
        if (!std::isfinite(s1.b[0]) || !std::isfinite(s2.b[N]) || !std::isfinite(s1.a[N])) {
            throw NumericalError("linear simulation produced NaN at step " + std::to_string(step));
        }
        if (observer) {
            observer(t, s1, s2, U);
        }
        if (step % cfg.record_every == 0 || step == nsteps) {
            push_record(rec, t, scaled_to_physical(s1, net), scaled_to_physical(s2, net), s1, s2, U);
        }
    }
    rec.steps = nsteps;
    return rec;
}

double congested_root(double q, double w, const SegmentParams& params) {
    const double c = params.pressure_coeff();
    const double g = params.gamma;
    if (!(w > 0.0) || !(q > 0.0)) {
        throw NumericalError("congested root needs positive flux and driver property");
    }
    if (g == 1.0) {
        const double disc = w * w - 4.0 * c * q;
        if (disc < 0.0) {
            std::ostringstream msg;
            msg << "flux " << q << " exceeds the maximum " << w * w / (4.0 * c) << " at driver level " << w
                << " on segment " << params.segment_id;
            throw NumericalError(msg.str());
        }
        return (w + std::sqrt(disc)) / (2.0 * c);
    }
    double lo = std::pow(w / ((g + 1.0) * c), 1.0 / g);
    double hi = std::pow(w / c, 1.0 / g);
    const double qmax = lo * (w - c * std::pow(lo, g));
    if (q > qmax) {
        std::ostringstream msg;
        msg << "flux " << q << " exceeds the maximum " << qmax << " at driver level " << w << " on segment "
            << params.segment_id;
        throw NumericalError(msg.str());
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid * (w - c * std::pow(mid, g)) > q) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

std::pair<double, double> junction_coupling(std::pair<double, double> left_trace, double U0,
                                            const NetworkParams& net) {
    const auto [rho2, v2] = left_trace;
    if (!(rho2 > 0.0 && rho2 < net.seg2.rho_max && v2 > 0.0)) {
        throw ValidationError("junction_coupling: upstream trace is not physical");
    }
    const double w = v2 + pressure(rho2, net.seg2);
    const double q1 = rho2 * v2 + U0;
    const double c1 = net.seg1.pressure_coeff();
    const double g1 = net.seg1.gamma;
    const double rho_peak = std::pow(w / ((g1 + 1.0) * c1), 1.0 / g1);
    const double q_peak = rho_peak * (w - c1 * std::pow(rho_peak, g1));
    if (!(q1 > 0.0) || q1 > q_peak) {
        std::ostringstream msg;
        msg << "junction_coupling: no congested root; feasible U0 interval is (" << -rho2 * v2 << ", "
            << q_peak - rho2 * v2 << "] veh/s";
        throw NumericalError(msg.str());
    }
    const double rho1 = congested_root(q1, w, net.seg1);
    if (!(rho1 < net.seg1.rho_max)) {
        throw NumericalError("junction_coupling: downstream density reaches rho_max");
    }
    return {rho1, q1 / rho1};
}

JunctionState junction_state(double w_upstream, double v_downstream, double U0, const NetworkParams& net) {
    JunctionState j;
    j.w = w_upstream;
    const double gap = w_upstream - v_downstream;
    if (!(gap > 0.0) || !(v_downstream > 0.0)) {
        throw NumericalError("junction: downstream speed incompatible with upstream driver property");
    }
    j.rho1 = std::pow(gap / net.seg1.pressure_coeff(), 1.0 / net.seg1.gamma);
    if (!(j.rho1 < net.seg1.rho_max)) {
        throw NumericalError("junction: downstream density reaches rho_max");
    }
    j.v1 = v_downstream;
    j.q1 = j.rho1 * j.v1;
    j.q2 = j.q1 - U0;
    j.rho2 = congested_root(j.q2, w_upstream, net.seg2);
    if (!(j.rho2 < net.seg2.rho_max)) {
        throw NumericalError("junction: upstream density reaches rho_max");
    }
    j.v2 = j.q2 / j.rho2;
    return j;
}

SimRecord run_nonlinear(const SimConfig& cfg, const NetworkParams& net, const KernelTable* k1,
                        const KernelTable* k2, const StepObserver& observer) {
    cfg.validate();
    require_tables(cfg, k1, k2);
    const bool closed = cfg.loop == LoopMode::closed;
    const BoundaryRows rows = boundary_rows(net, cfg.rows);
    const int N = cfg.N;
    const double L = net.length();
    const double h = L / N;
    const double q_star = net.q_star();
    const SegmentParams& sp1 = net.seg1;
    const SegmentParams& sp2 = net.seg2;

    // Cell states (rho, rho w), initialised with the initial profile at cell centres.
    std::vector<double> rho1(N), y1(N), rho2(N), y2(N);
    {
        InitialCondition ic = cfg.ic;
        auto init = [&](int id, double k, double phase, std::vector<double>& rho, std::vector<double>& y) {
            const SteadyState& ss = net.ss(id);
            const SegmentParams& seg = net.seg(id);
            const double x0 = id == 1 ? 0.0 : -L;
            for (int i = 0; i < N; ++i) {
                const double x = x0 + (i + 0.5) * h;
                const double r =
                    ss.rho_star * (1.0 + ic.epsilon * std::sin(2.0 * std::numbers::pi * k * x / L + phase));
                if (!(r > 0.0 && r < seg.rho_max)) {
                    throw ValidationError("initial density leaves (0, rho_max) on segment " + std::to_string(id));
                }
                rho[i] = r;
                y[i] = r * seg.v_max;  // on equilibrium: w = V + p = v_max
            }
        };
        init(1, ic.k1, ic.phase1, rho1, y1);
        init(2, ic.k2, ic.phase2, rho2, y2);
    }
    std::vector<double> v1(N), w1(N), v2(N), w2(N);
    auto primitives = [&]() {
        for (int i = 0; i < N; ++i) {
            w1[i] = y1[i] / rho1[i];
            v1[i] = w1[i] - pressure_raw(rho1[i], sp1);
            w2[i] = y2[i] / rho2[i];
            v2[i] = w2[i] - pressure_raw(rho2[i], sp2);
        }
    };

    struct Boundary {
        JunctionState junction;
        double rho_out, v_out, w_out;
        double rho_in, v_in, w_in;
    };
    auto boundary = [&](double U0) {
        Boundary b;
        b.junction = junction_state(w2[N - 1], v1[0], U0, net);
        b.w_out = w1[N - 1];
        b.rho_out = congested_root(q_star, b.w_out, sp1);
        b.v_out = q_star / b.rho_out;
        b.v_in = v2[0];
        if (!(b.v_in > 0.0)) {
            throw NumericalError("inlet speed is not positive");
        }
        b.rho_in = q_star / b.v_in;
        if (!(b.rho_in < sp2.rho_max)) {
            throw NumericalError("inlet density reaches rho_max");
        }
        b.w_in = b.v_in + pressure_raw(b.rho_in, sp2);
        return b;
    };

    FieldState ph1 = make_field(1, L, N, Representation::physical);
    FieldState ph2 = make_field(2, L, N, Representation::physical);
    auto nodal = [&](const Boundary& b) {
        for (int k = 1; k < N; ++k) {
            ph1.a[k] = 0.5 * (rho1[k - 1] + rho1[k]);
            ph1.b[k] = 0.5 * (v1[k - 1] + v1[k]);
            ph2.a[k] = 0.5 * (rho2[k - 1] + rho2[k]);
            ph2.b[k] = 0.5 * (v2[k - 1] + v2[k]);
        }
        ph1.a[0] = b.junction.rho1;
        ph1.b[0] = b.junction.v1;
        ph1.a[N] = b.rho_out;
        ph1.b[N] = b.v_out;
        ph2.a[0] = b.rho_in;
        ph2.b[0] = b.v_in;
        ph2.a[N] = b.junction.rho2;
        ph2.b[N] = b.junction.v2;
    };
    FieldState sc1, sc2;
    auto scaled = [&]() {
        sc1 = physical_to_scaled(ph1, net);
        sc2 = physical_to_scaled(ph2, net);
    };
    // The junction node depends on U0, so the feedback is a fixed point; it contracts quickly.
    auto control = [&](double guess) {
        double U0 = guess;
        for (int it = 0; it < 8; ++it) {
            nodal(boundary(U0));
            scaled();
            const double next = control_input(sc1, sc2, *k1, *k2, rows);
            const bool done = std::abs(next - U0) <= 1e-14 * (1.0 + std::abs(next));
            U0 = next;
            if (done) {
                break;
            }
        }
        return U0;
    };

    primitives();
    double U0 = closed ? control(0.0) : 0.0;
    Boundary bnd = boundary(U0);
    nodal(bnd);
    scaled();

    SimRecord rec;
    rec.h = h;
    auto total_mass = [&]() {
        double m = 0.0;
        for (int i = 0; i < N; ++i) {
            m += rho1[i] + rho2[i];
        }
        return m * h;
    };
    double mass = total_mass();
    push_record(rec, 0.0, ph1, ph2, sc1, sc2, U0);
    rec.mass.push_back(mass);

    std::vector<double> f1r(N + 1), f1y(N + 1), f2r(N + 1), f2y(N + 1);
    auto interior_fluxes = [&](const std::vector<double>& rho, const std::vector<double>& y,
                               const std::vector<double>& v, const std::vector<double>& w,
                               const SegmentParams& sp, std::vector<double>& fr, std::vector<double>& fy) {
        for (int k = 1; k < N; ++k) {
            const double gl = sp.gamma * pressure_raw(rho[k - 1], sp);
            const double gr = sp.gamma * pressure_raw(rho[k], sp);
            const double a = std::max({std::abs(v[k - 1]), std::abs(v[k - 1] - gl), std::abs(v[k]),
                                       std::abs(v[k] - gr)});
            const double ql = rho[k - 1] * v[k - 1];
            const double qr = rho[k] * v[k];
            fr[k] = 0.5 * (ql + qr) - 0.5 * a * (rho[k] - rho[k - 1]);
            fy[k] = 0.5 * (ql * w[k - 1] + qr * w[k]) - 0.5 * a * (y[k] - y[k - 1]);
        }
    };

    double t = 0.0;
    long step = 0;
    while (t < cfg.t_final * (1.0 - 1e-14)) {
        double amax = 0.0;
        for (int i = 0; i < N; ++i) {
            amax = std::max({amax, std::abs(v1[i]), std::abs(v1[i] - sp1.gamma * pressure_raw(rho1[i], sp1)),
                             std::abs(v2[i]), std::abs(v2[i] - sp2.gamma * pressure_raw(rho2[i], sp2))});
        }
        const double dt = std::min(cfg.cfl * h / amax, cfg.t_final - t);
        rec.max_courant = std::max(rec.max_courant, dt * amax / h);
        if (closed) {
            U0 = control(U0);
        }
        bnd = boundary(U0);
        const JunctionState& j = bnd.junction;

        interior_fluxes(rho1, y1, v1, w1, sp1, f1r, f1y);
        interior_fluxes(rho2, y2, v2, w2, sp2, f2r, f2y);
        f1r[0] = j.q1;
        f1y[0] = j.q1 * j.w;
        f1r[N] = q_star;
        f1y[N] = q_star * bnd.w_out;
        f2r[0] = q_star;
        f2y[0] = q_star * bnd.w_in;
        f2r[N] = j.q2;
        f2y[N] = j.q2 * j.w;

        const double r = dt / h;
        for (int i = 0; i < N; ++i) {
            rho1[i] -= r * (f1r[i + 1] - f1r[i]);
            y1[i] -= r * (f1y[i + 1] - f1y[i]);
            rho2[i] -= r * (f2r[i + 1] - f2r[i]);
            y2[i] -= r * (f2y[i + 1] - f2y[i]);
        }
        // Relaxation toward equilibrium speed, explicit Euler.
        auto relax = [&](double& rho, double& y, const SegmentParams& sp, int i) {
            if (!(rho > kRhoFloor) || !(rho < sp.rho_max)) {
                std::ostringstream msg;
                msg << "density " << rho << " left (" << kRhoFloor << ", rho_max) on segment " << sp.segment_id
                    << " cell " << i << " at step " << step + 1 << ", t = " << t + dt;
                throw NumericalError(msg.str());
            }
            const double v = y / rho - pressure_raw(rho, sp);
            if (!(v >= 0.0)) {
                std::ostringstream msg;
                msg << "negative speed " << v << " on segment " << sp.segment_id << " cell " << i << " at step "
                    << step + 1;
                throw NumericalError(msg.str());
            }
            y -= dt * rho * (v - eq_velocity_raw(rho, sp)) / sp.tau;
        };
        for (int i = 0; i < N; ++i) {
            relax(rho1[i], y1[i], sp1, i);
            relax(rho2[i], y2[i], sp2, i);
        }
        const double new_mass = total_mass();
        const double expected = dt * (f2r[0] - f1r[N] + f1r[0] - f2r[N]);
        rec.max_mass_defect = std::max(rec.max_mass_defect, std::abs(new_mass - mass - expected) / mass);
        mass = new_mass;
        t += dt;
        ++step;
        primitives();

        const bool want_record = step % cfg.record_every == 0 || t >= cfg.t_final * (1.0 - 1e-14);
        if (observer || want_record) {
            nodal(boundary(U0));
            scaled();
            if (observer) {
                observer(t, sc1, sc2, U0);
            }
            if (want_record) {
                push_record(rec, t, ph1, ph2, sc1, sc2, U0);
                rec.mass.push_back(mass);
            }
        }
    }
    rec.steps = step;
    return rec;
}

SimRecord run_simulation(const SimConfig& cfg, const NetworkParams& net, const KernelTable* k1,
                         const KernelTable* k2, const StepObserver& observer) {
    return cfg.model == ModelKind::linear ? run_linear(cfg, net, k1, k2, observer)
                                          : run_nonlinear(cfg, net, k1, k2, observer);
}

double relative_deviation(const FieldState& phys, const SteadyState& ss) {
    double d = 0.0;
    for (std::size_t i = 0; i < phys.size(); ++i) {
        d = std::max({d, std::abs(phys.a[i] - ss.rho_star) / ss.rho_star,
                      std::abs(phys.b[i] - ss.v_star) / ss.v_star});
    }
    return d;
}

NormSummary norms_and_rate(const SimRecord& record, double window) {
    if (record.times.size() < 10) {
        throw ValidationError("norms_and_rate needs at least 10 recorded times");
    }
    NormSummary s;
    s.total = record.total;
    const double floor = 1e-14 * std::max(1.0, record.total.front());
    s.rate = fit_envelope_rate(record.times, record.total, window, floor);
    s.converged = record.total.back() <= 1e-6 * record.total.front() || record.total.back() <= 1e-12;
    return s;
}

void write_record_csv(const SimRecord& record, std::ostream& out) {
    out << "time,x,segment,rho,v,wbar,vtilde,U0\n";
    for (std::size_t k = 0; k < record.times.size(); ++k) {
        const std::string t = fmt(record.times[k]);
        const std::string u = fmt(record.control[k]);
        for (int id = 1; id <= 2; ++id) {
            const FieldState& ph = id == 1 ? record.phys1[k] : record.phys2[k];
            const FieldState& sc = id == 1 ? record.scaled1[k] : record.scaled2[k];
            for (std::size_t i = 0; i < ph.size(); ++i) {
                out << t << ',' << fmt(ph.grid[i]) << ',' << id << ',' << fmt(ph.a[i]) << ',' << fmt(ph.b[i])
                    << ',' << fmt(sc.a[i]) << ',' << fmt(sc.b[i]) << ',' << u << '\n';
            }
        }
    }
}

void write_norms_csv(const SimRecord& record, std::ostream& out) {
    out << "time,norm_seg1,norm_seg2,total\n";
    for (std::size_t k = 0; k < record.times.size(); ++k) {
        out << fmt(record.times[k]) << ',' << fmt(record.norm1[k]) << ',' << fmt(record.norm2[k]) << ','
            << fmt(record.total[k]) << '\n';
    }
}

}  // namespace arz
