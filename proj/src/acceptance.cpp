#include "arz/acceptance.hpp"

#include "arz/commands.hpp"
#include "arz/controller.hpp"
#include "arz/errors.hpp"
#include "arz/kernels.hpp"
#include "arz/linearize.hpp"
#include "arz/simulate.hpp"
#include "arz/stability.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <sstream>

namespace arz {

namespace {

namespace fs = std::filesystem;

std::string num(double x, int digits = 3) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, x);
    return buf;
}

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

// Appends the runtime check and stamps the elapsed time; limit <= 0 means no limit.
void finish(CriterionResult& r, const Stopwatch& clock, double limit, std::ostringstream& detail) {
    r.seconds = clock.seconds();
    const bool in_time = limit <= 0.0 || r.seconds < limit;
    detail << "; runtime " << num(r.seconds) << " s";
    if (limit > 0.0) {
        detail << " (limit " << num(limit) << " s)";
    }
    r.passed = r.passed && in_time;
    r.detail = detail.str();
}

// Random admissible two-segment network; r1 > r2 when requested.
class NetworkSampler {
public:
    explicit NetworkSampler(std::uint64_t seed) : rng_(seed) {}

    NetworkParams next(bool require_ordered) {
        for (int attempt = 0; attempt < 100000; ++attempt) {
            const double v_max = uniform(30.0, 60.0);
            const double length = uniform(500.0, 5000.0);
            SegmentParams s1{v_max, uniform(0.4, 1.0), uniform(0.5, 2.5), uniform(30.0, 200.0), length, 1};
            SegmentParams s2{v_max, uniform(0.4, 1.0), uniform(0.5, 2.5), uniform(30.0, 200.0), length, 2};
            const double q = uniform(0.2, 0.95) * std::min(capacity(s1), capacity(s2));
            try {
                NetworkParams net = make_network(s1, s2, q);
                if (!require_ordered || net.ss1.r > net.ss2.r) {
                    return net;
                }
            } catch (const ValidationError&) {
                // inadmissible draw, try again
            }
        }
        throw NumericalError("could not sample an admissible network");
    }

private:
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    std::mt19937_64 rng_;
};

// Uniformly sampled scalar series with linear interpolation, clamped at the ends.
struct Series {
    std::vector<double> t, x;

    double at(double s) const {
        const double dt = t[1] - t[0];
        const double u = (s - t[0]) / dt;
        const long k = static_cast<long>(std::floor(u));
        if (k < 0) {
            return x.front();
        }
        if (k >= static_cast<long>(t.size()) - 1) {
            return x.back();
        }
        const double f = u - static_cast<double>(k);
        return (1.0 - f) * x[k] + f * x[k + 1];
    }
};

// Target variable beta2 at the junction along a closed-loop linear run with a compatible start.
Series junction_target_series(const NetworkParams& net, int N, double t_final) {
    const BoundaryRows rows = boundary_rows(net);
    KernelOptions opts;
    opts.M = N;
    const KernelTable k1 = solve_kernels(1, net, rows, opts);
    const KernelTable k2 = solve_kernels(2, net, rows, opts);
    SimConfig cfg;
    cfg.N = N;
    cfg.t_final = t_final;
    cfg.model = ModelKind::linear;
    cfg.loop = LoopMode::closed;
    cfg.record_every = 1 << 30;
    cfg.compatible_start = true;

    auto beta = [&](const FieldState& s1, const FieldState& s2) {
        return s2.b.back() - junction_integrals(s1, s2, k1, k2).seg2;
    };
    const auto init = initial_condition(cfg.ic, net, N);
    const FieldState s1 = scale_w(to_riemann(init.first, net.ss1, net.seg1), net.ss1, net.seg1);
    FieldState s2 = scale_w(to_riemann(init.second, net.ss2, net.seg2), net.ss2, net.seg2);
    make_compatible(s1, s2, k1, k2, rows);

    Series out;
    out.t.push_back(0.0);
    out.x.push_back(beta(s1, s2));
    run_linear(cfg, net, &k1, &k2, [&](double t, const FieldState& a, const FieldState& b, double) {
        out.t.push_back(t);
        out.x.push_back(beta(a, b));
    });
    return out;
}

// L2 distance between linear and nonlinear scaled states at time t_final, both segments.
double linearization_gap(const NetworkParams& net, int N, double epsilon, double t_final) {
    SimConfig cfg;
    cfg.N = N;
    cfg.t_final = t_final;
    cfg.loop = LoopMode::open;
    cfg.ic.epsilon = epsilon;
    cfg.record_every = 1 << 30;
    cfg.model = ModelKind::linear;
    const SimRecord lin = run_simulation(cfg, net);
    cfg.model = ModelKind::nonlinear;
    const SimRecord non = run_simulation(cfg, net);
    double sum = 0.0;
    for (int id = 1; id <= 2; ++id) {
        const FieldState& a = id == 1 ? lin.scaled1.back() : lin.scaled2.back();
        const FieldState& b = id == 1 ? non.scaled1.back() : non.scaled2.back();
        std::vector<double> sq(a.size());
        for (std::size_t i = 0; i < sq.size(); ++i) {
            sq[i] = std::pow(a.a[i] - b.a[i], 2) + std::pow(a.b[i] - b.b[i], 2);
        }
        sum += trapezoid(sq, lin.h);
    }
    return std::sqrt(sum);
}

std::string read_bytes(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

std::string format_result(const CriterionResult& r) {
    return std::string(r.passed ? "[PASS] " : "[FAIL] ") + std::to_string(r.id) + " " + r.name + ": " + r.detail;
}

CriterionResult criterion_steady_identities() {
    Stopwatch clock;
    CriterionResult r{1, "steady-state identities", true, "", 0.0};
    std::vector<NetworkParams> nets{default_network()};
    NetworkSampler sampler(11);
    for (int k = 0; k < 20; ++k) {
        nets.push_back(sampler.next(false));
    }
    double identity = 0.0;
    double flux = 0.0;
    for (const NetworkParams& net : nets) {
        for (int id = 1; id <= 2; ++id) {
            const SegmentParams& seg = net.seg(id);
            for (int k = 1; k <= 1000; ++k) {
                const double rho = seg.rho_max * k / 1001.0;
                identity = std::max(identity,
                                    std::abs(equilibrium_velocity(rho, seg) + pressure(rho, seg) - seg.v_max));
            }
            const SteadyState& ss = net.ss(id);
            flux = std::max(flux, std::abs(ss.rho_star * ss.v_star - ss.q_star) / ss.q_star);
        }
    }
    r.passed = identity < 1e-12 && flux < 1e-12;
    std::ostringstream d;
    d << nets.size() << " networks, 1000 densities per segment: max |V + p - v_max| " << num(identity)
      << " (< 1e-12), max relative flux mismatch " << num(flux) << " (< 1e-12)";
    finish(r, clock, 1.0, d);
    return r;
}

CriterionResult criterion_stability_cross_check() {
    Stopwatch clock;
    CriterionResult r{2, "stability cross-check", true, "", 0.0};
    NetworkSampler sampler(2024);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        const NetworkParams net = sampler.next(true);
        worst = std::max(worst, std::abs(sp1(coupling_matrix(net)) - closed_form_condition(net).value));
    }
    const NetworkParams net = default_network();
    const double s = sp1(coupling_matrix(net));
    const double cf = closed_form_condition(net).value;
    r.passed = worst <= 1e-6 && s < 1.0 && cf < 1.0;
    std::ostringstream d;
    d << "100 random networks with r1 > r2: max |sp1 - closed form| " << num(worst) << " (<= 1e-6); default sp1 "
      << num(s, 6) << ", closed form " << num(cf, 6) << " (both < 1)";
    finish(r, clock, 30.0, d);
    return r;
}

CriterionResult criterion_kernel_verification() {
    Stopwatch clock;
    CriterionResult r{3, "kernel verification", true, "", 0.0};
    const NetworkParams net = default_network();
    const BoundaryRows rows = boundary_rows(net);
    std::ostringstream d;
    double bc = 0.0;
    double min_ratio = 1e300;
    for (int id = 1; id <= 2; ++id) {
        const KernelProblem problem = kernel_problem(id, net, rows);
        double previous = 0.0;
        d << "seg" << id << " pde residual";
        for (int M : {32, 64, 128}) {
            KernelOptions opts;
            opts.M = M;
            const KernelResidual res = kernel_residual(solve_kernels(problem, id, opts), problem);
            bc = std::max(bc, res.bc);
            if (M > 32) {
                min_ratio = std::min(min_ratio, previous / res.pde);
            }
            previous = res.pde;
            d << " " << num(res.pde);
        }
        d << "; ";
    }

    // Second initialization: a random edge guess, compared with the zero start.
    const double tol = 1e-10;
    double spread = 0.0;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1e-2, 1e-2);
    for (int id = 1; id <= 2; ++id) {
        const KernelProblem problem = kernel_problem(id, net, rows);
        KernelOptions zero;
        zero.M = 64;
        zero.tol = tol;
        KernelOptions random = zero;
        random.initial_edge.resize(65);
        for (double& e : random.initial_edge) {
            e = u(rng);
        }
        const KernelTable a = solve_kernels(problem, id, zero);
        const KernelTable b = solve_kernels(problem, id, random);
        for (int p = 0; p <= 64; ++p) {
            for (int q = p; q <= 64; ++q) {
                spread = std::max({spread, std::abs(a.ref_kvw(p, q) - b.ref_kvw(p, q)),
                                   std::abs(a.ref_kvv(p, q) - b.ref_kvv(p, q))});
            }
        }
    }
    r.passed = bc <= 1e-12 && min_ratio >= 1.5 && spread <= 10.0 * tol;
    d << "min decrease per doubling " << num(min_ratio) << " (>= 1.5); max bc residual " << num(bc)
      << " (<= 1e-12); zero vs random start " << num(spread) << " (<= " << num(10.0 * tol) << ")";
    finish(r, clock, 60.0, d);
    return r;
}

CriterionResult criterion_difference_mechanism() {
    Stopwatch clock;
    CriterionResult r{4, "difference-equation mechanism", true, "", 0.0};
    const NetworkParams net = default_network();
    const double T = net.round_trip();
    const double t_final = 5.0 * T;
    const int N = 256;
    const DifferenceModel model = difference_model_from_rows(boundary_rows(net), net);
    const Series fine = junction_target_series(net, N, t_final);
    const Series coarse = junction_target_series(net, N / 2, t_final);

    double residual = 0.0;
    double estimate = 0.0;
    for (std::size_t k = 0; k < fine.t.size(); ++k) {
        const double t = fine.t[k];
        estimate = std::max(estimate, std::abs(fine.x[k] - coarse.at(t)));
        if (t >= T) {
            residual = std::max(residual, std::abs(fine.x[k] - model.coef_short * fine.at(t - model.kappa2) -
                                                   model.coef_long * fine.at(t - T)));
        }
    }

    std::vector<double> late_t, late_x;
    for (std::size_t k = 0; k < fine.t.size(); ++k) {
        if (fine.t[k] >= T) {
            late_t.push_back(fine.t[k]);
            late_x.push_back(fine.x[k]);
        }
    }
    const double rate_sim = fit_envelope_rate(late_t, late_x, T);
    const double dt = fine.t[1] - fine.t[0];
    const DifferenceSeries ds =
        simulate_difference(model, [&](double s) { return fine.at(s + T); }, t_final - T, dt);
    std::vector<double> shifted(ds.t.size());
    std::transform(ds.t.begin(), ds.t.end(), shifted.begin(), [&](double t) { return t + T; });
    const double rate_model = fit_envelope_rate(shifted, ds.x, T);
    const double rel = std::abs(rate_sim - rate_model) / std::abs(rate_model);

    r.passed = residual <= 3.0 * estimate && rel <= 0.2 && rate_model > 0.0;
    std::ostringstream d;
    d << "N " << N << ": recurrence residual " << num(residual) << " vs 3 x discretization estimate "
      << num(3.0 * estimate) << "; decay rate " << num(rate_sim) << " (simulation) vs " << num(rate_model)
      << " (difference model), relative gap " << num(rel) << " (<= 0.2)";
    finish(r, clock, 60.0, d);
    return r;
}

CriterionResult criterion_stabilization() {
    Stopwatch clock;
    CriterionResult r{5, "simultaneous stabilization", true, "", 0.0};
    const NetworkParams net = default_network();
    const double T = net.round_trip();
    const int N = 256;
    SimConfig cfg;
    cfg.N = N;
    cfg.t_final = 10.0 * T;
    cfg.model = ModelKind::nonlinear;
    cfg.ic.epsilon = 0.05;
    cfg.record_every = 40;
    const BoundaryRows rows = boundary_rows(net);
    KernelOptions opts;
    opts.M = N;
    const KernelTable k1 = solve_kernels(1, net, rows, opts);
    const KernelTable k2 = solve_kernels(2, net, rows, opts);

    cfg.loop = LoopMode::closed;
    const SimRecord closed = run_simulation(cfg, net, &k1, &k2);
    cfg.loop = LoopMode::open;
    const SimRecord open = run_simulation(cfg, net);

    const double dev1 = relative_deviation(closed.phys1.back(), net.ss1);
    const double dev2 = relative_deviation(closed.phys2.back(), net.ss2);
    const NormSummary nc = norms_and_rate(closed, T);
    const NormSummary no = norms_and_rate(open, T);
    const double final_closed = closed.total.back();
    const double final_open = open.total.back();
    r.passed = dev1 < 0.02 && dev2 < 0.02 && no.rate < nc.rate && final_open > final_closed;
    std::ostringstream d;
    d << "closed loop at t = " << num(cfg.t_final, 5) << " s: deviation " << num(dev1) << " / " << num(dev2)
      << " (< 0.02); decay rate closed " << num(nc.rate) << " vs open " << num(no.rate)
      << " 1/s (open slower); final norm closed " << num(final_closed) << " vs open " << num(final_open)
      << " (open larger)";
    finish(r, clock, 300.0, d);
    return r;
}

CriterionResult criterion_linearization_consistency() {
    Stopwatch clock;
    CriterionResult r{6, "linearization consistency", true, "", 0.0};
    const NetworkParams net = default_network();
    const double T = net.round_trip();
    const double eps = 0.05;
    const double full = linearization_gap(net, 256, eps, T);
    const double half = linearization_gap(net, 256, eps / 2.0, T);
    const double ratio = full / half;
    r.passed = ratio >= 3.4 && ratio <= 4.6;
    std::ostringstream d;
    d << "open loop N 256, L2 gap at t = " << num(T, 5) << " s: " << num(full) << " (eps " << eps << "), "
      << num(half) << " (eps " << eps / 2.0 << "), ratio " << num(ratio) << " (in [3.4, 4.6])";
    finish(r, clock, 300.0, d);
    return r;
}

CriterionResult criterion_conservation() {
    Stopwatch clock;
    CriterionResult r{7, "conservation", true, "", 0.0};
    const NetworkParams net = default_network();
    SimConfig cfg;
    cfg.N = 256;
    cfg.t_final = 2.0 * net.round_trip();
    cfg.model = ModelKind::nonlinear;
    cfg.loop = LoopMode::open;
    cfg.record_every = 1 << 30;
    const SimRecord rec = run_simulation(cfg, net);
    r.passed = rec.max_mass_defect < 1e-10;
    std::ostringstream d;
    d << "open loop N 256, " << rec.steps << " steps: max per-step relative mass defect "
      << num(rec.max_mass_defect) << " (< 1e-10)";
    finish(r, clock, 60.0, d);
    return r;
}

CriterionResult criterion_determinism(const std::string& scratch_dir) {
    Stopwatch clock;
    CriterionResult r{8, "determinism", true, "", 0.0};
    RunConfig cfg = default_run_config();
    cfg.sim.N = 64;
    cfg.kernels.M = 64;
    cfg.sim.t_final = cfg.net.round_trip();
    cfg.sim.record_every = 10;
    const fs::path base(scratch_dir);
    std::ostringstream sink;
    std::vector<std::string> files{"record.csv", "norms.csv", "summary.json", "resolved_config.json"};
    bool identical = true;
    std::string differing;
    for (const char* run : {"run_a", "run_b"}) {
        std::error_code ec;
        fs::remove_all(base / run, ec);
        cfg.out_dir = (base / run).string();
        cmd_simulate(cfg, sink);
    }
    std::size_t bytes = 0;
    for (const auto& f : files) {
        const std::string a = read_bytes(base / "run_a" / f);
        const std::string b = read_bytes(base / "run_b" / f);
        bytes += a.size();
        if (a.empty() || a != b) {
            identical = false;
            differing += " " + f;
        }
    }
    r.passed = identical;
    std::ostringstream d;
    d << "two simulate runs, " << files.size() << " files, " << bytes << " bytes: "
      << (identical ? "byte-identical" : "differ in" + differing);
    finish(r, clock, 0.0, d);
    return r;
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options,
                                            const std::function<void(const CriterionResult&)>& on_result) {
    std::vector<CriterionResult> results;
    auto selected = [&](int id) {
        return options.only.empty() || std::find(options.only.begin(), options.only.end(), id) != options.only.end();
    };
    const std::vector<std::function<CriterionResult()>> criteria{
        criterion_steady_identities,
        criterion_stability_cross_check,
        criterion_kernel_verification,
        criterion_difference_mechanism,
        criterion_stabilization,
        criterion_linearization_consistency,
        criterion_conservation,
        [&] { return criterion_determinism(options.scratch_dir); },
    };
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const int id = static_cast<int>(k) + 1;
        if (!selected(id)) {
            continue;
        }
        CriterionResult r;
        try {
            r = criteria[k]();
        } catch (const std::exception& e) {
            r.id = id;
            r.name = "criterion " + std::to_string(id);
            r.passed = false;
            r.detail = std::string("error: ") + e.what();
        }
        if (on_result) {
            on_result(r);
        }
        results.push_back(r);
    }
    return results;
}

}  // namespace arz
