#include "arz/commands.hpp"

#include "arz/acceptance.hpp"
#include "arz/errors.hpp"
#include "arz/kernels.hpp"
#include "arz/linearize.hpp"
#include "arz/simulate.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <utility>

namespace arz {

namespace {

using ordered_json = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string num(double x, int digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, x);
    return buf;
}

fs::path prepare_dir(const RunConfig& cfg) {
    const fs::path dir(cfg.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw ValidationError("cannot create output directory '" + cfg.out_dir + "': " + ec.message());
    }
    std::ofstream(dir / "resolved_config.json") << resolved_config_json(cfg);
    return dir;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ValidationError("cannot write '" + path.string() + "'");
    }
    out << text;
}

std::pair<KernelTable, KernelTable> solve_both(const RunConfig& cfg, int M) {
    const BoundaryRows rows = boundary_rows(cfg.net, cfg.sim.rows);
    KernelOptions opts = cfg.kernels;
    opts.M = M;
    return {solve_kernels(1, cfg.net, rows, opts), solve_kernels(2, cfg.net, rows, opts)};
}

const char* loop_name(LoopMode m) { return m == LoopMode::open ? "open" : "closed"; }

struct RunOutcome {
    SimRecord record;
    SimulateSummary summary;
};

RunOutcome run_once(const RunConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    SimRecord record;
    if (cfg.sim.loop == LoopMode::closed) {
        const auto [k1, k2] = solve_both(cfg, cfg.sim.N);
        record = run_simulation(cfg.sim, cfg.net, &k1, &k2);
    } else {
        record = run_simulation(cfg.sim, cfg.net);
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    SimulateSummary s = summarize(record, cfg, wall);
    return {std::move(record), s};
}

ordered_json summary_json(const SimulateSummary& s, LoopMode loop) {
    ordered_json j;
    j["loop"] = loop_name(loop);
    j["decay_rate"] = s.rate;
    j["initial_norm"] = s.initial_norm;
    j["final_norm"] = s.final_norm;
    j["final_norm_seg1"] = s.final_norm1;
    j["final_norm_seg2"] = s.final_norm2;
    j["final_deviation_seg1"] = s.deviation1;
    j["final_deviation_seg2"] = s.deviation2;
    j["max_abs_control"] = s.max_control;
    j["converged"] = s.converged;
    j["steps"] = s.steps;
    return j;
}

void print_summary(std::ostream& out, const SimulateSummary& s, LoopMode loop) {
    out << loop_name(loop) << " loop: decay rate " << num(s.rate) << " 1/s, norm " << num(s.initial_norm)
        << " -> " << num(s.final_norm) << ", final deviation " << num(s.deviation1) << " / "
        << num(s.deviation2) << ", converged " << (s.converged ? "true" : "false") << ", " << s.steps
        << " steps, wall time " << num(s.wall_seconds, 3) << " s\n";
}

}  // namespace

SteadyReport steady_report(const RunConfig& cfg) {
    SteadyReport r;
    r.net = cfg.net;
    Sp1Options opts;
    opts.seed = cfg.seed;
    r.sp1_value = sp1(coupling_matrix(cfg.net), opts);
    r.sp1_rows = sp1(row_coupling_matrix(boundary_rows(cfg.net, cfg.sim.rows)), opts);
    r.closed_form = closed_form_condition(cfg.net);
    r.assumption_holds = r.sp1_value < 1.0 && (!r.closed_form.applicable || r.closed_form.value < 1.0);
    return r;
}

SimulateSummary summarize(const SimRecord& record, const RunConfig& cfg, double wall_seconds) {
    SimulateSummary s;
    const NormSummary ns = norms_and_rate(record, cfg.net.round_trip());
    s.rate = ns.rate;
    s.converged = ns.converged;
    s.initial_norm = record.total.front();
    s.final_norm = record.total.back();
    s.final_norm1 = record.norm1.back();
    s.final_norm2 = record.norm2.back();
    s.deviation1 = relative_deviation(record.phys1.back(), cfg.net.ss1);
    s.deviation2 = relative_deviation(record.phys2.back(), cfg.net.ss2);
    for (double u : record.control) {
        s.max_control = std::max(s.max_control, std::abs(u));
    }
    s.steps = record.steps;
    s.wall_seconds = wall_seconds;
    return s;
}

int cmd_steady(const RunConfig& cfg, std::ostream& out) {
    const fs::path dir = prepare_dir(cfg);
    const SteadyReport r = steady_report(cfg);
    const auto& n = r.net;
    for (int id = 1; id <= 2; ++id) {
        const SteadyState& ss = n.ss(id);
        out << "segment " << id << ": rho* " << num(ss.rho_star) << " veh/m, v* " << num(ss.v_star)
            << " m/s, p* " << num(ss.p_star) << " m/s, r " << num(ss.r) << ", speeds (" << num(ss.lambda_w)
            << ", " << num(-ss.lambda_v) << ") m/s, kappa " << num(ss.kappa) << " s\n";
    }
    out << "closed form: a " << num(r.closed_form.a) << ", b " << num(r.closed_form.b) << ", value "
        << num(r.closed_form.value, 10) << (r.closed_form.applicable ? "" : " (inapplicable: r1 < r2)") << "\n";
    out << "sp1: " << num(r.sp1_value, 10) << " (test matrix), " << num(r.sp1_rows, 10) << " (boundary rows)\n";
    out << "verdict: " << (r.assumption_holds ? "PASS" : "FAIL") << "\n";

    ordered_json j;
    for (int id = 1; id <= 2; ++id) {
        const SteadyState& ss = n.ss(id);
        ordered_json s;
        s["rho_star"] = ss.rho_star;
        s["v_star"] = ss.v_star;
        s["p_star"] = ss.p_star;
        s["q_star"] = ss.q_star;
        s["r"] = ss.r;
        s["lambda_w"] = ss.lambda_w;
        s["lambda_v"] = ss.lambda_v;
        s["kappa"] = ss.kappa;
        j["segment" + std::to_string(id)] = s;
    }
    j["closed_form"] = {{"a", r.closed_form.a},
                        {"b", r.closed_form.b},
                        {"value", r.closed_form.value},
                        {"applicable", r.closed_form.applicable}};
    j["sp1"] = r.sp1_value;
    j["sp1_rows"] = r.sp1_rows;
    j["verdict"] = r.assumption_holds ? "PASS" : "FAIL";
    write_text(dir / "steady.json", j.dump(2) + "\n");
    return 0;
}

int cmd_kernels(const RunConfig& cfg, std::ostream& out) {
    const fs::path dir = prepare_dir(cfg);
    const BoundaryRows rows = boundary_rows(cfg.net, cfg.sim.rows);
    std::vector<int> resolutions;
    if (cfg.kernels.M / 2 >= 16) {
        resolutions.push_back(cfg.kernels.M / 2);
    }
    resolutions.push_back(cfg.kernels.M);
    for (int id = 1; id <= 2; ++id) {
        const KernelProblem problem = kernel_problem(id, cfg.net, rows);
        for (int M : resolutions) {
            KernelOptions opts = cfg.kernels;
            opts.M = M;
            const KernelTable table = solve_kernels(problem, id, opts);
            const KernelResidual res = kernel_residual(table, problem);
            out << "segment " << id << " M " << M << ": iterations " << table.iterations << ", max |K| "
                << num(table.max_abs()) << ", pde residual " << num(res.pde) << ", bc residual "
                << num(res.bc) << "\n";
            if (M == cfg.kernels.M) {
                write_kernel_csv(table, (dir / ("kernel_seg" + std::to_string(id) + ".csv")).string());
            }
        }
    }
    return 0;
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out, bool compare) {
    const fs::path dir = prepare_dir(cfg);
    const RunOutcome main = run_once(cfg);
    {
        std::ofstream rec(dir / "record.csv", std::ios::binary);
        write_record_csv(main.record, rec);
        std::ofstream norms(dir / "norms.csv", std::ios::binary);
        write_norms_csv(main.record, norms);
    }
    print_summary(out, main.summary, cfg.sim.loop);

    ordered_json j = summary_json(main.summary, cfg.sim.loop);
    if (cfg.sim.model == ModelKind::nonlinear) {
        j["max_mass_defect"] = main.record.max_mass_defect;
    }
    j["max_courant"] = main.record.max_courant;
    if (compare) {
        RunConfig other = cfg;
        other.sim.loop = cfg.sim.loop == LoopMode::open ? LoopMode::closed : LoopMode::open;
        const RunOutcome alt = run_once(other);
        std::ofstream norms(dir / ("norms_" + std::string(loop_name(other.sim.loop)) + ".csv"), std::ios::binary);
        write_norms_csv(alt.record, norms);
        print_summary(out, alt.summary, other.sim.loop);
        const SimulateSummary& closed = cfg.sim.loop == LoopMode::closed ? main.summary : alt.summary;
        const SimulateSummary& open = cfg.sim.loop == LoopMode::closed ? alt.summary : main.summary;
        out << "rate comparison: closed " << num(closed.rate) << " vs open " << num(open.rate) << " 1/s\n";
        j["comparison"] = summary_json(alt.summary, other.sim.loop);
    }
    write_text(dir / "summary.json", j.dump(2) + "\n");
    return 0;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
    AcceptanceOptions opts;
    opts.scratch_dir = (fs::path(cfg.out_dir) / "acceptance_scratch").string();
    bool all = true;
    run_acceptance(opts, [&](const CriterionResult& r) {
        out << format_result(r) << std::endl;
        all = all && r.passed;
    });
    return all ? 0 : 2;
}

}  // namespace arz
