#pragma once

#include "arz/config.hpp"
#include "arz/stability.hpp"

#include <iosfwd>
#include <string>

namespace arz {

struct SteadyReport {
    NetworkParams net;
    double sp1_value = 0.0;      // test matrix of the closed-form condition
    double sp1_rows = 0.0;       // matrix built from the boundary rows in use
    ClosedForm closed_form;
    bool assumption_holds = false;
};

SteadyReport steady_report(const RunConfig& cfg);

struct SimulateSummary {
    double rate = 0.0;           // fitted decay rate of the total norm, 1/s
    double initial_norm = 0.0;
    double final_norm = 0.0;
    double final_norm1 = 0.0;
    double final_norm2 = 0.0;
    double deviation1 = 0.0;     // final sup relative deviation from steady state
    double deviation2 = 0.0;
    double max_control = 0.0;
    bool converged = false;
    long steps = 0;
    double wall_seconds = 0.0;
};

SimulateSummary summarize(const SimRecord& record, const RunConfig& cfg, double wall_seconds);

// Each command writes resolved_config.json plus its own files into cfg.out_dir and a text
// report to out. They return 0 on success and throw ValidationError or NumericalError.
int cmd_steady(const RunConfig& cfg, std::ostream& out);
int cmd_kernels(const RunConfig& cfg, std::ostream& out);
// compare: also runs the opposite loop mode and reports both rates.
int cmd_simulate(const RunConfig& cfg, std::ostream& out, bool compare = false);
// Runs the acceptance suite; returns 0 when every criterion passes, 2 otherwise.
int cmd_verify(const RunConfig& cfg, std::ostream& out);

}  // namespace arz
