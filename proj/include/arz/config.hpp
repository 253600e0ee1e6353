#pragma once

#include "arz/core_model.hpp"
#include "arz/kernels.hpp"
#include "arz/simulate.hpp"

#include <cstdint>
#include <string>

namespace arz {

// Validated run configuration in SI units.
struct RunConfig {
    SegmentParams seg1{45.0, 0.6667, 1.0, 120.0, 2000.0, 1};
    SegmentParams seg2{45.0, 0.8, 1.0, 90.0, 2000.0, 2};
    double q_star = 6.0;
    NetworkParams net;     // derived from seg1, seg2, q_star
    SimConfig sim;         // t_final defaults to 10 round trips when absent
    KernelOptions kernels; // M defaults to sim.N when absent
    std::uint64_t seed = 1;
    std::string out_dir = "out";
};

// Defaults: the default network, nonlinear closed loop, N = 128, t_final = 10 round trips.
RunConfig default_run_config();

// JSON text. Physical quantities are SI numbers or strings such as "666.7 veh/km", "2 km",
// "90 s", "162 km/h", "21600 veh/h", "180 deg". Unknown keys are rejected.
RunConfig parse_config(const std::string& text, const std::string& source = "<config>");
RunConfig load_config(const std::string& path);

// Resolved SI configuration as JSON; parse_config(resolved_config_json(c)) reproduces c apart from
// the output directory, which is left out so identical runs write identical files.
std::string resolved_config_json(const RunConfig& cfg);

// Converts "<number> <unit>" to SI for the given dimension: density, length, time, speed,
// flux, angle, rate. Throws ValidationError naming the field.
double parse_quantity(const std::string& text, const std::string& dimension, const std::string& field);

}  // namespace arz
