#include "arz/config.hpp"

#include "arz/errors.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace arz {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

const std::map<std::string, std::map<std::string, double>>& unit_table() {
    static const std::map<std::string, std::map<std::string, double>> table = {
        {"density", {{"veh/m", 1.0}, {"veh/km", 1e-3}}},
        {"length", {{"m", 1.0}, {"km", 1e3}}},
        {"time", {{"s", 1.0}, {"min", 60.0}, {"h", 3600.0}}},
        {"speed", {{"m/s", 1.0}, {"km/h", 1.0 / 3.6}}},
        {"flux", {{"veh/s", 1.0}, {"veh/min", 1.0 / 60.0}, {"veh/h", 1.0 / 3600.0}}},
        {"angle", {{"rad", 1.0}, {"deg", std::numbers::pi / 180.0}}},
        {"rate", {{"1/s", 1.0}}},
        {"none", {}},
    };
    return table;
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t");
    return s.substr(first, last - first + 1);
}

std::string type_name(const json& v) {
    return std::string(v.type_name());
}

// Reads one object with a fixed key set and reports the full path of any problem.
class Section {
public:
    Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
        if (!node_.is_object()) {
            throw ValidationError(where("") + "expected an object, got " + type_name(node_));
        }
    }

    bool has(const std::string& key) {
        seen_.insert(key);
        return node_.contains(key);
    }

    double quantity(const std::string& key, const std::string& dimension, double fallback) {
        if (!has(key)) {
            return fallback;
        }
        const json& v = node_.at(key);
        double value = 0.0;
        if (v.is_number()) {
            value = v.get<double>();
        } else if (v.is_string()) {
            value = parse_quantity(v.get<std::string>(), dimension, field(key));
        } else {
            throw ValidationError(where(key) + "expected a number or a quantity string, got " + type_name(v));
        }
        if (!std::isfinite(value)) {
            throw ValidationError(where(key) + "value is not finite");
        }
        return value;
    }

    long integer(const std::string& key, long fallback) {
        if (!has(key)) {
            return fallback;
        }
        const json& v = node_.at(key);
        if (v.is_number_integer()) {
            return v.get<long>();
        }
        if (v.is_number_float()) {
            const double d = v.get<double>();
            if (std::floor(d) == d && std::abs(d) < 1e15) {
                return static_cast<long>(d);
            }
        }
        throw ValidationError(where(key) + "expected an integer, got " + v.dump());
    }

    bool boolean(const std::string& key, bool fallback) {
        if (!has(key)) {
            return fallback;
        }
        const json& v = node_.at(key);
        if (!v.is_boolean()) {
            throw ValidationError(where(key) + "expected true or false, got " + v.dump());
        }
        return v.get<bool>();
    }

    std::string choice(const std::string& key, const std::vector<std::string>& options,
                       const std::string& fallback) {
        if (!has(key)) {
            return fallback;
        }
        const json& v = node_.at(key);
        if (v.is_string()) {
            const auto s = v.get<std::string>();
            for (const auto& o : options) {
                if (s == o) {
                    return s;
                }
            }
        }
        std::string list;
        for (const auto& o : options) {
            list += (list.empty() ? "" : ", ") + o;
        }
        throw ValidationError(where(key) + "expected one of {" + list + "}, got " + v.dump());
    }

    std::string text(const std::string& key, const std::string& fallback) {
        if (!has(key)) {
            return fallback;
        }
        const json& v = node_.at(key);
        if (!v.is_string()) {
            throw ValidationError(where(key) + "expected a string, got " + type_name(v));
        }
        return v.get<std::string>();
    }

    Section child(const std::string& key) {
        seen_.insert(key);
        static const json empty = json::object();
        return Section(node_.contains(key) ? node_.at(key) : empty, field(key));
    }

    void reject_unknown() const {
        for (const auto& item : node_.items()) {
            if (!seen_.count(item.key())) {
                throw ValidationError(where(item.key()) + "unknown key");
            }
        }
    }

    std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

private:
    std::string where(const std::string& key) const {
        const std::string f = key.empty() ? path_ : field(key);
        return "config field '" + (f.empty() ? std::string("<root>") : f) + "': ";
    }

    const json& node_;
    std::string path_;
    std::set<std::string> seen_;
};

SegmentParams read_segment(Section s, const SegmentParams& base, double v_max, double length) {
    SegmentParams p = base;
    p.v_max = v_max;
    p.length = length;
    p.rho_max = s.quantity("rho_max", "density", base.rho_max);
    p.gamma = s.quantity("gamma", "none", base.gamma);
    p.tau = s.quantity("tau", "time", base.tau);
    s.reject_unknown();
    return p;
}

template <typename Fn>
void with_field(const std::string& field, Fn&& fn) {
    try {
        fn();
    } catch (const ValidationError& e) {
        throw ValidationError("config field '" + field + "': " + e.what());
    }
}

}  // namespace

double parse_quantity(const std::string& text, const std::string& dimension, const std::string& field) {
    const auto& table = unit_table();
    const auto dim = table.find(dimension);
    if (dim == table.end()) {
        throw ValidationError("unknown dimension '" + dimension + "' for field '" + field + "'");
    }
    const std::string s = trim(text);
    double number = 0.0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), number);
    if (ec != std::errc() || end == s.data()) {
        throw ValidationError("config field '" + field + "': cannot read a number from \"" + text + "\"");
    }
    const std::string unit = trim(std::string(end, s.data() + s.size()));
    if (unit.empty()) {
        return number;
    }
    const auto u = dim->second.find(unit);
    if (u == dim->second.end()) {
        std::string list;
        for (const auto& [name, factor] : dim->second) {
            list += (list.empty() ? "" : ", ") + name;
        }
        throw ValidationError("config field '" + field + "': unit '" + unit + "' is not a " + dimension +
                              " unit" + (list.empty() ? " (dimensionless)" : " (accepted: " + list + ")"));
    }
    return number * u->second;
}

RunConfig default_run_config() {
    RunConfig cfg;
    cfg.net = make_network(cfg.seg1, cfg.seg2, cfg.q_star);
    cfg.sim.t_final = 10.0 * cfg.net.round_trip();
    cfg.sim.record_every = 20;
    cfg.kernels.M = cfg.sim.N;
    return cfg;
}

RunConfig parse_config(const std::string& text, const std::string& source) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1, col = 1;
        const std::size_t stop = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
        for (std::size_t i = 0; i < stop; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ValidationError(source + ":" + std::to_string(line) + ":" + std::to_string(col) +
                              ": malformed JSON");
    }

    RunConfig cfg;
    Section top(root, "");

    Section network = top.child("network");
    const double length = network.quantity("length", "length", cfg.seg1.length);
    const double v_max = network.quantity("v_max", "speed", cfg.seg1.v_max);
    cfg.q_star = network.quantity("q_star", "flux", cfg.q_star);
    cfg.seg1 = read_segment(network.child("segment1"), cfg.seg1, v_max, length);
    cfg.seg2 = read_segment(network.child("segment2"), cfg.seg2, v_max, length);
    network.reject_unknown();
    with_field("network", [&] { cfg.net = make_network(cfg.seg1, cfg.seg2, cfg.q_star); });

    Section sim = top.child("simulation");
    cfg.sim.N = static_cast<int>(sim.integer("N", cfg.sim.N));
    cfg.sim.cfl = sim.quantity("cfl", "none", cfg.sim.cfl);
    cfg.sim.t_final = sim.quantity("t_final", "time", 10.0 * cfg.net.round_trip());
    cfg.sim.loop = sim.choice("loop", {"open", "closed"}, "closed") == "open" ? LoopMode::open : LoopMode::closed;
    cfg.sim.model =
        sim.choice("model", {"linear", "nonlinear"}, "nonlinear") == "linear" ? ModelKind::linear : ModelKind::nonlinear;
    cfg.sim.rows = sim.choice("rows", {"linearized", "published"}, "linearized") == "published"
                       ? RowModel::published
                       : RowModel::linearized;
    cfg.sim.record_every = static_cast<int>(sim.integer("record_every", 20));
    cfg.sim.compatible_start = sim.boolean("compatible_start", false);
    Section ic = sim.child("initial_condition");
    cfg.sim.ic.epsilon = ic.quantity("epsilon", "none", cfg.sim.ic.epsilon);
    cfg.sim.ic.k1 = ic.quantity("k1", "none", cfg.sim.ic.k1);
    cfg.sim.ic.k2 = ic.quantity("k2", "none", cfg.sim.ic.k2);
    cfg.sim.ic.phase1 = ic.quantity("phase1", "angle", cfg.sim.ic.phase1);
    cfg.sim.ic.phase2 = ic.quantity("phase2", "angle", cfg.sim.ic.phase2);
    ic.reject_unknown();
    sim.reject_unknown();
    with_field("simulation", [&] { cfg.sim.validate(); });

    Section kernels = top.child("kernels");
    cfg.kernels.M = static_cast<int>(kernels.integer("M", cfg.sim.N));
    cfg.kernels.tol = kernels.quantity("tol", "none", cfg.kernels.tol);
    cfg.kernels.max_iterations = static_cast<int>(kernels.integer("max_iterations", cfg.kernels.max_iterations));
    kernels.reject_unknown();
    if (cfg.kernels.M < 16) {
        throw ValidationError("config field 'kernels.M': must be at least 16");
    }
    if (!(cfg.kernels.tol > 0.0)) {
        throw ValidationError("config field 'kernels.tol': must be positive");
    }
    if (cfg.kernels.max_iterations < 1) {
        throw ValidationError("config field 'kernels.max_iterations': must be at least 1");
    }

    const long seed = top.integer("seed", static_cast<long>(cfg.seed));
    if (seed < 0) {
        throw ValidationError("config field 'seed': must be nonnegative");
    }
    cfg.seed = static_cast<std::uint64_t>(seed);
    cfg.out_dir = top.text("output", cfg.out_dir);
    top.reject_unknown();
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("cannot open config file '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path);
}

std::string resolved_config_json(const RunConfig& cfg) {
    auto segment = [](const SegmentParams& s) {
        ordered_json j;
        j["rho_max"] = s.rho_max;
        j["gamma"] = s.gamma;
        j["tau"] = s.tau;
        return j;
    };
    ordered_json root;
    root["network"]["length"] = cfg.seg1.length;
    root["network"]["v_max"] = cfg.seg1.v_max;
    root["network"]["q_star"] = cfg.q_star;
    root["network"]["segment1"] = segment(cfg.seg1);
    root["network"]["segment2"] = segment(cfg.seg2);

    ordered_json sim;
    sim["N"] = cfg.sim.N;
    sim["cfl"] = cfg.sim.cfl;
    sim["t_final"] = cfg.sim.t_final;
    sim["loop"] = cfg.sim.loop == LoopMode::open ? "open" : "closed";
    sim["model"] = cfg.sim.model == ModelKind::linear ? "linear" : "nonlinear";
    sim["rows"] = cfg.sim.rows == RowModel::published ? "published" : "linearized";
    sim["record_every"] = cfg.sim.record_every;
    sim["compatible_start"] = cfg.sim.compatible_start;
    sim["initial_condition"]["epsilon"] = cfg.sim.ic.epsilon;
    sim["initial_condition"]["k1"] = cfg.sim.ic.k1;
    sim["initial_condition"]["k2"] = cfg.sim.ic.k2;
    sim["initial_condition"]["phase1"] = cfg.sim.ic.phase1;
    sim["initial_condition"]["phase2"] = cfg.sim.ic.phase2;
    root["simulation"] = sim;

    root["kernels"]["M"] = cfg.kernels.M;
    root["kernels"]["tol"] = cfg.kernels.tol;
    root["kernels"]["max_iterations"] = cfg.kernels.max_iterations;
    root["seed"] = cfg.seed;
    return root.dump(2) + "\n";
}

}  // namespace arz
