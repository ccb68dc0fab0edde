#pragma once

#include <istream>
#include <optional>
#include <string>

#include "finder/planner.hpp"
#include "finder/textio.hpp"

namespace finder {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Policy configuration overlay parsed from `key value` lines. Blank lines
/// and '#' comments are ignored; unknown keys are an itemized error.
///
///   policy full|no_sto|no_oto|greedy_frontier|random_walk|oracle
///   epsilon 2
///   budget 500
///   range 10
///   fov_deg 79
///   turn_deg 30
///   unknown_cost 1.0
///   seed 42
struct PolicyFile {
    PolicyConfig config;
    std::optional<uint64_t> seed;
};

inline PolicyFile parse_policy_config(std::istream& in, PolicyConfig base = {}) {
    PolicyFile out;
    out.config = base;
    LineReader reader(in);
    std::string line;
    std::string errors;
    while (reader.next(line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto parts = split_ws(line);
        if (parts.empty()) continue;
        auto fail = [&](const std::string& msg) {
            if (!errors.empty()) errors += "; ";
            errors += "line " + std::to_string(reader.line_no()) + ": " + msg;
        };
        if (parts.size() != 2) {
            fail("expected 'key value'");
            continue;
        }
        std::string key(parts[0]);
        try {
            if (key == "policy") {
                auto kind = parse_policy(parts[1]);
                if (!kind)
                    fail("unknown policy '" + std::string(parts[1]) + "'");
                else
                    out.config.kind = *kind;
            } else if (key == "epsilon") {
                out.config.epsilon = parse_double(parts[1], key);
                if (out.config.epsilon < 0) fail("epsilon must be >= 0");
            } else if (key == "budget") {
                out.config.budget = static_cast<int>(parse_int(parts[1], key));
                if (out.config.budget < 1) fail("budget must be >= 1");
            } else if (key == "range") {
                out.config.sensor.range = parse_double(parts[1], key);
                if (!(out.config.sensor.range > 0)) fail("range must be positive");
            } else if (key == "fov_deg") {
                out.config.sensor.fov_deg = parse_double(parts[1], key);
                if (!(out.config.sensor.fov_deg > 0)) fail("fov_deg must be positive");
            } else if (key == "turn_deg") {
                out.config.motion.turn_deg = static_cast<int>(parse_int(parts[1], key));
                if (out.config.motion.turn_deg <= 0 || 360 % out.config.motion.turn_deg != 0)
                    fail("turn_deg must divide 360");
            } else if (key == "unknown_cost") {
                out.config.unknown_cost = parse_double(parts[1], key);
                if (!(out.config.unknown_cost >= 1.0)) fail("unknown_cost must be >= 1");
            } else if (key == "seed") {
                out.seed = parse_uint(parts[1], key);
            } else {
                fail("unknown key '" + key + "'");
            }
        } catch (const std::exception& e) {
            fail(e.what());
        }
    }
    if (!errors.empty()) throw ConfigError("invalid policy config: " + errors);
    return out;
}

}  // namespace finder
