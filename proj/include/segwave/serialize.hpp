#pragma once

#include <string>

#include <json.hpp>

#include "segwave/gait.hpp"
#include "segwave/harness.hpp"
#include "segwave/robot.hpp"
#include "segwave/sim.hpp"
#include "segwave/terrain.hpp"

namespace segwave {

using json = nlohmann::json;

// Objects are written in SI units with angles in radians (`*_rad`). Readers
// take partial objects: absent keys keep their current value, `*_deg`
// spellings of angles are accepted, and unknown keys raise ConfigError.

json to_json(const RobotSpec& s);
json to_json(const GaitParams& g);
json to_json(const SimConfig& c);
json to_json(const RugoseParams& p);
json to_json(const Terrain& t);

void apply_json(const json& j, RobotSpec& s);
void apply_json(const json& j, GaitParams& g);
void apply_json(const json& j, SimConfig& c);
void apply_json(const json& j, RugoseParams& p);

Terrain terrain_from_json(const json& j);

/// Config file: {"robot": {...}, "gait": {...}, "sim": {...}, "harness": {...}}.
/// Harness keys: start_offset_min, start_offset_max, friction_jitter,
/// step_height, rugose_for_climb, rugose {...}.
void apply_config(const json& j, ExperimentPlan& plan);

/// Full echo of a plan, loaded terrain included.
json plan_to_json(const ExperimentPlan& plan);

json result_to_json(const SweepResult& r);
SweepResult result_from_json(const json& j);

/// One row per sample: time, head nose, every body pose, every joint state,
/// and cable lengths when they were recorded.
std::string trajectory_to_csv(const Trajectory& t);
json trajectory_to_json(const Trajectory& t);

/// Whole-file helpers; failures raise IoError with the path.
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);
json read_json_file(const std::string& path);

/// Shortest decimal form that reads back to the same double.
std::string format_double(double v);

}  // namespace segwave
