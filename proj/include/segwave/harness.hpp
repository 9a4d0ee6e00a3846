#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "segwave/gait.hpp"
#include "segwave/robot.hpp"
#include "segwave/sim.hpp"
#include "segwave/terrain.hpp"

namespace segwave {

enum class Scenario { PhaseSweep, AmpSweepFlat, ClimbProb, RugoseTraverse };

std::string to_string(Scenario s);
Scenario scenario_from_string(const std::string& s);

/// Two-DoF joints run with the plan's delta_l, pitch-only joints with zero.
enum class JointType { TwoDof, PitchOnly };

std::string to_string(JointType j);
JointType joint_type_from_string(const std::string& s);

/// Where the terrain of a climb or traverse comes from. A loaded terrain
/// overrides the generated one.
struct TerrainSource {
    double step_height = 0.125;          // climb default: a plain step at x = 0
    bool rugose_for_climb = false;       // climb on the rugose field instead
    RugoseParams rugose{};               // traverse default; seed from the master seed
    std::optional<Terrain> loaded;
};

struct ExperimentPlan {
    Scenario scenario = Scenario::PhaseSweep;
    std::vector<double> sweep_values;    // degrees: phase or vertical amplitude
    int trials = 3;
    int cycles = 3;
    GaitParams gait{};
    RobotSpec robot{};
    SimConfig sim{};
    TerrainSource terrain{};
    std::uint64_t master_seed = 1;
    // Start window ahead of the edge, in module lengths.
    double start_offset_min = 0.5;
    double start_offset_max = 1.5;
    // Relative half-width of the per-trial friction jitter.
    double friction_jitter = 0.05;

    /// Paper protocol for the scenario: grids, trial and cycle counts.
    static ExperimentPlan defaults(Scenario s);

    void validate() const;

    /// Unit-bearing name of the swept quantity.
    std::string sweep_param() const;
};

struct TrialRecord {
    int trial = 0;
    std::uint64_t seed = 0;
    std::optional<double> scalar;  // missing when the trial failed
    std::string error;

    bool operator==(const TrialRecord&) const = default;
};

struct SweepPoint {
    double value = 0.0;
    JointType joint = JointType::TwoDof;
    std::vector<TrialRecord> trials;
    double mean = 0.0;
    double stddev = 0.0;  // sample standard deviation over completed trials

    int failures() const;
    bool operator==(const SweepPoint&) const = default;
};

/// Peristalsis ratio from the two joint types' mean speeds at one value.
struct RatioPoint {
    double value = 0.0;
    double ratio = 0.0;

    bool operator==(const RatioPoint&) const = default;
};

struct SweepResult {
    Scenario scenario = Scenario::PhaseSweep;
    std::string sweep_param;
    std::string scalar;  // what the trial scalar measures
    std::vector<SweepPoint> points;
    std::vector<RatioPoint> ratios;
    std::string config_hash;
    std::string config;  // canonical JSON echo of the plan
    std::vector<std::string> warnings;

    const SweepPoint& at(double value, JointType joint) const;
    bool operator==(const SweepResult&) const = default;
};

/// Per-trial seed: a hash of (master, scenario, point, trial), independent of
/// execution order.
std::uint64_t trial_seed(std::uint64_t master, Scenario s, int point, int trial);

/// Mean and sample standard deviation, in input order.
std::pair<double, double> mean_stddev(const std::vector<double>& xs);

/// Runs the plan's scenario. `jobs` worker threads; results do not depend on
/// it. Throws MeasurementError when a point loses more than half its trials.
SweepResult run_experiment(const ExperimentPlan& plan, int jobs = 1);

SweepResult run_phase_sweep(const ExperimentPlan& plan, int jobs = 1);
SweepResult run_amp_sweep_flat(const ExperimentPlan& plan, int jobs = 1);
SweepResult run_climb_prob(const ExperimentPlan& plan, int jobs = 1);
SweepResult run_rugose_traverse(const ExperimentPlan& plan, int jobs = 1);

/// Terrain a plan runs on.
Terrain plan_terrain(const ExperimentPlan& plan);

enum class OutputFormat { Csv, Json };

std::string render_results(const SweepResult& r, OutputFormat f);

/// Writes render_results to `path`; IoError names the path on failure.
void emit_results(const SweepResult& r, OutputFormat f, const std::string& path);

}  // namespace segwave
