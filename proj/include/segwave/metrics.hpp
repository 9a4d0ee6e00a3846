#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "segwave/sim.hpp"
#include "segwave/terrain.hpp"

namespace segwave {

struct SpeedMeasure {
    double displacement = 0.0;  // m, geometric centre, forward positive
    int cycles = 0;
    double body_length = 0.0;
    double bl_per_cyc = 0.0;
};

struct PeristalsisRatio {
    double d_p = 0.0;   // m / cycle with peristalsis
    double d_np = 0.0;  // m / cycle without
    double delta_l = 0.0;
    double ratio = 0.0;
};

struct ClimbOutcome {
    bool success = false;
    int cycles_used = 0;
    std::optional<double> first_leg_pair_top_time;  // s since the measured start
};

/// Climb window and debounce used by climb_outcome.
inline constexpr int kClimbCycles = 5;
inline constexpr double kClimbSustainCycles = 0.1;
inline constexpr double kClimbContactSlack = 0.005;  // m

/// Net displacement of the mean module position over the whole trajectory,
/// in body lengths per cycle. Throws MeasurementError if shorter than a cycle.
SpeedMeasure speed_bl_per_cyc(const Trajectory& traj, double body_length);

/// Same measure tracked at the head nose instead of the geometric centre.
SpeedMeasure head_speed_bl_per_cyc(const Trajectory& traj, double body_length);

/// (d_p - d_np) / delta_l with both speeds in meters per cycle.
PeristalsisRatio peristalsis_ratio(const SpeedMeasure& d_p, const SpeedMeasure& d_np,
                                   double delta_l);

/// Success when any leg tip rests on top of a cell at or above the edge
/// height, past the edge, for at least 0.1 cycle, starting within the first 5 cycles.
ClimbOutcome climb_outcome(const Trajectory& traj, const Terrain& terrain);

double climb_probability(const std::vector<ClimbOutcome>& outcomes);

std::vector<std::pair<double, double>> head_trajectory(const Trajectory& traj);

/// Mean forward travel of the head nose per cycle, counted only over ticks
/// during which the head leg is off the ground.
double lifted_head_drift(const Trajectory& traj);

}  // namespace segwave
