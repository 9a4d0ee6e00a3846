#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "segwave/cable.hpp"
#include "segwave/gait.hpp"
#include "segwave/robot.hpp"
#include "segwave/terrain.hpp"

namespace segwave {

struct SimConfig {
    double dt = 5e-4;                      // requested; see effective_dt()
    double gravity = 9.81;
    double contact_stiffness = 2e4;        // N/m
    double contact_damping = 126.5;        // N s/m, ~critical for one module on one probe
    double friction_regularization_velocity = 1e-3;  // m/s
    int cycles = 3;
    double settle_time = 1.0;              // s
    double divergence_velocity_cap = 20.0; // m/s
    double cycle_period = kTwoPi;          // s per gait cycle
    int samples_per_cycle = 100;           // control ticks per cycle
    bool record_cables = false;
    // Also collide terrain corners with module boxes and leg struts, beyond
    // the point probes.
    bool corner_contacts = false;

    void validate() const;

    /// Physics steps per control tick, chosen so a cycle is an exact number
    /// of steps and every tick lands on a step.
    int steps_per_tick() const;
    double effective_dt() const { return cycle_period / (samples_per_cycle * steps_per_tick()); }
};

/// Resolved force at one probe, world frame.
struct ProbeForce {
    bool in_contact = false;
    double depth = 0.0;
    Eigen::Vector2d normal{0.0, 1.0};
    Eigen::Vector2d force{0.0, 0.0};
};

/// Penalty contact with regularised Coulomb friction for a single point.
ProbeForce probe_contact(const Terrain& terrain, const Eigen::Vector2d& pos,
                         const Eigen::Vector2d& vel, double friction, const SimConfig& cfg);

/// Forces at every probe of the chain in state `s`.
std::vector<ProbeForce> contact_forces(const ChainModel& chain, const MultibodyState& s,
                                       const Terrain& terrain, const SimConfig& cfg);

/// Fixed-step integrator for one robot on one terrain. Owns scratch buffers,
/// so one instance must not be shared between threads.
class Simulator {
public:
    Simulator(const RobotSpec& spec, const Terrain& terrain, const SimConfig& cfg);

    const ChainModel& chain() const { return chain_; }
    const SimConfig& config() const { return cfg_; }
    double dt() const { return dt_; }

    /// Advance by one dt. Commands are clamped to the joint limits. Throws
    /// DivergenceError if any body exceeds the speed cap.
    void step(MultibodyState& s, const std::vector<JointCommand>& commands);

    std::vector<JointState> joint_states(const MultibodyState& s,
                                         const std::vector<JointCommand>& commands) const;

private:
    ChainModel chain_;
    const Terrain& terrain_;
    SimConfig cfg_;
    double dt_;
    Eigen::MatrixXd mass_;
    Eigen::MatrixXd damping_;
    Eigen::VectorXd force_;
    Eigen::MatrixXd jac_;
    Eigen::MatrixXd body_jac_;
};

/// One control-tick sample of a run.
struct TrajectorySample {
    double t = 0.0;
    std::vector<BodyPose> bodies;
    std::vector<JointState> joints;
    std::vector<CablePair> cables;     // filled when SimConfig::record_cables
    std::vector<bool> leg_contact;     // per body
    std::vector<Eigen::Vector2d> leg_tip;  // per body, world
    Eigen::Vector2d head_nose{0.0, 0.0};
};

struct Trajectory {
    double cycle_period = kTwoPi;
    int samples_per_cycle = 100;
    double body_length = 0.0;
    std::vector<TrajectorySample> samples;

    int cycles() const {
        return samples.empty() ? 0 : static_cast<int>(samples.size() - 1) / samples_per_cycle;
    }
};

/// Settle, ramp the gait in over half a cycle, then run `cfg.cycles` cycles,
/// recording one sample per control tick of the measured cycles.
Trajectory run_gait(const RobotSpec& spec, const GaitParams& gait, const Terrain& terrain,
                    const SimConfig& cfg, double start_x);

}  // namespace segwave
