#pragma once

#include <vector>

#include <Eigen/Dense>

#include "segwave/cable.hpp"
#include "segwave/gait.hpp"
#include "segwave/terrain.hpp"

namespace segwave {

/// Physical description of the robot. Lengths in meters, masses in kg,
/// angles in radians. Every module is a case (`module_length` long) followed
/// by a legged section (`legged_length`) ending in the hinge pin of the joint
/// to the next module. The legs of one module collapse to a single sagittal
/// strut hanging from the axis at the middle of the legged section.
struct RobotSpec {
    int n_modules = 5;
    double module_length = 0.0875;
    double module_diameter = 0.065;
    double legged_length = 0.0545;
    double total_length = 0.75;
    double l_ext = 0.01;       // relaxed slot extension
    double slot_max = 0.02;    // slot travel limit
    double leg_upper_length = 0.06;
    double leg_lower_length = 0.03;
    double leg_tilt = deg_to_rad(15.0);  // lower segment swept back from the upper
    double leg_position = 0.19;          // leg root along the segment, 0 = rear end, 1 = nose
    double leg_radius = 0.004;           // strut half-thickness against terrain corners
    double module_mass = 0.20;
    double leg_tip_friction = 1.2;
    double body_friction = 0.3;
    double pitch_limit = deg_to_rad(90.0);
    double servo_gain_p = 10.0;   // N m / rad
    double servo_gain_d = 0.25;   // N m s / rad
    double servo_torque_max = 2.5;
    double prismatic_gain_p = 2000.0;  // N / m
    double prismatic_gain_d = 20.0;    // N s / m
    double prismatic_force_max = 40.0;
    double leaf_spring_stiffness = 200.0;  // N / m toward l_ext
    JointGeometry joint_geometry{};
    bool pitch_only = false;  // rigid hinge: lengths locked at l_ext

    /// Throws ConfigError when an invariant fails.
    void validate() const;

    int joint_count() const { return n_modules - 1; }
    double segment_length() const { return module_length + legged_length; }
    double module_inertia() const;
};

/// Nose-to-tail length of the straight robot at rest.
double body_length(const RobotSpec& spec);

/// Height of the module tops above flat ground when resting straight.
double standing_height(const RobotSpec& spec);

struct BodyPose {
    double x = 0.0;
    double z = 0.0;
    double theta = 0.0;
    double vx = 0.0;
    double vz = 0.0;
    double omega = 0.0;
};

struct JointState {
    double alpha = 0.0;
    double alpha_cmd = 0.0;
    double length = 0.0;
    double length_cmd = 0.0;
};

enum class ProbeKind { LegTip, Body };

/// A contact point fixed in a body frame (origin at the body's center of mass,
/// x toward the head, z dorsal).
struct Probe {
    int body = 0;
    double local_x = 0.0;
    double local_z = 0.0;
    ProbeKind kind = ProbeKind::Body;
};

/// Generalised state: head pose (x, z, theta), then every joint pitch, then
/// every joint length. Velocities share the layout.
struct MultibodyState {
    Eigen::VectorXd q;
    Eigen::VectorXd v;
    double time = 0.0;
    std::uint64_t step = 0;

    bool operator==(const MultibodyState& o) const {
        return time == o.time && step == o.step && q == o.q && v == o.v;
    }
};

/// Forward kinematics and Jacobians of the planar chain.
class ChainModel {
public:
    explicit ChainModel(const RobotSpec& spec);

    const RobotSpec& spec() const { return spec_; }
    int bodies() const { return spec_.n_modules; }
    int joints() const { return spec_.n_modules - 1; }
    int dofs() const { return 3 + 2 * joints(); }
    int alpha_index(int j) const { return 3 + j; }
    int length_index(int j) const { return 3 + joints() + j; }
    /// Gait joint indices count from the tail; chain joints from the head.
    int joint_from_gait_index(int i) const { return joints() - 1 - i; }
    const std::vector<Probe>& probes() const { return probes_; }

    /// Leg strut segments in body frame, shared by every body; terrain
    /// corners collide with them as capsules of radius spec().leg_radius.
    struct Strut {
        Eigen::Vector2d a;
        Eigen::Vector2d b;
    };
    const std::vector<Strut>& struts() const { return struts_; }

    /// Local x of the hinge pin / the front face, in body frame.
    double pin_local_x() const { return -0.5 * spec_.segment_length(); }
    double nose_local_x() const { return 0.5 * spec_.segment_length(); }

    struct Frame {
        std::vector<Eigen::Vector2d> com;   // per body
        std::vector<double> theta;          // per body
        std::vector<Eigen::Vector2d> pin;   // per joint, world
    };

    Frame frame(const Eigen::VectorXd& q) const;

    Eigen::Vector2d point(const Frame& f, int body, const Eigen::Vector2d& local) const;

    /// 2 x dofs Jacobian of a world point rigidly attached to `body`.
    void point_jacobian(const Frame& f, int body, const Eigen::Vector2d& world,
                        Eigen::Ref<Eigen::MatrixXd> out) const;

    std::vector<BodyPose> poses(const Eigen::VectorXd& q, const Eigen::VectorXd& v) const;

    double total_mass() const { return spec_.module_mass * spec_.n_modules; }

private:
    RobotSpec spec_;
    std::vector<Probe> probes_;
    std::vector<Strut> struts_;
};

/// Straight chain resting on `terrain` with its nose at `start_x`, all pitches
/// zero and all lengths at l_ext. Throws ConfigError for an invalid spec.
MultibodyState assemble(const RobotSpec& spec, double start_x, const Terrain& terrain);

}  // namespace segwave
