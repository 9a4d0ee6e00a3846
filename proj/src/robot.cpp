#include "segwave/robot.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "segwave/errors.hpp"

namespace segwave {

void RobotSpec::validate() const {
    if (n_modules < 2) throw ConfigError("robot needs at least two modules");
    const double positives[] = {module_length, module_diameter, module_mass, l_ext, slot_max,
                                servo_gain_p, servo_torque_max, prismatic_gain_p,
                                prismatic_force_max};
    for (double v : positives)
        if (!(v > 0.0)) throw ConfigError("robot lengths, masses and gains must be positive");
    if (!(legged_length >= 0.0) || !(leg_upper_length >= 0.0) || !(leg_lower_length >= 0.0))
        throw ConfigError("leg dimensions must be non-negative");
    if (!(servo_gain_d >= 0.0) || !(prismatic_gain_d >= 0.0) || !(leaf_spring_stiffness >= 0.0))
        throw ConfigError("damping and spring constants must be non-negative");
    if (!(leg_radius >= 0.0)) throw ConfigError("leg radius must be non-negative");
    if (!(leg_tip_friction >= 0.0) || !(body_friction >= 0.0))
        throw ConfigError("friction coefficients must be non-negative");
    if (!(pitch_limit > 0.0 && pitch_limit <= kPi / 2.0 + 1e-12))
        throw ConfigError("pitch limit must lie in (0, 90] degrees");
    if (!(slot_max >= l_ext)) throw ConfigError("slot travel must cover l_ext");
    joint_geometry.validate();
    if (!(total_length > 0.0)) throw ConfigError("total length must be positive");
    const double built = body_length(*this);
    if (std::abs(built - total_length) > 0.10 * total_length)
        throw ConfigError("module layout gives " + std::to_string(built) +
                          " m, more than 10% off the declared total length " +
                          std::to_string(total_length) + " m");
}

double RobotSpec::module_inertia() const {
    const double r = 0.5 * module_diameter;
    const double len = segment_length();
    return module_mass * (3.0 * r * r + len * len) / 12.0;
}

double body_length(const RobotSpec& spec) {
    return spec.n_modules * spec.segment_length() + (spec.n_modules - 1) * spec.l_ext;
}

double standing_height(const RobotSpec& spec) {
    const double leg_drop = spec.leg_upper_length + spec.leg_lower_length * std::cos(spec.leg_tilt);
    const double half = 0.5 * spec.module_diameter;
    return std::max(leg_drop, half) + half;
}

ChainModel::ChainModel(const RobotSpec& spec) : spec_(spec) {
    const double half_seg = 0.5 * spec_.segment_length();
    const double half_dia = 0.5 * spec_.module_diameter;
    const double case_rear = half_seg - spec_.module_length;
    const double leg_x = -half_seg + spec_.leg_position * spec_.segment_length();
    const double tip_x = leg_x - spec_.leg_lower_length * std::sin(spec_.leg_tilt);
    const double tip_z = -spec_.leg_upper_length - spec_.leg_lower_length * std::cos(spec_.leg_tilt);

    const Eigen::Vector2d knee{leg_x, -spec_.leg_upper_length};
    if (spec_.leg_upper_length > half_dia) struts_.push_back({{leg_x, -half_dia}, knee});
    if (spec_.leg_lower_length > 0.0) struts_.push_back({knee, {tip_x, tip_z}});

    for (int b = 0; b < spec_.n_modules; ++b) {
        probes_.push_back({b, half_seg, 0.0, ProbeKind::Body});
        probes_.push_back({b, half_seg, -half_dia, ProbeKind::Body});
        probes_.push_back({b, half_seg, half_dia, ProbeKind::Body});
        probes_.push_back({b, case_rear, -half_dia, ProbeKind::Body});
        probes_.push_back({b, -half_seg, -half_dia, ProbeKind::Body});
        probes_.push_back({b, -half_seg, half_dia, ProbeKind::Body});
        if (spec_.leg_upper_length > half_dia)
            probes_.push_back({b, leg_x, -spec_.leg_upper_length, ProbeKind::Body});
        if (-tip_z > half_dia) probes_.push_back({b, tip_x, tip_z, ProbeKind::LegTip});
    }
}

namespace {

Eigen::Vector2d rot(double theta, const Eigen::Vector2d& v) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    return {c * v.x() - s * v.y(), s * v.x() + c * v.y()};
}

Eigen::Vector2d perp(const Eigen::Vector2d& v) { return {-v.y(), v.x()}; }

}  // namespace

ChainModel::Frame ChainModel::frame(const Eigen::VectorXd& q) const {
    const int nb = bodies();
    const double half_seg = 0.5 * spec_.segment_length();
    Frame f;
    f.com.resize(nb);
    f.theta.resize(nb);
    f.pin.resize(nb - 1);
    f.com[0] = {q[0], q[1]};
    f.theta[0] = q[2];
    for (int j = 0; j < nb - 1; ++j) {
        f.pin[j] = f.com[j] + rot(f.theta[j], {-half_seg, 0.0});
        f.theta[j + 1] = f.theta[j] - q[alpha_index(j)];
        f.com[j + 1] = f.pin[j] - rot(f.theta[j + 1], {half_seg + q[length_index(j)], 0.0});
    }
    return f;
}

Eigen::Vector2d ChainModel::point(const Frame& f, int body, const Eigen::Vector2d& local) const {
    return f.com[body] + rot(f.theta[body], local);
}

void ChainModel::point_jacobian(const Frame& f, int body, const Eigen::Vector2d& world,
                                Eigen::Ref<Eigen::MatrixXd> out) const {
    out.setZero();
    out(0, 0) = 1.0;
    out(1, 1) = 1.0;
    out.col(2) = perp(world - f.com[0]);
    for (int j = 0; j < body; ++j) {
        out.col(alpha_index(j)) = -perp(world - f.pin[j]);
        const double th = f.theta[j + 1];
        out(0, length_index(j)) = -std::cos(th);
        out(1, length_index(j)) = -std::sin(th);
    }
}

std::vector<BodyPose> ChainModel::poses(const Eigen::VectorXd& q, const Eigen::VectorXd& v) const {
    const Frame f = frame(q);
    std::vector<BodyPose> out(bodies());
    Eigen::MatrixXd jac(2, dofs());
    for (int b = 0; b < bodies(); ++b) {
        point_jacobian(f, b, f.com[b], jac);
        const Eigen::Vector2d vel = jac * v;
        double omega = v[2];
        for (int j = 0; j < b; ++j) omega -= v[alpha_index(j)];
        out[b] = {f.com[b].x(), f.com[b].y(), f.theta[b], vel.x(), vel.y(), omega};
    }
    return out;
}

MultibodyState assemble(const RobotSpec& spec, double start_x, const Terrain& terrain) {
    spec.validate();
    ChainModel chain(spec);
    MultibodyState s;
    s.q = Eigen::VectorXd::Zero(chain.dofs());
    s.v = Eigen::VectorXd::Zero(chain.dofs());
    for (int j = 0; j < chain.joints(); ++j) s.q[chain.length_index(j)] = spec.l_ext;
    s.q[0] = start_x - chain.nose_local_x();

    // Lift the straight chain until its lowest probe just touches the ground
    // beneath it.
    const ChainModel::Frame f = chain.frame(s.q);
    double z0 = -1e300;
    for (const Probe& p : chain.probes()) {
        const Eigen::Vector2d w = chain.point(f, p.body, {p.local_x, p.local_z});
        const double ground = terrain.cells()[terrain.cell_index(w.x())].height;
        z0 = std::max(z0, ground - p.local_z);
    }
    s.q[1] = z0;
    return s;
}

}  // namespace segwave
