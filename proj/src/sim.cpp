#include "segwave/sim.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "segwave/errors.hpp"

namespace segwave {

void SimConfig::validate() const {
    if (!(dt > 0.0)) throw ConfigError("dt must be positive");
    if (!(gravity >= 0.0)) throw ConfigError("gravity must be non-negative");
    if (!(contact_stiffness > 0.0) || !(contact_damping >= 0.0))
        throw ConfigError("contact stiffness must be positive and damping non-negative");
    if (!(friction_regularization_velocity > 0.0))
        throw ConfigError("friction regularisation velocity must be positive");
    if (cycles < 1) throw ConfigError("need at least one cycle");
    if (!(settle_time >= 0.0)) throw ConfigError("settle time must be non-negative");
    if (!(divergence_velocity_cap > 0.0)) throw ConfigError("divergence cap must be positive");
    if (!(cycle_period > 0.0)) throw ConfigError("cycle period must be positive");
    if (samples_per_cycle < 2 || samples_per_cycle % 2 != 0)
        throw ConfigError("samples per cycle must be even and at least 2");
}

int SimConfig::steps_per_tick() const {
    const double tick = cycle_period / samples_per_cycle;
    return std::max(1, static_cast<int>(std::lround(tick / dt)));
}

namespace {

Eigen::Vector2d rot(double theta, const Eigen::Vector2d& v) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    return {c * v.x() - s * v.y(), s * v.x() + c * v.y()};
}

Eigen::Vector2d perp(const Eigen::Vector2d& v) { return {-v.y(), v.x()}; }

// Contact split into the part applied explicitly and the damping
// coefficients integrated implicitly along the normal and the tangent.
struct ContactTerms {
    bool in_contact = false;
    double depth = 0.0;
    Eigen::Vector2d normal{0.0, 1.0};
    Eigen::Vector2d tangent{1.0, 0.0};
    Eigen::Vector2d explicit_force{0.0, 0.0};
    double normal_damping = 0.0;
    double tangent_damping = 0.0;
};

// Penalty force along `normal` (the direction the robot point is pushed)
// for a penetration `depth`, with regularised Coulomb friction.
ContactTerms resolve_contact(double depth, const Eigen::Vector2d& normal, const Eigen::Vector2d& vel,
                             double friction, const SimConfig& cfg) {
    ContactTerms c;
    c.in_contact = true;
    c.depth = depth;
    c.normal = normal;
    c.tangent = {normal.y(), -normal.x()};

    const double spring = cfg.contact_stiffness * depth;
    const double normal_force = spring - cfg.contact_damping * vel.dot(c.normal);
    if (normal_force <= 0.0) return c;
    c.explicit_force = spring * c.normal;
    c.normal_damping = cfg.contact_damping;

    const double slip = vel.dot(c.tangent);
    const double limit = friction * normal_force;
    if (std::abs(slip) >= cfg.friction_regularization_velocity)
        c.explicit_force -= std::copysign(limit, slip) * c.tangent;
    else
        c.tangent_damping = limit / cfg.friction_regularization_velocity;
    return c;
}

ContactTerms contact_terms(const Terrain& terrain, const Eigen::Vector2d& pos,
                           const Eigen::Vector2d& vel, double friction, const SimConfig& cfg) {
    const auto hit = terrain.probe(pos.x(), pos.y());
    if (!hit) return {};
    return resolve_contact(hit->depth, {hit->normal_x, hit->normal_z}, vel, friction, cfg);
}

// Penetration of a terrain corner (body frame `loc`) into the module box,
// resolved through the nearest face. Returns the face's outward normal.
std::optional<std::pair<double, Eigen::Vector2d>> box_penetration(const Eigen::Vector2d& loc,
                                                                 double half_len, double half_dia) {
    if (!(std::abs(loc.x()) < half_len && std::abs(loc.y()) < half_dia)) return std::nullopt;
    std::pair<double, Eigen::Vector2d> best{half_len - loc.x(), {1.0, 0.0}};
    if (half_len + loc.x() < best.first) best = {half_len + loc.x(), {-1.0, 0.0}};
    if (half_dia - loc.y() < best.first) best = {half_dia - loc.y(), {0.0, 1.0}};
    if (half_dia + loc.y() < best.first) best = {half_dia + loc.y(), {0.0, -1.0}};
    return best;
}

double probe_friction(const RobotSpec& spec, const Probe& p) {
    return p.kind == ProbeKind::LegTip ? spec.leg_tip_friction : spec.body_friction;
}

}  // namespace

ProbeForce probe_contact(const Terrain& terrain, const Eigen::Vector2d& pos,
                         const Eigen::Vector2d& vel, double friction, const SimConfig& cfg) {
    const ContactTerms c = contact_terms(terrain, pos, vel, friction, cfg);
    ProbeForce out;
    out.in_contact = c.in_contact;
    out.depth = c.depth;
    out.normal = c.normal;
    out.force = c.explicit_force - c.normal_damping * vel.dot(c.normal) * c.normal -
                c.tangent_damping * vel.dot(c.tangent) * c.tangent;
    return out;
}

std::vector<ProbeForce> contact_forces(const ChainModel& chain, const MultibodyState& s,
                                       const Terrain& terrain, const SimConfig& cfg) {
    const ChainModel::Frame f = chain.frame(s.q);
    Eigen::MatrixXd jac(2, chain.dofs());
    std::vector<ProbeForce> out;
    out.reserve(chain.probes().size());
    for (const Probe& p : chain.probes()) {
        const Eigen::Vector2d w = chain.point(f, p.body, {p.local_x, p.local_z});
        chain.point_jacobian(f, p.body, w, jac);
        out.push_back(probe_contact(terrain, w, jac * s.v, probe_friction(chain.spec(), p), cfg));
    }
    return out;
}

Simulator::Simulator(const RobotSpec& spec, const Terrain& terrain, const SimConfig& cfg)
    : chain_(spec), terrain_(terrain), cfg_(cfg) {
    spec.validate();
    cfg_.validate();
    dt_ = cfg_.effective_dt();
    const int n = chain_.dofs();
    mass_.resize(n, n);
    damping_.resize(n, n);
    force_.resize(n);
    jac_.resize(2, n);
    body_jac_.resize(2 * chain_.bodies(), n);
}

void Simulator::step(MultibodyState& s, const std::vector<JointCommand>& commands) {
    const RobotSpec& spec = chain_.spec();
    const int nb = chain_.bodies();
    const int nj = chain_.joints();
    if (static_cast<int>(commands.size()) != nj)
        throw ConfigError("expected " + std::to_string(nj) + " joint commands, got " +
                          std::to_string(commands.size()));

    const ChainModel::Frame f = chain_.frame(s.q);
    mass_.setZero();
    damping_.setZero();
    force_.setZero();

    // Body angular velocities and velocity-product (q'' = 0) accelerations.
    std::vector<double> omega(nb);
    std::vector<Eigen::Vector2d> bias(nb);
    omega[0] = s.v[2];
    bias[0].setZero();
    const double half_seg = 0.5 * spec.segment_length();
    for (int j = 0; j < nj; ++j) {
        omega[j + 1] = omega[j] - s.v[chain_.alpha_index(j)];
        const Eigen::Vector2d pin_acc =
            bias[j] - omega[j] * omega[j] * rot(f.theta[j], {-half_seg, 0.0});
        const Eigen::Vector2d arm = rot(f.theta[j + 1], {half_seg + s.q[chain_.length_index(j)], 0.0});
        const Eigen::Vector2d slide = rot(f.theta[j + 1], {s.v[chain_.length_index(j)], 0.0});
        bias[j + 1] = pin_acc + omega[j + 1] * omega[j + 1] * arm - 2.0 * omega[j + 1] * perp(slide);
    }

    const double m = spec.module_mass;
    const double inertia = spec.module_inertia();
    Eigen::VectorXd rot_row = Eigen::VectorXd::Zero(chain_.dofs());
    rot_row[2] = 1.0;
    for (int b = 0; b < nb; ++b) {
        auto jb = body_jac_.middleRows(2 * b, 2);
        chain_.point_jacobian(f, b, f.com[b], jb);
        if (b > 0) rot_row[chain_.alpha_index(b - 1)] = -1.0;
        mass_.noalias() += m * jb.transpose() * jb;
        mass_.noalias() += inertia * rot_row * rot_row.transpose();
        const Eigen::Vector2d load = Eigen::Vector2d(0.0, -m * cfg_.gravity) - m * bias[b];
        force_.noalias() += jb.transpose() * load;
    }

    auto apply = [&](int body, const Eigen::Vector2d& w, double depth, const Eigen::Vector2d& normal,
                     double friction) {
        chain_.point_jacobian(f, body, w, jac_);
        const ContactTerms c = resolve_contact(depth, normal, jac_ * s.v, friction, cfg_);
        force_.noalias() += jac_.transpose() * c.explicit_force;
        if (c.normal_damping > 0.0) {
            const Eigen::VectorXd jn = jac_.transpose() * c.normal;
            damping_.noalias() += c.normal_damping * jn * jn.transpose();
        }
        if (c.tangent_damping > 0.0) {
            const Eigen::VectorXd jt = jac_.transpose() * c.tangent;
            damping_.noalias() += c.tangent_damping * jt * jt.transpose();
        }
    };
    for (const Probe& p : chain_.probes()) {
        const Eigen::Vector2d w = chain_.point(f, p.body, {p.local_x, p.local_z});
        if (const auto hit = terrain_.probe(w.x(), w.y()))
            apply(p.body, w, hit->depth, {hit->normal_x, hit->normal_z}, probe_friction(spec, p));
    }

    // Terrain corners against the module boxes and leg struts: edges that
    // slip between probes still catch.
    if (cfg_.corner_contacts) {
        const double half_dia = 0.5 * spec.module_diameter;
        const double reach = half_seg + spec.module_diameter + spec.leg_upper_length + spec.leg_lower_length;
        double x_lo = f.com[0].x();
        double x_hi = x_lo;
        for (const Eigen::Vector2d& c : f.com) {
            x_lo = std::min(x_lo, c.x());
            x_hi = std::max(x_hi, c.x());
        }
        for (const auto& [cx, cz] : terrain_.corners(x_lo - reach, x_hi + reach)) {
            const Eigen::Vector2d corner{cx, cz};
            for (int b = 0; b < nb; ++b) {
                const Eigen::Vector2d rel = corner - f.com[b];
                if (rel.squaredNorm() > reach * reach) continue;
                const Eigen::Vector2d loc = rot(-f.theta[b], rel);
                if (const auto box = box_penetration(loc, half_seg, half_dia))
                    apply(b, corner, box->first, -rot(f.theta[b], box->second), spec.body_friction);
                for (const ChainModel::Strut& st : chain_.struts()) {
                    const Eigen::Vector2d ab = st.b - st.a;
                    const double u = std::clamp((loc - st.a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
                    const Eigen::Vector2d near = st.a + u * ab;
                    const Eigen::Vector2d away = loc - near;
                    const double d = away.norm();
                    if (d >= spec.leg_radius) continue;
                    const Eigen::Vector2d n_loc =
                        d > 1e-12 ? Eigen::Vector2d(away / d) : Eigen::Vector2d(-ab.y(), ab.x()).normalized();
                    apply(b, chain_.point(f, b, near), spec.leg_radius - d, -rot(f.theta[b], n_loc),
                          spec.leg_tip_friction);
                }
            }
        }
    }

    // Saturated PD servos; the rate term is implicit while unsaturated.
    auto servo = [&](int idx, double target, double kp, double kd, double limit) {
        const double proportional = kp * (target - s.q[idx]);
        const double total = proportional - kd * s.v[idx];
        if (std::abs(total) <= limit) {
            force_[idx] += proportional;
            damping_(idx, idx) += kd;
        } else {
            force_[idx] += std::copysign(limit, total);
        }
    };
    for (int i = 0; i < nj; ++i) {
        const JointCommand& c = commands[i];
        const int j = chain_.joint_from_gait_index(c.joint_index);
        const double alpha_cmd = std::clamp(c.alpha, -spec.pitch_limit, spec.pitch_limit);
        const double length_cmd = std::clamp(c.length, 0.0, spec.slot_max);
        servo(chain_.alpha_index(j), alpha_cmd, spec.servo_gain_p, spec.servo_gain_d,
              spec.servo_torque_max);
        servo(chain_.length_index(j), length_cmd, spec.prismatic_gain_p, spec.prismatic_gain_d,
              spec.prismatic_force_max);
        const int li = chain_.length_index(j);
        force_[li] -= spec.leaf_spring_stiffness * (s.q[li] - spec.l_ext);
    }

    // (M + dt D) v' = M v + dt F, then q' = q + dt v'.
    Eigen::VectorXd rhs = mass_ * s.v + dt_ * force_;
    mass_.noalias() += dt_ * damping_;
    if (spec.pitch_only) {
        for (int j = 0; j < nj; ++j) {
            const int li = chain_.length_index(j);
            mass_.row(li).setZero();
            mass_.col(li).setZero();
            mass_(li, li) = 1.0;
            rhs[li] = 0.0;
        }
    }
    s.v = mass_.llt().solve(rhs);
    s.q.noalias() += dt_ * s.v;

    for (int j = 0; j < nj; ++j) {
        const int ai = chain_.alpha_index(j);
        if (s.q[ai] > spec.pitch_limit) {
            s.q[ai] = spec.pitch_limit;
            s.v[ai] = std::min(s.v[ai], 0.0);
        } else if (s.q[ai] < -spec.pitch_limit) {
            s.q[ai] = -spec.pitch_limit;
            s.v[ai] = std::max(s.v[ai], 0.0);
        }
        const int li = chain_.length_index(j);
        if (s.q[li] > spec.slot_max) {
            s.q[li] = spec.slot_max;
            s.v[li] = std::min(s.v[li], 0.0);
        } else if (s.q[li] < 0.0) {
            s.q[li] = 0.0;
            s.v[li] = std::max(s.v[li], 0.0);
        }
    }

    s.time += dt_;
    ++s.step;

    for (int b = 0; b < nb; ++b) {
        const Eigen::Vector2d vel = body_jac_.middleRows(2 * b, 2) * s.v;
        const double speed = vel.norm();
        if (!std::isfinite(speed) || speed > cfg_.divergence_velocity_cap) {
            std::ostringstream snap;
            snap << "body " << b << " speed " << speed << " m/s at t=" << s.time << " s; q=["
                 << s.q.transpose() << "]";
            throw DivergenceError(s.step, snap.str());
        }
    }
}

std::vector<JointState> Simulator::joint_states(const MultibodyState& s,
                                                const std::vector<JointCommand>& commands) const {
    const RobotSpec& spec = chain_.spec();
    std::vector<JointState> out(chain_.joints());
    for (int i = 0; i < chain_.joints(); ++i) {
        const int j = chain_.joint_from_gait_index(i);
        out[i].alpha = s.q[chain_.alpha_index(j)];
        out[i].length = s.q[chain_.length_index(j)];
        if (i < static_cast<int>(commands.size())) {
            out[i].alpha_cmd = std::clamp(commands[i].alpha, -spec.pitch_limit, spec.pitch_limit);
            out[i].length_cmd = std::clamp(commands[i].length, 0.0, spec.slot_max);
        }
    }
    return out;
}

namespace {

TrajectorySample sample(const Simulator& sim, const MultibodyState& s,
                        const std::vector<JointCommand>& commands, const Terrain& terrain,
                        double t) {
    const ChainModel& chain = sim.chain();
    const ChainModel::Frame f = chain.frame(s.q);
    TrajectorySample out;
    out.t = t;
    out.bodies = chain.poses(s.q, s.v);
    out.joints = sim.joint_states(s, commands);
    if (sim.config().record_cables) {
        for (const JointState& js : out.joints)
            out.cables.push_back(
                cable_lengths(chain.spec().joint_geometry, js.alpha_cmd, js.length_cmd));
    }
    out.leg_contact.assign(chain.bodies(), false);
    out.leg_tip.assign(chain.bodies(), Eigen::Vector2d::Zero());
    for (const Probe& p : chain.probes()) {
        if (p.kind != ProbeKind::LegTip) continue;
        const Eigen::Vector2d w = chain.point(f, p.body, {p.local_x, p.local_z});
        out.leg_tip[p.body] = w;
        out.leg_contact[p.body] = terrain.probe(w.x(), w.y()).has_value();
    }
    out.head_nose = chain.point(f, 0, {chain.nose_local_x(), 0.0});
    return out;
}

}  // namespace

Trajectory run_gait(const RobotSpec& spec, const GaitParams& gait, const Terrain& terrain,
                    const SimConfig& cfg_in, double start_x) {
    GaitParams g = gait;
    g.validate();
    if (g.joints != spec.joint_count())
        throw ConfigError("gait has " + std::to_string(g.joints) + " joints, robot has " +
                          std::to_string(spec.joint_count()));
    if (std::abs(g.l_ext - spec.l_ext) > 1e-12)
        throw ConfigError("gait l_ext differs from the robot's relaxed slot extension");

    SimConfig cfg = cfg_in;
    cfg.cycle_period = g.period();
    Simulator sim(spec, terrain, cfg);
    MultibodyState state = assemble(spec, start_x, terrain);

    const int ticks_per_cycle = cfg.samples_per_cycle;
    const int steps_per_tick = cfg.steps_per_tick();
    const double tick = cfg.cycle_period / ticks_per_cycle;

    std::vector<JointCommand> hold = gait_frame(g.scaled(0.0), 0.0);
    const auto settle_steps = static_cast<long>(std::lround(cfg.settle_time / sim.dt()));
    for (long k = 0; k < settle_steps; ++k) sim.step(state, hold);

    const int ramp_ticks = ticks_per_cycle / 2;
    for (int k = 0; k < ramp_ticks; ++k) {
        const auto cmd = gait_frame(g.scaled(static_cast<double>(k) / ramp_ticks), k * tick);
        for (int i = 0; i < steps_per_tick; ++i) sim.step(state, cmd);
    }

    Trajectory traj;
    traj.cycle_period = cfg.cycle_period;
    traj.samples_per_cycle = ticks_per_cycle;
    traj.body_length = body_length(spec);
    const int total_ticks = cfg.cycles * ticks_per_cycle;
    traj.samples.reserve(static_cast<std::size_t>(total_ticks) + 1);
    for (int k = 0; k <= total_ticks; ++k) {
        const double t = (ramp_ticks + k) * tick;
        const auto cmd = gait_frame(g, t);
        traj.samples.push_back(sample(sim, state, cmd, terrain, t));
        if (k == total_ticks) break;
        for (int i = 0; i < steps_per_tick; ++i) sim.step(state, cmd);
    }
    return traj;
}

}  // namespace segwave
