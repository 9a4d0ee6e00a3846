#include <cmath>

#include <doctest.h>

#include "segwave/errors.hpp"
#include "segwave/robot.hpp"
#include "segwave/sim.hpp"

using namespace segwave;

namespace {

double nose_to_tail(const ChainModel& chain, const MultibodyState& s) {
    const auto f = chain.frame(s.q);
    const Eigen::Vector2d nose = chain.point(f, 0, {chain.nose_local_x(), 0.0});
    const Eigen::Vector2d tail = chain.point(f, chain.bodies() - 1, {chain.pin_local_x(), 0.0});
    return (nose - tail).norm();
}

}  // namespace

TEST_CASE("default robot dimensions") {
    const RobotSpec spec;
    spec.validate();
    CHECK(body_length(spec) == doctest::Approx(0.75));
    const double h = standing_height(spec);
    CHECK(h >= 0.10);
    CHECK(h <= 0.15);

    const Terrain flat = make_flat();
    const ChainModel chain(spec);
    const MultibodyState s = assemble(spec, 0.0, flat);
    CHECK(chain.bodies() == 5);
    CHECK(chain.joints() == 4);
    CHECK(nose_to_tail(chain, s) == doctest::Approx(0.75));
    CHECK(chain.total_mass() == doctest::Approx(1.0));
}

TEST_CASE("two-module chain") {
    RobotSpec spec;
    spec.n_modules = 2;
    spec.total_length = 2 * spec.segment_length() + spec.l_ext;
    const ChainModel chain(spec);
    CHECK(chain.joints() == 1);
    CHECK(nose_to_tail(chain, assemble(spec, 0.0, make_flat())) ==
          doctest::Approx(2 * spec.segment_length() + spec.l_ext));
}

TEST_CASE("legless robot rests on its case") {
    RobotSpec spec;
    spec.leg_upper_length = 0.0;
    spec.leg_lower_length = 0.0;
    CHECK(standing_height(spec) == doctest::Approx(spec.module_diameter));
}

TEST_CASE("assembled robot touches but does not penetrate") {
    const RobotSpec spec;
    for (const Terrain& t : {make_flat(), make_step(0.0, 0.125)}) {
        const MultibodyState s = assemble(spec, -0.1, t);
        double deepest = 0.0;
        bool touching = false;
        for (const ProbeForce& p : contact_forces(ChainModel(spec), s, t, SimConfig{})) {
            deepest = std::max(deepest, p.depth);
            touching = touching || p.in_contact;
        }
        CHECK(deepest < 1e-5);
        const auto f = ChainModel(spec).frame(s.q);
        CHECK(f.com[0].x() + ChainModel(spec).nose_local_x() == doctest::Approx(-0.1));
    }
}

TEST_CASE("resting top-of-body height matches the standing height") {
    const RobotSpec spec;
    const ChainModel chain(spec);
    const MultibodyState s = assemble(spec, 0.0, make_flat());
    const auto f = chain.frame(s.q);
    for (int b = 0; b < chain.bodies(); ++b)
        CHECK(f.com[b].y() + 0.5 * spec.module_diameter ==
              doctest::Approx(standing_height(spec)).epsilon(0.02));
}

TEST_CASE("assembly is deterministic") {
    const RobotSpec spec;
    const Terrain t = make_step(0.0, 0.125);
    CHECK(assemble(spec, -0.07, t) == assemble(spec, -0.07, t));
}

TEST_CASE("invalid specs") {
    RobotSpec spec;
    spec.n_modules = 1;
    CHECK_THROWS_AS(assemble(spec, 0.0, make_flat()), ConfigError);
    spec = RobotSpec{};
    spec.module_mass = 0.0;
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    spec = RobotSpec{};
    spec.total_length = 0.9;
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    spec = RobotSpec{};
    spec.pitch_limit = 2.0;
    CHECK_THROWS_AS(spec.validate(), ConfigError);
}

TEST_CASE("gait indices count from the tail") {
    const ChainModel chain{RobotSpec{}};
    CHECK(chain.joint_from_gait_index(0) == 3);
    CHECK(chain.joint_from_gait_index(3) == 0);
}

TEST_CASE("point Jacobian matches finite differences") {
    const RobotSpec spec;
    const ChainModel chain(spec);
    Eigen::VectorXd q(chain.dofs());
    q << 0.2, 0.1, 0.15, 0.3, -0.5, 0.2, 0.7, 0.004, 0.01, 0.016, 0.008;
    const Eigen::Vector2d local{0.03, -0.05};
    const auto f = chain.frame(q);
    for (int b = 0; b < chain.bodies(); ++b) {
        Eigen::MatrixXd jac(2, chain.dofs());
        chain.point_jacobian(f, b, chain.point(f, b, local), jac);
        for (int k = 0; k < chain.dofs(); ++k) {
            const double h = 1e-7;
            Eigen::VectorXd qp = q, qm = q;
            qp[k] += h;
            qm[k] -= h;
            const Eigen::Vector2d d = (chain.point(chain.frame(qp), b, local) -
                                       chain.point(chain.frame(qm), b, local)) / (2 * h);
            CHECK(jac(0, k) == doctest::Approx(d.x()).epsilon(1e-6).scale(1.0));
            CHECK(jac(1, k) == doctest::Approx(d.y()).epsilon(1e-6).scale(1.0));
        }
    }
}

TEST_CASE("body angular rates follow the joint rates") {
    const ChainModel chain{RobotSpec{}};
    Eigen::VectorXd q = Eigen::VectorXd::Zero(chain.dofs());
    Eigen::VectorXd v = Eigen::VectorXd::Zero(chain.dofs());
    v[2] = 0.5;
    v[chain.alpha_index(0)] = 0.2;
    const auto poses = chain.poses(q, v);
    CHECK(poses[0].omega == doctest::Approx(0.5));
    CHECK(poses[1].omega == doctest::Approx(0.3));
    CHECK(poses[4].omega == doctest::Approx(0.3));
}
