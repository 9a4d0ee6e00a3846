#include <cmath>

#include <doctest.h>

#include "segwave/errors.hpp"
#include "segwave/metrics.hpp"
#include "segwave/sim.hpp"

using namespace segwave;

namespace {

std::vector<JointCommand> rest_commands(const RobotSpec& spec) {
    std::vector<JointCommand> cmd;
    for (int i = 0; i < spec.joint_count(); ++i) cmd.push_back({i, 0.0, spec.l_ext});
    return cmd;
}

double mean_x(const TrajectorySample& s) {
    double x = 0.0;
    for (const BodyPose& b : s.bodies) x += b.x;
    return x / static_cast<double>(s.bodies.size());
}

}  // namespace

TEST_CASE("probe above the surface feels nothing") {
    const ProbeForce f = probe_contact(make_flat(), {0.0, 0.01}, {0.3, -0.2}, 1.0, SimConfig{});
    CHECK_FALSE(f.in_contact);
    CHECK(f.force.norm() == 0.0);
}

TEST_CASE("static 1 mm penetration gives 20 N") {
    const ProbeForce f = probe_contact(make_flat(), {0.0, -0.001}, {0.0, 0.0}, 1.0, SimConfig{});
    CHECK(f.in_contact);
    CHECK(f.force.x() == doctest::Approx(0.0));
    CHECK(f.force.y() == doctest::Approx(20.0));
}

TEST_CASE("nose against a step face is pushed straight back") {
    const ProbeForce f = probe_contact(make_step(0.0, 0.125), {0.002, 0.05}, {0.05, 0.0}, 0.3,
                                       SimConfig{});
    REQUIRE(f.in_contact);
    CHECK(f.force.x() < 0.0);
    CHECK(f.force.y() == doctest::Approx(0.0));
}

TEST_CASE("friction opposes slip and is bounded by the normal force") {
    const SimConfig cfg;
    const ProbeForce f = probe_contact(make_flat(), {0.0, -0.001}, {0.2, 0.0}, 0.5, cfg);
    CHECK(f.force.x() == doctest::Approx(-0.5 * f.force.y()));
    const ProbeForce slow = probe_contact(make_flat(), {0.0, -0.001}, {1e-4, 0.0}, 0.5, cfg);
    CHECK(slow.force.x() < 0.0);
    CHECK(std::abs(slow.force.x()) < 0.5 * slow.force.y());
}

TEST_CASE("zero gravity, zero commands, at rest: a fixed point") {
    const RobotSpec spec;
    const Terrain flat = make_flat();
    SimConfig cfg;
    cfg.gravity = 0.0;
    Simulator sim(spec, flat, cfg);
    MultibodyState s = assemble(spec, 0.0, flat);
    s.q[1] += 1.0;
    const MultibodyState start = s;
    for (int k = 0; k < 1000; ++k) sim.step(s, rest_commands(spec));
    CHECK(s.q == start.q);
    CHECK(s.v == start.v);
    CHECK(s.step == 1000);
}

TEST_CASE("force-free chain drifts with its velocity") {
    const RobotSpec spec;
    const Terrain flat = make_flat();
    SimConfig cfg;
    cfg.gravity = 0.0;
    Simulator sim(spec, flat, cfg);
    MultibodyState s = assemble(spec, 0.0, flat);
    s.q[1] += 1.0;
    s.v[0] = 0.1;
    s.v[1] = -0.05;
    const MultibodyState start = s;
    const int n = 200;
    for (int k = 0; k < n; ++k) sim.step(s, rest_commands(spec));
    CHECK(s.q[0] == doctest::Approx(start.q[0] + 0.1 * n * sim.dt()));
    CHECK(s.q[1] == doctest::Approx(start.q[1] - 0.05 * n * sim.dt()));
    CHECK(s.q.tail(s.q.size() - 2) == start.q.tail(s.q.size() - 2));
    CHECK(s.v == start.v);
}

TEST_CASE("stepping is deterministic") {
    const RobotSpec spec;
    const Terrain t = make_step(0.0, 0.125);
    Simulator a(spec, t, SimConfig{});
    Simulator b(spec, t, SimConfig{});
    MultibodyState sa = assemble(spec, -0.1, t);
    MultibodyState sb = sa;
    const GaitParams g;
    for (int k = 0; k < 2000; ++k) {
        const auto cmd = gait_frame(g, k * a.dt());
        a.step(sa, cmd);
        b.step(sb, cmd);
    }
    CHECK(sa == sb);
}

TEST_CASE("commands beyond the pitch limit are clamped") {
    RobotSpec spec;
    spec.pitch_limit = deg_to_rad(30.0);
    spec.servo_torque_max = 50.0;
    const Terrain flat = make_flat();
    SimConfig cfg;
    cfg.gravity = 0.0;
    Simulator sim(spec, flat, cfg);
    MultibodyState s = assemble(spec, 0.0, flat);
    s.q[1] += 1.0;
    auto cmd = rest_commands(spec);
    for (auto& c : cmd) c.alpha = 1.5;
    const ChainModel& chain = sim.chain();
    for (int k = 0; k < 20000; ++k) {
        sim.step(s, cmd);
        for (int j = 0; j < chain.joints(); ++j)
            REQUIRE(std::abs(s.q[chain.alpha_index(j)]) <= spec.pitch_limit + 1e-12);
    }
    for (const JointState& js : sim.joint_states(s, cmd)) CHECK(js.alpha_cmd <= spec.pitch_limit);
}

TEST_CASE("wrong command count") {
    const RobotSpec spec;
    const Terrain flat = make_flat();
    Simulator sim(spec, flat, SimConfig{});
    MultibodyState s = assemble(spec, 0.0, flat);
    CHECK_THROWS_AS(sim.step(s, {}), ConfigError);
}

TEST_CASE("divergence reports the step") {
    const RobotSpec spec;
    const Terrain flat = make_flat();
    SimConfig cfg;
    cfg.divergence_velocity_cap = 0.5;
    Simulator sim(spec, flat, cfg);
    MultibodyState s = assemble(spec, 0.0, flat);
    s.q[1] += 1.0;
    s.step = 41;
    s.v[0] = 1.0;
    try {
        sim.step(s, rest_commands(spec));
        FAIL("expected divergence");
    } catch (const DivergenceError& e) {
        CHECK(e.step() == 42);
        CHECK_FALSE(e.snapshot().empty());
        CHECK(e.code() == "divergence");
    }
}

TEST_CASE("cycle timing") {
    SimConfig cfg;
    CHECK(cfg.steps_per_tick() * cfg.samples_per_cycle * cfg.effective_dt() ==
          doctest::Approx(cfg.cycle_period));
    CHECK(cfg.effective_dt() == doctest::Approx(cfg.dt).epsilon(0.05));
    cfg.samples_per_cycle = 3;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("robot at rest stays put") {
    const RobotSpec spec;
    GaitParams g;
    g.amplitude = 0.0;
    g.delta_l = 0.0;
    SimConfig cfg;
    cfg.cycles = 2;  // > 10 s after settling
    const Trajectory t = run_gait(spec, g, make_flat(), cfg, 0.0);
    REQUIRE(t.samples.size() == 201);
    CHECK(t.cycles() == 2);
    const double x0 = mean_x(t.samples.front());
    double worst = 0.0;
    for (const auto& s : t.samples) worst = std::max(worst, std::abs(mean_x(s) - x0));
    CHECK(worst < 1e-3);
    CHECK(std::abs(speed_bl_per_cyc(t, body_length(spec)).displacement) < 1e-3);
}

TEST_CASE("walking gait: steady cycles, shallow contacts, cables recorded") {
    const RobotSpec spec;
    const GaitParams g;
    SimConfig cfg;
    cfg.cycles = 3;
    cfg.record_cables = true;
    const Trajectory t = run_gait(spec, g, make_flat(), cfg, 0.0);
    REQUIRE(t.samples.size() == 301);
    CHECK(t.samples[0].cables.size() == 4);
    CHECK(t.samples[0].joints.size() == 4);
    CHECK(t.samples[0].bodies.size() == 5);

    const double d1 = mean_x(t.samples[200]) - mean_x(t.samples[100]);
    const double d2 = mean_x(t.samples[300]) - mean_x(t.samples[200]);
    CHECK(d1 > 0.0);
    CHECK(std::abs(d2 - d1) < 0.2 * std::abs(d1));

    // Penetration along the run, re-simulated step by step.
    const Terrain flat = make_flat();
    Simulator sim(spec, flat, cfg);
    MultibodyState s = assemble(spec, 0.0, flat);
    double deepest = 0.0;
    for (int k = 0; k < 3 * cfg.samples_per_cycle; ++k) {
        const auto cmd = gait_frame(g, k * cfg.cycle_period / cfg.samples_per_cycle);
        for (int i = 0; i < cfg.steps_per_tick(); ++i) sim.step(s, cmd);
        if (k >= cfg.samples_per_cycle)
            for (const ProbeForce& p : contact_forces(sim.chain(), s, flat, cfg))
                deepest = std::max(deepest, p.depth);
    }
    CHECK(deepest < 0.005);
}

TEST_CASE("run_gait is a pure function of its inputs") {
    const RobotSpec spec;
    GaitParams g;
    g.amplitude = deg_to_rad(50.0);
    SimConfig cfg;
    cfg.cycles = 1;
    const Terrain t = make_step(0.0, 0.125);
    const Trajectory a = run_gait(spec, g, t, cfg, -0.1);
    const Trajectory b = run_gait(spec, g, t, cfg, -0.1);
    REQUIRE(a.samples.size() == b.samples.size());
    for (std::size_t k = 0; k < a.samples.size(); ++k) {
        CHECK(a.samples[k].head_nose == b.samples[k].head_nose);
        CHECK(a.samples[k].leg_contact == b.samples[k].leg_contact);
    }
}

TEST_CASE("run_gait rejects mismatched gait and robot") {
    GaitParams g;
    g.joints = 3;
    CHECK_THROWS_AS(run_gait(RobotSpec{}, g, make_flat(), SimConfig{}, 0.0), ConfigError);
    g = GaitParams{};
    g.l_ext = 0.012;
    CHECK_THROWS_AS(run_gait(RobotSpec{}, g, make_flat(), SimConfig{}, 0.0), ConfigError);
}
