#include <cmath>
#include <set>
#include <sstream>

#include <doctest.h>

#include "segwave/errors.hpp"
#include "segwave/harness.hpp"
#include "segwave/serialize.hpp"

using namespace segwave;

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

ExperimentPlan quick_phase_plan() {
    ExperimentPlan p = ExperimentPlan::defaults(Scenario::PhaseSweep);
    p.cycles = 1;
    return p;
}

}  // namespace

TEST_CASE("trial seeds") {
    std::set<std::uint64_t> seen;
    for (Scenario s : {Scenario::PhaseSweep, Scenario::ClimbProb})
        for (int point = 0; point < 10; ++point)
            for (int trial = 0; trial < 10; ++trial) seen.insert(trial_seed(7, s, point, trial));
    CHECK(seen.size() == 200);
    CHECK(trial_seed(7, Scenario::ClimbProb, 3, 4) == trial_seed(7, Scenario::ClimbProb, 3, 4));
    CHECK(trial_seed(7, Scenario::ClimbProb, 3, 4) != trial_seed(8, Scenario::ClimbProb, 3, 4));
}

TEST_CASE("mean and sample standard deviation") {
    const auto [m, s] = mean_stddev({2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0});
    CHECK(m == doctest::Approx(5.0));
    CHECK(s == doctest::Approx(std::sqrt(32.0 / 7.0)));
    CHECK(mean_stddev({3.0}).second == 0.0);
}

TEST_CASE("default protocols") {
    const auto phase = ExperimentPlan::defaults(Scenario::PhaseSweep);
    CHECK(phase.sweep_values.size() == 9);
    CHECK(phase.sweep_values.front() == 0.0);
    CHECK(phase.sweep_values.back() == 360.0);
    CHECK(phase.trials == 3);
    CHECK(phase.cycles == 3);
    CHECK(phase.sweep_param() == "phase_deg");

    const auto amp = ExperimentPlan::defaults(Scenario::AmpSweepFlat);
    CHECK(amp.sweep_values == std::vector<double>{10, 25, 40, 55, 70});
    const auto climb = ExperimentPlan::defaults(Scenario::ClimbProb);
    CHECK(climb.trials == 10);
    CHECK(climb.sweep_param() == "amplitude_deg");
    const auto rug = ExperimentPlan::defaults(Scenario::RugoseTraverse);
    CHECK(rug.sweep_values == std::vector<double>{35, 50, 65, 80});
    CHECK(rug.cycles == 10);
    CHECK(plan_terrain(rug).kind() == TerrainKind::Rugose);
    CHECK(plan_terrain(climb).kind() == TerrainKind::Step);
}

TEST_CASE("plan validation") {
    ExperimentPlan p = ExperimentPlan::defaults(Scenario::ClimbProb);
    p.trials = 0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = ExperimentPlan::defaults(Scenario::ClimbProb);
    p.gait.delta_l = 0.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = ExperimentPlan::defaults(Scenario::ClimbProb);
    p.start_offset_min = 2.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = ExperimentPlan::defaults(Scenario::PhaseSweep);
    CHECK_THROWS_AS(run_climb_prob(p), ConfigError);
    p = ExperimentPlan::defaults(Scenario::ClimbProb);
    p.terrain.loaded = make_flat();
    CHECK_THROWS_AS(run_climb_prob(p), ConfigError);
}

TEST_CASE("names round-trip") {
    for (Scenario s : {Scenario::PhaseSweep, Scenario::AmpSweepFlat, Scenario::ClimbProb,
                       Scenario::RugoseTraverse})
        CHECK(scenario_from_string(to_string(s)) == s);
    for (JointType j : {JointType::TwoDof, JointType::PitchOnly})
        CHECK(joint_type_from_string(to_string(j)) == j);
    CHECK_THROWS_AS(scenario_from_string("swim"), ConfigError);
}

TEST_CASE("phase sweep output shape and aggregates") {
    const SweepResult r = run_phase_sweep(quick_phase_plan(), 4);
    REQUIRE(r.points.size() == 9);
    for (const SweepPoint& p : r.points) CHECK(p.trials.size() == 3);
    CHECK(r.ratios.empty());
    CHECK(r.config_hash.size() == 16);

    const auto rows = lines(render_results(r, OutputFormat::Csv));
    REQUIRE(rows.size() == 1 + 27 + 9);
    CHECK(rows[0] == "scenario,sweep_param,sweep_value,joint_type,trial,seed,scalar,mean,stddev");

    std::vector<double> trial_values;
    int aggregates = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto f = split(rows[i]);
        REQUIRE(f.size() == 9);
        CHECK(f[0] == "phase_sweep");
        CHECK(f[1] == "phase_deg");
        if (!f[4].empty()) {
            trial_values.push_back(std::stod(f[6]));
            continue;
        }
        ++aggregates;
        const auto [m, s] = mean_stddev(trial_values);
        CHECK(std::abs(m - std::stod(f[7])) <= 1e-12);
        CHECK(std::abs(s - std::stod(f[8])) <= 1e-12);
        trial_values.clear();
    }
    CHECK(aggregates == 9);

    // Trials at 0 and 360 degrees run the same gait with different seeds.
    CHECK(r.at(0.0, JointType::TwoDof).mean ==
          doctest::Approx(r.at(360.0, JointType::TwoDof).mean).epsilon(0.1));
    CHECK_THROWS_AS(r.at(17.0, JointType::TwoDof), IndexError);
}

TEST_CASE("worker count does not change results") {
    ExperimentPlan p = ExperimentPlan::defaults(Scenario::RugoseTraverse);
    p.cycles = 1;
    p.trials = 2;
    p.sweep_values = {35.0, 65.0};
    const SweepResult a = run_experiment(p, 1);
    const SweepResult b = run_experiment(p, 3);
    CHECK(a == b);
    CHECK(render_results(a, OutputFormat::Csv) == render_results(b, OutputFormat::Csv));
    CHECK(render_results(a, OutputFormat::Json) == render_results(b, OutputFormat::Json));
    CHECK(a.ratios.size() == 2);
}

TEST_CASE("amplitude sweep emits both joint types and the ratio") {
    ExperimentPlan p = ExperimentPlan::defaults(Scenario::AmpSweepFlat);
    p.cycles = 1;
    p.trials = 1;
    p.sweep_values = {40.0};
    const SweepResult r = run_amp_sweep_flat(p);
    REQUIRE(r.points.size() == 2);
    const double two = r.at(40.0, JointType::TwoDof).mean;
    const double pitch = r.at(40.0, JointType::PitchOnly).mean;
    REQUIRE(r.ratios.size() == 1);
    CHECK(r.ratios[0].ratio == doctest::Approx((two - pitch) * 0.75 / 0.01));
    const auto rows = lines(render_results(r, OutputFormat::Csv));
    CHECK(rows.back().find("peristalsis_ratio") != std::string::npos);
}

TEST_CASE("climb trials score success as 0 or 1") {
    ExperimentPlan p = ExperimentPlan::defaults(Scenario::ClimbProb);
    p.trials = 2;
    p.cycles = 2;
    p.sweep_values = {65.0};
    const SweepResult r = run_climb_prob(p, 2);
    CHECK(r.scalar == "climb_success");
    CHECK(r.ratios.empty());
    for (const SweepPoint& pt : r.points)
        for (const TrialRecord& t : pt.trials) {
            REQUIRE(t.scalar);
            CHECK((*t.scalar == 0.0 || *t.scalar == 1.0));
        }
}

TEST_CASE("a point losing most trials fails the run") {
    ExperimentPlan p = quick_phase_plan();
    p.sweep_values = {270.0};
    p.sim.divergence_velocity_cap = 1e-3;
    CHECK_THROWS_AS(run_phase_sweep(p), MeasurementError);
}

TEST_CASE("emit_results writes the rendered text") {
    ExperimentPlan p = quick_phase_plan();
    p.sweep_values = {270.0};
    p.trials = 1;
    const SweepResult r = run_phase_sweep(p);
    const std::string path = "harness_emit_test.csv";
    emit_results(r, OutputFormat::Csv, path);
    CHECK(read_file(path) == render_results(r, OutputFormat::Csv));
    emit_results(r, OutputFormat::Csv, path);
    CHECK(read_file(path) == render_results(r, OutputFormat::Csv));
    std::remove(path.c_str());
    CHECK_THROWS_AS(emit_results(r, OutputFormat::Json, "/nonexistent/dir/out.json"), IoError);
}
