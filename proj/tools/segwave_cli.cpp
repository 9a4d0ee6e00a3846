// Command-line front end: experiment sweeps, terrain generation and single runs.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "segwave/errors.hpp"
#include "segwave/harness.hpp"
#include "segwave/metrics.hpp"
#include "segwave/serialize.hpp"

using namespace segwave;

namespace {

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<int> trials;
    std::optional<int> cycles;
    std::string out;
    std::string format = "csv";
    int jobs = 1;
    std::vector<double> values;
    std::string terrain;
    std::optional<double> step_height;
};

void add_common(CLI::App* cmd, Common& c, bool sweep) {
    cmd->add_option("--config", c.config, "JSON config with robot/gait/sim/harness sections");
    cmd->add_option("--seed", c.seed, "master seed");
    cmd->add_option("--cycles", c.cycles, "gait cycles per trial");
    cmd->add_option("--out", c.out, "output file (stdout when omitted)");
    cmd->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    if (!sweep) return;
    cmd->add_option("--trials", c.trials, "trials per sweep point");
    cmd->add_option("--jobs", c.jobs, "worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--values", c.values, "sweep grid in degrees");
}

OutputFormat format_of(const Common& c) {
    return c.format == "json" ? OutputFormat::Json : OutputFormat::Csv;
}

void write_out(const std::string& path, const std::string& text) {
    if (path.empty())
        std::cout << text << std::flush;
    else
        write_file(path, text);
}

ExperimentPlan make_plan(Scenario s, const Common& c) {
    ExperimentPlan plan = ExperimentPlan::defaults(s);
    if (c.seed) plan.master_seed = *c.seed;
    plan.terrain.rugose.seed = plan.master_seed;  // a config value still wins
    if (!c.config.empty()) apply_config(read_json_file(c.config), plan);
    if (c.trials) plan.trials = *c.trials;
    if (c.cycles) plan.cycles = *c.cycles;
    if (!c.values.empty()) plan.sweep_values = c.values;
    if (c.step_height) plan.terrain.step_height = *c.step_height;
    if (!c.terrain.empty()) plan.terrain.loaded = terrain_from_json(read_json_file(c.terrain));
    return plan;
}

void run_scenario(Scenario s, const Common& c) {
    const ExperimentPlan plan = make_plan(s, c);
    const SweepResult r = run_experiment(plan, c.jobs);
    for (const std::string& w : r.warnings) std::cerr << "warning: " << w << '\n';
    write_out(c.out, render_results(r, format_of(c)));
}

int fail(const std::string& code, const std::string& message, int status) {
    std::cerr << json{{"error", code}, {"message", message}}.dump() << '\n';
    return status;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sagittal-plane simulator and experiment harness for a wave-driven legged robot"};
    app.require_subcommand(1);

    Common c;

    auto* sweep = app.add_subcommand("sweep", "flat-ground parameter sweeps");
    sweep->require_subcommand(1);
    auto* phase = sweep->add_subcommand("phase", "speed vs phase offset between the waves");
    add_common(phase, c, true);
    auto* amplitude = sweep->add_subcommand("amplitude", "speed vs vertical amplitude, both joint types");
    add_common(amplitude, c, true);

    auto* climb = app.add_subcommand("climb", "step-climbing probability vs vertical amplitude");
    add_common(climb, c, true);
    climb->add_option("--step-height", c.step_height, "step height in meters");
    climb->add_option("--terrain", c.terrain, "terrain JSON file instead of the default step");

    auto* traverse = app.add_subcommand("traverse", "rugose-terrain speed vs vertical amplitude");
    add_common(traverse, c, true);
    traverse->add_option("--terrain", c.terrain, "terrain JSON file instead of a generated field");

    auto* terrain = app.add_subcommand("terrain", "terrain tools");
    terrain->require_subcommand(1);
    auto* gen = terrain->add_subcommand("gen", "generate a rugose terrain");
    RugoseParams rug;
    gen->add_option("--seed", rug.seed, "generator seed");
    gen->add_option("--rugosity", rug.rugosity, "mean adjacent height step / robot height");
    gen->add_option("--edge", rug.edge_height, "edge height in meters");
    gen->add_option("--cell-width", rug.cell_width, "cell width in meters");
    gen->add_option("--extent", rug.extent, "field length past the edge in meters");
    std::string gen_out;
    gen->add_option("--out", gen_out, "output file (stdout when omitted)");

    auto* sim = app.add_subcommand("sim", "single simulation runs");
    sim->require_subcommand(1);
    auto* run = sim->add_subcommand("run", "one trial; prints speeds as JSON");
    add_common(run, c, false);
    std::optional<double> amp_deg, phase_deg, delta_l, start_x;
    std::string emit_traj;
    bool emit_cables = false;
    bool pitch_only = false;
    run->add_option("--amplitude", amp_deg, "vertical amplitude in degrees");
    run->add_option("--phase", phase_deg, "phase offset in degrees");
    run->add_option("--delta-l", delta_l, "peristaltic amplitude in meters");
    run->add_flag("--pitch-only", pitch_only, "rigid-length joints (implies delta-l 0)");
    run->add_option("--start-x", start_x, "nose start position in meters");
    run->add_option("--terrain", c.terrain, "terrain JSON file (flat when omitted)");
    run->add_option("--emit-trajectory", emit_traj, "write the trajectory here");
    run->add_flag("--emit-cables", emit_cables, "add commanded cable lengths to the trajectory")
        ->needs(run->get_option("--emit-trajectory"));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail("usage", e.what(), 2);
    }

    try {
        if (*phase) run_scenario(Scenario::PhaseSweep, c);
        else if (*amplitude) run_scenario(Scenario::AmpSweepFlat, c);
        else if (*climb) run_scenario(Scenario::ClimbProb, c);
        else if (*traverse) run_scenario(Scenario::RugoseTraverse, c);
        else if (*gen) {
            const Terrain t = generate_rugose(rug);
            json j = to_json(t);
            j["generator"] = to_json(rug);
            write_out(gen_out, j.dump(2) + "\n");
        } else if (*run) {
            ExperimentPlan plan = ExperimentPlan::defaults(Scenario::PhaseSweep);
            if (!c.config.empty()) apply_config(read_json_file(c.config), plan);
            GaitParams gait = plan.gait;
            RobotSpec robot = plan.robot;
            SimConfig cfg = plan.sim;
            if (amp_deg) gait.amplitude = deg_to_rad(*amp_deg);
            if (phase_deg) gait.phase = deg_to_rad(*phase_deg);
            if (delta_l) gait.delta_l = *delta_l;
            if (pitch_only) {
                robot.pitch_only = true;
                gait.delta_l = 0.0;
            }
            if (c.cycles) cfg.cycles = *c.cycles;
            if (emit_cables) cfg.record_cables = true;
            const Terrain t = c.terrain.empty() ? make_flat() : terrain_from_json(read_json_file(c.terrain));
            const Trajectory traj = run_gait(robot, gait, t, cfg, start_x.value_or(0.0));
            const double bl = body_length(robot);
            json summary = {{"cycles", traj.cycles()},
                            {"body_length", bl},
                            {"speed_bl_per_cyc", speed_bl_per_cyc(traj, bl).bl_per_cyc},
                            {"head_speed_bl_per_cyc", head_speed_bl_per_cyc(traj, bl).bl_per_cyc},
                            {"lifted_head_drift", lifted_head_drift(traj)}};
            if (t.edge_x()) {
                const ClimbOutcome co = climb_outcome(traj, t);
                summary["climb_success"] = co.success;
            }
            const bool as_json = format_of(c) == OutputFormat::Json;
            if (!emit_traj.empty())
                write_file(emit_traj, as_json ? trajectory_to_json(traj).dump() + "\n" : trajectory_to_csv(traj));
            write_out(c.out, summary.dump(2) + "\n");
        }
    } catch (const Error& e) {
        return fail(e.code(), e.what(), 1);
    } catch (const std::exception& e) {
        return fail("internal", e.what(), 3);
    }
    return 0;
}
