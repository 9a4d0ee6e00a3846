#include "segwave/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <thread>

#include "segwave/errors.hpp"
#include "segwave/metrics.hpp"
#include "segwave/serialize.hpp"

namespace segwave {

std::string to_string(Scenario s) {
    switch (s) {
        case Scenario::PhaseSweep: return "phase_sweep";
        case Scenario::AmpSweepFlat: return "amp_sweep_flat";
        case Scenario::ClimbProb: return "climb_prob";
        case Scenario::RugoseTraverse: return "rugose_traverse";
    }
    return "phase_sweep";
}

Scenario scenario_from_string(const std::string& s) {
    if (s == "phase_sweep") return Scenario::PhaseSweep;
    if (s == "amp_sweep_flat") return Scenario::AmpSweepFlat;
    if (s == "climb_prob") return Scenario::ClimbProb;
    if (s == "rugose_traverse") return Scenario::RugoseTraverse;
    throw ConfigError("unknown scenario '" + s + "'");
}

std::string to_string(JointType j) { return j == JointType::TwoDof ? "two_dof" : "pitch_only"; }

JointType joint_type_from_string(const std::string& s) {
    if (s == "two_dof") return JointType::TwoDof;
    if (s == "pitch_only") return JointType::PitchOnly;
    throw ConfigError("unknown joint type '" + s + "'");
}

ExperimentPlan ExperimentPlan::defaults(Scenario s) {
    ExperimentPlan p;
    p.scenario = s;
    p.terrain.rugose.seed = p.master_seed;
    switch (s) {
        case Scenario::PhaseSweep:
            for (int k = 0; k <= 8; ++k) p.sweep_values.push_back(45.0 * k);
            p.trials = 3;
            p.cycles = 3;
            break;
        case Scenario::AmpSweepFlat:
            p.sweep_values = {10.0, 25.0, 40.0, 55.0, 70.0};
            p.trials = 3;
            p.cycles = 3;
            break;
        case Scenario::ClimbProb:
            p.sweep_values = {35.0, 50.0, 65.0, 80.0};
            p.trials = 10;
            p.cycles = kClimbCycles;
            break;
        case Scenario::RugoseTraverse:
            p.sweep_values = {35.0, 50.0, 65.0, 80.0};
            p.trials = 3;
            p.cycles = 10;
            break;
    }
    return p;
}

void ExperimentPlan::validate() const {
    if (trials < 1) throw ConfigError("trials must be at least 1");
    if (cycles < 1) throw ConfigError("cycles must be at least 1");
    if (sweep_values.empty()) throw ConfigError("empty sweep");
    for (double v : sweep_values)
        if (!std::isfinite(v)) throw ConfigError("sweep values must be finite");
    if (!(start_offset_min >= 0.0 && start_offset_max >= start_offset_min))
        throw ConfigError("start offset window must satisfy 0 <= min <= max");
    if (!(friction_jitter >= 0.0 && friction_jitter < 1.0))
        throw ConfigError("friction jitter must lie in [0, 1)");
    if (scenario == Scenario::ClimbProb || scenario == Scenario::RugoseTraverse) {
        if (!(gait.delta_l > 0.0)) throw ConfigError("two-DoF runs need delta_l > 0");
    }
    GaitParams g = gait;
    g.validate();
    robot.validate();
    sim.validate();
}

std::string ExperimentPlan::sweep_param() const {
    return scenario == Scenario::PhaseSweep ? "phase_deg" : "amplitude_deg";
}

int SweepPoint::failures() const {
    int n = 0;
    for (const TrialRecord& t : trials) n += t.scalar ? 0 : 1;
    return n;
}

const SweepPoint& SweepResult::at(double value, JointType joint) const {
    for (const SweepPoint& p : points)
        if (p.value == value && p.joint == joint) return p;
    throw IndexError("no sweep point " + format_double(value) + " " + to_string(joint));
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::string fnv1a_hex(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// Uniform in [0, 1) from the top 53 bits; unlike std::uniform_real_distribution
// this is the same on every standard library.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

struct Task {
    int point = 0;
    int trial = 0;
    double value = 0.0;
    JointType joint = JointType::TwoDof;
    std::uint64_t seed = 0;
};

double run_trial(const ExperimentPlan& plan, const Terrain& terrain, const Task& task) {
    std::mt19937_64 rng(task.seed);
    RobotSpec robot = plan.robot;
    robot.leg_tip_friction *= 1.0 + plan.friction_jitter * (2.0 * unit(rng) - 1.0);
    robot.body_friction *= 1.0 + plan.friction_jitter * (2.0 * unit(rng) - 1.0);
    const double offset =
        plan.start_offset_min + (plan.start_offset_max - plan.start_offset_min) * unit(rng);

    GaitParams gait = plan.gait;
    if (plan.scenario == Scenario::PhaseSweep)
        gait.phase = deg_to_rad(task.value);
    else
        gait.amplitude = deg_to_rad(task.value);
    if (task.joint == JointType::PitchOnly) {
        gait.delta_l = 0.0;
        robot.pitch_only = true;
    }

    SimConfig cfg = plan.sim;
    cfg.cycles = plan.cycles;

    double start_x = 0.0;
    if (plan.scenario == Scenario::ClimbProb || plan.scenario == Scenario::RugoseTraverse)
        start_x = *terrain.edge_x() - offset * robot.module_length;

    const Trajectory traj = run_gait(robot, gait, terrain, cfg, start_x);
    if (plan.scenario == Scenario::ClimbProb) return climb_outcome(traj, terrain).success ? 1.0 : 0.0;
    return speed_bl_per_cyc(traj, body_length(robot)).bl_per_cyc;
}

SweepResult run_sweep(const ExperimentPlan& plan, const std::vector<JointType>& joints, int jobs) {
    plan.validate();
    const Terrain terrain = plan_terrain(plan);
    if ((plan.scenario == Scenario::ClimbProb || plan.scenario == Scenario::RugoseTraverse) &&
        !terrain.edge_x())
        throw ConfigError(to_string(plan.scenario) + " needs a terrain with an edge");

    SweepResult res;
    res.scenario = plan.scenario;
    res.sweep_param = plan.sweep_param();
    res.scalar = plan.scenario == Scenario::ClimbProb ? "climb_success" : "speed_bl_per_cyc";
    res.config = plan_to_json(plan).dump();
    res.config_hash = fnv1a_hex(res.config);

    std::vector<Task> tasks;
    for (std::size_t v = 0; v < plan.sweep_values.size(); ++v) {
        for (std::size_t j = 0; j < joints.size(); ++j) {
            const int point = static_cast<int>(v * joints.size() + j);
            SweepPoint sp;
            sp.value = plan.sweep_values[v];
            sp.joint = joints[j];
            res.points.push_back(sp);
            for (int t = 0; t < plan.trials; ++t)
                tasks.push_back({point, t, sp.value, sp.joint,
                                 trial_seed(plan.master_seed, plan.scenario, point, t)});
        }
    }

    // Workers pull tasks by index; results land in task order, so the merge
    // does not depend on scheduling.
    struct Outcome {
        std::optional<double> scalar;
        std::string error;
        bool fatal = false;
    };
    std::vector<Outcome> outcomes(tasks.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t k = next.fetch_add(1);
            if (k >= tasks.size()) return;
            try {
                outcomes[k].scalar = run_trial(plan, terrain, tasks[k]);
            } catch (const DivergenceError& e) {
                outcomes[k].error = e.what();
            } catch (const std::exception& e) {
                outcomes[k].error = e.what();
                outcomes[k].fatal = true;
            }
        }
    };
    const int n_workers = std::max(1, std::min<int>(jobs, static_cast<int>(tasks.size())));
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }

    for (std::size_t k = 0; k < tasks.size(); ++k) {
        if (outcomes[k].fatal) throw ConfigError("trial failed: " + outcomes[k].error);
        TrialRecord rec;
        rec.trial = tasks[k].trial;
        rec.seed = tasks[k].seed;
        rec.scalar = outcomes[k].scalar;
        rec.error = outcomes[k].error;
        res.points[tasks[k].point].trials.push_back(rec);
    }

    for (SweepPoint& p : res.points) {
        std::vector<double> xs;
        for (const TrialRecord& t : p.trials)
            if (t.scalar) xs.push_back(*t.scalar);
        const int lost = p.failures();
        const std::string where = res.sweep_param + "=" + format_double(p.value) + " " + to_string(p.joint);
        if (2 * lost > static_cast<int>(p.trials.size()))
            throw MeasurementError(where + ": " + std::to_string(lost) + " of " +
                                   std::to_string(p.trials.size()) + " trials failed");
        if (lost > 0)
            res.warnings.push_back(where + ": " + std::to_string(lost) +
                                   " failed trial(s) excluded from the mean");
        std::tie(p.mean, p.stddev) = mean_stddev(xs);
    }

    if (joints.size() == 2 && plan.scenario != Scenario::ClimbProb) {
        const double bl = body_length(plan.robot);
        for (std::size_t v = 0; v < plan.sweep_values.size(); ++v) {
            const SweepPoint& two = res.points[2 * v];
            const SweepPoint& pitch = res.points[2 * v + 1];
            SpeedMeasure dp{two.mean * bl, 1, bl, two.mean};
            SpeedMeasure dnp{pitch.mean * bl, 1, bl, pitch.mean};
            res.ratios.push_back({two.value, peristalsis_ratio(dp, dnp, plan.gait.delta_l).ratio});
        }
    }
    return res;
}

void require(const ExperimentPlan& plan, Scenario s) {
    if (plan.scenario != s)
        throw ConfigError("plan is for " + to_string(plan.scenario) + ", not " + to_string(s));
}

}  // namespace

std::uint64_t trial_seed(std::uint64_t master, Scenario s, int point, int trial) {
    std::uint64_t h = splitmix64(master);
    h = splitmix64(h ^ static_cast<std::uint64_t>(s));
    h = splitmix64(h ^ static_cast<std::uint64_t>(point));
    return splitmix64(h ^ static_cast<std::uint64_t>(trial));
}

std::pair<double, double> mean_stddev(const std::vector<double>& xs) {
    if (xs.empty()) return {0.0, 0.0};
    double sum = 0.0;
    for (double x : xs) sum += x;
    const double mean = sum / static_cast<double>(xs.size());
    if (xs.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / static_cast<double>(xs.size() - 1))};
}

Terrain plan_terrain(const ExperimentPlan& plan) {
    if (plan.terrain.loaded) return *plan.terrain.loaded;
    switch (plan.scenario) {
        case Scenario::PhaseSweep:
        case Scenario::AmpSweepFlat: return make_flat();
        case Scenario::ClimbProb:
            if (plan.terrain.rugose_for_climb) return generate_rugose(plan.terrain.rugose);
            return make_step(0.0, plan.terrain.step_height);
        case Scenario::RugoseTraverse: return generate_rugose(plan.terrain.rugose);
    }
    return make_flat();
}

SweepResult run_phase_sweep(const ExperimentPlan& plan, int jobs) {
    require(plan, Scenario::PhaseSweep);
    return run_sweep(plan, {JointType::TwoDof}, jobs);
}

SweepResult run_amp_sweep_flat(const ExperimentPlan& plan, int jobs) {
    require(plan, Scenario::AmpSweepFlat);
    return run_sweep(plan, {JointType::TwoDof, JointType::PitchOnly}, jobs);
}

SweepResult run_climb_prob(const ExperimentPlan& plan, int jobs) {
    require(plan, Scenario::ClimbProb);
    return run_sweep(plan, {JointType::TwoDof, JointType::PitchOnly}, jobs);
}

SweepResult run_rugose_traverse(const ExperimentPlan& plan, int jobs) {
    require(plan, Scenario::RugoseTraverse);
    return run_sweep(plan, {JointType::TwoDof, JointType::PitchOnly}, jobs);
}

SweepResult run_experiment(const ExperimentPlan& plan, int jobs) {
    switch (plan.scenario) {
        case Scenario::PhaseSweep: return run_phase_sweep(plan, jobs);
        case Scenario::AmpSweepFlat: return run_amp_sweep_flat(plan, jobs);
        case Scenario::ClimbProb: return run_climb_prob(plan, jobs);
        case Scenario::RugoseTraverse: return run_rugose_traverse(plan, jobs);
    }
    throw ConfigError("unknown scenario");
}

std::string render_results(const SweepResult& r, OutputFormat f) {
    if (f == OutputFormat::Json) return result_to_json(r).dump(2) + "\n";

    std::ostringstream out;
    out << "scenario,sweep_param,sweep_value,joint_type,trial,seed,scalar,mean,stddev\n";
    const std::string head = to_string(r.scenario) + "," + r.sweep_param + ",";
    for (const SweepPoint& p : r.points) {
        const std::string key = head + format_double(p.value) + "," + to_string(p.joint) + ",";
        for (const TrialRecord& t : p.trials)
            out << key << t.trial << ',' << t.seed << ',' << (t.scalar ? format_double(*t.scalar) : "")
                << ",,\n";
        out << key << ",,," << format_double(p.mean) << ',' << format_double(p.stddev) << '\n';
    }
    for (const RatioPoint& q : r.ratios)
        out << head << format_double(q.value) << ",peristalsis_ratio,,,," << format_double(q.ratio)
            << ",\n";
    return out.str();
}

void emit_results(const SweepResult& r, OutputFormat f, const std::string& path) {
    write_file(path, render_results(r, f));
}

}  // namespace segwave
