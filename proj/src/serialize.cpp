#include "segwave/serialize.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "segwave/errors.hpp"

namespace segwave {

namespace {

// Consumes keys of one JSON object, checking types; finish() rejects the rest.
class Reader {
public:
    Reader(const json& j, std::string what) : j_(j), what_(std::move(what)) {
        if (!j_.is_object()) throw ConfigError(what_ + ": expected an object");
    }

    void number(const std::string& key, double& v) {
        if (const json* x = take(key)) v = as_number(*x, key);
    }

    void angle(const std::string& base, double& v) {
        const json* rad = take(base + "_rad");
        const json* deg = take(base + "_deg");
        if (rad && deg) throw ConfigError(what_ + ": give " + base + " in radians or degrees, not both");
        if (rad) v = as_number(*rad, base + "_rad");
        if (deg) v = deg_to_rad(as_number(*deg, base + "_deg"));
    }

    void integer(const std::string& key, int& v) {
        if (const json* x = take(key)) {
            if (!x->is_number_integer()) throw ConfigError(what_ + "." + key + ": expected an integer");
            v = x->get<int>();
        }
    }

    void unsigned64(const std::string& key, std::uint64_t& v) {
        if (const json* x = take(key)) {
            if (!x->is_number_unsigned() && !(x->is_number_integer() && x->get<std::int64_t>() >= 0))
                throw ConfigError(what_ + "." + key + ": expected a non-negative integer");
            v = x->get<std::uint64_t>();
        }
    }

    void boolean(const std::string& key, bool& v) {
        if (const json* x = take(key)) {
            if (!x->is_boolean()) throw ConfigError(what_ + "." + key + ": expected true or false");
            v = x->get<bool>();
        }
    }

    const json* take(const std::string& key) {
        auto it = j_.find(key);
        if (it == j_.end()) return nullptr;
        seen_.insert(key);
        return &*it;
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key())) throw ConfigError(what_ + ": unknown key '" + it.key() + "'");
    }

private:
    double as_number(const json& x, const std::string& key) const {
        if (!x.is_number()) throw ConfigError(what_ + "." + key + ": expected a number");
        return x.get<double>();
    }

    const json& j_;
    std::string what_;
    std::set<std::string> seen_;
};

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

json to_json(const RobotSpec& s) {
    return {
        {"n_modules", s.n_modules},
        {"module_length", s.module_length},
        {"module_diameter", s.module_diameter},
        {"legged_length", s.legged_length},
        {"total_length", s.total_length},
        {"l_ext", s.l_ext},
        {"slot_max", s.slot_max},
        {"leg_upper_length", s.leg_upper_length},
        {"leg_lower_length", s.leg_lower_length},
        {"leg_tilt_rad", s.leg_tilt},
        {"leg_position", s.leg_position},
        {"leg_radius", s.leg_radius},
        {"module_mass", s.module_mass},
        {"leg_tip_friction", s.leg_tip_friction},
        {"body_friction", s.body_friction},
        {"pitch_limit_rad", s.pitch_limit},
        {"servo_gain_p", s.servo_gain_p},
        {"servo_gain_d", s.servo_gain_d},
        {"servo_torque_max", s.servo_torque_max},
        {"prismatic_gain_p", s.prismatic_gain_p},
        {"prismatic_gain_d", s.prismatic_gain_d},
        {"prismatic_force_max", s.prismatic_force_max},
        {"leaf_spring_stiffness", s.leaf_spring_stiffness},
        {"joint_axial_offset", s.joint_geometry.axial_offset},
        {"joint_radial_offset", s.joint_geometry.radial_offset},
        {"pitch_only", s.pitch_only},
    };
}

void apply_json(const json& j, RobotSpec& s) {
    Reader r(j, "robot");
    r.integer("n_modules", s.n_modules);
    r.number("module_length", s.module_length);
    r.number("module_diameter", s.module_diameter);
    r.number("legged_length", s.legged_length);
    r.number("total_length", s.total_length);
    r.number("l_ext", s.l_ext);
    r.number("slot_max", s.slot_max);
    r.number("leg_upper_length", s.leg_upper_length);
    r.number("leg_lower_length", s.leg_lower_length);
    r.angle("leg_tilt", s.leg_tilt);
    r.number("leg_position", s.leg_position);
    r.number("leg_radius", s.leg_radius);
    r.number("module_mass", s.module_mass);
    r.number("leg_tip_friction", s.leg_tip_friction);
    r.number("body_friction", s.body_friction);
    r.angle("pitch_limit", s.pitch_limit);
    r.number("servo_gain_p", s.servo_gain_p);
    r.number("servo_gain_d", s.servo_gain_d);
    r.number("servo_torque_max", s.servo_torque_max);
    r.number("prismatic_gain_p", s.prismatic_gain_p);
    r.number("prismatic_gain_d", s.prismatic_gain_d);
    r.number("prismatic_force_max", s.prismatic_force_max);
    r.number("leaf_spring_stiffness", s.leaf_spring_stiffness);
    r.number("joint_axial_offset", s.joint_geometry.axial_offset);
    r.number("joint_radial_offset", s.joint_geometry.radial_offset);
    r.boolean("pitch_only", s.pitch_only);
    r.finish();
}

json to_json(const GaitParams& g) {
    return {
        {"amplitude_rad", g.amplitude}, {"spatial_freq", g.spatial_freq}, {"omega", g.omega},
        {"delta_l", g.delta_l},         {"l_ext", g.l_ext},               {"phase_rad", g.phase},
        {"joints", g.joints},
    };
}

void apply_json(const json& j, GaitParams& g) {
    Reader r(j, "gait");
    r.angle("amplitude", g.amplitude);
    r.number("spatial_freq", g.spatial_freq);
    r.number("omega", g.omega);
    r.number("delta_l", g.delta_l);
    r.number("l_ext", g.l_ext);
    r.angle("phase", g.phase);
    r.integer("joints", g.joints);
    r.finish();
}

json to_json(const SimConfig& c) {
    return {
        {"dt", c.dt},
        {"gravity", c.gravity},
        {"contact_stiffness", c.contact_stiffness},
        {"contact_damping", c.contact_damping},
        {"friction_regularization_velocity", c.friction_regularization_velocity},
        {"cycles", c.cycles},
        {"settle_time", c.settle_time},
        {"divergence_velocity_cap", c.divergence_velocity_cap},
        {"samples_per_cycle", c.samples_per_cycle},
        {"record_cables", c.record_cables},
        {"corner_contacts", c.corner_contacts},
    };
}

void apply_json(const json& j, SimConfig& c) {
    Reader r(j, "sim");
    r.number("dt", c.dt);
    r.number("gravity", c.gravity);
    r.number("contact_stiffness", c.contact_stiffness);
    r.number("contact_damping", c.contact_damping);
    r.number("friction_regularization_velocity", c.friction_regularization_velocity);
    r.integer("cycles", c.cycles);
    r.number("settle_time", c.settle_time);
    r.number("divergence_velocity_cap", c.divergence_velocity_cap);
    r.integer("samples_per_cycle", c.samples_per_cycle);
    r.boolean("record_cables", c.record_cables);
    r.boolean("corner_contacts", c.corner_contacts);
    r.finish();
}

json to_json(const RugoseParams& p) {
    return {
        {"seed", p.seed},
        {"rugosity", p.rugosity},
        {"edge_height", p.edge_height},
        {"cell_width", p.cell_width},
        {"extent", p.extent},
        {"robot_height", p.robot_height},
        {"edge_x", p.edge_x},
        {"approach", p.approach},
    };
}

void apply_json(const json& j, RugoseParams& p) {
    Reader r(j, "rugose");
    r.unsigned64("seed", p.seed);
    r.number("rugosity", p.rugosity);
    r.number("edge_height", p.edge_height);
    r.number("cell_width", p.cell_width);
    r.number("extent", p.extent);
    r.number("robot_height", p.robot_height);
    r.number("edge_x", p.edge_x);
    r.number("approach", p.approach);
    r.finish();
}

json to_json(const Terrain& t) {
    json cells = json::array();
    for (const TerrainCell& c : t.cells()) cells.push_back({{"x_start", c.x_start}, {"height", c.height}});
    return {
        {"kind", to_string(t.kind())},
        {"x_end", t.x_end()},
        {"base_height", t.base_height()},
        {"cell_width", t.cell_width()},
        {"cells", cells},
    };
}

Terrain terrain_from_json(const json& j) {
    Reader r(j, "terrain");
    r.take("generator");  // provenance written by `terrain gen`, informational
    const json* kind = r.take("kind");
    const json* cells = r.take("cells");
    if (!kind || !kind->is_string()) throw ConfigError("terrain.kind: expected a string");
    if (!cells || !cells->is_array()) throw ConfigError("terrain.cells: expected an array");
    std::vector<TerrainCell> out;
    for (const json& c : *cells) {
        TerrainCell cell;
        Reader cr(c, "terrain.cells[]");
        const json* x = cr.take("x_start");
        const json* h = cr.take("height");
        if (!x || !h || !x->is_number() || !h->is_number())
            throw ConfigError("terrain.cells[]: need numeric x_start and height");
        cr.finish();
        cell.x_start = x->get<double>();
        cell.height = h->get<double>();
        out.push_back(cell);
    }
    if (out.empty()) throw ConfigError("terrain.cells: empty");
    double x_end = out.back().x_start + 1.0;
    double base = 0.0;
    double width = 0.0;
    r.number("x_end", x_end);
    r.number("base_height", base);
    r.number("cell_width", width);
    r.finish();
    return Terrain(terrain_kind_from_string(kind->get<std::string>()), std::move(out), x_end, base,
                   width);
}

void apply_config(const json& j, ExperimentPlan& plan) {
    Reader r(j, "config");
    if (const json* x = r.take("robot")) apply_json(*x, plan.robot);
    if (const json* x = r.take("gait")) apply_json(*x, plan.gait);
    if (const json* x = r.take("sim")) apply_json(*x, plan.sim);
    if (const json* x = r.take("harness")) {
        Reader h(*x, "harness");
        h.number("start_offset_min", plan.start_offset_min);
        h.number("start_offset_max", plan.start_offset_max);
        h.number("friction_jitter", plan.friction_jitter);
        h.number("step_height", plan.terrain.step_height);
        h.boolean("rugose_for_climb", plan.terrain.rugose_for_climb);
        if (const json* rug = h.take("rugose")) apply_json(*rug, plan.terrain.rugose);
        h.finish();
    }
    r.finish();
}

json plan_to_json(const ExperimentPlan& plan) {
    json out = {
        {"scenario", to_string(plan.scenario)},
        {"sweep_param", plan.sweep_param()},
        {"sweep_values", plan.sweep_values},
        {"trials", plan.trials},
        {"cycles", plan.cycles},
        {"master_seed", plan.master_seed},
        {"robot", to_json(plan.robot)},
        {"gait", to_json(plan.gait)},
        {"sim", to_json(plan.sim)},
        {"harness",
         {{"start_offset_min", plan.start_offset_min},
          {"start_offset_max", plan.start_offset_max},
          {"friction_jitter", plan.friction_jitter},
          {"step_height", plan.terrain.step_height},
          {"rugose_for_climb", plan.terrain.rugose_for_climb},
          {"rugose", to_json(plan.terrain.rugose)}}},
    };
    if (plan.terrain.loaded) out["terrain"] = to_json(*plan.terrain.loaded);
    return out;
}

json result_to_json(const SweepResult& r) {
    json points = json::array();
    for (const SweepPoint& p : r.points) {
        json trials = json::array();
        for (const TrialRecord& t : p.trials) {
            trials.push_back({{"trial", t.trial},
                              {"seed", t.seed},
                              {"scalar", t.scalar ? json(*t.scalar) : json(nullptr)},
                              {"error", t.error}});
        }
        points.push_back({{"value", p.value},
                          {"joint_type", to_string(p.joint)},
                          {"mean", p.mean},
                          {"stddev", p.stddev},
                          {"trials", trials}});
    }
    json ratios = json::array();
    for (const RatioPoint& q : r.ratios) ratios.push_back({{"value", q.value}, {"ratio", q.ratio}});
    return {
        {"scenario", to_string(r.scenario)},
        {"sweep_param", r.sweep_param},
        {"scalar", r.scalar},
        {"config_hash", r.config_hash},
        {"config", r.config.empty() ? json::object() : json::parse(r.config)},
        {"points", points},
        {"ratios", ratios},
        {"warnings", r.warnings},
    };
}

SweepResult result_from_json(const json& j) {
    try {
        SweepResult r;
        r.scenario = scenario_from_string(j.at("scenario").get<std::string>());
        r.sweep_param = j.at("sweep_param").get<std::string>();
        r.scalar = j.at("scalar").get<std::string>();
        r.config_hash = j.at("config_hash").get<std::string>();
        const json& cfg = j.at("config");
        r.config = cfg.empty() ? std::string() : cfg.dump();
        for (const json& p : j.at("points")) {
            SweepPoint sp;
            sp.value = p.at("value").get<double>();
            sp.joint = joint_type_from_string(p.at("joint_type").get<std::string>());
            sp.mean = p.at("mean").get<double>();
            sp.stddev = p.at("stddev").get<double>();
            for (const json& t : p.at("trials")) {
                TrialRecord tr;
                tr.trial = t.at("trial").get<int>();
                tr.seed = t.at("seed").get<std::uint64_t>();
                if (!t.at("scalar").is_null()) tr.scalar = t.at("scalar").get<double>();
                tr.error = t.at("error").get<std::string>();
                sp.trials.push_back(tr);
            }
            r.points.push_back(std::move(sp));
        }
        for (const json& q : j.at("ratios"))
            r.ratios.push_back({q.at("value").get<double>(), q.at("ratio").get<double>()});
        r.warnings = j.at("warnings").get<std::vector<std::string>>();
        return r;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed result JSON: ") + e.what());
    }
}

std::string trajectory_to_csv(const Trajectory& t) {
    std::ostringstream out;
    if (t.samples.empty()) return "t\n";
    const TrajectorySample& first = t.samples.front();
    out << "t,nose_x,nose_z";
    for (std::size_t b = 0; b < first.bodies.size(); ++b)
        out << ",body" << b << "_x,body" << b << "_z,body" << b << "_theta,body" << b << "_leg_contact";
    for (std::size_t i = 0; i < first.joints.size(); ++i)
        out << ",joint" << i << "_alpha,joint" << i << "_alpha_cmd,joint" << i << "_length,joint" << i
            << "_length_cmd";
    for (std::size_t i = 0; i < first.cables.size(); ++i)
        out << ",joint" << i << "_cable_upper,joint" << i << "_cable_lower";
    out << '\n';
    for (const TrajectorySample& s : t.samples) {
        out << format_double(s.t) << ',' << format_double(s.head_nose.x()) << ','
            << format_double(s.head_nose.y());
        for (std::size_t b = 0; b < s.bodies.size(); ++b)
            out << ',' << format_double(s.bodies[b].x) << ',' << format_double(s.bodies[b].z) << ','
                << format_double(s.bodies[b].theta) << ',' << (s.leg_contact[b] ? 1 : 0);
        for (const JointState& js : s.joints)
            out << ',' << format_double(js.alpha) << ',' << format_double(js.alpha_cmd) << ','
                << format_double(js.length) << ',' << format_double(js.length_cmd);
        for (const CablePair& c : s.cables)
            out << ',' << format_double(c.upper) << ',' << format_double(c.lower);
        out << '\n';
    }
    return out.str();
}

json trajectory_to_json(const Trajectory& t) {
    json samples = json::array();
    for (const TrajectorySample& s : t.samples) {
        json bodies = json::array();
        for (std::size_t b = 0; b < s.bodies.size(); ++b) {
            const BodyPose& p = s.bodies[b];
            bodies.push_back({{"x", p.x},
                              {"z", p.z},
                              {"theta", p.theta},
                              {"vx", p.vx},
                              {"vz", p.vz},
                              {"omega", p.omega},
                              {"leg_contact", static_cast<bool>(s.leg_contact[b])},
                              {"leg_tip", {s.leg_tip[b].x(), s.leg_tip[b].y()}}});
        }
        json joints = json::array();
        for (const JointState& js : s.joints)
            joints.push_back({{"alpha", js.alpha},
                              {"alpha_cmd", js.alpha_cmd},
                              {"length", js.length},
                              {"length_cmd", js.length_cmd}});
        json row = {{"t", s.t},
                    {"head_nose", {s.head_nose.x(), s.head_nose.y()}},
                    {"bodies", bodies},
                    {"joints", joints}};
        if (!s.cables.empty()) {
            json cables = json::array();
            for (const CablePair& c : s.cables) cables.push_back({{"upper", c.upper}, {"lower", c.lower}});
            row["cables"] = cables;
        }
        samples.push_back(std::move(row));
    }
    return {{"cycle_period", t.cycle_period},
            {"samples_per_cycle", t.samples_per_cycle},
            {"body_length", t.body_length},
            {"samples", samples}};
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("error while reading '" + path + "'");
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("error while writing '" + path + "'");
}

json read_json_file(const std::string& path) {
    const std::string text = read_file(path);
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("'" + path + "' is not valid JSON: " + e.what());
    }
}

}  // namespace segwave
