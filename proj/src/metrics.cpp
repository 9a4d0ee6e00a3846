#include "segwave/metrics.hpp"

#include <cmath>

#include "segwave/errors.hpp"

namespace segwave {

namespace {

double centre_x(const TrajectorySample& s) {
    double sum = 0.0;
    for (const BodyPose& b : s.bodies) sum += b.x;
    return sum / static_cast<double>(s.bodies.size());
}

SpeedMeasure make_speed(const Trajectory& traj, double body_length, double displacement) {
    SpeedMeasure m;
    m.displacement = displacement;
    m.cycles = traj.cycles();
    m.body_length = body_length;
    m.bl_per_cyc = displacement / (body_length * m.cycles);
    return m;
}

void require_cycle(const Trajectory& traj, double body_length) {
    if (traj.cycles() < 1)
        throw MeasurementError("trajectory spans less than one full cycle");
    if (!(body_length > 0.0)) throw MeasurementError("body length must be positive");
}

}  // namespace

SpeedMeasure speed_bl_per_cyc(const Trajectory& traj, double body_length) {
    require_cycle(traj, body_length);
    const auto last = static_cast<std::size_t>(traj.cycles() * traj.samples_per_cycle);
    return make_speed(traj, body_length, centre_x(traj.samples[last]) - centre_x(traj.samples[0]));
}

SpeedMeasure head_speed_bl_per_cyc(const Trajectory& traj, double body_length) {
    require_cycle(traj, body_length);
    const auto last = static_cast<std::size_t>(traj.cycles() * traj.samples_per_cycle);
    return make_speed(traj, body_length,
                      traj.samples[last].head_nose.x() - traj.samples[0].head_nose.x());
}

PeristalsisRatio peristalsis_ratio(const SpeedMeasure& d_p, const SpeedMeasure& d_np,
                                   double delta_l) {
    if (!(delta_l > 0.0)) throw UndefinedRatioError("peristalsis ratio needs delta_l > 0");
    if (d_p.body_length != d_np.body_length)
        throw MeasurementError("speeds measured with different body lengths");
    PeristalsisRatio r;
    r.d_p = d_p.bl_per_cyc * d_p.body_length;
    r.d_np = d_np.bl_per_cyc * d_np.body_length;
    r.delta_l = delta_l;
    r.ratio = (r.d_p - r.d_np) / delta_l;
    return r;
}

ClimbOutcome climb_outcome(const Trajectory& traj, const Terrain& terrain) {
    const auto edge = terrain.edge_x();
    if (terrain.kind() == TerrainKind::Flat || !edge)
        throw InapplicableMetricError("climb outcome needs a terrain with an edge");
    if (traj.samples.empty()) throw MeasurementError("empty trajectory");

    const double edge_height = terrain.base_height();
    const int spc = traj.samples_per_cycle;
    const auto needed = static_cast<int>(std::ceil(kClimbSustainCycles * spc - 1e-9));
    const int window_end = kClimbCycles * spc;  // last tick a run may start at
    const std::size_t bodies = traj.samples.front().leg_contact.size();
    const double tick = traj.cycle_period / spc;

    std::vector<int> run(bodies, 0);
    for (std::size_t k = 0; k < traj.samples.size(); ++k) {
        const TrajectorySample& s = traj.samples[k];
        for (std::size_t b = 0; b < bodies; ++b) {
            const Eigen::Vector2d& tip = s.leg_tip[b];
            const double ground = terrain.cells()[terrain.cell_index(tip.x())].height;
            // Pressed against the wall face does not count: the tip must sit on
            // the top surface, within a small penetration allowance.
            const bool on_top = s.leg_contact[b] && tip.x() > *edge && ground >= edge_height &&
                                tip.y() >= ground - kClimbContactSlack;
            run[b] = on_top ? run[b] + 1 : 0;
            if (run[b] >= needed) {
                const auto start = static_cast<int>(k) - run[b] + 1;
                if (start > window_end) continue;
                ClimbOutcome out;
                out.success = true;
                out.first_leg_pair_top_time = start * tick;
                out.cycles_used = std::min(kClimbCycles, start / spc + 1);
                return out;
            }
        }
    }
    return {};
}

double climb_probability(const std::vector<ClimbOutcome>& outcomes) {
    if (outcomes.empty()) throw MeasurementError("climb probability of zero trials");
    std::size_t wins = 0;
    for (const ClimbOutcome& o : outcomes) wins += o.success ? 1 : 0;
    return static_cast<double>(wins) / static_cast<double>(outcomes.size());
}

std::vector<std::pair<double, double>> head_trajectory(const Trajectory& traj) {
    std::vector<std::pair<double, double>> out;
    out.reserve(traj.samples.size());
    for (const TrajectorySample& s : traj.samples) out.emplace_back(s.head_nose.x(), s.head_nose.y());
    return out;
}

double lifted_head_drift(const Trajectory& traj) {
    if (traj.cycles() < 1) throw MeasurementError("trajectory spans less than one full cycle");
    double drift = 0.0;
    for (std::size_t k = 1; k < traj.samples.size(); ++k) {
        const TrajectorySample& a = traj.samples[k - 1];
        const TrajectorySample& b = traj.samples[k];
        if (!a.leg_contact[0] && !b.leg_contact[0]) drift += b.head_nose.x() - a.head_nose.x();
    }
    return drift / traj.cycles();
}

}  // namespace segwave
