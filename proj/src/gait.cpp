#include "segwave/gait.hpp"

#include <cmath>
#include <string>

#include "segwave/errors.hpp"

namespace segwave {

double wrap_phase(double phi) {
    double w = std::fmod(phi, kTwoPi);
    if (w < 0.0) w += kTwoPi;
    // fmod of a value just below a multiple of 2*pi can round up to 2*pi
    if (w >= kTwoPi) w = 0.0;
    return w;
}

void GaitParams::validate() {
    if (!(amplitude >= 0.0 && amplitude <= kPi / 2.0))
        throw ConfigError("gait amplitude must lie in [0, 90] degrees, got " +
                          std::to_string(rad_to_deg(amplitude)));
    if (!(delta_l >= 0.0 && delta_l <= l_ext))
        throw ConfigError("gait delta_l must lie in [0, l_ext]");
    if (joints < 1) throw ConfigError("gait needs at least one joint");
    if (!(spatial_freq > 0.0)) throw ConfigError("gait spatial frequency must be positive");
    if (!(omega > 0.0)) throw ConfigError("gait omega must be positive");
    if (!std::isfinite(phase)) throw ConfigError("gait phase must be finite");
    phase = wrap_phase(phase);
}

GaitParams GaitParams::scaled(double scale) const {
    GaitParams out = *this;
    out.amplitude *= scale;
    out.delta_l *= scale;
    return out;
}

namespace {

void check_index(const GaitParams& p, int i) {
    if (i < 0 || i >= p.joints)
        throw IndexError("joint index " + std::to_string(i) + " outside [0, " +
                         std::to_string(p.joints) + ")");
}

double travelling_phase(const GaitParams& p, double t, int i) {
    return kTwoPi * p.spatial_freq * static_cast<double>(i) / static_cast<double>(p.joints) -
           p.omega * t;
}

}  // namespace

double vertical_wave_angle(const GaitParams& p, double t, int i) {
    check_index(p, i);
    return p.amplitude * std::sin(travelling_phase(p, t, i));
}

double peristaltic_length(const GaitParams& p, double t, int i) {
    check_index(p, i);
    return p.l_ext - p.delta_l * std::sin(travelling_phase(p, t, i) - p.phase);
}

std::vector<JointCommand> gait_frame(const GaitParams& p, double t) {
    std::vector<JointCommand> frame;
    frame.reserve(static_cast<std::size_t>(p.joints));
    for (int i = 0; i < p.joints; ++i)
        frame.push_back({i, vertical_wave_angle(p, t, i), peristaltic_length(p, t, i)});
    return frame;
}

}  // namespace segwave
