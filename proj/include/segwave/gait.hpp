#pragma once

#include <numbers>
#include <vector>

namespace segwave {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

/// Wraps an angle into [0, 2*pi).
double wrap_phase(double phi);

/// Parameters of the coupled vertical (pitch) and peristaltic (length) waves.
///
/// Angles are radians, lengths meters, `omega` rad/s. `joints` is the number
/// of two-DoF joints the wave is spread over.
struct GaitParams {
    double amplitude = deg_to_rad(35.0);   // vertical wave amplitude
    double spatial_freq = 1.0;             // wave count along the body
    double omega = 1.0;                    // temporal frequency, rad/s
    double delta_l = 0.01;                 // compression amplitude
    double l_ext = 0.01;                   // relaxed joint length
    double phase = 3.0 * kPi / 2.0;        // peristaltic lag behind the vertical wave
    int joints = 4;

    /// Throws ConfigError if any invariant is violated. Normalizes `phase`.
    void validate();

    double period() const { return kTwoPi / omega; }

    /// Copy with both wave amplitudes multiplied by `scale` in [0, 1].
    GaitParams scaled(double scale) const;
};

/// Target for one joint at one instant.
struct JointCommand {
    int joint_index = 0;
    double alpha = 0.0;  // pitch, rad
    double length = 0.0; // peristaltic length, m
};

/// Pitch target of joint `i` at time `t`: amplitude * sin(2 pi k i / N - omega t).
double vertical_wave_angle(const GaitParams& p, double t, int i);

/// Length target of joint `i` at time `t`:
/// l_ext - delta_l * sin(2 pi k i / N - omega t - phase).
double peristaltic_length(const GaitParams& p, double t, int i);

/// Both targets for every joint at time `t`.
std::vector<JointCommand> gait_frame(const GaitParams& p, double t);

}  // namespace segwave
