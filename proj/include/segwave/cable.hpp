#pragma once

namespace segwave {

/// Dimensional constants of a cable-driven two-DoF joint (meters).
struct JointGeometry {
    double axial_offset = 0.0475;   // D
    double radial_offset = 0.0285;  // L_c

    void validate() const;
};

struct CablePair {
    double upper = 0.0;
    double lower = 0.0;
};

/// Closed-form upper/lower cable lengths for pitch `alpha` (rad) and
/// peristaltic length `l` (m). Positive alpha shortens the upper cable.
/// Throws GeometryError on a negative radicand.
CablePair cable_lengths(const JointGeometry& g, double alpha, double l);

/// Independent check of cable_lengths: builds the four cable anchor points in
/// the joint plane and measures them. Agrees with the closed form to rounding.
CablePair cable_lengths_oracle(const JointGeometry& g, double alpha, double l);

}  // namespace segwave
