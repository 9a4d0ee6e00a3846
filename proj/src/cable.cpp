#include "segwave/cable.hpp"

#include <cmath>

#include "segwave/errors.hpp"

namespace segwave {

void JointGeometry::validate() const {
    if (!(axial_offset > 0.0) || !(radial_offset > 0.0))
        throw ConfigError("joint geometry constants must be positive");
}

CablePair cable_lengths(const JointGeometry& g, double alpha, double l) {
    const double d = g.axial_offset;
    const double lc = g.radial_offset;
    const double common = 2.0 * lc * lc + d * d + l * l + 2.0 * (d * l - lc * lc) * std::cos(alpha);
    const double skew = 2.0 * (d - l) * lc * std::sin(alpha);
    const double upper_sq = common - skew;
    const double lower_sq = common + skew;
    if (upper_sq < 0.0 || lower_sq < 0.0)
        throw GeometryError("negative cable radicand; joint constants are inconsistent");
    return {std::sqrt(upper_sq), std::sqrt(lower_sq)};
}

namespace {

struct Vec2 {
    double x;
    double z;
};

Vec2 rotate(Vec2 v, double angle) {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    return {c * v.x - s * v.z, s * v.x + c * v.z};
}

double distance(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.z - b.z); }

}  // namespace

// Anchor layout, in hinge-centred frames of the two faces.
//
// Fixed face anchor a = (-sqrt(ra^2 - Lc^2), Lc); moving face anchor b is
// carried by the hinge rotation. Squared distance |R(alpha) b - a|^2 expands to
//   |a|^2 + |b|^2 - 2 (a.b) cos(alpha) + 2 (a x b) sin(alpha),
// so matching the closed form term by term requires
//   |a|^2 + |b|^2 = 2 Lc^2 + D^2 + l^2            (S)
//   a.b           = Lc^2 - D l
//   a x b         = (l - D) Lc.
// The last two fix b linearly once a is known, and then |a||b| = |C| with
// C = (Lc^2 - D l, (D - l) Lc). Hence |a|^2 is a root of x^2 - S x + |C|^2,
// whose discriminant (D^2 - l^2)^2 + 16 D l Lc^2 is never negative; the larger
// root exceeds Lc^2, so a can sit at height Lc. At l = 0 this reduces to
// a = (-D, Lc), b = (0, Lc). The lower cable uses the mirror images.
CablePair cable_lengths_oracle(const JointGeometry& g, double alpha, double l) {
    const double d = g.axial_offset;
    const double lc = g.radial_offset;

    const double sum_sq = 2.0 * lc * lc + d * d + l * l;
    const double dot = lc * lc - d * l;
    const double cross = (l - d) * lc;
    const double disc = (d * d - l * l) * (d * d - l * l) + 16.0 * d * l * lc * lc;
    const double ra_sq = 0.5 * (sum_sq + std::sqrt(disc));

    const Vec2 a{-std::sqrt(ra_sq - lc * lc), lc};
    // [a.x  a.z] [b.x]   [dot  ]
    // [-a.z a.x] [b.z] = [cross]
    const double det = a.x * a.x + a.z * a.z;
    const Vec2 b{(a.x * dot - a.z * cross) / det, (a.z * dot + a.x * cross) / det};

    const Vec2 a_low{a.x, -a.z};
    const Vec2 b_low{b.x, -b.z};
    return {distance(rotate(b, alpha), a), distance(rotate(b_low, alpha), a_low)};
}

}  // namespace segwave
