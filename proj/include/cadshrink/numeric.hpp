#pragma once

#include <array>
#include <cstddef>

namespace cadshrink {

using Vec3d = std::array<double, 3>;

/// Rounds to `digits` significant decimal digits. Magnitudes below 1e-12 snap
/// to zero so trigonometric residue (cos 90 = 6e-17) hashes like a true zero.
double round_sig(double x, int digits = 12);

/// Degree-based trig, exact at multiples of 90.
double sin_deg(double degrees);
double cos_deg(double degrees);

/// Spherical triples are [r, azimuth, inclination] in degrees. Azimuth is
/// measured from +x in the xy-plane and normalised to [0, 360); inclination is
/// measured from +z. A zero-length offset maps to [0, 0, 0].
Vec3d to_cartesian(const Vec3d& spherical);
Vec3d to_spherical(const Vec3d& cartesian);
Vec3d to_cartesian(const Vec3d& center, const Vec3d& spherical);
Vec3d to_spherical(const Vec3d& center, const Vec3d& cartesian);

inline Vec3d round_sig(const Vec3d& v, int digits = 12) {
  return {round_sig(v[0], digits), round_sig(v[1], digits), round_sig(v[2], digits)};
}

}  // namespace cadshrink
