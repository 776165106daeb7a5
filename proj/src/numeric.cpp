#include "cadshrink/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>

namespace cadshrink {

double round_sig(double x, int digits) {
  if (!std::isfinite(x)) return x;
  if (std::abs(x) < 1e-12) return 0.0;
  if (std::abs(x) < 1e12 && x == std::nearbyint(x)) return x;  // integers are already exact
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*e", digits - 1, x);
  double r = std::strtod(buf, nullptr);
  return r == 0.0 ? 0.0 : r;  // no negative zero
}

namespace {

// Returns true and sets `quadrant` when `degrees` is an exact multiple of 90.
bool right_angle(double degrees, int& quadrant) {
  double q = degrees / 90.0;
  if (q != std::floor(q) || std::abs(q) > 1e15) return false;
  long long k = static_cast<long long>(q) % 4;
  if (k < 0) k += 4;
  quadrant = static_cast<int>(k);
  return true;
}

}  // namespace

double sin_deg(double degrees) {
  int quadrant = 0;
  if (right_angle(degrees, quadrant)) {
    static constexpr double table[4] = {0.0, 1.0, 0.0, -1.0};
    return table[quadrant];
  }
  return std::sin(degrees * std::numbers::pi / 180.0);
}

double cos_deg(double degrees) {
  int quadrant = 0;
  if (right_angle(degrees, quadrant)) {
    static constexpr double table[4] = {1.0, 0.0, -1.0, 0.0};
    return table[quadrant];
  }
  return std::cos(degrees * std::numbers::pi / 180.0);
}

Vec3d to_cartesian(const Vec3d& s) {
  const double r = s[0], phi = s[1], theta = s[2];
  return {r * sin_deg(theta) * cos_deg(phi), r * sin_deg(theta) * sin_deg(phi), r * cos_deg(theta)};
}

Vec3d to_spherical(const Vec3d& c) {
  const double r = std::sqrt(c[0] * c[0] + c[1] * c[1] + c[2] * c[2]);
  if (r == 0.0) return {0.0, 0.0, 0.0};
  double phi = std::atan2(c[1], c[0]) * 180.0 / std::numbers::pi;
  if (phi < 0) phi += 360.0;
  if (phi >= 360.0) phi -= 360.0;
  double cos_theta = std::clamp(c[2] / r, -1.0, 1.0);
  double theta = std::acos(cos_theta) * 180.0 / std::numbers::pi;
  return {r, phi, theta};
}

Vec3d to_cartesian(const Vec3d& center, const Vec3d& spherical) {
  Vec3d v = to_cartesian(spherical);
  return {center[0] + v[0], center[1] + v[1], center[2] + v[2]};
}

Vec3d to_spherical(const Vec3d& center, const Vec3d& cartesian) {
  return to_spherical(Vec3d{cartesian[0] - center[0], cartesian[1] - center[1], cartesian[2] - center[2]});
}

}  // namespace cadshrink
