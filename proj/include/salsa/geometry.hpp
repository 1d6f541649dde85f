#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "salsa/errors.hpp"
#include "salsa/tensor.hpp"

namespace salsa {

using Vec3 = std::array<double, 3>;

inline constexpr double kSpeedOfSound = 343.0;

inline double deg2rad(double d) { return d * std::numbers::pi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / std::numbers::pi; }

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }

inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

// Unit vector for azimuth/elevation in degrees (x front, y left, z up).
inline Vec3 direction_from_angles(double azimuth_deg, double elevation_deg) {
  const double az = deg2rad(azimuth_deg), el = deg2rad(elevation_deg);
  return {std::cos(az) * std::cos(el), std::sin(az) * std::cos(el), std::sin(el)};
}

struct Angles {
  double azimuth_deg;
  double elevation_deg;
};

inline Angles angles_from_direction(const Vec3& v) {
  const double r = norm(v);
  if (r == 0.0) return {0.0, 0.0};
  return {rad2deg(std::atan2(v[1], v[0])), rad2deg(std::asin(std::clamp(v[2] / r, -1.0, 1.0)))};
}

// Great-circle angle in degrees. atan2 of |a x b| and a.b equals the clamped
// arccos of the normalised dot product but stays accurate near 0 and 180.
inline double angular_distance_deg(const Vec3& a, const Vec3& b) {
  return rad2deg(std::atan2(norm(cross(a, b)), dot(a, b)));
}

// Capture format: FOA (W, X, Y, Z) or a far-field microphone array.
struct ArrayFormat {
  ArrayKind kind = ArrayKind::foa;
  std::vector<Vec3> mics;  // metres, MIC only
  double speed_of_sound = kSpeedOfSound;

  static ArrayFormat foa() { return {}; }

  static ArrayFormat mic(std::vector<Vec3> positions, double c = kSpeedOfSound) {
    ArrayFormat f;
    f.kind = ArrayKind::mic;
    f.mics = std::move(positions);
    f.speed_of_sound = c;
    f.validate();
    return f;
  }

  // Four capsules of a 4.2 cm rigid sphere forming a tetrahedron, in the
  // channel order of the common SELD MIC datasets.
  static ArrayFormat tetrahedral(double radius = 0.042) {
    auto at = [radius](double az, double el) {
      auto d = direction_from_angles(az, el);
      return Vec3{radius * d[0], radius * d[1], radius * d[2]};
    };
    return mic({at(45, 35), at(-45, -35), at(135, -35), at(-135, 35)});
  }

  std::size_t channels() const { return kind == ArrayKind::foa ? 4 : mics.size(); }

  void validate() const {
    if (kind == ArrayKind::foa) return;
    require(mics.size() >= 2, "MIC format needs at least two microphones");
    require(speed_of_sound > 0.0, "speed of sound must be positive");
    for (std::size_t i = 0; i < mics.size(); ++i) {
      for (std::size_t j = i + 1; j < mics.size(); ++j) {
        require(norm(mics[i] - mics[j]) > 0.0, "microphone coordinates must be distinct");
      }
    }
  }

  void check_channels(std::size_t m) const {
    require(m == channels(), "input has " + std::to_string(m) + " channels, " +
                                 std::string(to_string(kind)) + " format expects " +
                                 std::to_string(channels()));
  }
};

}  // namespace salsa
