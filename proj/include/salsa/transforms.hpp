#pragma once

#include <array>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include "salsa/errors.hpp"
#include "salsa/geometry.hpp"

namespace salsa {

// Element of the order-16 group generated by a 90-degree azimuth rotation,
// azimuth reflection (y -> -y) and elevation flip (z -> -z):
//
//   g = Rz(90 * quarter_turns) * Mirror^mirror * Zflip^zflip
//
// so azimuth maps as phi -> (mirror ? -phi : phi) + 90 * quarter_turns and
// elevation as theta -> (zflip ? -theta : theta). For MIC arrays `perm`
// gives the channel relabelling with x'_m = x_{perm[m]}.
struct SpatialTransform {
  int id = 0;
  ArrayKind format = ArrayKind::foa;
  int quarter_turns = 0;
  bool mirror = false;
  bool zflip = false;
  std::vector<std::size_t> perm;

  // Group index in the FOA numbering, independent of format.
  int group_index() const { return quarter_turns + 4 * (mirror ? 1 : 0) + 8 * (zflip ? 1 : 0); }

  bool is_identity() const { return group_index() == 0; }

  // Signed permutation matrix acting on Cartesian (x, y, z).
  std::array<std::array<int, 3>, 3> matrix() const {
    std::array<std::array<int, 3>, 3> g{};
    const int k = ((quarter_turns % 4) + 4) % 4;
    static constexpr int cs[4][2] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};  // cos, sin
    const int c = cs[k][0], s = cs[k][1];
    const int my = mirror ? -1 : 1;
    g[0] = {c, -s * my, 0};
    g[1] = {s, c * my, 0};
    g[2] = {0, 0, zflip ? -1 : 1};
    return g;
  }

  // Exact: only swaps and sign changes.
  Vec3 apply(const Vec3& v) const {
    const auto g = matrix();
    Vec3 out{};
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        if (g[i][j] == 1) out[i] = v[j];
        if (g[i][j] == -1) out[i] = -v[j];
      }
    }
    return out;
  }

  Angles apply(const Angles& a) const {
    double az = (mirror ? -a.azimuth_deg : a.azimuth_deg) + 90.0 * quarter_turns;
    az = std::fmod(az + 180.0, 360.0);
    if (az < 0) az += 360.0;
    return {az - 180.0, zflip ? -a.elevation_deg : a.elevation_deg};
  }
};

inline SpatialTransform foa_transform(int id) {
  require(id >= 0 && id < 16, "FOA transform id must be in [0, 16)");
  SpatialTransform tx;
  tx.id = id;
  tx.format = ArrayKind::foa;
  tx.quarter_turns = id % 4;
  tx.mirror = (id / 4) % 2 == 1;
  tx.zflip = id / 8 == 1;
  return tx;
}

inline std::vector<SpatialTransform> foa_transforms() {
  std::vector<SpatialTransform> out;
  for (int i = 0; i < 16; ++i) out.push_back(foa_transform(i));
  return out;
}

// Group elements that map the microphone set onto itself, with the induced
// channel permutation. Ids are assigned in ascending group-index order.
inline std::vector<SpatialTransform> derive_mic_transforms(const ArrayFormat& fmt,
                                                           double tol = 1e-9) {
  require(fmt.kind == ArrayKind::mic, "MIC transforms need a MIC format");
  std::vector<SpatialTransform> out;
  for (const auto& g : foa_transforms()) {
    // x'_m = x_{p[m]} where zeta_{p[m]} = g^{-1} zeta_m. g is orthogonal, so
    // g^{-1} = g^T: find n with g zeta_n == zeta_m.
    std::vector<std::size_t> perm;
    for (const auto& zm : fmt.mics) {
      std::size_t found = fmt.mics.size();
      for (std::size_t n = 0; n < fmt.mics.size(); ++n) {
        if (norm(g.apply(fmt.mics[n]) - zm) < tol) found = n;
      }
      if (found == fmt.mics.size()) break;
      perm.push_back(found);
    }
    if (perm.size() != fmt.mics.size()) continue;
    SpatialTransform tx = g;
    tx.id = static_cast<int>(out.size());
    tx.format = ArrayKind::mic;
    tx.perm = std::move(perm);
    out.push_back(tx);
  }
  return out;
}

// Text table, one transform per row:
//   perm=p0 p1 p2 p3; dphi=90; mirror=0; zflip=1
// Blank lines and lines starting with '#' are ignored.
inline std::vector<SpatialTransform> parse_mic_transform_table(const std::string& text) {
  std::vector<SpatialTransform> out;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    SpatialTransform tx;
    tx.format = ArrayKind::mic;
    tx.id = static_cast<int>(out.size());
    bool has_perm = false, has_dphi = false, has_mirror = false, has_zflip = false;
    std::istringstream fields(line);
    std::string field;
    while (std::getline(fields, field, ';')) {
      const auto eq = field.find('=');
      require(eq != std::string::npos, "malformed transform field '" + field + "'");
      std::string key = field.substr(0, eq);
      key.erase(0, key.find_first_not_of(" \t"));
      key.erase(key.find_last_not_of(" \t") + 1);
      std::istringstream value(field.substr(eq + 1));
      if (key == "perm") {
        std::size_t p;
        while (value >> p) tx.perm.push_back(p);
        has_perm = true;
      } else if (key == "dphi") {
        double d;
        require(static_cast<bool>(value >> d), "bad dphi");
        const double q = d / 90.0;
        require(std::abs(q - std::round(q)) < 1e-9, "dphi must be a multiple of 90");
        tx.quarter_turns = ((static_cast<int>(std::lround(q)) % 4) + 4) % 4;
        has_dphi = true;
      } else if (key == "mirror" || key == "zflip") {
        int b;
        require(static_cast<bool>(value >> b) && (b == 0 || b == 1), key + " must be 0 or 1");
        (key == "mirror" ? tx.mirror : tx.zflip) = b == 1;
        (key == "mirror" ? has_mirror : has_zflip) = true;
      } else {
        throw ValidationError("unknown transform key '" + key + "'");
      }
    }
    require(has_perm && has_dphi && has_mirror && has_zflip,
            "transform row needs perm, dphi, mirror and zflip");
    std::vector<bool> seen(tx.perm.size(), false);
    for (auto p : tx.perm) {
      require(p < tx.perm.size() && !seen[p], "perm must be a permutation");
      seen[p] = true;
    }
    out.push_back(std::move(tx));
  }
  return out;
}

inline std::string format_mic_transform_table(const std::vector<SpatialTransform>& txs) {
  std::ostringstream os;
  for (const auto& tx : txs) {
    os << "perm=";
    for (std::size_t i = 0; i < tx.perm.size(); ++i) os << (i ? " " : "") << tx.perm[i];
    os << "; dphi=" << 90 * tx.quarter_turns << "; mirror=" << (tx.mirror ? 1 : 0)
       << "; zflip=" << (tx.zflip ? 1 : 0) << "\n";
  }
  return os.str();
}

inline const std::vector<SpatialTransform>& tetrahedral_mic_transforms() {
  static const std::vector<SpatialTransform> table =
      derive_mic_transforms(ArrayFormat::tetrahedral());
  return table;
}

// Transforms valid for a format; MIC tables are derived from the geometry.
inline std::vector<SpatialTransform> transforms_for(const ArrayFormat& fmt) {
  return fmt.kind == ArrayKind::foa ? foa_transforms() : derive_mic_transforms(fmt);
}

// a after b.
inline SpatialTransform compose(const SpatialTransform& a, const SpatialTransform& b,
                                const std::vector<SpatialTransform>& table) {
  const auto ga = a.matrix(), gb = b.matrix();
  std::array<std::array<int, 3>, 3> prod{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) prod[i][j] += ga[i][k] * gb[k][j];
  for (const auto& t : table) {
    if (t.matrix() == prod) return t;
  }
  throw ValidationError("composition leaves the transform table");
}

inline SpatialTransform inverse(const SpatialTransform& a,
                                const std::vector<SpatialTransform>& table) {
  for (const auto& t : table) {
    if (compose(a, t, table).is_identity()) return t;
  }
  throw ValidationError("transform has no inverse in table");
}

}  // namespace salsa
