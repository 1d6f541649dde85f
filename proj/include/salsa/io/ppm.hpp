#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "salsa/io/binary.hpp"
#include "salsa/io/keyvalue.hpp"
#include "salsa/tensor.hpp"

namespace salsa::io {

using Rgb = std::array<std::uint8_t, 3>;

// Piecewise-linear ramp through nine viridis samples.
inline Rgb ramp_color(double x) {
  static constexpr std::array<std::array<double, 3>, 9> anchors{{
      {68, 1, 84}, {71, 44, 122}, {59, 81, 139}, {44, 113, 142}, {33, 144, 141},
      {39, 173, 129}, {92, 200, 99}, {170, 220, 50}, {253, 231, 37}}};
  if (!(x > 0.0)) x = 0.0;  // also catches NaN
  x = std::min(x, 1.0);
  const double pos = x * (anchors.size() - 1);
  const auto i = std::min<std::size_t>(static_cast<std::size_t>(pos), anchors.size() - 2);
  const double w = pos - static_cast<double>(i);
  Rgb c{};
  for (int k = 0; k < 3; ++k) {
    c[k] = static_cast<std::uint8_t>(std::lround((1.0 - w) * anchors[i][k] + w * anchors[i + 1][k]));
  }
  return c;
}

struct Heatmap {
  std::size_t width = 0;   // frames
  std::size_t height = 0;  // bins, lowest at the bottom row
  std::vector<Rgb> pixels;
  double min = 0.0;
  double max = 0.0;

  // Colour a value would receive under this image's scaling.
  Rgb color_of(double v) const { return ramp_color(max > min ? (v - min) / (max - min) : 0.0); }
};

inline Heatmap render_heatmap(const Tensor3<double>& x, std::size_t channel) {
  require(channel < x.channels(), "channel index " + std::to_string(channel) + " out of range");
  require(x.frames() > 0 && x.bins() > 0, "cannot render an empty channel");
  const auto data = x.channel(channel);
  Heatmap h;
  h.width = x.frames();
  h.height = x.bins();
  const auto [lo, hi] = std::minmax_element(data.begin(), data.end());
  h.min = *lo;
  h.max = *hi;
  h.pixels.resize(h.width * h.height);
  for (std::size_t t = 0; t < h.width; ++t) {
    for (std::size_t f = 0; f < h.height; ++f) {
      h.pixels[(h.height - 1 - f) * h.width + t] = h.color_of(x(channel, t, f));
    }
  }
  return h;
}

inline std::vector<char> encode_ppm(const Heatmap& h) {
  const std::string header = "P6\n" + std::to_string(h.width) + " " + std::to_string(h.height) + "\n255\n";
  std::vector<char> out(header.begin(), header.end());
  out.reserve(out.size() + 3 * h.pixels.size());
  for (const auto& p : h.pixels) out.insert(out.end(), p.begin(), p.end());
  return out;
}

inline Heatmap decode_ppm(const std::vector<char>& buf) {
  std::string head;
  std::size_t pos = 0;
  int fields = 0;
  std::vector<std::string> toks;
  while (fields < 4 && pos < buf.size()) {
    std::string tok;
    while (pos < buf.size() && std::isspace(static_cast<unsigned char>(buf[pos]))) ++pos;
    while (pos < buf.size() && !std::isspace(static_cast<unsigned char>(buf[pos]))) tok += buf[pos++];
    toks.push_back(tok);
    ++fields;
  }
  ++pos;  // single whitespace before the raster
  if (toks.size() != 4 || toks[0] != "P6" || toks[3] != "255") throw InputError("not a binary PPM");
  Heatmap h;
  h.width = parse_int<std::size_t>(toks[1]);
  h.height = parse_int<std::size_t>(toks[2]);
  if (buf.size() - pos != 3 * h.width * h.height) throw InputError("PPM raster size mismatch");
  h.pixels.resize(h.width * h.height);
  for (std::size_t i = 0; i < h.pixels.size(); ++i) {
    for (int k = 0; k < 3; ++k) h.pixels[i][k] = static_cast<std::uint8_t>(buf[pos + 3 * i + k]);
  }
  return h;
}

inline void write_ppm(const std::filesystem::path& path, const Heatmap& h, const std::string& note = {}) {
  const auto buf = encode_ppm(h);
  write_file_atomic(path, buf.data(), buf.size());
  KeyValues kv;
  kv.set("min", h.min);
  kv.set("max", h.max);
  kv.set("width", h.width);
  kv.set("height", h.height);
  if (!note.empty()) kv.set("source", note);
  auto side = path;
  side += ".txt";
  write_text_atomic(side, kv.dump());
}

}  // namespace salsa::io
