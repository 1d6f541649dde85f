#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>

#include "salsa/io/binary.hpp"
#include "salsa/io/keyvalue.hpp"
#include "salsa/synth.hpp"

namespace salsa::io {

// Versioned scene text; schema in docs/scene_format.md. Top-level keys come
// first, then one [source] block per source.
inline constexpr int kSceneVersion = 1;

inline SignalKind parse_signal_kind(std::string_view s) {
  if (s == "noise") return SignalKind::noise;
  if (s == "harmonic") return SignalKind::harmonic;
  if (s == "chirp") return SignalKind::chirp;
  throw ValidationError("unknown signal kind '" + std::string(s) + "'");
}

inline std::string_view to_string(SignalKind k) {
  switch (k) {
    case SignalKind::noise: return "noise";
    case SignalKind::harmonic: return "harmonic";
    case SignalKind::chirp: return "chirp";
  }
  return "?";
}

namespace detail {

inline std::vector<std::vector<double>> number_groups(const std::string& v, const std::string& key,
                                                      std::size_t width) {
  std::vector<std::vector<double>> out;
  for (const auto& group : split(v, ';')) {
    if (group.empty()) continue;
    std::istringstream in(group);
    std::vector<double> nums;
    std::string tok;
    while (in >> tok) nums.push_back(parse_double(tok, key));
    if (nums.size() != width) {
      throw ValidationError(key + ": expected groups of " + std::to_string(width) + " numbers");
    }
    out.push_back(std::move(nums));
  }
  return out;
}

inline void apply_source_key(SceneSource& s, const std::string& k, const std::string& v) {
  if (k == "class_id") s.class_id = parse_int<int>(v, k);
  else if (k == "track") s.track = parse_int<int>(v, k);
  else if (k == "signal") s.signal.kind = parse_signal_kind(v);
  else if (k == "amplitude") s.signal.amplitude = parse_double(v, k);
  else if (k == "f_lo") s.signal.f_lo = parse_double(v, k);
  else if (k == "f_hi") s.signal.f_hi = parse_double(v, k);
  else if (k == "f0") s.signal.f0 = parse_double(v, k);
  else if (k == "harmonics") s.signal.harmonics = parse_int<std::size_t>(v, k);
  else if (k == "seed") s.seed = parse_int<std::uint64_t>(v, k);
  else if (k == "activity") {
    s.activity.clear();
    for (const auto& g : number_groups(v, k, 2)) s.activity.push_back({g[0], g[1]});
  } else if (k == "trajectory") {
    s.trajectory.clear();
    for (const auto& g : number_groups(v, k, 3)) s.trajectory.push_back({g[0], g[1], g[2]});
  } else {
    throw ValidationError("unknown source key '" + k + "'");
  }
}

}  // namespace detail

inline SceneDescription parse_scene(std::string_view text, const std::string& name = "scene") {
  SceneDescription scene;
  double mic_radius = 0.042;
  bool mic = false;
  bool have_version = false;
  SceneSource* current = nullptr;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto where = name + ":" + std::to_string(lineno);
    const auto body = trim(line.substr(0, line.find('#')));
    if (body.empty()) continue;
    if (body == "[source]") {
      scene.sources.emplace_back();
      current = &scene.sources.back();
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ValidationError(where + ": expected key = value");
    const auto k = trim(std::string_view(body).substr(0, eq));
    const auto v = trim(std::string_view(body).substr(eq + 1));
    try {
      if (current) {
        detail::apply_source_key(*current, k, v);
      } else if (k == "version") {
        if (parse_int<int>(v, k) != kSceneVersion) throw ValidationError("unsupported scene version " + v);
        have_version = true;
      } else if (k == "format") {
        mic = parse_array_kind(v) == ArrayKind::mic;
      } else if (k == "mic_radius") {
        mic_radius = parse_double(v, k);
      } else if (k == "duration_s") {
        scene.duration_s = parse_double(v, k);
      } else if (k == "noise_power") {
        scene.noise_power = parse_double(v, k);
      } else if (k == "seed") {
        scene.seed = parse_int<std::uint64_t>(v, k);
      } else if (k == "orientation") {
        scene.orientation = parse_int<int>(v, k);
      } else if (k == "n_classes") {
        scene.n_classes = parse_int<std::size_t>(v, k);
      } else if (k == "label_rate") {
        scene.label_rate = parse_double(v, k);
      } else if (k == "stft.window_length") {
        scene.stft.window_length = parse_int<std::size_t>(v, k);
      } else if (k == "stft.hop_length") {
        scene.stft.hop_length = parse_int<std::size_t>(v, k);
      } else if (k == "stft.fft_size") {
        scene.stft.fft_size = parse_int<std::size_t>(v, k);
      } else if (k == "stft.window") {
        scene.stft.window = parse_window_type(v);
      } else if (k == "stft.sample_rate") {
        scene.stft.sample_rate = parse_double(v, k);
      } else {
        throw ValidationError("unknown scene key '" + k + "'");
      }
    } catch (const ValidationError& e) {
      throw ValidationError(where + ": " + e.what());
    }
  }
  if (!have_version) throw ValidationError(name + ": missing 'version = 1'");
  scene.format = mic ? ArrayFormat::tetrahedral(mic_radius) : ArrayFormat::foa();
  scene.validate();
  return scene;
}

inline SceneDescription read_scene(const std::filesystem::path& path) {
  return parse_scene(read_text(path), path.string());
}

// Shortest decimal radius that rebuilds exactly these tetrahedral positions,
// so scene files and manifests round-trip bit for bit.
inline double tetrahedral_radius(const ArrayFormat& fmt) {
  const double r = norm(fmt.mics.front());
  for (int digits = 1; digits <= 17; ++digits) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.*g", digits, r);
    const double cand = std::strtod(buf, nullptr);
    if (ArrayFormat::tetrahedral(cand).mics == fmt.mics) return cand;
  }
  return r;
}

inline std::string format_scene(const SceneDescription& scene) {
  std::string out = "version = " + std::to_string(kSceneVersion) + "\n";
  out += "format = " + std::string(to_string(scene.format.kind)) + "\n";
  if (scene.format.kind == ArrayKind::mic) {
    out += "mic_radius = " + format_double(tetrahedral_radius(scene.format)) + "\n";
  }
  out += "duration_s = " + format_double(scene.duration_s) + "\n";
  out += "noise_power = " + format_double(scene.noise_power) + "\n";
  out += "seed = " + std::to_string(scene.seed) + "\n";
  out += "orientation = " + std::to_string(scene.orientation) + "\n";
  out += "n_classes = " + std::to_string(scene.n_classes) + "\n";
  out += "label_rate = " + format_double(scene.label_rate) + "\n";
  out += "stft.window_length = " + std::to_string(scene.stft.window_length) + "\n";
  out += "stft.hop_length = " + std::to_string(scene.stft.hop_length) + "\n";
  out += "stft.fft_size = " + std::to_string(scene.stft.fft_size) + "\n";
  out += "stft.window = " + std::string(to_string(scene.stft.window)) + "\n";
  out += "stft.sample_rate = " + format_double(scene.stft.sample_rate) + "\n";
  for (const auto& s : scene.sources) {
    out += "\n[source]\n";
    out += "class_id = " + std::to_string(s.class_id) + "\n";
    out += "track = " + std::to_string(s.track) + "\n";
    out += "signal = " + std::string(to_string(s.signal.kind)) + "\n";
    out += "amplitude = " + format_double(s.signal.amplitude) + "\n";
    out += "f_lo = " + format_double(s.signal.f_lo) + "\n";
    out += "f_hi = " + format_double(s.signal.f_hi) + "\n";
    out += "f0 = " + format_double(s.signal.f0) + "\n";
    out += "harmonics = " + std::to_string(s.signal.harmonics) + "\n";
    out += "seed = " + std::to_string(s.seed) + "\n";
    out += "activity =";
    for (std::size_t i = 0; i < s.activity.size(); ++i) {
      out += (i ? "; " : " ") + format_double(s.activity[i].start_s) + " " + format_double(s.activity[i].end_s);
    }
    out += "\ntrajectory =";
    for (std::size_t i = 0; i < s.trajectory.size(); ++i) {
      const auto& p = s.trajectory[i];
      out += (i ? "; " : " ") + format_double(p.time_s) + " " + format_double(p.azimuth_deg) + " " +
             format_double(p.elevation_deg);
    }
    out += "\n";
  }
  return out;
}

}  // namespace salsa::io
