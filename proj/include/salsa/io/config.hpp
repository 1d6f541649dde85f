#pragma once

#include <optional>
#include <string>

#include "salsa/augment.hpp"
#include "salsa/baseline.hpp"
#include "salsa/io/ftb.hpp"
#include "salsa/io/keyvalue.hpp"
#include "salsa/stft.hpp"

namespace salsa::io {

// Every tunable the command-line tools accept, as "section.key = value".
struct Settings {
  StftConfig stft;
  FeatureConfig feature;
  std::optional<double> f_high;  // unset: 9000 Hz for FOA, 4000 Hz for MIC
  AugmentConfig augment;
  std::size_t n_classes = 12;
  Dtype dtype = Dtype::f32;

  FeatureConfig feature_for(ArrayKind kind) const {
    FeatureConfig f = feature;
    f.selection.f_high = f_high ? *f_high : BinSelectionConfig::for_format(kind).f_high;
    return f;
  }

  void validate() const {
    stft.validate();
    feature.selection.validate();
    require(feature.mel_bands >= 1, "feature.mel_bands must be positive");
    require(feature.log_floor >= 0.0, "feature.log_floor must be non-negative");
    require(feature.compression.factor >= 1, "feature.compress_factor must be at least 1");
    require(!f_high || *f_high > feature.selection.f_low, "selection.f_high must exceed f_low");
    require(n_classes >= 1, "labels.n_classes must be positive");
    augment.validate();
  }
};

inline void apply_setting(Settings& s, const std::string& key, const std::string& v) {
  auto num = [&] { return parse_double(v, key); };
  auto size = [&] { return parse_int<std::size_t>(v, key); };
  auto opt_int = [&]() -> std::optional<int> {
    if (v == "none" || v.empty()) return std::nullopt;
    return parse_int<int>(v, key);
  };
  auto& sel = s.feature.selection;
  auto& a = s.augment;
  if (key == "stft.window_length") s.stft.window_length = size();
  else if (key == "stft.hop_length") s.stft.hop_length = size();
  else if (key == "stft.fft_size") s.stft.fft_size = size();
  else if (key == "stft.window") s.stft.window = parse_window_type(v);
  else if (key == "stft.sample_rate") s.stft.sample_rate = num();
  else if (key == "feature.mel_bands") s.feature.mel_bands = size();
  else if (key == "feature.log_floor") s.feature.log_floor = num();
  else if (key == "feature.compress_start") s.feature.compression.start = size();
  else if (key == "feature.compress_factor") s.feature.compression.factor = size();
  else if (key == "selection.alpha_snr") sel.alpha_snr = num();
  else if (key == "selection.beta_drr") sel.beta_drr = num();
  else if (key == "selection.f_low") sel.f_low = num();
  else if (key == "selection.f_high") s.f_high = v == "auto" ? std::nullopt : std::optional<double>(num());
  else if (key == "selection.half_window") sel.half_window = size();
  else if (key == "noise.init_frames") sel.noise.init_frames = size();
  else if (key == "noise.up") sel.noise.up = num();
  else if (key == "noise.down") sel.noise.down = num();
  else if (key == "noise.min_floor") sel.noise.min_floor = num();
  else if (key == "augment.p_channel_swap") a.p_channel_swap = num();
  else if (key == "augment.p_frequency_shift") a.p_frequency_shift = num();
  else if (key == "augment.p_cutout") a.p_cutout = num();
  else if (key == "augment.max_shift") a.max_shift = parse_int<int>(v, key);
  else if (key == "augment.rect_max_fraction") a.rect_max_fraction = num();
  else if (key == "augment.cross_freq_bands") a.cross_freq_bands = parse_int<int>(v, key);
  else if (key == "augment.cross_freq_width") a.cross_freq_width = parse_int<int>(v, key);
  else if (key == "augment.cross_time_bands") a.cross_time_bands = parse_int<int>(v, key);
  else if (key == "augment.cross_time_width") a.cross_time_width = parse_int<int>(v, key);
  else if (key == "augment.seed") a.seed = parse_int<std::uint64_t>(v, key);
  else if (key == "augment.transform") a.forced_transform = opt_int();
  else if (key == "augment.shift") a.forced_shift = opt_int();
  else if (key == "labels.n_classes") s.n_classes = size();
  else if (key == "output.dtype") {
    s.dtype = parse_dtype(v);
    require(s.dtype != Dtype::c64, "output.dtype must be f32 or f64");
  } else {
    throw ValidationError("unknown config key '" + key + "'");
  }
}

inline void apply_settings(Settings& s, const KeyValues& kv) {
  for (const auto& k : kv.keys()) apply_setting(s, k, kv.get(k));
}

// "key=value" override as given on the command line.
inline void apply_override(Settings& s, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ValidationError("--set expects key=value, got '" + assignment + "'");
  apply_setting(s, trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

enum ConfigSection : unsigned {
  kSectionStft = 1,
  kSectionFeature = 2,
  kSectionAugment = 4,
  kSectionOutput = 8,
  kSectionAll = 15,
};

// Canonical dump of the effective parameters; f_high is resolved for `kind`.
inline KeyValues canonical_settings(const Settings& s, ArrayKind kind, unsigned sections = kSectionAll) {
  KeyValues kv;
  if (sections & kSectionStft) {
    kv.set("stft.window_length", s.stft.window_length);
    kv.set("stft.hop_length", s.stft.hop_length);
    kv.set("stft.fft_size", s.stft.fft_size);
    kv.set("stft.window", std::string(to_string(s.stft.window)));
    kv.set("stft.sample_rate", s.stft.sample_rate);
  }
  if (sections & kSectionFeature) {
    const auto f = s.feature_for(kind);
    kv.set("feature.mel_bands", f.mel_bands);
    kv.set("feature.log_floor", f.log_floor);
    kv.set("feature.compress_start", f.compression.start);
    kv.set("feature.compress_factor", f.compression.factor);
    kv.set("selection.alpha_snr", f.selection.alpha_snr);
    kv.set("selection.beta_drr", f.selection.beta_drr);
    kv.set("selection.f_low", f.selection.f_low);
    kv.set("selection.f_high", f.selection.f_high);
    kv.set("selection.half_window", f.selection.half_window);
    kv.set("noise.init_frames", f.selection.noise.init_frames);
    kv.set("noise.up", f.selection.noise.up);
    kv.set("noise.down", f.selection.noise.down);
    kv.set("noise.min_floor", f.selection.noise.min_floor);
  }
  if (sections & kSectionAugment) {
    const auto& a = s.augment;
    kv.set("augment.p_channel_swap", a.p_channel_swap);
    kv.set("augment.p_frequency_shift", a.p_frequency_shift);
    kv.set("augment.p_cutout", a.p_cutout);
    kv.set("augment.max_shift", a.max_shift);
    kv.set("augment.rect_max_fraction", a.rect_max_fraction);
    kv.set("augment.cross_freq_bands", a.cross_freq_bands);
    kv.set("augment.cross_freq_width", a.cross_freq_width);
    kv.set("augment.cross_time_bands", a.cross_time_bands);
    kv.set("augment.cross_time_width", a.cross_time_width);
    kv.set("augment.seed", std::to_string(a.seed));
    kv.set("augment.transform", a.forced_transform ? std::to_string(*a.forced_transform) : "none");
    kv.set("augment.shift", a.forced_shift ? std::to_string(*a.forced_shift) : "none");
  }
  if (sections & kSectionOutput) {
    kv.set("labels.n_classes", s.n_classes);
    kv.set("output.dtype", std::string(s.dtype == Dtype::f32 ? "f32" : "f64"));
  }
  return kv;
}

inline std::string config_hash(const KeyValues& canonical, std::string_view extra = {}) {
  return hex64(fnv1a(canonical.dump() + std::string(extra)));
}

inline Settings load_settings(const std::filesystem::path& path) {
  Settings s;
  apply_settings(s, KeyValues::parse(read_text(path), path.string()));
  return s;
}

}  // namespace salsa::io
