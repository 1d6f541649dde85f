#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include "salsa/baseline.hpp"
#include "salsa/errors.hpp"
#include "salsa/labels.hpp"
#include "salsa/random.hpp"
#include "salsa/tensor.hpp"
#include "salsa/transforms.hpp"

namespace salsa {

struct AugmentConfig {
  double p_channel_swap = 0.5;
  double p_frequency_shift = 0.5;
  double p_cutout = 0.5;
  int max_shift = 10;
  // Cutout geometry: rectangle up to this fraction of each axis.
  double rect_max_fraction = 0.25;
  // Cross (SpecAugment-style) mask limits.
  int cross_freq_bands = 2;
  int cross_freq_width = 20;
  int cross_time_bands = 2;
  int cross_time_width = 64;
  std::uint64_t seed = 0;
  // Fix the channel-swap transform or shift instead of drawing them.
  std::optional<int> forced_transform;
  std::optional<int> forced_shift;

  void set_probability(double p) { p_channel_swap = p_frequency_shift = p_cutout = p; }

  void validate() const {
    for (double p : {p_channel_swap, p_frequency_shift, p_cutout}) {
      require(0.0 <= p && p <= 1.0, "augmentation probabilities must lie in [0, 1]");
    }
    require(max_shift >= 0, "max_shift must be non-negative");
    require(rect_max_fraction >= 0.0 && rect_max_fraction <= 1.0, "rect_max_fraction out of range");
  }
};

namespace detail {

inline double wrap_phase(double x) {
  // Into (-pi, pi].
  constexpr double two_pi = 2.0 * std::numbers::pi;
  x = std::remainder(x, two_pi);
  if (x <= -std::numbers::pi) x += two_pi;
  return x;
}

inline std::vector<std::size_t> channels_with(const FeatureTensor& f, ChannelRole role) {
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < f.roles.size(); ++c) {
    if (f.roles[c] == role) out.push_back(c);
  }
  return out;
}

inline void copy_channel(const FeatureTensor& src, std::size_t from, FeatureTensor& dst,
                         std::size_t to, double sign = 1.0) {
  const auto s = src.data.channel(from);
  auto d = dst.data.channel(to);
  for (std::size_t i = 0; i < s.size(); ++i) d[i] = sign * s[i];
}

}  // namespace detail

// Applies a spatial transform to a feature stack and its labels.
//
// FOA: W is kept; the X/Y/Z spectrogram channels are permuted and the
// IV/EIV channels are multiplied by the signed permutation matrix.
// MIC: spectrogram channels are permuted; EPV channels are rebuilt from the
// permuted phase differences relative to the new reference microphone; GCC
// pair channels are permuted, and lag-reversed where the pair order flips.
// The lag n_lags/2 of a reversed pair has no stored counterpart and is
// set to zero.
inline std::pair<FeatureTensor, SeldLabels> channel_swap(const FeatureTensor& feat,
                                                         const SeldLabels& labels,
                                                         const SpatialTransform& tx,
                                                         double speed_of_sound = kSpeedOfSound) {
  require(feat.meta.kind.has_value(), "channel swap needs a tensor of known feature kind");
  require(tx.format == feat.meta.format, "transform format does not match features");
  if (feat.meta.format == ArrayKind::foa) require(tx.id >= 0 && tx.id < 16, "FOA transform id out of range");

  SeldLabels out_labels = labels;
  for (auto& frame : out_labels.frames) {
    for (auto& e : frame) e.doa = tx.apply(e.doa);
  }

  FeatureTensor out = feat;
  const auto spec = detail::channels_with(feat, ChannelRole::spectrogram);
  const auto spatial = detail::channels_with(feat, ChannelRole::spatial);
  const auto gcc = detail::channels_with(feat, ChannelRole::gcc);

  if (feat.meta.format == ArrayKind::foa) {
    require(spec.size() == 4 && spatial.size() == 3, "FOA features need 4 spectrogram + 3 spatial channels");
    const auto g = tx.matrix();
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        if (g[i][j] == 0) continue;
        detail::copy_channel(feat, spec[j + 1], out, spec[i + 1]);
        detail::copy_channel(feat, spatial[j], out, spatial[i], g[i][j]);
      }
    }
    return {std::move(out), std::move(out_labels)};
  }

  const std::size_t M = spec.size();
  require(tx.perm.size() == M, "transform permutation does not match channel count");
  const auto& p = tx.perm;
  for (std::size_t m = 0; m < M; ++m) detail::copy_channel(feat, spec[p[m]], out, spec[m]);

  if (!spatial.empty()) {
    require(spatial.size() == M - 1, "EPV channel count mismatch");
    const double two_pi = 2.0 * std::numbers::pi;
    for (std::size_t t = 0; t < feat.frames(); ++t) {
      for (std::size_t f = 0; f < feat.bins(); ++f) {
        const double hz = feat.bin_frequency(f);
        if (hz <= 0.0) {
          for (std::size_t m = 1; m < M; ++m) out.data(spatial[m - 1], t, f) = 0.0;
          continue;
        }
        // Phase of microphone k relative to microphone 0; zero for k = 0.
        auto phase = [&](std::size_t k) {
          return k == 0 ? 0.0 : -two_pi * hz * feat.data(spatial[k - 1], t, f) / speed_of_sound;
        };
        const double ref = phase(p[0]);
        for (std::size_t m = 1; m < M; ++m) {
          const double d = detail::wrap_phase(phase(p[m]) - ref);
          out.data(spatial[m - 1], t, f) = -speed_of_sound * d / (two_pi * hz);
        }
      }
    }
  }

  if (!gcc.empty()) {
    const auto pairs = channel_pairs(M);
    require(gcc.size() == pairs.size(), "GCC channel count mismatch");
    const std::size_t L = feat.bins();
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const std::size_t a = p[pairs[k].first], b = p[pairs[k].second];
      const auto src_pair = std::find(pairs.begin(), pairs.end(), std::make_pair(std::min(a, b), std::max(a, b)));
      const auto src = gcc[static_cast<std::size_t>(src_pair - pairs.begin())];
      if (a < b) {
        detail::copy_channel(feat, src, out, gcc[k]);
        continue;
      }
      for (std::size_t t = 0; t < feat.frames(); ++t) {
        for (std::size_t q = 0; q < L; ++q) {
          const int lag = -gcc_lag_at(q, L);
          const bool stored = lag > -static_cast<int>(L / 2);
          out.data(gcc[k], t, q) = stored ? feat.data(src, t, gcc_index_of(lag, L)) : 0.0;
        }
      }
    }
  }
  return {std::move(out), std::move(out_labels)};
}

namespace detail {
inline std::pair<double, double> channel_range(const FeatureTensor& f, std::size_t c) {
  const auto v = f.data.channel(c);
  if (v.empty()) return {0.0, 0.0};
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return {*lo, *hi};
}
}  // namespace detail

// Shifts every non-GCC channel by `shift` bands (positive = upward). Vacated
// bands take the channel minimum for spectrograms and zero for spatial cues.
inline FeatureTensor frequency_shift(const FeatureTensor& feat, int shift, int max_shift = 10) {
  require(std::abs(shift) <= max_shift, "shift exceeds max_shift");
  if (shift == 0) return feat;
  FeatureTensor out = feat;
  const auto F = static_cast<long>(feat.bins());
  for (std::size_t c = 0; c < feat.channels(); ++c) {
    if (feat.roles[c] == ChannelRole::gcc) continue;
    const double fill =
        feat.roles[c] == ChannelRole::spectrogram ? detail::channel_range(feat, c).first : 0.0;
    for (std::size_t t = 0; t < feat.frames(); ++t) {
      const auto src = feat.data.row(c, t);
      auto dst = out.data.row(c, t);
      for (long f = 0; f < F; ++f) {
        const long from = f - shift;
        dst[static_cast<std::size_t>(f)] =
            (from >= 0 && from < F) ? src[static_cast<std::size_t>(from)] : fill;
      }
    }
  }
  return out;
}

// Frames x bins region shared by all channels.
struct CutoutMask {
  BinMask region;
  bool cross = false;
};

inline CutoutMask draw_cutout(std::size_t frames, std::size_t bins, const AugmentConfig& cfg,
                              Rng& rng) {
  CutoutMask mask{BinMask(frames, bins), rng.bernoulli(0.5)};
  if (frames == 0 || bins == 0) return mask;
  if (!mask.cross) {
    const auto max_t = static_cast<std::int64_t>(std::floor(cfg.rect_max_fraction * static_cast<double>(frames)));
    const auto max_f = static_cast<std::int64_t>(std::floor(cfg.rect_max_fraction * static_cast<double>(bins)));
    const auto h = static_cast<std::size_t>(rng.integer(0, max_t));
    const auto w = static_cast<std::size_t>(rng.integer(0, max_f));
    const auto t0 = static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(frames - h)));
    const auto f0 = static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(bins - w)));
    for (std::size_t t = t0; t < t0 + h; ++t)
      for (std::size_t f = f0; f < f0 + w; ++f) mask.region.set(t, f, true);
    return mask;
  }
  auto bands = [&](std::size_t extent, int count, int width, auto&& mark) {
    for (int i = 0; i < count; ++i) {
      const auto w = static_cast<std::size_t>(
          rng.integer(0, std::min<std::int64_t>(width, static_cast<std::int64_t>(extent))));
      const auto s = static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(extent - w)));
      for (std::size_t k = s; k < s + w; ++k) mark(k);
    }
  };
  bands(bins, cfg.cross_freq_bands, cfg.cross_freq_width, [&](std::size_t f) {
    for (std::size_t t = 0; t < frames; ++t) mask.region.set(t, f, true);
  });
  bands(frames, cfg.cross_time_bands, cfg.cross_time_width, [&](std::size_t t) {
    for (std::size_t f = 0; f < bins; ++f) mask.region.set(t, f, true);
  });
  return mask;
}

// Fills the mask region: a random value within the channel's range for
// spectrogram channels, zero for IV/EIV/EPV/GCC channels.
inline FeatureTensor apply_cutout(const FeatureTensor& feat, const BinMask& region, Rng& rng) {
  require(region.frames() == feat.frames() && region.bins() == feat.bins(), "cutout mask shape mismatch");
  FeatureTensor out = feat;
  for (std::size_t c = 0; c < feat.channels(); ++c) {
    double value = 0.0;
    if (feat.roles[c] == ChannelRole::spectrogram) {
      const auto [lo, hi] = detail::channel_range(feat, c);
      value = rng.uniform(lo, hi);
    }
    for (std::size_t t = 0; t < feat.frames(); ++t)
      for (std::size_t f = 0; f < feat.bins(); ++f)
        if (region(t, f)) out.data(c, t, f) = value;
  }
  return out;
}

inline FeatureTensor random_cutout(const FeatureTensor& feat, Rng& rng, const AugmentConfig& cfg = {}) {
  const auto mask = draw_cutout(feat.frames(), feat.bins(), cfg, rng);
  return apply_cutout(feat, mask.region, rng);
}

struct AugmentRecord {
  std::optional<int> transform;
  std::optional<int> shift;
  bool cutout = false;
};

// Channel swap, frequency shift and random cutout, each applied
// independently with its own probability, in that order.
inline std::pair<FeatureTensor, SeldLabels> augment_pipeline(
    const FeatureTensor& feat, const SeldLabels& labels, const AugmentConfig& cfg, Rng& rng,
    const ArrayFormat& format = ArrayFormat::foa(), AugmentRecord* record = nullptr) {
  cfg.validate();
  std::pair<FeatureTensor, SeldLabels> cur{feat, labels};
  AugmentRecord rec;
  const bool do_cs = rng.bernoulli(cfg.p_channel_swap);
  const bool do_fs = rng.bernoulli(cfg.p_frequency_shift);
  const bool do_rc = rng.bernoulli(cfg.p_cutout);
  if (do_cs) {
    const auto table = transforms_for(format);
    const auto id = cfg.forced_transform
                        ? *cfg.forced_transform
                        : static_cast<int>(rng.index(table.size()));
    require(id >= 0 && static_cast<std::size_t>(id) < table.size(), "transform id out of range");
    cur = channel_swap(cur.first, cur.second, table[static_cast<std::size_t>(id)], format.speed_of_sound);
    rec.transform = id;
  }
  if (do_fs) {
    const int shift = cfg.forced_shift ? *cfg.forced_shift
                                       : static_cast<int>(rng.integer(-cfg.max_shift, cfg.max_shift));
    cur.first = frequency_shift(cur.first, shift, cfg.max_shift);
    rec.shift = shift;
  }
  if (do_rc) {
    cur.first = random_cutout(cur.first, rng, cfg);
    rec.cutout = true;
  }
  if (record) *record = rec;
  return cur;
}

}  // namespace salsa
