#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "salsa/errors.hpp"
#include "salsa/fft.hpp"
#include "salsa/tensor.hpp"

namespace salsa {

struct AudioClip {
  std::vector<std::vector<double>> channels;
  double sample_rate = 24000.0;

  std::size_t channel_count() const { return channels.size(); }
  std::size_t length() const { return channels.empty() ? 0 : channels.front().size(); }

  void validate() const {
    require(!channels.empty(), "audio clip has no channels");
    require(sample_rate > 0.0, "sample rate must be positive");
    for (const auto& ch : channels) {
      require(ch.size() == channels.front().size(), "audio channels differ in length");
    }
  }
};

enum class WindowType { hann, hamming, rectangular };

inline std::string_view to_string(WindowType w) {
  switch (w) {
    case WindowType::hann: return "hann";
    case WindowType::hamming: return "hamming";
    case WindowType::rectangular: return "rectangular";
  }
  return "?";
}

inline WindowType parse_window_type(std::string_view s) {
  if (s == "hann") return WindowType::hann;
  if (s == "hamming") return WindowType::hamming;
  if (s == "rectangular") return WindowType::rectangular;
  throw ValidationError("unknown window '" + std::string(s) + "'");
}

struct StftConfig {
  std::size_t window_length = 512;
  std::size_t hop_length = 300;
  std::size_t fft_size = 512;
  WindowType window = WindowType::hann;
  double sample_rate = 24000.0;

  std::size_t bins() const { return fft_size / 2 + 1; }
  double frame_rate() const { return sample_rate / static_cast<double>(hop_length); }

  void validate() const {
    require(hop_length >= 1, "hop_length must be positive");
    require(hop_length <= window_length, "hop_length must not exceed window_length");
    require(window_length <= fft_size, "window_length must not exceed fft_size");
    require(sample_rate > 0.0, "sample_rate must be positive");
  }
};

// Periodic (DFT-even) taper of length n.
inline std::vector<double> make_window(WindowType type, std::size_t n) {
  std::vector<double> w(n, 1.0);
  const double step = 2.0 * std::numbers::pi / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double c = std::cos(step * static_cast<double>(i));
    if (type == WindowType::hann) w[i] = 0.5 - 0.5 * c;
    if (type == WindowType::hamming) w[i] = 0.54 - 0.46 * c;
  }
  return w;
}

// Number of full frames; no padding or centring.
inline std::size_t frame_count(std::size_t length, const StftConfig& cfg) {
  if (length < cfg.window_length) return 0;
  return (length - cfg.window_length) / cfg.hop_length + 1;
}

inline ComplexSpectrogram stft(const AudioClip& clip, const StftConfig& cfg) {
  clip.validate();
  cfg.validate();
  require(clip.sample_rate == cfg.sample_rate, "clip sample rate " +
                                                   std::to_string(clip.sample_rate) +
                                                   " does not match configured " +
                                                   std::to_string(cfg.sample_rate));
  require(clip.length() >= cfg.window_length, "clip is shorter than one analysis window");

  const std::size_t frames = frame_count(clip.length(), cfg);
  ComplexSpectrogram out;
  out.data = Tensor3<cplx>(clip.channel_count(), frames, cfg.bins());
  out.sample_rate = cfg.sample_rate;
  out.fft_size = cfg.fft_size;
  out.hop_length = cfg.hop_length;

  const auto window = make_window(cfg.window, cfg.window_length);
  RealFft fft(cfg.fft_size);
  std::vector<double> frame(cfg.window_length);
  for (std::size_t c = 0; c < clip.channel_count(); ++c) {
    const auto& x = clip.channels[c];
    for (std::size_t t = 0; t < frames; ++t) {
      const std::size_t start = t * cfg.hop_length;
      for (std::size_t i = 0; i < cfg.window_length; ++i) frame[i] = x[start + i] * window[i];
      fft.forward(frame, out.data.row(c, t));
    }
  }
  return out;
}

// Power of one frame from its one-sided spectrum, scaled so that it equals
// the windowed time-domain energy sum(x[n]^2 w[n]^2).
inline double frame_power(const ComplexSpectrogram& spec, std::size_t c, std::size_t t) {
  const auto row = spec.data.row(c, t);
  const std::size_t n = spec.fft_size;
  double total = 0.0;
  for (std::size_t k = 0; k < row.size(); ++k) {
    const bool unpaired = k == 0 || (n % 2 == 0 && k == n / 2);
    total += (unpaired ? 1.0 : 2.0) * std::norm(row[k]);
  }
  return total / static_cast<double>(n);
}

inline constexpr double kDefaultLogFloor = 1e-12;

namespace detail {
inline FeatureMeta spectrogram_meta(const ComplexSpectrogram& spec, FrequencyScale scale) {
  FeatureMeta meta;
  meta.scale = scale;
  meta.bin_hz = spec.bin_hz();
  meta.frame_rate = spec.frame_rate();
  return meta;
}
}  // namespace detail

// log(|X|^2 + floor) per channel, frame and bin.
inline FeatureTensor log_linear_spectrogram(const ComplexSpectrogram& spec,
                                            double floor = kDefaultLogFloor) {
  require(floor >= 0.0, "log floor must be non-negative");
  FeatureTensor out;
  out.data = Tensor3<double>(spec.channels(), spec.frames(), spec.bins());
  const auto& in = spec.data.values();
  auto& v = out.data.values();
  for (std::size_t i = 0; i < in.size(); ++i) v[i] = std::log(std::norm(in[i]) + floor);
  out.roles.assign(spec.channels(), ChannelRole::spectrogram);
  out.meta = detail::spectrogram_meta(spec, FrequencyScale::linear);
  return out;
}

inline double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
inline double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

// F x K triangular filterbank on the HTK mel scale.
//
// Each triangle is scaled to unit area and integrated over the frequency
// interval covered by each STFT bin, so every filter sums to one over the
// bins and narrow low-frequency filters never come out empty.
struct MelFilterbank {
  std::size_t n_bins = 0;
  std::size_t n_mels = 0;
  double f_min = 0.0;
  double f_max = 0.0;
  std::vector<double> weights;  // n_bins x n_mels, row-major

  double weight(std::size_t f, std::size_t k) const { return weights[f * n_mels + k]; }
};

inline MelFilterbank make_mel_filterbank(std::size_t n_mels, std::size_t fft_size,
                                         double sample_rate, double f_min = 0.0,
                                         double f_max = -1.0) {
  if (f_max < 0.0) f_max = sample_rate / 2.0;
  require(n_mels >= 1, "mel band count must be positive");
  require(0.0 <= f_min && f_min < f_max && f_max <= sample_rate / 2.0,
          "mel range must satisfy 0 <= f_min < f_max <= Nyquist");

  MelFilterbank fb;
  fb.n_bins = fft_size / 2 + 1;
  fb.n_mels = n_mels;
  fb.f_min = f_min;
  fb.f_max = f_max;
  fb.weights.assign(fb.n_bins * n_mels, 0.0);

  const double m_lo = hz_to_mel(f_min);
  const double m_hi = hz_to_mel(f_max);
  std::vector<double> edges(n_mels + 2);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    edges[i] = mel_to_hz(m_lo + (m_hi - m_lo) * static_cast<double>(i) /
                                    static_cast<double>(n_mels + 1));
  }

  const double bin_hz = sample_rate / static_cast<double>(fft_size);
  for (std::size_t k = 0; k < n_mels; ++k) {
    const double a = edges[k], b = edges[k + 1], c = edges[k + 2];
    // Cumulative area of the unit-area triangle (a, b, c) up to x.
    auto cdf = [&](double x) {
      if (x <= a) return 0.0;
      if (x >= c) return 1.0;
      if (x <= b) return (x - a) * (x - a) / ((c - a) * (b - a));
      return 1.0 - (c - x) * (c - x) / ((c - a) * (c - b));
    };
    for (std::size_t f = 0; f < fb.n_bins; ++f) {
      const double centre = static_cast<double>(f) * bin_hz;
      fb.weights[f * n_mels + k] = cdf(centre + 0.5 * bin_hz) - cdf(centre - 0.5 * bin_hz);
    }
  }
  return fb;
}

// log(|X|^2 W_mel + floor), giving channels x frames x K.
inline FeatureTensor log_mel_spectrogram(const ComplexSpectrogram& spec, const MelFilterbank& fb,
                                         double floor = kDefaultLogFloor) {
  require(fb.n_bins == spec.bins(), "mel filterbank bin count does not match spectrogram");
  require(floor >= 0.0, "log floor must be non-negative");
  FeatureTensor out;
  out.data = Tensor3<double>(spec.channels(), spec.frames(), fb.n_mels);
  std::vector<double> power(spec.bins());
  for (std::size_t c = 0; c < spec.channels(); ++c) {
    for (std::size_t t = 0; t < spec.frames(); ++t) {
      const auto row = spec.data.row(c, t);
      for (std::size_t f = 0; f < row.size(); ++f) power[f] = std::norm(row[f]);
      auto dst = out.data.row(c, t);
      std::fill(dst.begin(), dst.end(), 0.0);
      for (std::size_t f = 0; f < power.size(); ++f) {
        if (power[f] == 0.0) continue;
        const double* w = fb.weights.data() + f * fb.n_mels;
        for (std::size_t k = 0; k < fb.n_mels; ++k) dst[k] += power[f] * w[k];
      }
      for (auto& x : dst) x = std::log(x + floor);
    }
  }
  out.roles.assign(spec.channels(), ChannelRole::spectrogram);
  out.meta = detail::spectrogram_meta(spec, FrequencyScale::mel);
  return out;
}

inline constexpr std::size_t kDefaultCompressStart = 192;
inline constexpr std::size_t kDefaultCompressFactor = 8;

// Keeps bins [0, start) and averages the following bins in groups of
// `factor`. Trailing bins that do not fill a whole group (the Nyquist bin at
// the default 257-bin layout) are dropped.
inline FeatureTensor compress_high_bands(const FeatureTensor& feat,
                                         std::size_t start = kDefaultCompressStart,
                                         std::size_t factor = kDefaultCompressFactor) {
  require(factor >= 1, "compression factor must be positive");
  require(start < feat.bins(), "compression start bin must be below the bin count");
  require(feat.meta.scale == FrequencyScale::linear, "band compression needs a linear-scale input");
  if (factor == 1) return feat;
  require(feat.meta.compress_factor == 1, "tensor is already band-compressed");

  const std::size_t groups = (feat.bins() - start) / factor;
  const std::size_t out_bins = start + groups;
  FeatureTensor out;
  out.data = Tensor3<double>(feat.channels(), feat.frames(), out_bins);
  out.roles = feat.roles;
  out.meta = feat.meta;
  out.meta.compress_start = start;
  out.meta.compress_factor = factor;
  const double inv = 1.0 / static_cast<double>(factor);
  for (std::size_t c = 0; c < feat.channels(); ++c) {
    for (std::size_t t = 0; t < feat.frames(); ++t) {
      const auto src = feat.data.row(c, t);
      auto dst = out.data.row(c, t);
      std::copy(src.begin(), src.begin() + static_cast<std::ptrdiff_t>(start), dst.begin());
      for (std::size_t g = 0; g < groups; ++g) {
        double sum = 0.0;
        for (std::size_t i = 0; i < factor; ++i) sum += src[start + g * factor + i];
        dst[start + g] = sum * inv;
      }
    }
  }
  return out;
}

}  // namespace salsa
