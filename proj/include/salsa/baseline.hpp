#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "salsa/errors.hpp"
#include "salsa/fft.hpp"
#include "salsa/geometry.hpp"
#include "salsa/spatial.hpp"
#include "salsa/stft.hpp"
#include "salsa/tensor.hpp"

namespace salsa {

inline constexpr double kIvEpsilon = 1e-12;
inline constexpr double kPhatEpsilon = 1e-12;

namespace detail {
inline void normalize3(double& x, double& y, double& z) {
  const double n = std::sqrt(x * x + y * y + z * z);
  if (n < kIvEpsilon) {
    x = y = z = 0.0;
  } else {
    x /= n;
    y /= n;
    z /= n;
  }
}
}  // namespace detail

// Active intensity Re[conj(W) (X, Y, Z)] per bin, unit-normalised. The
// physical prefactor is dropped so a source at azimuth 0, elevation 0 points
// along +x.
inline FeatureTensor intensity_vector(const ComplexSpectrogram& spec) {
  require(spec.channels() == 4, "intensity vectors need 4-channel FOA input");
  const std::size_t T = spec.frames(), F = spec.bins();
  FeatureTensor out;
  out.data = Tensor3<double>(3, T, F);
  out.roles.assign(3, ChannelRole::spatial);
  out.meta.format = ArrayKind::foa;
  out.meta.bin_hz = spec.bin_hz();
  out.meta.frame_rate = spec.frame_rate();
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t f = 0; f < F; ++f) {
      const cplx w = std::conj(spec.data(0, t, f));
      double x = (w * spec.data(1, t, f)).real();
      double y = (w * spec.data(2, t, f)).real();
      double z = (w * spec.data(3, t, f)).real();
      detail::normalize3(x, y, z);
      out.data(0, t, f) = x;
      out.data(1, t, f) = y;
      out.data(2, t, f) = z;
    }
  }
  return out;
}

// Linear-scale IV through the mel filters, then re-normalised per bin.
inline FeatureTensor mel_project_iv(const FeatureTensor& iv, const MelFilterbank& fb) {
  require(iv.channels() == 3, "mel IV projection needs 3 IV channels");
  require(iv.meta.scale == FrequencyScale::linear, "IV must be linear-scale");
  require(iv.bins() == fb.n_bins, "IV bin count does not match the mel filterbank");
  const std::size_t T = iv.frames(), K = fb.n_mels;
  FeatureTensor out;
  out.data = Tensor3<double>(3, T, K);
  out.roles = iv.roles;
  out.meta = iv.meta;
  out.meta.scale = FrequencyScale::mel;
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t c = 0; c < 3; ++c) {
      const auto src = iv.data.row(c, t);
      auto dst = out.data.row(c, t);
      for (std::size_t f = 0; f < fb.n_bins; ++f) {
        if (src[f] == 0.0) continue;
        const double* w = fb.weights.data() + f * K;
        for (std::size_t k = 0; k < K; ++k) dst[k] += src[f] * w[k];
      }
    }
    for (std::size_t k = 0; k < K; ++k) {
      detail::normalize3(out.data(0, t, k), out.data(1, t, k), out.data(2, t, k));
    }
  }
  return out;
}

// Lag in samples held at output index q of an n_lags-wide GCC slice; lags
// run over (-n_lags/2, n_lags/2].
inline int gcc_lag_at(std::size_t q, std::size_t n_lags) {
  return static_cast<int>(q) - static_cast<int>(n_lags / 2) + 1;
}

inline std::size_t gcc_index_of(int lag, std::size_t n_lags) {
  return static_cast<std::size_t>(lag + static_cast<int>(n_lags / 2) - 1);
}

// GCC-PHAT between channels i and j for every frame, as frames x n_lags.
// A positive lag means channel j lags channel i. Values are divided by the
// FFT size, so they lie in [-1, 1]. Bins where |X_i X_j^*| < 1e-12 get
// zero phase.
inline Tensor3<double> gcc_phat(const ComplexSpectrogram& spec, std::size_t i, std::size_t j,
                                std::size_t n_lags) {
  require(i != j, "GCC-PHAT needs two distinct channels");
  require(i < spec.channels() && j < spec.channels(), "channel index out of range");
  require(n_lags >= 2 && n_lags % 2 == 0, "lag count must be even and positive");
  require(n_lags <= spec.fft_size, "lag count exceeds FFT size");
  const std::size_t T = spec.frames(), F = spec.bins(), N = spec.fft_size;
  Tensor3<double> out(1, T, n_lags);
  RealFft fft(N);
  std::vector<cplx> cross(F);
  std::vector<double> corr(N);
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t f = 0; f < F; ++f) {
      // conj(X_i) X_j puts the peak at +d when X_j is X_i delayed by d.
      const cplx p = std::conj(spec.data(i, t, f)) * spec.data(j, t, f);
      const double mag = std::abs(p);
      cross[f] = mag < kPhatEpsilon ? cplx(1.0, 0.0) : p / mag;
    }
    // The half-spectrum must be Hermitian at DC and Nyquist.
    cross[0] = cplx(cross[0].real(), 0.0);
    if (N % 2 == 0) cross[F - 1] = cplx(cross[F - 1].real(), 0.0);
    fft.inverse(cross, corr);
    for (std::size_t q = 0; q < n_lags; ++q) {
      const int lag = gcc_lag_at(q, n_lags);
      out(0, t, q) = corr[static_cast<std::size_t>((lag + static_cast<int>(N)) % static_cast<int>(N))];
    }
  }
  return out;
}

// Microphone pairs in stacking order: (0,1), (0,2), ..., (M-2, M-1).
inline std::vector<std::pair<std::size_t, std::size_t>> channel_pairs(std::size_t m) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) pairs.emplace_back(i, j);
  return pairs;
}

inline FeatureTensor gcc_phat_all_pairs(const ComplexSpectrogram& spec, std::size_t n_lags) {
  const auto pairs = channel_pairs(spec.channels());
  FeatureTensor out;
  out.data = Tensor3<double>(pairs.size(), spec.frames(), n_lags);
  out.roles.assign(pairs.size(), ChannelRole::gcc);
  out.meta.format = ArrayKind::mic;
  out.meta.bin_hz = spec.bin_hz();
  out.meta.frame_rate = spec.frame_rate();
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto g = gcc_phat(spec, pairs[p].first, pairs[p].second, n_lags);
    auto dst = out.data.channel(p);
    std::copy(g.values().begin(), g.values().end(), dst.begin());
  }
  return out;
}

// Everything needed to turn a spectrogram into one of the feature kinds.
struct FeatureConfig {
  std::size_t mel_bands = 128;
  double log_floor = kDefaultLogFloor;
  CompressionConfig compression;
  BinSelectionConfig selection = BinSelectionConfig::for_format(ArrayKind::foa);
};

inline bool kind_needs_foa(FeatureKind k) {
  return k == FeatureKind::mel_spec_iv || k == FeatureKind::lin_spec_iv;
}
inline bool kind_needs_mic(FeatureKind k) {
  return k == FeatureKind::mel_spec_gcc || k == FeatureKind::lin_spec_gcc;
}

inline std::size_t expected_channels(FeatureKind k, std::size_t m) {
  if (kind_needs_mic(k)) return m + m * (m - 1) / 2;
  return m + (m - 1);
}

inline void check_kind_format(FeatureKind kind, ArrayKind format) {
  if (kind_needs_foa(kind) && format != ArrayKind::foa) {
    throw ValidationError(std::string(to_string(kind)) + " requires the foa format");
  }
  if (kind_needs_mic(kind) && format != ArrayKind::mic) {
    throw ValidationError(std::string(to_string(kind)) + " requires the mic format");
  }
}

// Stacks spectrogram and spatial channels for the requested feature kind.
inline FeatureTensor assemble(FeatureKind kind, const ComplexSpectrogram& spec,
                              const ArrayFormat& format, const FeatureConfig& cfg = {}) {
  format.validate();
  format.check_channels(spec.channels());
  check_kind_format(kind, format.kind);

  FeatureTensor out;
  switch (kind) {
    case FeatureKind::salsa:
      out = salsa(spec, format, cfg.selection, cfg.compression, cfg.log_floor);
      break;
    case FeatureKind::lin_spec_iv: {
      out = stack_channels(log_linear_spectrogram(spec, cfg.log_floor), intensity_vector(spec));
      if (cfg.compression.factor > 1) {
        out = compress_high_bands(out, cfg.compression.start, cfg.compression.factor);
      }
      break;
    }
    case FeatureKind::mel_spec_iv: {
      const auto fb = make_mel_filterbank(cfg.mel_bands, spec.fft_size, spec.sample_rate);
      out = stack_channels(log_mel_spectrogram(spec, fb, cfg.log_floor),
                           mel_project_iv(intensity_vector(spec), fb));
      break;
    }
    case FeatureKind::lin_spec_gcc: {
      auto lin = log_linear_spectrogram(spec, cfg.log_floor);
      if (cfg.compression.factor > 1) {
        lin = compress_high_bands(lin, cfg.compression.start, cfg.compression.factor);
      }
      out = stack_channels(lin, gcc_phat_all_pairs(spec, lin.bins()));
      break;
    }
    case FeatureKind::mel_spec_gcc: {
      const auto fb = make_mel_filterbank(cfg.mel_bands, spec.fft_size, spec.sample_rate);
      out = stack_channels(log_mel_spectrogram(spec, fb, cfg.log_floor),
                           gcc_phat_all_pairs(spec, cfg.mel_bands));
      break;
    }
  }
  out.meta.kind = kind;
  out.meta.format = format.kind;
  if (kind == FeatureKind::salsa) return out;
  out.meta.f_low = 0.0;
  out.meta.f_high = spec.sample_rate / 2.0;
  return out;
}

}  // namespace salsa
