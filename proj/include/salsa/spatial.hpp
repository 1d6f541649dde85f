#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "salsa/errors.hpp"
#include "salsa/geometry.hpp"
#include "salsa/stft.hpp"
#include "salsa/tensor.hpp"

namespace salsa {

// Upper bound on array channels; keeps per-bin matrices on the stack.
inline constexpr std::size_t kMaxChannels = 8;

using CMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor,
                              kMaxChannels, kMaxChannels>;
using CVector = Eigen::Matrix<cplx, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxChannels, 1>;
using RVector = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxChannels, 1>;

struct CovarianceEstimate {
  CMatrix matrix;
  std::size_t frame = 0;
  std::size_t bin = 0;
  std::size_t half_window = 3;
  std::size_t frames_used = 0;
};

// Mean of X(t+tau, f) X(t+tau, f)^H over tau in [-half_window, half_window].
// Frames outside the clip are skipped and the divisor is the number of
// frames actually summed.
inline CovarianceEstimate local_covariance(const ComplexSpectrogram& spec, std::size_t t,
                                           std::size_t f, std::size_t half_window = 3) {
  require(t < spec.frames() && f < spec.bins(), "bin index out of range");
  const auto m = static_cast<Eigen::Index>(spec.channels());
  require(spec.channels() <= kMaxChannels, "too many channels for covariance estimation");
  CovarianceEstimate est;
  est.frame = t;
  est.bin = f;
  est.half_window = half_window;
  est.matrix = CMatrix::Zero(m, m);
  const std::size_t lo = t >= half_window ? t - half_window : 0;
  const std::size_t hi = std::min(spec.frames() - 1, t + half_window);
  CVector x(m);
  for (std::size_t u = lo; u <= hi; ++u) {
    for (Eigen::Index c = 0; c < m; ++c) x(c) = spec.data(static_cast<std::size_t>(c), u, f);
    est.matrix.noalias() += x * x.adjoint();
  }
  est.frames_used = hi - lo + 1;
  est.matrix /= static_cast<double>(est.frames_used);
  return est;
}

// Principal eigenvector and descending eigenvalues of a Hermitian PSD matrix
// (equal to its singular values).
struct EigenSummary {
  CVector principal;
  RVector singular_values;
  bool degenerate = false;

  double sigma(std::size_t i) const { return singular_values(static_cast<Eigen::Index>(i)); }
};

// Rotates v so its first component with magnitude >= 1e-12 is real and positive.
inline void fix_phase(CVector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double mag = std::abs(v(i));
    if (mag >= 1e-12) {
      v *= std::conj(v(i)) / mag;
      v(i) = cplx(mag, 0.0);
      return;
    }
  }
}

class EigenSummarizer {
 public:
  EigenSummary operator()(const CMatrix& r) {
    require(r.rows() == r.cols() && r.rows() >= 1, "covariance must be square");
    const Eigen::Index m = r.rows();
    EigenSummary out;
    out.singular_values = RVector::Zero(m);
    out.principal = CVector::Zero(m);
    if (!r.allFinite()) throw NumericalError("non-finite covariance matrix");
    if (r.cwiseAbs2().sum() == 0.0) {
      out.degenerate = true;
      out.principal(0) = 1.0;
      return out;
    }
    solver_.compute(r, Eigen::ComputeEigenvectors);
    if (solver_.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
    // Eigen returns ascending eigenvalues; PSD rounding can leave tiny negatives.
    for (Eigen::Index i = 0; i < m; ++i) {
      out.singular_values(i) = std::max(0.0, solver_.eigenvalues()(m - 1 - i));
    }
    out.principal = solver_.eigenvectors().col(m - 1);
    out.principal.normalize();
    fix_phase(out.principal);
    out.degenerate = out.singular_values(0) <= 0.0;
    return out;
  }

 private:
  Eigen::SelfAdjointEigenSolver<CMatrix> solver_;
};

inline EigenSummary eigen_summary(const CMatrix& r) { return EigenSummarizer{}(r); }
inline EigenSummary eigen_summary(const CovarianceEstimate& cov) { return eigen_summary(cov.matrix); }

inline constexpr double kDrrEpsilon = 1e-12;

// Source-dominance ratio sigma_1 / sigma_2.
inline double drr(const EigenSummary& s, double eps = kDrrEpsilon) {
  require(s.singular_values.size() >= 2, "DRR needs at least two singular values");
  return s.sigma(0) / (s.sigma(1) + eps);
}

struct NoiseFloorParams {
  std::size_t init_frames = 5;
  double up = 0.05;
  double down = 0.002;
  double min_floor = 1e-12;

  void validate() const {
    require(init_frames >= 1, "noise floor needs at least one init frame");
    require(up >= 0.0 && down >= 0.0 && down < 1.0, "noise floor rates out of range");
  }
};

// Adaptive floor for one bin's magnitude series. The first init_frames
// entries hold their mean; afterwards the floor is raised by (1 + up) when
// the magnitude exceeds it and lowered by (1 - down) otherwise.
inline std::vector<double> track_noise_floor(std::span<const double> magnitude,
                                             const NoiseFloorParams& p = {}) {
  p.validate();
  require(magnitude.size() >= p.init_frames, "series shorter than the noise-floor init window");
  std::vector<double> eta(magnitude.size());
  double init = 0.0;
  for (std::size_t t = 0; t < p.init_frames; ++t) init += magnitude[t];
  init = std::max(init / static_cast<double>(p.init_frames), p.min_floor);
  std::fill(eta.begin(), eta.begin() + static_cast<std::ptrdiff_t>(p.init_frames), init);
  for (std::size_t t = p.init_frames; t < magnitude.size(); ++t) {
    const double prev = eta[t - 1];
    eta[t] = std::max(p.min_floor, magnitude[t] > prev ? prev * (1.0 + p.up) : prev * (1.0 - p.down));
  }
  return eta;
}

// Noise floor of every bin of the reference channel, as a 1 x T x F tensor.
inline Tensor3<double> noise_floor(const ComplexSpectrogram& spec, const NoiseFloorParams& p = {}) {
  Tensor3<double> out(1, spec.frames(), spec.bins());
  std::vector<double> series(spec.frames());
  for (std::size_t f = 0; f < spec.bins(); ++f) {
    for (std::size_t t = 0; t < spec.frames(); ++t) series[t] = std::abs(spec.data(0, t, f));
    const auto eta = track_noise_floor(series, p);
    for (std::size_t t = 0; t < spec.frames(); ++t) out(0, t, f) = eta[t];
  }
  return out;
}

// Centred 3-frame RMS of |X_1| compared against alpha * eta.
inline BinMask magnitude_test(const ComplexSpectrogram& spec, const Tensor3<double>& floor,
                              double alpha_snr = 1.5) {
  require(floor.frames() == spec.frames() && floor.bins() == spec.bins(),
          "noise floor shape does not match spectrogram");
  const std::size_t T = spec.frames(), F = spec.bins();
  BinMask mask(T, F);
  for (std::size_t t = 0; t < T; ++t) {
    const std::size_t lo = t == 0 ? 0 : t - 1;
    const std::size_t hi = std::min(T - 1, t + 1);
    for (std::size_t f = 0; f < F; ++f) {
      double acc = 0.0;
      for (std::size_t u = lo; u <= hi; ++u) acc += std::norm(spec.data(0, u, f));
      const double rms = std::sqrt(acc / static_cast<double>(hi - lo + 1));
      mask.set(t, f, rms > alpha_snr * floor(0, t, f));
    }
  }
  return mask;
}

inline BinMask passband_mask(std::size_t frames, std::size_t bins, double bin_hz, double f_low,
                             double f_high) {
  BinMask mask(frames, bins);
  for (std::size_t f = 0; f < bins; ++f) {
    const double hz = static_cast<double>(f) * bin_hz;
    if (hz < f_low || hz > f_high) continue;
    for (std::size_t t = 0; t < frames; ++t) mask.set(t, f, true);
  }
  return mask;
}

// Eigenvector-based intensity vector: Re(U[1:] / U[0]) scaled to unit norm.
// Unreliable bins give the zero vector.
inline Vec3 eiv(const EigenSummary& s) {
  require(s.principal.size() == 4, "EIV needs a 4-channel FOA eigenvector");
  const cplx u0 = s.principal(0);
  if (s.degenerate || std::abs(u0) < 1e-12) return {0.0, 0.0, 0.0};
  Vec3 v{(s.principal(1) / u0).real(), (s.principal(2) / u0).real(),
         (s.principal(3) / u0).real()};
  const double n = norm(v);
  if (!(n >= 1e-9)) return {0.0, 0.0, 0.0};
  return {v[0] / n, v[1] / n, v[2] / n};
}

// Eigenvector-based phase vector in metres: -c * angle(U[m] / U[0]) / (2 pi f)
// for m = 1..M-1, i.e. the relative distance of arrival to microphone 1.
inline std::vector<double> epv(const EigenSummary& s, double f_hz, double c = kSpeedOfSound) {
  const auto m = static_cast<std::size_t>(s.principal.size());
  require(m >= 2, "EPV needs at least two channels");
  std::vector<double> out(m - 1, 0.0);
  const cplx u0 = s.principal(0);
  if (!(f_hz > 0.0) || s.degenerate || std::abs(u0) < 1e-12) return out;
  const double scale = -c / (2.0 * std::numbers::pi * f_hz);
  for (std::size_t i = 1; i < m; ++i) {
    out[i - 1] = scale * std::arg(s.principal(static_cast<Eigen::Index>(i)) / u0);
  }
  return out;
}

struct BinSelectionConfig {
  double alpha_snr = 1.5;
  double beta_drr = 5.0;
  double f_low = 50.0;
  double f_high = 9000.0;
  std::size_t half_window = 3;
  NoiseFloorParams noise;

  static BinSelectionConfig for_format(ArrayKind kind) {
    BinSelectionConfig cfg;
    cfg.f_high = kind == ArrayKind::foa ? 9000.0 : 4000.0;
    return cfg;
  }

  void validate() const {
    require(alpha_snr > 1.0, "alpha_snr must exceed 1");
    require(beta_drr >= 1.0, "beta_drr must be at least 1");
    require(0.0 <= f_low && f_low < f_high, "need 0 <= f_low < f_high");
    noise.validate();
  }
};

struct CompressionConfig {
  std::size_t start = kDefaultCompressStart;
  std::size_t factor = kDefaultCompressFactor;  // 1 disables compression
};

struct SalsaResult {
  FeatureTensor features;
  BinMask passband;
  BinMask magnitude;
  // Evaluated only inside passband AND magnitude; false elsewhere.
  BinMask coherence;
  BinMask selected;
};

// Log-linear spectrograms stacked with EIV (FOA) or EPV (MIC) channels that
// are non-zero only at selected single-source bins, then band-compressed.
inline SalsaResult salsa_detailed(const ComplexSpectrogram& spec, const ArrayFormat& format,
                                  const BinSelectionConfig& cfg = {},
                                  const CompressionConfig& compression = {},
                                  double log_floor = kDefaultLogFloor) {
  format.validate();
  format.check_channels(spec.channels());
  cfg.validate();
  require(spec.channels() <= kMaxChannels, "too many channels");

  const std::size_t M = spec.channels(), T = spec.frames(), F = spec.bins();
  SalsaResult res;
  const auto eta = noise_floor(spec, cfg.noise);
  res.magnitude = magnitude_test(spec, eta, cfg.alpha_snr);
  res.passband = passband_mask(T, F, spec.bin_hz(), cfg.f_low, cfg.f_high);
  res.coherence = BinMask(T, F);

  FeatureTensor spatial;
  spatial.data = Tensor3<double>(M - 1, T, F, 0.0);
  spatial.roles.assign(M - 1, ChannelRole::spatial);

  EigenSummarizer summarize;
  const auto m = static_cast<Eigen::Index>(M);
  std::vector<CVector> column(T, CVector::Zero(m));
  CMatrix cov(m, m);
  for (std::size_t f = 0; f < F; ++f) {
    if (T == 0 || !res.passband(0, f)) continue;
    const double f_hz = static_cast<double>(f) * spec.bin_hz();
    for (std::size_t t = 0; t < T; ++t) {
      for (std::size_t c = 0; c < M; ++c) column[t](static_cast<Eigen::Index>(c)) = spec.data(c, t, f);
    }
    for (std::size_t t = 0; t < T; ++t) {
      if (!res.magnitude(t, f)) continue;
      const std::size_t lo = t >= cfg.half_window ? t - cfg.half_window : 0;
      const std::size_t hi = std::min(T - 1, t + cfg.half_window);
      cov.setZero();
      for (std::size_t u = lo; u <= hi; ++u) cov.noalias() += column[u] * column[u].adjoint();
      cov /= static_cast<double>(hi - lo + 1);
      const auto summary = summarize(cov);
      if (!(drr(summary) > cfg.beta_drr)) continue;
      res.coherence.set(t, f, true);
      if (format.kind == ArrayKind::foa) {
        const auto v = eiv(summary);
        for (std::size_t i = 0; i < 3; ++i) spatial.data(i, t, f) = v[i];
      } else {
        const auto v = epv(summary, f_hz, format.speed_of_sound);
        for (std::size_t i = 0; i + 1 < M; ++i) spatial.data(i, t, f) = v[i];
      }
    }
  }
  res.selected = res.passband & res.magnitude & res.coherence;

  auto stacked = stack_channels(log_linear_spectrogram(spec, log_floor), spatial);
  stacked.meta.kind = FeatureKind::salsa;
  stacked.meta.format = format.kind;
  stacked.meta.f_low = cfg.f_low;
  stacked.meta.f_high = cfg.f_high;
  res.features = compression.factor > 1
                     ? compress_high_bands(stacked, compression.start, compression.factor)
                     : std::move(stacked);
  return res;
}

inline FeatureTensor salsa(const ComplexSpectrogram& spec, const ArrayFormat& format,
                           const BinSelectionConfig& cfg = {},
                           const CompressionConfig& compression = {},
                           double log_floor = kDefaultLogFloor) {
  return salsa_detailed(spec, format, cfg, compression, log_floor).features;
}

}  // namespace salsa
