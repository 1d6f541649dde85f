#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>
#include <vector>

#include "salsa/errors.hpp"
#include "salsa/geometry.hpp"
#include "salsa/labels.hpp"
#include "salsa/random.hpp"
#include "salsa/stft.hpp"
#include "salsa/tensor.hpp"
#include "salsa/transforms.hpp"

namespace salsa {

// FOA response (W, X, Y, Z) for a unit direction.
inline std::array<double, 4> foa_steering(const Vec3& u) { return {1.0, u[0], u[1], u[2]}; }

inline std::array<double, 4> foa_steering(double azimuth_deg, double elevation_deg) {
  return foa_steering(direction_from_angles(azimuth_deg, elevation_deg));
}

// Far-field response exp(-j 2 pi f d_1m / c) with d_1m = (zeta_1 - zeta_m) . u.
inline std::vector<cplx> mic_steering(double f_hz, const Vec3& u, const ArrayFormat& fmt) {
  require(fmt.kind == ArrayKind::mic, "mic_steering needs a MIC format");
  require(f_hz >= 0.0, "frequency must be non-negative");
  std::vector<cplx> h(fmt.mics.size());
  h[0] = cplx(1.0, 0.0);
  for (std::size_t m = 1; m < h.size(); ++m) {
    const double d = dot(fmt.mics[0] - fmt.mics[m], u);
    h[m] = std::polar(1.0, -2.0 * std::numbers::pi * f_hz * d / fmt.speed_of_sound);
  }
  return h;
}

inline std::vector<cplx> mic_steering(double f_hz, double azimuth_deg, double elevation_deg,
                                      const ArrayFormat& fmt) {
  return mic_steering(f_hz, direction_from_angles(azimuth_deg, elevation_deg), fmt);
}

enum class SignalKind { noise, harmonic, chirp };

struct SourceSignal {
  SignalKind kind = SignalKind::noise;
  double amplitude = 1.0;  // RMS magnitude per active STFT bin
  double f_lo = 100.0;     // noise band / chirp start, Hz
  double f_hi = 8000.0;    // noise band / chirp end, Hz
  double f0 = 440.0;       // harmonic fundamental, Hz
  std::size_t harmonics = 5;
};

struct TrajectoryPoint {
  double time_s = 0.0;
  double azimuth_deg = 0.0;
  double elevation_deg = 0.0;
};

struct ActiveInterval {
  double start_s = 0.0;
  double end_s = 0.0;
};

struct SceneSource {
  int class_id = 0;
  int track = 0;
  SourceSignal signal;
  std::vector<ActiveInterval> activity;
  std::vector<TrajectoryPoint> trajectory;
  std::uint64_t seed = 0;

  bool active_at(double time_s) const {
    for (const auto& iv : activity) {
      if (iv.start_s <= time_s && time_s < iv.end_s) return true;
    }
    return false;
  }
};

struct SceneDescription {
  ArrayFormat format;
  double duration_s = 1.0;
  StftConfig stft;
  double noise_power = 0.0;  // per-bin variance of each noise channel
  std::uint64_t seed = 0;
  // Rotation of the whole sound field (sources and noise), as an index into
  // transforms_for(format).
  int orientation = 0;
  std::size_t n_classes = 12;
  double label_rate = 10.0;
  std::vector<SceneSource> sources;

  void validate() const {
    format.validate();
    stft.validate();
    require(duration_s > 0.0, "scene duration must be positive");
    require(noise_power >= 0.0, "noise power must be non-negative");
    require(label_rate > 0.0, "label rate must be positive");
    require(static_cast<std::size_t>(std::llround(duration_s * stft.sample_rate)) >=
                stft.window_length,
            "scene is shorter than one STFT window");
    const auto n_tx = format.kind == ArrayKind::foa ? 16 : transforms_for(format).size();
    require(orientation >= 0 && static_cast<std::size_t>(orientation) < n_tx,
            "scene orientation out of range");
    for (const auto& s : sources) {
      require(s.class_id >= 0 && static_cast<std::size_t>(s.class_id) < n_classes,
              "source class out of range");
      require(!s.trajectory.empty(), "source needs at least one trajectory point");
      for (const auto& p : s.trajectory) {
        require(std::abs(p.elevation_deg) <= 90.0, "elevation must lie in [-90, 90]");
        require(p.azimuth_deg >= -180.0 && p.azimuth_deg < 180.0,
                "azimuth must lie in [-180, 180)");
      }
      for (std::size_t i = 1; i < s.trajectory.size(); ++i) {
        require(s.trajectory[i].time_s >= s.trajectory[i - 1].time_s,
                "trajectory times must be non-decreasing");
      }
      for (const auto& iv : s.activity) require(iv.end_s >= iv.start_s, "bad activity interval");
      require(s.signal.amplitude >= 0.0, "source amplitude must be non-negative");
    }
  }
};

inline double wrap_azimuth(double deg) {
  double a = std::fmod(deg + 180.0, 360.0);
  if (a < 0) a += 360.0;
  return a - 180.0;
}

// Piecewise-linear in (azimuth, elevation); azimuth takes the short way round.
inline Angles trajectory_at(const std::vector<TrajectoryPoint>& traj, double time_s) {
  if (time_s <= traj.front().time_s) return {traj.front().azimuth_deg, traj.front().elevation_deg};
  if (time_s >= traj.back().time_s) return {traj.back().azimuth_deg, traj.back().elevation_deg};
  for (std::size_t i = 1; i < traj.size(); ++i) {
    const auto& a = traj[i - 1];
    const auto& b = traj[i];
    if (time_s > b.time_s) continue;
    const double span = b.time_s - a.time_s;
    const double w = span > 0.0 ? (time_s - a.time_s) / span : 1.0;
    const double daz = wrap_azimuth(b.azimuth_deg - a.azimuth_deg);
    return {wrap_azimuth(a.azimuth_deg + w * daz),
            a.elevation_deg + w * (b.elevation_deg - a.elevation_deg)};
  }
  return {traj.back().azimuth_deg, traj.back().elevation_deg};
}

inline std::size_t scene_frame_count(const SceneDescription& scene) {
  const auto samples = static_cast<std::size_t>(std::llround(scene.duration_s * scene.stft.sample_rate));
  return frame_count(samples, scene.stft);
}

// Centre of STFT frame t in seconds.
inline double frame_centre_s(const StftConfig& cfg, std::size_t t) {
  return (static_cast<double>(t * cfg.hop_length) + 0.5 * static_cast<double>(cfg.window_length)) /
         cfg.sample_rate;
}

// Mono STFT S(t, f) of one source, T x F, already gated by its activity.
inline Tensor3<cplx> source_stft(const SceneSource& src, const SceneDescription& scene) {
  const std::size_t T = scene_frame_count(scene), F = scene.stft.bins();
  const double bin_hz = scene.stft.sample_rate / static_cast<double>(scene.stft.fft_size);
  const double hop_s = static_cast<double>(scene.stft.hop_length) / scene.stft.sample_rate;
  const double nyquist = scene.stft.sample_rate / 2.0;
  const auto& sig = src.signal;
  Tensor3<cplx> s(1, T, F);
  Rng rng(mix_seed(src.seed, 1));
  const double two_pi = 2.0 * std::numbers::pi;

  switch (sig.kind) {
    case SignalKind::noise: {
      const double g = sig.amplitude / std::sqrt(2.0);
      for (std::size_t t = 0; t < T; ++t) {
        for (std::size_t f = 0; f < F; ++f) {
          const double hz = static_cast<double>(f) * bin_hz;
          if (hz < sig.f_lo || hz > sig.f_hi) continue;
          const double re = rng.normal(), im = rng.normal();
          s(0, t, f) = cplx(g * re, g * im);
        }
      }
      break;
    }
    case SignalKind::harmonic: {
      for (std::size_t h = 1; h <= sig.harmonics; ++h) {
        const double fh = sig.f0 * static_cast<double>(h);
        if (fh >= nyquist) break;
        const auto k = static_cast<std::size_t>(std::lround(fh / bin_hz));
        const double phase0 = two_pi * rng.uniform();
        for (std::size_t t = 0; t < T; ++t) {
          s(0, t, k) += std::polar(sig.amplitude, phase0 + two_pi * fh * hop_s * static_cast<double>(t));
        }
      }
      break;
    }
    case SignalKind::chirp: {
      double phase = two_pi * rng.uniform();
      for (std::size_t t = 0; t < T; ++t) {
        const double w = T > 1 ? static_cast<double>(t) / static_cast<double>(T - 1) : 0.0;
        const double hz = std::clamp(sig.f_lo + w * (sig.f_hi - sig.f_lo), 0.0, nyquist);
        const auto k = static_cast<std::size_t>(std::lround(hz / bin_hz));
        s(0, t, std::min(k, F - 1)) = std::polar(sig.amplitude, phase);
        phase += two_pi * hz * hop_s;
      }
      break;
    }
  }
  for (std::size_t t = 0; t < T; ++t) {
    if (src.active_at(frame_centre_s(scene.stft, t))) continue;
    for (std::size_t f = 0; f < F; ++f) s(0, t, f) = 0.0;
  }
  return s;
}

// Class-wise labels sampled at the centre of each label frame.
inline SeldLabels render_labels(const SceneDescription& scene) {
  const auto orient = transforms_for(scene.format).at(static_cast<std::size_t>(scene.orientation));
  SeldLabels labels;
  labels.n_classes = scene.n_classes;
  labels.frame_rate = scene.label_rate;
  const auto n = static_cast<std::size_t>(std::floor(scene.duration_s * scene.label_rate + 1e-9));
  labels.frames.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double centre = (static_cast<double>(i) + 0.5) / scene.label_rate;
    for (const auto& src : scene.sources) {
      if (!src.active_at(centre)) continue;
      const auto a = trajectory_at(src.trajectory, centre);
      labels.frames[i].push_back(
          {src.class_id, src.track, orient.apply(direction_from_angles(a.azimuth_deg, a.elevation_deg))});
    }
  }
  return labels;
}

// Renders X(t, f) = sum_i S_i(t, f) H(f, DOA_i(t)) + V(t, f) directly in the
// STFT domain, plus the matching labels.
inline std::pair<ComplexSpectrogram, SeldLabels> render_scene(const SceneDescription& scene) {
  scene.validate();
  const std::size_t M = scene.format.channels();
  const std::size_t T = scene_frame_count(scene), F = scene.stft.bins();
  const auto orient = transforms_for(scene.format).at(static_cast<std::size_t>(scene.orientation));

  ComplexSpectrogram spec;
  spec.data = Tensor3<cplx>(M, T, F);
  spec.sample_rate = scene.stft.sample_rate;
  spec.fft_size = scene.stft.fft_size;
  spec.hop_length = scene.stft.hop_length;
  const double bin_hz = spec.bin_hz();

  for (const auto& src : scene.sources) {
    const auto s = source_stft(src, scene);
    for (std::size_t t = 0; t < T; ++t) {
      const auto a = trajectory_at(src.trajectory, frame_centre_s(scene.stft, t));
      const Vec3 u = orient.apply(direction_from_angles(a.azimuth_deg, a.elevation_deg));
      if (scene.format.kind == ArrayKind::foa) {
        const auto h = foa_steering(u);
        for (std::size_t f = 0; f < F; ++f) {
          const cplx v = s(0, t, f);
          if (v == cplx{}) continue;
          for (std::size_t c = 0; c < 4; ++c) spec.data(c, t, f) += v * h[c];
        }
      } else {
        for (std::size_t f = 0; f < F; ++f) {
          const cplx v = s(0, t, f);
          if (v == cplx{}) continue;
          const double f_hz = static_cast<double>(f) * bin_hz;
          const auto h = mic_steering(f_hz, u, scene.format);
          // S_i is the signal at the array origin, so mic 1 sees it advanced
          // by zeta_1 . u; otherwise the reference would move with the field.
          const cplx at_ref = std::polar(
              1.0, 2.0 * std::numbers::pi * f_hz * dot(scene.format.mics[0], u) / scene.format.speed_of_sound);
          for (std::size_t c = 0; c < M; ++c) spec.data(c, t, f) += v * at_ref * h[c];
        }
      }
    }
  }

  if (scene.noise_power > 0.0) {
    Rng rng(mix_seed(scene.seed, 0x6e6f697365ULL));
    const double g = std::sqrt(scene.noise_power / 2.0);
    std::vector<cplx> v(M), rotated(M);
    for (std::size_t t = 0; t < T; ++t) {
      for (std::size_t f = 0; f < F; ++f) {
        for (auto& x : v) {
          const double re = rng.normal(), im = rng.normal();
          x = cplx(g * re, g * im);
        }
        if (scene.format.kind == ArrayKind::foa) {
          // The noise field turns with the scene: (X, Y, Z) -> g (X, Y, Z).
          const Vec3 re = orient.apply(Vec3{v[1].real(), v[2].real(), v[3].real()});
          const Vec3 im = orient.apply(Vec3{v[1].imag(), v[2].imag(), v[3].imag()});
          rotated[0] = v[0];
          for (std::size_t i = 0; i < 3; ++i) rotated[i + 1] = cplx(re[i], im[i]);
        } else {
          for (std::size_t m = 0; m < M; ++m) rotated[m] = v[orient.perm[m]];
        }
        for (std::size_t c = 0; c < M; ++c) spec.data(c, t, f) += rotated[c];
      }
    }
  }
  return {std::move(spec), render_labels(scene)};
}

// The same scene with the whole sound field turned by tx.
inline SceneDescription transform_scene(const SceneDescription& scene, const SpatialTransform& tx) {
  const auto table = transforms_for(scene.format);
  SceneDescription out = scene;
  out.orientation = compose(tx, table.at(static_cast<std::size_t>(scene.orientation)), table).id;
  return out;
}

}  // namespace salsa
