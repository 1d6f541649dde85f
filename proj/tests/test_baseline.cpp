#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "scenes.hpp"
#include "salsa/baseline.hpp"
#include "salsa/synth.hpp"

using namespace salsa;

namespace {

ComplexSpectrogram foa_plane_wave(double az, double el, std::size_t T = 4, std::size_t F = 9) {
  ComplexSpectrogram s;
  s.data = Tensor3<cplx>(4, T, F);
  const auto h = foa_steering(az, el);
  Rng rng(1);
  for (std::size_t t = 0; t < T; ++t)
    for (std::size_t f = 0; f < F; ++f) {
      const cplx v(rng.normal(), rng.normal());
      for (std::size_t c = 0; c < 4; ++c) s.data(c, t, f) = v * h[c];
    }
  return s;
}

AudioClip delayed_pair(std::size_t n, int delay, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> base(n + 64);
  for (auto& x : base) x = rng.normal();
  AudioClip clip;
  clip.channels.assign(2, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    clip.channels[0][i] = base[i + 32];
    clip.channels[1][i] = base[i + 32 - delay];
  }
  return clip;
}

}  // namespace

TEST(IntensityVector, PlaneWaveAlongX) {
  const auto iv = intensity_vector(foa_plane_wave(0, 0));
  for (std::size_t t = 0; t < iv.frames(); ++t)
    for (std::size_t f = 0; f < iv.bins(); ++f) {
      EXPECT_NEAR(iv.data(0, t, f), 1.0, 1e-12);
      EXPECT_NEAR(iv.data(1, t, f), 0.0, 1e-12);
      EXPECT_NEAR(iv.data(2, t, f), 0.0, 1e-12);
    }
}

TEST(IntensityVector, OmniOnlyIsZeroAndNormsAreUnitOrZero) {
  ComplexSpectrogram s;
  s.data = Tensor3<cplx>(4, 3, 5);
  for (std::size_t t = 0; t < 3; ++t)
    for (std::size_t f = 0; f < 5; ++f) s.data(0, t, f) = cplx(1.0, 2.0);
  {
    const auto out = intensity_vector(s);
    for (double v : out.data.values()) EXPECT_EQ(v, 0.0);
  }

  const auto iv = intensity_vector(foa_plane_wave(-120, 33, 6, 20));
  const auto u = direction_from_angles(-120, 33);
  for (std::size_t t = 0; t < 6; ++t)
    for (std::size_t f = 0; f < 20; ++f) {
      const Vec3 v{iv.data(0, t, f), iv.data(1, t, f), iv.data(2, t, f)};
      EXPECT_NEAR(norm(v), 1.0, 1e-12);
      EXPECT_LT(angular_distance_deg(v, u), 1e-6);
    }
  s.data = Tensor3<cplx>(3, 3, 5);
  EXPECT_THROW(intensity_vector(s), ValidationError);
}

namespace {

// Angles between the per-bin IV and the EIV at selected bins of frames where
// the source itself is active.
std::vector<double> iv_eiv_angles(double noise_power, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> out;
  for (int trial = 0; trial < 5; ++trial) {
    const auto d = fixtures::random_direction(rng);
    const auto sc = fixtures::scene(ArrayFormat::foa(), 1.5, noise_power, 40 + trial,
                                    {fixtures::noise_source(0, d.azimuth_deg, d.elevation_deg, 0.3, 1.4, 50 + trial)});
    const auto [spec, labels] = render_scene(sc);
    const auto res = salsa_detailed(spec, ArrayFormat::foa(), {}, CompressionConfig{192, 1});
    const auto iv = intensity_vector(spec);
    for (std::size_t t = 0; t < spec.frames(); ++t) {
      // Frames next to an onset can be coherent through the covariance
      // window while holding only noise themselves.
      if (!sc.sources[0].active_at(frame_centre_s(sc.stft, t))) continue;
      for (std::size_t f = 0; f < spec.bins(); ++f) {
        if (!res.selected(t, f)) continue;
        const Vec3 a{iv.data(0, t, f), iv.data(1, t, f), iv.data(2, t, f)};
        const Vec3 b{res.features.data(4, t, f), res.features.data(5, t, f), res.features.data(6, t, f)};
        out.push_back(angular_distance_deg(a, b));
      }
    }
  }
  return out;
}

}  // namespace

TEST(IntensityVector, AgreesWithEivAtSelectedBinsNoiseFree) {
  const auto angles = iv_eiv_angles(0.0, 12);
  ASSERT_GT(angles.size(), 1000u);
  for (double a : angles) ASSERT_LT(a, 2.0);
}

// With noise the single-frame IV degrades where the source happens to be
// weak in one frame, while the 7-frame EIV does not.
TEST(IntensityVector, MostlyAgreesWithEivUnderNoise) {
  auto angles = iv_eiv_angles(1e-4, 13);
  ASSERT_GT(angles.size(), 1000u);
  std::sort(angles.begin(), angles.end());
  const double within = double(std::lower_bound(angles.begin(), angles.end(), 2.0) - angles.begin()) / angles.size();
  RecordProperty("fraction_within_2deg", std::to_string(within));
  EXPECT_GE(within, 0.90);
  EXPECT_LT(angles[angles.size() / 2], 1.0);
}

TEST(MelIv, UnitNormAndZero) {
  const auto fb = make_mel_filterbank(128, 512, 24000.0);
  const auto iv = intensity_vector(foa_plane_wave(50, -10, 3, 257));
  const auto mel = mel_project_iv(iv, fb);
  ASSERT_EQ(mel.bins(), 128u);
  EXPECT_EQ(mel.meta.scale, FrequencyScale::mel);
  for (std::size_t t = 0; t < 3; ++t)
    for (std::size_t k = 0; k < 128; ++k) {
      EXPECT_NEAR(norm(Vec3{mel.data(0, t, k), mel.data(1, t, k), mel.data(2, t, k)}), 1.0, 1e-12);
    }
  FeatureTensor zero = iv;
  for (auto& v : zero.data.values()) v = 0.0;
  {
    const auto out = mel_project_iv(zero, fb);
    for (double v : out.data.values()) EXPECT_EQ(v, 0.0);
  }
}

TEST(MelIv, TwoSourcesInOneFilterMix) {
  const auto fb = make_mel_filterbank(128, 512, 24000.0);
  // Find a filter covering two bins with non-zero weight.
  std::size_t k = 120, f1 = 0, f2 = 0;
  for (std::size_t f = 0; f < 257; ++f) {
    if (fb.weight(f, k) > 0.05) {
      if (!f1) f1 = f;
      else f2 = f;
    }
  }
  ASSERT_GT(f2, f1);
  FeatureTensor iv;
  iv.data = Tensor3<double>(3, 1, 257);
  iv.roles.assign(3, ChannelRole::spatial);
  const auto a = direction_from_angles(10, 0), b = direction_from_angles(100, 30);
  for (int c = 0; c < 3; ++c) {
    iv.data(c, 0, f1) = a[c];
    iv.data(c, 0, f2) = b[c];
  }
  const auto mel = mel_project_iv(iv, fb);
  Vec3 mix{};
  for (int c = 0; c < 3; ++c) mix[c] = fb.weight(f1, k) * a[c] + fb.weight(f2, k) * b[c];
  const double n = norm(mix);
  for (int c = 0; c < 3; ++c) EXPECT_NEAR(mel.data(c, 0, k), mix[c] / n, 1e-12);
  // Neither source direction survives.
  const Vec3 got{mel.data(0, 0, k), mel.data(1, 0, k), mel.data(2, 0, k)};
  EXPECT_GT(angular_distance_deg(got, a), 5.0);
  EXPECT_GT(angular_distance_deg(got, b), 5.0);
}

TEST(Gcc, LagIndexing) {
  EXPECT_EQ(gcc_lag_at(0, 200), -99);
  EXPECT_EQ(gcc_lag_at(199, 200), 100);
  EXPECT_EQ(gcc_index_of(0, 200), 99u);
  for (std::size_t q = 0; q < 128; ++q) EXPECT_EQ(gcc_index_of(gcc_lag_at(q, 128), 128), q);
}

TEST(Gcc, IdenticalChannelsPeakAtZero) {
  const auto clip = delayed_pair(4000, 0, 3);
  const auto spec = stft(clip, StftConfig{});
  const auto g = gcc_phat(spec, 0, 1, 200);
  for (std::size_t t = 0; t < spec.frames(); ++t) {
    EXPECT_NEAR(g(0, t, gcc_index_of(0, 200)), 1.0, 1e-9);
  }
}

TEST(Gcc, DelayedChannelPeaksAtPlusFiveLikeTimeDomainXcorr) {
  const auto clip = delayed_pair(6000, 5, 4);
  const auto spec = stft(clip, StftConfig{});
  const auto g = gcc_phat(spec, 0, 1, 200);
  const auto r = oracle::xcorr(clip.channels[0], clip.channels[1], 20);
  const int oracle_lag = int(std::max_element(r.begin(), r.end()) - r.begin()) - 20;
  EXPECT_EQ(oracle_lag, 5);
  for (std::size_t t = 0; t < spec.frames(); ++t) {
    const auto row = g.row(0, t);
    const auto q = std::size_t(std::max_element(row.begin(), row.end()) - row.begin());
    EXPECT_EQ(gcc_lag_at(q, 200), 5);
  }
}

TEST(Gcc, BoundedAndAntisymmetric) {
  Rng rng(8);
  ComplexSpectrogram s;
  s.data = Tensor3<cplx>(3, 6, 257);
  for (auto& x : s.data.values()) x = cplx(rng.normal(), rng.normal());
  const auto a = gcc_phat(s, 0, 2, 128), b = gcc_phat(s, 2, 0, 128);
  for (std::size_t t = 0; t < 6; ++t)
    for (int lag = -63; lag <= 63; ++lag) {
      EXPECT_NEAR(a(0, t, gcc_index_of(lag, 128)), b(0, t, gcc_index_of(-lag, 128)), 1e-10);
    }
  for (double v : a.values()) {
    EXPECT_LE(v, 1.0 + 1e-12);
    EXPECT_GE(v, -1.0 - 1e-12);
  }
  EXPECT_THROW(gcc_phat(s, 1, 1, 128), ValidationError);
  EXPECT_THROW(gcc_phat(s, 0, 1, 127), ValidationError);
}

TEST(Gcc, IndependentNoiseHasNoDominantPeak) {
  Rng rng(99);
  AudioClip clip;
  clip.channels.assign(2, std::vector<double>(24000));
  for (auto& ch : clip.channels)
    for (auto& x : ch) x = rng.normal();
  const auto spec = stft(clip, StftConfig{});
  const auto g = gcc_phat(spec, 0, 1, 200);
  for (double v : g.values()) EXPECT_LE(std::abs(v), 0.3);
}

TEST(Gcc, SilentBinsGetZeroPhase) {
  ComplexSpectrogram s;
  s.data = Tensor3<cplx>(2, 1, 257);
  const auto g = gcc_phat(s, 0, 1, 200);
  EXPECT_NEAR(g(0, 0, gcc_index_of(0, 200)), 1.0, 1e-12);
}

TEST(Gcc, RenderedSourceLagMatchesGeometry) {
  const auto fmt = ArrayFormat::tetrahedral();
  Rng rng(31);
  int checked = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto d = fixtures::random_direction(rng);
    const auto sc = fixtures::scene(fmt, 0.5, 0.0, 1, {fixtures::noise_source(0, d.azimuth_deg, d.elevation_deg, 0.0, 1.0, 60 + trial, 1.0, 50, 11900)});
    const auto [spec, labels] = render_scene(sc);
    const auto u = direction_from_angles(d.azimuth_deg, d.elevation_deg);
    for (auto [i, j] : channel_pairs(4)) {
      const double exact = 24000.0 * dot(fmt.mics[i] - fmt.mics[j], u) / kSpeedOfSound;
      if (std::abs(std::abs(exact - std::floor(exact)) - 0.5) < 0.15) continue;  // ambiguous rounding
      const auto g = gcc_phat(spec, i, j, 200);
      const auto row = g.row(0, spec.frames() / 2);
      const auto q = std::size_t(std::max_element(row.begin(), row.end()) - row.begin());
      EXPECT_EQ(gcc_lag_at(q, 200), int(std::lround(exact))) << i << j;
      ++checked;
    }
  }
  EXPECT_GT(checked, 40);
}

TEST(Assemble, ChannelCountsAndAxes) {
  const auto foa = fixtures::scene(ArrayFormat::foa(), 1.0, 1e-3, 2, {fixtures::noise_source(0, 10, 10, 0.2, 0.9, 5)});
  const auto mic = fixtures::scene(ArrayFormat::tetrahedral(), 1.0, 1e-3, 2, {fixtures::noise_source(0, 10, 10, 0.2, 0.9, 5)});
  const auto [sf, lf] = render_scene(foa);
  const auto [sm, lm] = render_scene(mic);
  struct Case {
    FeatureKind kind;
    const ComplexSpectrogram* spec;
    const ArrayFormat fmt;
    std::size_t channels, bins;
  };
  const Case cases[] = {
      {FeatureKind::mel_spec_iv, &sf, ArrayFormat::foa(), 7, 128},
      {FeatureKind::lin_spec_iv, &sf, ArrayFormat::foa(), 7, 200},
      {FeatureKind::mel_spec_gcc, &sm, ArrayFormat::tetrahedral(), 10, 128},
      {FeatureKind::lin_spec_gcc, &sm, ArrayFormat::tetrahedral(), 10, 200},
      {FeatureKind::salsa, &sf, ArrayFormat::foa(), 7, 200},
      {FeatureKind::salsa, &sm, ArrayFormat::tetrahedral(), 7, 200},
  };
  for (const auto& c : cases) {
    FeatureConfig cfg;
    cfg.selection = BinSelectionConfig::for_format(c.fmt.kind);
    const auto f = assemble(c.kind, *c.spec, c.fmt, cfg);
    EXPECT_EQ(f.channels(), c.channels) << to_string(c.kind);
    EXPECT_EQ(f.bins(), c.bins) << to_string(c.kind);
    EXPECT_EQ(f.frames(), c.spec->frames());
    EXPECT_EQ(f.meta.kind, c.kind);
    EXPECT_EQ(f.roles.size(), f.channels());
    for (double v : f.data.values()) ASSERT_TRUE(std::isfinite(v));
  }
  EXPECT_THROW(assemble(FeatureKind::lin_spec_iv, sm, ArrayFormat::tetrahedral()), ValidationError);
  EXPECT_THROW(assemble(FeatureKind::mel_spec_gcc, sf, ArrayFormat::foa()), ValidationError);
}
