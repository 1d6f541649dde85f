#include <gtest/gtest.h>

#include "oracles.hpp"
#include "scenes.hpp"
#include "salsa/baseline.hpp"
#include "salsa/normalize.hpp"
#include "salsa/random.hpp"

using namespace salsa;

namespace {

FeatureTensor tensor(FeatureKind kind, std::size_t C, std::size_t T, std::size_t F, std::uint64_t seed,
                     double mean = 0.0, double scale = 1.0) {
  FeatureTensor f;
  f.data = Tensor3<double>(C, T, F);
  f.roles.assign(C, ChannelRole::spectrogram);
  if (kind == FeatureKind::salsa)
    for (std::size_t c = 4; c < C; ++c) f.roles[c] = ChannelRole::spatial;
  f.meta.kind = kind;
  Rng rng(seed);
  for (auto& v : f.data.values()) v = mean + scale * rng.normal();
  return f;
}

}  // namespace

TEST(Stats, ConstantChannelHasZeroStdAndStaysFinite) {
  FeatureTensor f;
  f.data = Tensor3<double>(1, 4, 5, 3.0);
  f.roles = {ChannelRole::spectrogram};
  f.meta.kind = FeatureKind::lin_spec_iv;
  const std::vector<FeatureTensor> corpus{f};
  const auto s = compute_stats(corpus);
  EXPECT_EQ(s.mean[0], 3.0);
  EXPECT_EQ(s.std[0], 0.0);
  EXPECT_TRUE(s.dead(0));
  const auto n = apply_stats(f, s, FeatureKind::lin_spec_iv);
  for (double v : n.data.values()) EXPECT_EQ(v, 0.0);
}

TEST(Stats, TwoValueExample) {
  FeatureTensor a, b;
  a.data = Tensor3<double>(1, 1, 1, 0.0);
  b.data = Tensor3<double>(1, 1, 1, 2.0);
  a.roles = b.roles = {ChannelRole::spectrogram};
  const std::vector<FeatureTensor> corpus{a, b};
  const auto s = compute_stats(corpus);
  EXPECT_DOUBLE_EQ(s.mean[0], 1.0);
  EXPECT_DOUBLE_EQ(s.std[0], 1.0);
}

TEST(Stats, MatchesTwoPassOracle) {
  std::vector<FeatureTensor> corpus;
  for (int i = 0; i < 6; ++i) corpus.push_back(tensor(FeatureKind::lin_spec_iv, 3, 20 + 7 * i, 33, i, 1e3, 0.01 * (i + 1)));
  const auto s = compute_stats(corpus);
  for (std::size_t c = 0; c < 3; ++c) {
    std::vector<double> all;
    for (const auto& f : corpus) all.insert(all.end(), f.data.channel(c).begin(), f.data.channel(c).end());
    const auto [mean, sd] = oracle::two_pass(all);
    EXPECT_NEAR(s.mean[c], mean, 1e-8);
    EXPECT_NEAR(s.std[c], sd, 1e-8);
  }
}

TEST(Stats, MergeEqualsSinglePass) {
  std::vector<FeatureTensor> corpus;
  for (int i = 0; i < 5; ++i) corpus.push_back(tensor(FeatureKind::lin_spec_iv, 2, 10 + i, 8, 40 + i, i, 1 + i));
  StatsAccumulator left, right, empty;
  for (int i = 0; i < 2; ++i) left.add(corpus[i]);
  for (int i = 2; i < 5; ++i) right.add(corpus[i]);
  left.merge(right);
  left.merge(empty);
  const auto merged = left.finish();
  const auto direct = compute_stats(corpus);
  for (std::size_t c = 0; c < 2; ++c) {
    EXPECT_NEAR(merged.mean[c], direct.mean[c], 1e-12);
    EXPECT_NEAR(merged.std[c], direct.std[c], 1e-12);
  }
  EXPECT_THROW(empty.finish(), ValidationError);
}

TEST(Stats, IdentityStatsLeaveTensor) {
  const auto f = tensor(FeatureKind::lin_spec_iv, 3, 5, 6, 1);
  ChannelStats id{{0, 0, 0}, {1, 1, 1}, f.roles};
  EXPECT_EQ(apply_stats(f, id, FeatureKind::lin_spec_iv).data, f.data);
}

TEST(Stats, SalsaSpatialChannelsUntouched) {
  const auto f = tensor(FeatureKind::salsa, 7, 12, 20, 2, 5.0, 3.0);
  const std::vector<FeatureTensor> corpus{f};
  const auto n = apply_stats(f, compute_stats(corpus), FeatureKind::salsa);
  for (std::size_t c = 4; c < 7; ++c) {
    const auto a = f.data.channel(c), b = n.data.channel(c);
    EXPECT_TRUE(std::equal(a.begin(), a.end(), b.begin()));
  }
  EXPECT_NE(n.data(0, 0, 0), f.data(0, 0, 0));
}

TEST(Stats, BaselineKindsNormaliseEveryChannel) {
  auto f = tensor(FeatureKind::mel_spec_gcc, 10, 12, 16, 3, 2.0, 4.0);
  for (std::size_t c = 4; c < 10; ++c) f.roles[c] = ChannelRole::gcc;
  const std::vector<FeatureTensor> corpus{f};
  const auto n = apply_stats(f, compute_stats(corpus), FeatureKind::mel_spec_gcc);
  for (std::size_t c = 0; c < 10; ++c) {
    std::vector<double> v(n.data.channel(c).begin(), n.data.channel(c).end());
    const auto [mean, sd] = oracle::two_pass(v);
    EXPECT_NEAR(mean, 0.0, 1e-9);
    EXPECT_NEAR(sd, 1.0, 1e-9);
  }
}

TEST(Stats, CorpusRenormalisesToZeroMeanUnitStd) {
  std::vector<FeatureTensor> corpus;
  for (int i = 0; i < 4; ++i) corpus.push_back(tensor(FeatureKind::salsa, 7, 30 + 10 * i, 40, 70 + i, -20.0 + i, 3.0));
  const auto s = compute_stats(corpus);
  std::vector<FeatureTensor> out;
  for (const auto& f : corpus) out.push_back(apply_stats(f, s, FeatureKind::salsa));
  const auto again = compute_stats(out);
  for (std::size_t c = 0; c < 4; ++c) {
    EXPECT_NEAR(again.mean[c], 0.0, 1e-6);
    EXPECT_NEAR(again.std[c], 1.0, 1e-6);
  }
}

TEST(Stats, Errors) {
  EXPECT_THROW(compute_stats(std::vector<FeatureTensor>{}), ValidationError);
  const auto a = tensor(FeatureKind::salsa, 7, 3, 4, 1);
  const auto b = tensor(FeatureKind::lin_spec_iv, 7, 3, 4, 1);
  EXPECT_THROW(compute_stats(std::vector<FeatureTensor>{a, b}), ValidationError);
  const std::vector<FeatureTensor> one{a};
  const auto s = compute_stats(one);
  EXPECT_THROW(apply_stats(tensor(FeatureKind::salsa, 6, 3, 4, 1), s, FeatureKind::salsa), ValidationError);
}
