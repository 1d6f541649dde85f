#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "salsa/errors.hpp"
#include "salsa/tensor.hpp"

namespace salsa {

inline constexpr double kStdFloor = 1e-8;

struct ChannelStats {
  std::vector<double> mean;
  std::vector<double> std;
  std::vector<ChannelRole> roles;

  std::size_t channels() const { return mean.size(); }
  bool dead(std::size_t c) const { return std[c] < kStdFloor; }
};

// Single-pass per-channel mean/variance (Chan et al. pairwise update), so
// partial accumulators over disjoint corpora can be merged.
class StatsAccumulator {
 public:
  void add(const FeatureTensor& feat) {
    if (count_.empty()) {
      roles_ = feat.roles;
      count_.assign(feat.channels(), 0.0);
      mean_.assign(feat.channels(), 0.0);
      m2_.assign(feat.channels(), 0.0);
    }
    require(feat.roles == roles_, "all tensors must share one channel layout");
    for (std::size_t c = 0; c < feat.channels(); ++c) {
      const auto v = feat.data.channel(c);
      if (v.empty()) continue;
      double mean = 0.0;
      for (double x : v) mean += x;
      mean /= static_cast<double>(v.size());
      double m2 = 0.0;
      for (double x : v) m2 += (x - mean) * (x - mean);
      combine(c, static_cast<double>(v.size()), mean, m2);
    }
  }

  void merge(const StatsAccumulator& other) {
    if (other.count_.empty()) return;
    if (count_.empty()) {
      *this = other;
      return;
    }
    require(other.roles_ == roles_, "cannot merge stats with different channel layouts");
    for (std::size_t c = 0; c < count_.size(); ++c) {
      if (other.count_[c] > 0) combine(c, other.count_[c], other.mean_[c], other.m2_[c]);
    }
  }

  bool empty() const { return count_.empty(); }

  ChannelStats finish() const {
    require(!count_.empty(), "no tensors were accumulated");
    ChannelStats s;
    s.roles = roles_;
    s.mean = mean_;
    s.std.resize(mean_.size());
    for (std::size_t c = 0; c < mean_.size(); ++c) {
      s.std[c] = count_[c] > 0 ? std::sqrt(m2_[c] / count_[c]) : 0.0;
    }
    return s;
  }

 private:
  void combine(std::size_t c, double n_b, double mean_b, double m2_b) {
    const double n_a = count_[c];
    const double n = n_a + n_b;
    const double delta = mean_b - mean_[c];
    mean_[c] += delta * n_b / n;
    m2_[c] += m2_b + delta * delta * n_a * n_b / n;
    count_[c] = n;
  }

  std::vector<ChannelRole> roles_;
  std::vector<double> count_;
  std::vector<double> mean_;
  std::vector<double> m2_;
};

// Population mean and standard deviation per channel over every cell of
// every tensor.
inline ChannelStats compute_stats(std::span<const FeatureTensor> corpus) {
  if (corpus.empty()) throw ValidationError("cannot compute statistics of an empty corpus");
  StatsAccumulator acc;
  for (const auto& f : corpus) acc.add(f);
  return acc.finish();
}

// Which channels get standardised: only spectrograms for SALSA, all of them
// for the baseline kinds.
inline bool normalizes_channel(FeatureKind kind, ChannelRole role) {
  return kind != FeatureKind::salsa || role == ChannelRole::spectrogram;
}

inline FeatureTensor apply_stats(const FeatureTensor& feat, const ChannelStats& stats,
                                 FeatureKind kind) {
  require(stats.channels() == feat.channels(), "stats channel count does not match features");
  require(stats.roles.empty() || stats.roles == feat.roles, "stats channel roles do not match features");
  FeatureTensor out = feat;
  for (std::size_t c = 0; c < feat.channels(); ++c) {
    if (!normalizes_channel(kind, feat.roles[c])) continue;
    const double mean = stats.mean[c];
    const double scale = 1.0 / std::max(stats.std[c], kStdFloor);
    for (auto& x : out.data.channel(c)) x = (x - mean) * scale;
  }
  return out;
}

}  // namespace salsa
