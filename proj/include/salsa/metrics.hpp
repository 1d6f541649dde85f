#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "salsa/errors.hpp"
#include "salsa/geometry.hpp"
#include "salsa/labels.hpp"

namespace salsa {

// Aggregate SELD error: mean of ER, 1 - F, LE / 180 and 1 - LR.
inline double seld_error(double er, double f, double le_deg, double lr) {
  return 0.25 * (er + (1.0 - f) + le_deg / 180.0 + (1.0 - lr));
}

enum class MetricsVersion { dcase2020, dcase2021 };

inline MetricsVersion parse_metrics_version(std::string_view s) {
  if (s == "2020") return MetricsVersion::dcase2020;
  if (s == "2021") return MetricsVersion::dcase2021;
  throw ValidationError("metrics version must be 2020 or 2021");
}

struct MetricsConfig {
  double threshold_deg = 20.0;
  std::size_t segment_frames = 10;  // 1 s at 10 fps
  MetricsVersion version = MetricsVersion::dcase2021;
};

struct MetricsReport {
  double er20 = 0.0;
  double f20 = 1.0;
  double le_cd = 0.0;
  double lr_cd = 1.0;
  double e_seld = 0.0;
};

// Per-class tallies; summing tallies across files micro-averages them.
struct ClassCounts {
  long tp = 0;         // segment-level, matched within threshold
  long fp = 0;         // unmatched or far-matched predictions
  long fn = 0;         // unmatched references
  long n_ref = 0;      // segment-level reference tracks
  long n_pred = 0;
  double le_sum = 0.0;  // frame-level matched angular error, degrees
  long le_pairs = 0;
  long lr_ref = 0;     // frame-level reference events
};

struct MetricsCounts {
  std::vector<ClassCounts> classes;
  long substitutions = 0;
  long deletions = 0;
  long insertions = 0;

  MetricsCounts& operator+=(const MetricsCounts& o) {
    if (classes.empty()) classes.resize(o.classes.size());
    require(classes.size() == o.classes.size(), "class vocabularies differ");
    for (std::size_t c = 0; c < classes.size(); ++c) {
      auto& a = classes[c];
      const auto& b = o.classes[c];
      a.tp += b.tp;
      a.fp += b.fp;
      a.fn += b.fn;
      a.n_ref += b.n_ref;
      a.n_pred += b.n_pred;
      a.le_sum += b.le_sum;
      a.le_pairs += b.le_pairs;
      a.lr_ref += b.lr_ref;
    }
    substitutions += o.substitutions;
    deletions += o.deletions;
    insertions += o.insertions;
    return *this;
  }
};

struct Assignment {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (row, col)
  double cost = 0.0;
};

// Minimum-cost assignment of min(rows, cols) pairs (Kuhn-Munkres with
// potentials). cost is row-major rows x cols.
inline Assignment min_cost_assignment(const std::vector<double>& cost, std::size_t rows,
                                      std::size_t cols) {
  Assignment out;
  if (rows == 0 || cols == 0) return out;
  const bool transpose = rows > cols;
  const std::size_t n = transpose ? cols : rows;  // n <= m
  const std::size_t m = transpose ? rows : cols;
  auto a = [&](std::size_t i, std::size_t j) {  // 1-based
    return transpose ? cost[(j - 1) * cols + (i - 1)] : cost[(i - 1) * cols + (j - 1)];
  };
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<bool> used(m + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = a(i0, j) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  for (std::size_t j = 1; j <= m; ++j) {
    if (p[j] == 0) continue;
    const std::size_t r = transpose ? j - 1 : p[j] - 1;
    const std::size_t c = transpose ? p[j] - 1 : j - 1;
    out.pairs.emplace_back(r, c);
    out.cost += cost[r * cols + c];
  }
  std::sort(out.pairs.begin(), out.pairs.end());
  return out;
}

namespace detail {

inline std::vector<double> angle_matrix(const std::vector<Vec3>& ref, const std::vector<Vec3>& pred) {
  std::vector<double> cost(ref.size() * pred.size());
  for (std::size_t i = 0; i < ref.size(); ++i)
    for (std::size_t j = 0; j < pred.size(); ++j)
      cost[i * pred.size() + j] = angular_distance_deg(ref[i], pred[j]);
  return cost;
}

// Track id -> mean direction over the frames where it is active.
inline std::vector<Vec3> segment_tracks(const SeldLabels& labels, std::size_t begin,
                                        std::size_t end, int class_id) {
  std::map<int, Vec3> sums;
  for (std::size_t t = begin; t < std::min(end, labels.frames.size()); ++t) {
    for (const auto& e : labels.frames[t]) {
      if (e.class_id != class_id) continue;
      auto& s = sums[e.track];
      const double n = norm(e.doa);
      for (int k = 0; k < 3; ++k) s[k] += n > 0 ? e.doa[k] / n : 0.0;
    }
  }
  std::vector<Vec3> out;
  for (auto& [track, s] : sums) {
    const double n = norm(s);
    out.push_back(n > 0 ? Vec3{s[0] / n, s[1] / n, s[2] / n} : Vec3{1.0, 0.0, 0.0});
  }
  return out;
}

inline std::vector<Vec3> frame_doas(const SeldLabels& labels, std::size_t t, int class_id) {
  std::vector<Vec3> out;
  if (t >= labels.frames.size()) return out;
  for (const auto& e : labels.frames[t]) {
    if (e.class_id == class_id) out.push_back(e.doa);
  }
  return out;
}

}  // namespace detail

// Tallies for one prediction/reference pair.
//
// Location-dependent detection works per 1 s segment and class: each track
// is summarised by its mean direction, predictions are optimally matched to
// references by angular distance, and a match closer than the threshold is a
// true positive. Far matches and surplus predictions are false positives,
// surplus references false negatives; per segment, S = min(FP, FN),
// D = max(0, FN - FP), I = max(0, FP - FN).
//
// Class-dependent localization works per 100 ms frame and class: the optimal
// matching of same-class predictions to references gives the angular errors
// (LE) and the recalled reference count (LR), with no threshold.
inline MetricsCounts evaluate_counts(const SeldLabels& pred, const SeldLabels& ref,
                                     const MetricsConfig& cfg = {}) {
  require(pred.frame_rate == ref.frame_rate, "prediction and reference frame rates differ");
  require(pred.n_classes == ref.n_classes, "prediction and reference class vocabularies differ");
  require(cfg.segment_frames >= 1, "segment length must be positive");
  const std::size_t T = std::max(pred.frames.size(), ref.frames.size());
  MetricsCounts out;
  out.classes.resize(ref.n_classes);

  for (std::size_t begin = 0; begin < T; begin += cfg.segment_frames) {
    const std::size_t end = begin + cfg.segment_frames;
    long seg_fp = 0, seg_fn = 0;
    for (std::size_t c = 0; c < ref.n_classes; ++c) {
      const auto r = detail::segment_tracks(ref, begin, end, static_cast<int>(c));
      const auto p = detail::segment_tracks(pred, begin, end, static_cast<int>(c));
      const auto match = min_cost_assignment(detail::angle_matrix(r, p), r.size(), p.size());
      const auto cost = detail::angle_matrix(r, p);
      long tp = 0;
      for (const auto& [i, j] : match.pairs) {
        if (cost[i * p.size() + j] < cfg.threshold_deg) ++tp;
      }
      const long fp = static_cast<long>(p.size()) - tp;
      const long fn = static_cast<long>(r.size()) - static_cast<long>(match.pairs.size());
      auto& cc = out.classes[c];
      cc.tp += tp;
      cc.fp += fp;
      cc.fn += fn;
      cc.n_ref += static_cast<long>(r.size());
      cc.n_pred += static_cast<long>(p.size());
      seg_fp += fp;
      seg_fn += fn;
    }
    out.substitutions += std::min(seg_fp, seg_fn);
    out.deletions += std::max(0L, seg_fn - seg_fp);
    out.insertions += std::max(0L, seg_fp - seg_fn);
  }

  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t c = 0; c < ref.n_classes; ++c) {
      const auto r = detail::frame_doas(ref, t, static_cast<int>(c));
      const auto p = detail::frame_doas(pred, t, static_cast<int>(c));
      auto& cc = out.classes[c];
      cc.lr_ref += static_cast<long>(r.size());
      if (r.empty() || p.empty()) continue;
      const auto match = min_cost_assignment(detail::angle_matrix(r, p), r.size(), p.size());
      cc.le_sum += match.cost;
      cc.le_pairs += static_cast<long>(match.pairs.size());
    }
  }
  return out;
}

// 2020 pools counts over classes (micro average); 2021 averages F, LE and LR
// per class (macro average). ER is pooled in both.
inline MetricsReport report_from_counts(const MetricsCounts& counts, const MetricsConfig& cfg = {}) {
  MetricsReport rep;
  long n_ref = 0, tp = 0, fp = 0, fn = 0, lr_ref = 0, pairs = 0, n_pred = 0;
  double le_sum = 0.0;
  for (const auto& c : counts.classes) {
    n_ref += c.n_ref;
    n_pred += c.n_pred;
    tp += c.tp;
    fp += c.fp;
    fn += c.fn;
    lr_ref += c.lr_ref;
    pairs += c.le_pairs;
    le_sum += c.le_sum;
  }
  const long errors = counts.substitutions + counts.deletions + counts.insertions;
  rep.er20 = n_ref > 0 ? static_cast<double>(errors) / static_cast<double>(n_ref)
                       : static_cast<double>(errors);

  auto f_score = [](long tp_, long fp_, long fn_) {
    const double denom = static_cast<double>(tp_) + 0.5 * static_cast<double>(fp_ + fn_);
    return denom > 0 ? static_cast<double>(tp_) / denom : 1.0;
  };
  auto le_of = [](double sum, long n, bool any) { return n > 0 ? sum / static_cast<double>(n) : (any ? 180.0 : 0.0); };
  auto lr_of = [](long hits, long refs) { return refs > 0 ? static_cast<double>(hits) / static_cast<double>(refs) : 1.0; };

  if (cfg.version == MetricsVersion::dcase2020) {
    rep.f20 = f_score(tp, fp, fn);
    rep.le_cd = le_of(le_sum, pairs, n_ref + n_pred > 0);
    rep.lr_cd = lr_of(pairs, lr_ref);
  } else {
    double f_acc = 0.0, le_acc = 0.0, lr_acc = 0.0;
    int f_n = 0, le_n = 0, lr_n = 0;
    for (const auto& c : counts.classes) {
      if (c.tp + c.fp + c.fn > 0) {
        f_acc += f_score(c.tp, c.fp, c.fn);
        ++f_n;
      }
      if (c.n_ref + c.n_pred > 0) {
        le_acc += le_of(c.le_sum, c.le_pairs, true);
        ++le_n;
      }
      if (c.lr_ref > 0) {
        lr_acc += lr_of(c.le_pairs, c.lr_ref);
        ++lr_n;
      }
    }
    rep.f20 = f_n > 0 ? f_acc / f_n : 1.0;
    rep.le_cd = le_n > 0 ? le_acc / le_n : 0.0;
    rep.lr_cd = lr_n > 0 ? lr_acc / lr_n : 1.0;
  }
  rep.e_seld = seld_error(rep.er20, rep.f20, rep.le_cd, rep.lr_cd);
  return rep;
}

inline MetricsReport evaluate(const SeldLabels& pred, const SeldLabels& ref,
                              const MetricsConfig& cfg = {}) {
  return report_from_counts(evaluate_counts(pred, ref, cfg), cfg);
}

}  // namespace salsa
