#pragma once

#include <cstddef>
#include <vector>

#include "salsa/geometry.hpp"

namespace salsa {

struct LabelEvent {
  int class_id = 0;
  int track = 0;
  Vec3 doa{1.0, 0.0, 0.0};  // unit Cartesian direction

  friend bool operator==(const LabelEvent&, const LabelEvent&) = default;
};

// Frame-level SELD annotations, nominally at 10 fps.
struct SeldLabels {
  std::size_t n_classes = 12;
  double frame_rate = 10.0;
  std::vector<std::vector<LabelEvent>> frames;

  std::size_t frame_count() const { return frames.size(); }

  std::size_t event_count() const {
    std::size_t n = 0;
    for (const auto& f : frames) n += f.size();
    return n;
  }

  bool active(std::size_t frame, int class_id) const {
    for (const auto& e : frames[frame]) {
      if (e.class_id == class_id) return true;
    }
    return false;
  }

  friend bool operator==(const SeldLabels&, const SeldLabels&) = default;
};

}  // namespace salsa
