#pragma once

#include <algorithm>
#include <filesystem>
#include <sstream>
#include <string>

#include "salsa/io/binary.hpp"
#include "salsa/io/keyvalue.hpp"
#include "salsa/labels.hpp"

namespace salsa::io {

// DCASE-style rows: frame_index,class_index,track_index,azimuth_deg,elevation_deg.
// No header is written; a non-numeric first line is skipped on read.
inline std::string format_labels_csv(const SeldLabels& labels) {
  std::string out;
  for (std::size_t t = 0; t < labels.frames.size(); ++t) {
    auto events = labels.frames[t];
    std::sort(events.begin(), events.end(), [](const LabelEvent& a, const LabelEvent& b) {
      return a.class_id != b.class_id ? a.class_id < b.class_id : a.track < b.track;
    });
    for (const auto& e : events) {
      const auto a = angles_from_direction(e.doa);
      out += std::to_string(t) + "," + std::to_string(e.class_id) + "," + std::to_string(e.track) +
             "," + format_double(a.azimuth_deg) + "," + format_double(a.elevation_deg) + "\n";
    }
  }
  return out;
}

// frame_count of 0 sizes the result from the largest frame index present.
inline SeldLabels parse_labels_csv(std::string_view text, std::size_t n_classes = 12,
                                   std::size_t frame_count = 0, const std::string& name = "labels") {
  SeldLabels labels;
  labels.n_classes = n_classes;
  labels.frames.resize(frame_count);
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto body = trim(line);
    if (body.empty() || body[0] == '#') continue;
    const auto fields = split(body, ',');
    if (lineno == 1 && !fields.empty() && !fields[0].empty() &&
        !std::isdigit(static_cast<unsigned char>(fields[0][0]))) {
      continue;
    }
    const auto where = name + ":" + std::to_string(lineno);
    if (fields.size() != 5 && fields.size() != 4) throw ValidationError(where + ": expected 5 fields");
    const auto frame = parse_int<std::size_t>(fields[0], where);
    LabelEvent e;
    e.class_id = parse_int<int>(fields[1], where);
    // Four-column files omit the track index.
    const std::size_t off = fields.size() == 5 ? 1 : 0;
    e.track = off ? parse_int<int>(fields[2], where) : 0;
    const double az = parse_double(fields[2 + off], where);
    const double el = parse_double(fields[3 + off], where);
    if (e.class_id < 0 || static_cast<std::size_t>(e.class_id) >= n_classes) {
      throw ValidationError(where + ": class index out of range");
    }
    if (std::abs(el) > 90.0) throw ValidationError(where + ": elevation out of range");
    e.doa = direction_from_angles(az, el);
    if (frame >= labels.frames.size()) labels.frames.resize(frame + 1);
    labels.frames[frame].push_back(e);
  }
  return labels;
}

inline SeldLabels read_labels_csv(const std::filesystem::path& path, std::size_t n_classes = 12,
                                  std::size_t frame_count = 0) {
  return parse_labels_csv(read_text(path), n_classes, frame_count, path.string());
}

inline void write_labels_csv(const std::filesystem::path& path, const SeldLabels& labels) {
  write_text_atomic(path, format_labels_csv(labels));
}

}  // namespace salsa::io
