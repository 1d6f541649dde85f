#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "salsa/errors.hpp"

namespace salsa {

using cplx = std::complex<double>;

// Dense channels x frames x bins array, row-major (bins fastest).
template <typename T>
class Tensor3 {
 public:
  Tensor3() = default;
  Tensor3(std::size_t channels, std::size_t frames, std::size_t bins, T fill = T{})
      : channels_(channels), frames_(frames), bins_(bins),
        data_(channels * frames * bins, fill) {}

  std::size_t channels() const { return channels_; }
  std::size_t frames() const { return frames_; }
  std::size_t bins() const { return bins_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T& operator()(std::size_t c, std::size_t t, std::size_t f) {
    return data_[(c * frames_ + t) * bins_ + f];
  }
  const T& operator()(std::size_t c, std::size_t t, std::size_t f) const {
    return data_[(c * frames_ + t) * bins_ + f];
  }

  std::span<T> channel(std::size_t c) {
    return {data_.data() + c * frames_ * bins_, frames_ * bins_};
  }
  std::span<const T> channel(std::size_t c) const {
    return {data_.data() + c * frames_ * bins_, frames_ * bins_};
  }
  std::span<T> row(std::size_t c, std::size_t t) {
    return {data_.data() + (c * frames_ + t) * bins_, bins_};
  }
  std::span<const T> row(std::size_t c, std::size_t t) const {
    return {data_.data() + (c * frames_ + t) * bins_, bins_};
  }

  std::vector<T>& values() { return data_; }
  const std::vector<T>& values() const { return data_; }

  friend bool operator==(const Tensor3&, const Tensor3&) = default;

 private:
  std::size_t channels_ = 0;
  std::size_t frames_ = 0;
  std::size_t bins_ = 0;
  std::vector<T> data_;
};

// frames x bins boolean grid used for bin-selection masks.
class BinMask {
 public:
  BinMask() = default;
  BinMask(std::size_t frames, std::size_t bins, bool fill = false)
      : frames_(frames), bins_(bins), bits_(frames * bins, fill ? 1 : 0) {}

  std::size_t frames() const { return frames_; }
  std::size_t bins() const { return bins_; }
  bool operator()(std::size_t t, std::size_t f) const { return bits_[t * bins_ + f] != 0; }
  void set(std::size_t t, std::size_t f, bool v) { bits_[t * bins_ + f] = v ? 1 : 0; }

  std::size_t count() const {
    std::size_t n = 0;
    for (auto b : bits_) n += b;
    return n;
  }

  BinMask operator&(const BinMask& o) const {
    require(frames_ == o.frames_ && bins_ == o.bins_, "mask shape mismatch");
    BinMask r(frames_, bins_);
    for (std::size_t i = 0; i < bits_.size(); ++i) r.bits_[i] = bits_[i] & o.bits_[i];
    return r;
  }

  friend bool operator==(const BinMask&, const BinMask&) = default;

 private:
  std::size_t frames_ = 0;
  std::size_t bins_ = 0;
  std::vector<std::uint8_t> bits_;
};

// STFT of an M-channel clip: data(c, t, f) = X_c(t, f).
struct ComplexSpectrogram {
  Tensor3<cplx> data;
  double sample_rate = 24000.0;
  std::size_t fft_size = 512;
  std::size_t hop_length = 300;

  std::size_t channels() const { return data.channels(); }
  std::size_t frames() const { return data.frames(); }
  std::size_t bins() const { return data.bins(); }
  double bin_hz() const { return sample_rate / static_cast<double>(fft_size); }
  double frame_rate() const { return sample_rate / static_cast<double>(hop_length); }
};

enum class ArrayKind { foa, mic };
enum class FeatureKind { mel_spec_iv, lin_spec_iv, mel_spec_gcc, lin_spec_gcc, salsa };
enum class ChannelRole { spectrogram, spatial, gcc };
enum class FrequencyScale { linear, mel };

inline std::string_view to_string(ArrayKind k) { return k == ArrayKind::foa ? "foa" : "mic"; }

inline std::string_view to_string(FeatureKind k) {
  switch (k) {
    case FeatureKind::mel_spec_iv: return "melspeciv";
    case FeatureKind::lin_spec_iv: return "linspeciv";
    case FeatureKind::mel_spec_gcc: return "melspecgcc";
    case FeatureKind::lin_spec_gcc: return "linspecgcc";
    case FeatureKind::salsa: return "salsa";
  }
  return "?";
}

inline std::string_view to_string(ChannelRole r) {
  switch (r) {
    case ChannelRole::spectrogram: return "spec";
    case ChannelRole::spatial: return "spatial";
    case ChannelRole::gcc: return "gcc";
  }
  return "?";
}

inline std::string_view to_string(FrequencyScale s) {
  return s == FrequencyScale::linear ? "linear" : "mel";
}

inline ArrayKind parse_array_kind(std::string_view s) {
  if (s == "foa") return ArrayKind::foa;
  if (s == "mic") return ArrayKind::mic;
  throw ValidationError("unknown array format '" + std::string(s) + "'");
}

inline FeatureKind parse_feature_kind(std::string_view s) {
  for (auto k : {FeatureKind::mel_spec_iv, FeatureKind::lin_spec_iv, FeatureKind::mel_spec_gcc,
                 FeatureKind::lin_spec_gcc, FeatureKind::salsa}) {
    if (to_string(k) == s) return k;
  }
  throw ValidationError("unknown feature kind '" + std::string(s) + "'");
}

inline ChannelRole parse_channel_role(std::string_view s) {
  for (auto r : {ChannelRole::spectrogram, ChannelRole::spatial, ChannelRole::gcc}) {
    if (to_string(r) == s) return r;
  }
  throw ValidationError("unknown channel role '" + std::string(s) + "'");
}

inline FrequencyScale parse_frequency_scale(std::string_view s) {
  if (s == "linear") return FrequencyScale::linear;
  if (s == "mel") return FrequencyScale::mel;
  throw ValidationError("unknown frequency scale '" + std::string(s) + "'");
}

struct FeatureMeta {
  std::optional<FeatureKind> kind;
  ArrayKind format = ArrayKind::foa;
  FrequencyScale scale = FrequencyScale::linear;
  double bin_hz = 46.875;
  double frame_rate = 80.0;
  // Bins [compress_start, ...) were averaged in groups of compress_factor.
  // compress_factor == 1 means no compression.
  std::size_t compress_start = 0;
  std::size_t compress_factor = 1;
  double f_low = 0.0;
  double f_high = 0.0;

  friend bool operator==(const FeatureMeta&, const FeatureMeta&) = default;
};

// Channel-labelled real feature stack (channels x frames x bins-or-lags).
struct FeatureTensor {
  Tensor3<double> data;
  std::vector<ChannelRole> roles;
  FeatureMeta meta;

  std::size_t channels() const { return data.channels(); }
  std::size_t frames() const { return data.frames(); }
  std::size_t bins() const { return data.bins(); }

  // Centre frequency in Hz of output bin f, accounting for band compression.
  double bin_frequency(std::size_t f) const {
    if (meta.compress_factor <= 1 || f < meta.compress_start) {
      return static_cast<double>(f) * meta.bin_hz;
    }
    const double first = static_cast<double>(meta.compress_start +
                                             (f - meta.compress_start) * meta.compress_factor);
    return (first + 0.5 * static_cast<double>(meta.compress_factor - 1)) * meta.bin_hz;
  }
};

// Stacks tensors along the channel axis; frames and bins must agree.
inline FeatureTensor stack_channels(const FeatureTensor& a, const FeatureTensor& b) {
  require(a.frames() == b.frames() && a.bins() == b.bins(),
          "cannot stack tensors with different frame/bin counts");
  FeatureTensor out;
  out.data = Tensor3<double>(a.channels() + b.channels(), a.frames(), a.bins());
  auto& v = out.data.values();
  std::copy(a.data.values().begin(), a.data.values().end(), v.begin());
  std::copy(b.data.values().begin(), b.data.values().end(),
            v.begin() + static_cast<std::ptrdiff_t>(a.data.size()));
  out.roles = a.roles;
  out.roles.insert(out.roles.end(), b.roles.begin(), b.roles.end());
  out.meta = a.meta;
  return out;
}

}  // namespace salsa
