#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>

#include "salsa/io/binary.hpp"
#include "salsa/stft.hpp"

namespace salsa::io {

// RIFF/WAVE reader. PCM 16/24/32-bit and IEEE float32, including
// WAVE_FORMAT_EXTENSIBLE wrappers. Samples come back in [-1, 1).
inline AudioClip parse_wav(const std::vector<char>& buf, const std::string& name) {
  ByteReader r(buf.data(), buf.size(), name);
  if (std::string(r.take(4), 4) != "RIFF") throw InputError(name + ": not a RIFF file");
  r.get<std::uint32_t>();
  if (std::string(r.take(4), 4) != "WAVE") throw InputError(name + ": not a WAVE file");

  std::uint16_t format = 0, channels = 0, bits = 0, block_align = 0;
  std::uint32_t rate = 0;
  const char* payload = nullptr;
  std::size_t payload_size = 0;
  while (r.remaining() >= 8) {
    const std::string id(r.take(4), 4);
    const auto size = r.get<std::uint32_t>();
    const std::size_t start = r.position();
    if (size > r.remaining()) throw InputError(name + ": truncated chunk '" + id + "'");
    if (id == "fmt ") {
      if (size < 16) throw InputError(name + ": short fmt chunk");
      format = r.get<std::uint16_t>();
      channels = r.get<std::uint16_t>();
      rate = r.get<std::uint32_t>();
      r.get<std::uint32_t>();
      block_align = r.get<std::uint16_t>();
      bits = r.get<std::uint16_t>();
      if (format == 0xFFFE && size >= 40) {
        r.get<std::uint16_t>();  // cbSize
        r.get<std::uint16_t>();  // valid bits
        r.get<std::uint32_t>();  // channel mask
        format = r.get<std::uint16_t>();  // first two bytes of the subformat GUID
      }
    } else if (id == "data") {
      payload = buf.data() + start;
      payload_size = size;
    }
    r.seek(start + size + (size & 1u));
    if (payload && format) break;
  }
  if (!format) throw InputError(name + ": missing fmt chunk");
  if (!payload) throw InputError(name + ": missing data chunk");
  if (channels == 0) throw InputError(name + ": zero channels");
  const bool pcm = format == 1 && (bits == 16 || bits == 24 || bits == 32);
  const bool flt = format == 3 && bits == 32;
  if (!pcm && !flt) {
    throw InputError(name + ": unsupported sample format " + std::to_string(format) + "/" +
                     std::to_string(bits) + " bit");
  }
  const std::size_t bytes = bits / 8;
  if (block_align != bytes * channels) throw InputError(name + ": inconsistent block alignment");

  const std::size_t n = payload_size / block_align;
  AudioClip clip;
  clip.sample_rate = rate;
  clip.channels.assign(channels, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < channels; ++c) {
      const auto* p = reinterpret_cast<const unsigned char*>(payload + i * block_align + c * bytes);
      double v = 0.0;
      if (flt) {
        float f;
        std::memcpy(&f, p, 4);
        v = f;
      } else if (bits == 16) {
        std::int16_t s;
        std::memcpy(&s, p, 2);
        v = s / 32768.0;
      } else if (bits == 24) {
        std::int32_t s = static_cast<std::int32_t>(static_cast<std::uint32_t>(p[0]) << 8 |
                                                   static_cast<std::uint32_t>(p[1]) << 16 |
                                                   static_cast<std::uint32_t>(p[2]) << 24);
        v = (s >> 8) / 8388608.0;
      } else {
        std::int32_t s;
        std::memcpy(&s, p, 4);
        v = s / 2147483648.0;
      }
      clip.channels[c][i] = v;
    }
  }
  return clip;
}

inline AudioClip read_wav(const std::filesystem::path& path) {
  return parse_wav(read_file(path), path.string());
}

enum class WavEncoding { pcm16, pcm24, pcm32, float32 };

inline void write_wav(const std::filesystem::path& path, const AudioClip& clip,
                      WavEncoding enc = WavEncoding::float32) {
  clip.validate();
  const std::uint16_t channels = static_cast<std::uint16_t>(clip.channels.size());
  const std::uint16_t bits = enc == WavEncoding::pcm16 ? 16 : enc == WavEncoding::pcm24 ? 24 : 32;
  const std::uint16_t align = static_cast<std::uint16_t>(channels * bits / 8);
  const std::size_t n = clip.channels[0].size();
  const auto data_size = static_cast<std::uint32_t>(n * align);

  ByteWriter w;
  w.bytes("RIFF", 4);
  w.put<std::uint32_t>(36 + data_size);
  w.bytes("WAVEfmt ", 8);
  w.put<std::uint32_t>(16);
  w.put<std::uint16_t>(enc == WavEncoding::float32 ? 3 : 1);
  w.put<std::uint16_t>(channels);
  const auto rate = static_cast<std::uint32_t>(std::lround(clip.sample_rate));
  w.put<std::uint32_t>(rate);
  w.put<std::uint32_t>(rate * align);
  w.put<std::uint16_t>(align);
  w.put<std::uint16_t>(bits);
  w.bytes("data", 4);
  w.put<std::uint32_t>(data_size);
  auto quant = [](double x, double scale, double lo, double hi) {
    return std::clamp(std::round(x * scale), lo, hi);
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < channels; ++c) {
      const double x = clip.channels[c][i];
      switch (enc) {
        case WavEncoding::float32: w.put(static_cast<float>(x)); break;
        case WavEncoding::pcm16:
          w.put(static_cast<std::int16_t>(quant(x, 32768.0, -32768.0, 32767.0)));
          break;
        case WavEncoding::pcm24: {
          const auto s = static_cast<std::int32_t>(quant(x, 8388608.0, -8388608.0, 8388607.0));
          const auto u = static_cast<std::uint32_t>(s);
          const unsigned char b[3] = {static_cast<unsigned char>(u), static_cast<unsigned char>(u >> 8),
                                      static_cast<unsigned char>(u >> 16)};
          w.bytes(b, 3);
          break;
        }
        case WavEncoding::pcm32:
          w.put(static_cast<std::int32_t>(quant(x, 2147483648.0, -2147483648.0, 2147483647.0)));
          break;
      }
    }
  }
  write_file_atomic(path, w.buffer().data(), w.buffer().size());
}

}  // namespace salsa::io
