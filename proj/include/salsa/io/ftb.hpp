#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "salsa/io/binary.hpp"
#include "salsa/io/keyvalue.hpp"
#include "salsa/tensor.hpp"

namespace salsa::io {

// FTB1: "FTB1", u8 dtype, u8 ndim, ndim x u64 dims, then the row-major
// little-endian payload. c64 is a pair of f32 (real, imag).
enum class Dtype : std::uint8_t { f32 = 0, f64 = 1, c64 = 2 };

inline std::size_t dtype_size(Dtype d) { return d == Dtype::f32 ? 4 : 8; }

inline Dtype parse_dtype(std::string_view s) {
  if (s == "f32") return Dtype::f32;
  if (s == "f64") return Dtype::f64;
  if (s == "c64") return Dtype::c64;
  throw ValidationError("unknown dtype '" + std::string(s) + "'");
}

// Decoded container. Real dtypes fill `real`, c64 fills `complex`; both
// widen losslessly so re-encoding at the same dtype is bit-identical.
struct FtbTensor {
  Dtype dtype = Dtype::f32;
  std::vector<std::uint64_t> dims;
  std::vector<double> real;
  std::vector<std::complex<double>> complex;

  std::size_t element_count() const {
    std::size_t n = 1;
    for (auto d : dims) n *= d;
    return n;
  }
};

inline std::vector<char> encode_ftb(const FtbTensor& t) {
  require(t.dims.size() <= 255, "too many dimensions");
  const std::size_t n = t.element_count();
  require(t.dtype == Dtype::c64 ? t.complex.size() == n : t.real.size() == n,
          "payload size does not match dims");
  ByteWriter w;
  w.bytes("FTB1", 4);
  w.put(static_cast<std::uint8_t>(t.dtype));
  w.put(static_cast<std::uint8_t>(t.dims.size()));
  for (auto d : t.dims) w.put<std::uint64_t>(d);
  w.buffer().reserve(w.buffer().size() + n * dtype_size(t.dtype));
  switch (t.dtype) {
    case Dtype::f32:
      for (double v : t.real) w.put(static_cast<float>(v));
      break;
    case Dtype::f64:
      for (double v : t.real) w.put(v);
      break;
    case Dtype::c64:
      for (auto v : t.complex) {
        w.put(static_cast<float>(v.real()));
        w.put(static_cast<float>(v.imag()));
      }
      break;
  }
  return std::move(w.buffer());
}

inline FtbTensor decode_ftb(const std::vector<char>& buf, const std::string& name = "tensor") {
  ByteReader r(buf.data(), buf.size(), name);
  if (buf.size() < 4 || std::string(r.take(4), 4) != "FTB1") throw InputError(name + ": bad FTB1 magic");
  FtbTensor t;
  const auto dtype = r.get<std::uint8_t>();
  if (dtype > 2) throw InputError(name + ": unknown dtype " + std::to_string(dtype));
  t.dtype = static_cast<Dtype>(dtype);
  const auto ndim = r.get<std::uint8_t>();
  for (int i = 0; i < ndim; ++i) t.dims.push_back(r.get<std::uint64_t>());
  const std::size_t n = t.element_count();
  if (r.remaining() != n * dtype_size(t.dtype)) throw InputError(name + ": payload size mismatch");
  const char* p = r.take(n * dtype_size(t.dtype));
  if (t.dtype == Dtype::c64) {
    t.complex.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      float re, im;
      std::memcpy(&re, p + 8 * i, 4);
      std::memcpy(&im, p + 8 * i + 4, 4);
      t.complex[i] = {re, im};
    }
  } else if (t.dtype == Dtype::f32) {
    t.real.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      float v;
      std::memcpy(&v, p + 4 * i, 4);
      t.real[i] = v;
    }
  } else {
    t.real.resize(n);
    std::memcpy(t.real.data(), p, 8 * n);
  }
  return t;
}

inline void write_ftb(const std::filesystem::path& path, const FtbTensor& t) {
  const auto buf = encode_ftb(t);
  write_file_atomic(path, buf.data(), buf.size());
}

inline FtbTensor read_ftb(const std::filesystem::path& path) {
  return decode_ftb(read_file(path), path.string());
}

inline FtbTensor to_ftb(const Tensor3<double>& x, Dtype dtype = Dtype::f32) {
  require(dtype != Dtype::c64, "real tensor cannot be stored as c64");
  return {dtype, {x.channels(), x.frames(), x.bins()}, x.values(), {}};
}

inline FtbTensor to_ftb(const Tensor3<cplx>& x) {
  return {Dtype::c64, {x.channels(), x.frames(), x.bins()}, {}, x.values()};
}

inline Tensor3<double> real_tensor3(const FtbTensor& t) {
  require(t.dtype != Dtype::c64, "expected a real tensor");
  require(t.dims.size() == 3, "expected a 3-D tensor");
  Tensor3<double> x(t.dims[0], t.dims[1], t.dims[2]);
  x.values() = t.real;
  return x;
}

inline Tensor3<cplx> complex_tensor3(const FtbTensor& t) {
  require(t.dtype == Dtype::c64, "expected a complex tensor");
  require(t.dims.size() == 3, "expected a 3-D tensor");
  Tensor3<cplx> x(t.dims[0], t.dims[1], t.dims[2]);
  x.values() = t.complex;
  return x;
}

inline std::filesystem::path manifest_path(const std::filesystem::path& tensor) {
  auto p = tensor;
  p += ".manifest";
  return p;
}

// Sidecar for feature tensors.
inline KeyValues feature_manifest(const FeatureTensor& f, const std::string& config_hash) {
  KeyValues kv;
  kv.set("content", std::string("features"));
  kv.set("kind", f.meta.kind ? std::string(to_string(*f.meta.kind)) : std::string("none"));
  kv.set("array", std::string(to_string(f.meta.format)));
  std::string roles;
  for (std::size_t c = 0; c < f.roles.size(); ++c) {
    roles += (c ? "," : "") + std::string(to_string(f.roles[c]));
  }
  kv.set("roles", roles);
  kv.set("scale", std::string(to_string(f.meta.scale)));
  kv.set("bin_hz", f.meta.bin_hz);
  kv.set("frame_rate", f.meta.frame_rate);
  kv.set("compress_start", f.meta.compress_start);
  kv.set("compress_factor", f.meta.compress_factor);
  kv.set("f_low", f.meta.f_low);
  kv.set("f_high", f.meta.f_high);
  kv.set("config_hash", config_hash);
  return kv;
}

inline FeatureTensor feature_from_files(const FtbTensor& t, const KeyValues& kv) {
  FeatureTensor f;
  f.data = real_tensor3(t);
  const auto kind = kv.get_or("kind", "none");
  if (kind != "none") f.meta.kind = parse_feature_kind(kind);
  f.meta.format = parse_array_kind(kv.get_or("array", "foa"));
  for (const auto& r : split(kv.get("roles"), ',')) f.roles.push_back(parse_channel_role(r));
  require(f.roles.size() == f.channels(), "manifest roles do not match tensor channels");
  f.meta.scale = parse_frequency_scale(kv.get_or("scale", "linear"));
  f.meta.bin_hz = parse_double(kv.get_or("bin_hz", "46.875"), "bin_hz");
  f.meta.frame_rate = parse_double(kv.get_or("frame_rate", "80"), "frame_rate");
  f.meta.compress_start = parse_int<std::size_t>(kv.get_or("compress_start", "0"), "compress_start");
  f.meta.compress_factor = parse_int<std::size_t>(kv.get_or("compress_factor", "1"), "compress_factor");
  f.meta.f_low = parse_double(kv.get_or("f_low", "0"), "f_low");
  f.meta.f_high = parse_double(kv.get_or("f_high", "0"), "f_high");
  return f;
}

inline FeatureTensor read_feature(const std::filesystem::path& path) {
  const auto mpath = manifest_path(path);
  if (!std::filesystem::exists(mpath)) throw InputError("missing manifest " + mpath.string());
  return feature_from_files(read_ftb(path), KeyValues::parse(read_text(mpath), mpath.string()));
}

inline void write_feature(const std::filesystem::path& path, const FeatureTensor& f,
                          const std::string& config_hash, Dtype dtype = Dtype::f32) {
  write_ftb(path, to_ftb(f.data, dtype));
  write_text_atomic(manifest_path(path), feature_manifest(f, config_hash).dump());
}

}  // namespace salsa::io
