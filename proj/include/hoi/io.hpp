#pragma once

// On-disk view formats.
//
// Matrix views: CSV, C rows x C columns, no header, 17 significant digits.
// Tensor view ("HOI1"), little-endian:
//   bytes 0-3   magic 'H' 'O' 'I' '1'
//   u32         format version (1)
//   u32 x 3     dims (C, C, C)
//   f64 x C^3   row-major payload, i outermost, k innermost

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hoi/errors.hpp"
#include "hoi/interactions.hpp"
#include "hoi/recording.hpp"

namespace hoi::io {

inline constexpr std::array<std::uint8_t, 4> kTensorMagic{0x48, 0x4F, 0x49, 0x31};
inline constexpr std::uint32_t kTensorVersion = 1;
inline constexpr std::size_t kTensorHeaderBytes = 20;

inline std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                 std::chars_format::general, 17);
  return std::string(buf.data(), res.ptr);
}

inline std::string matrix_to_csv(const Eigen::MatrixXd& m) {
  std::string out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out += ',';
      out += format_double(m(i, j));
    }
    out += '\n';
  }
  return out;
}

inline void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << matrix_to_csv(m);
  if (!out) throw Error("write failed for " + path.string());
}

/// Reads a headerless square matrix CSV.
inline Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path) {
  const Recording parsed = load_csv(path, Orientation::RowsAreChannels);
  if (parsed.data.rows() != parsed.data.cols()) {
    throw FormatError("matrix view " + path.string() + " is not square");
  }
  return parsed.data;
}

/// Metadata written next to each view file.
struct Sidecar {
  std::string subject_id;
  std::string view;
  double sigma = 0.0;
  double alpha = 0.0;
  std::size_t channels = 0;
  std::size_t timepoints = 0;
  std::string tool_version;
  std::optional<int> label;
};

inline nlohmann::json to_json(const Sidecar& s) {
  nlohmann::json j{{"subject_id", s.subject_id}, {"view", s.view},
                   {"sigma", s.sigma},           {"alpha", s.alpha},
                   {"channels", s.channels},     {"timepoints", s.timepoints},
                   {"tool_version", s.tool_version}};
  if (s.label) j["label"] = *s.label;
  if (s.view == "mi") j["diagonal"] = "entropy H(X_i) in bits";
  if (s.view == "pearson") j["diagonal"] = "1";
  if (s.view == "oinfo") j["repeated_index_cells"] = 0;
  return j;
}

inline void write_sidecar(const std::filesystem::path& path, const Sidecar& s) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << to_json(s).dump(2) << '\n';
}

namespace detail {

inline std::uint8_t* put_u32(std::uint8_t* p, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) *p++ = static_cast<std::uint8_t>(v >> (8 * b));
  return p;
}

inline std::uint8_t* put_f64(std::uint8_t* p, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int b = 0; b < 8; ++b) *p++ = static_cast<std::uint8_t>(bits >> (8 * b));
  return p;
}

inline std::uint32_t get_u32(const std::uint8_t* p) {
  std::uint32_t v = 0;
  for (int b = 0; b < 4; ++b) v |= static_cast<std::uint32_t>(p[b]) << (8 * b);
  return v;
}

inline double get_f64(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(p[b]) << (8 * b);
  return std::bit_cast<double>(v);
}

}  // namespace detail

inline std::vector<std::uint8_t> encode_tensor(const OInfoTensor& t) {
  const auto c = static_cast<std::uint32_t>(t.size());
  std::vector<std::uint8_t> buf(kTensorHeaderBytes + 8 * t.values().size());
  std::uint8_t* p = std::copy(kTensorMagic.begin(), kTensorMagic.end(), buf.data());
  p = detail::put_u32(p, kTensorVersion);
  for (int d = 0; d < 3; ++d) p = detail::put_u32(p, c);
  for (double v : t.values()) p = detail::put_f64(p, v);
  return buf;
}

/// Throws FormatError on bad magic, version, dims or payload length.
inline OInfoTensor decode_tensor(const std::vector<std::uint8_t>& buf) {
  if (buf.size() < kTensorHeaderBytes) throw FormatError("tensor file shorter than header");
  if (!std::equal(kTensorMagic.begin(), kTensorMagic.end(), buf.begin())) {
    throw FormatError("bad magic; not an HOI1 tensor");
  }
  const std::uint32_t version = detail::get_u32(buf.data() + 4);
  if (version != kTensorVersion) {
    throw FormatError("unsupported tensor format version " + std::to_string(version));
  }
  const std::uint32_t d0 = detail::get_u32(buf.data() + 8);
  const std::uint32_t d1 = detail::get_u32(buf.data() + 12);
  const std::uint32_t d2 = detail::get_u32(buf.data() + 16);
  if (d0 != d1 || d1 != d2) throw FormatError("tensor dims are not cubic");
  const std::size_t c = d0;
  const std::size_t cells = c * c * c;
  if (buf.size() != kTensorHeaderBytes + 8 * cells) {
    throw FormatError("tensor payload length does not match dims");
  }
  std::vector<double> values(cells);
  const std::uint8_t* p = buf.data() + kTensorHeaderBytes;
  for (std::size_t n = 0; n < cells; ++n, p += 8) values[n] = detail::get_f64(p);
  return OInfoTensor(c, std::move(values));
}

inline void write_tensor(const std::filesystem::path& path, const OInfoTensor& t) {
  const auto buf = encode_tensor(t);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) throw Error("write failed for " + path.string());
}

inline OInfoTensor read_tensor(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<std::uint8_t> buf((std::istreambuf_iterator<char>(in)),
                                std::istreambuf_iterator<char>());
  return decode_tensor(buf);
}

}  // namespace hoi::io
