#pragma once

#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "core.hpp"
#include "metrics.hpp"

namespace panfuse {

namespace detail {

inline std::vector<unsigned char> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (in.bad()) throw Error("read failure on " + path.string());
  return bytes;
}

inline void write_file(const std::filesystem::path& path,
                       const std::vector<unsigned char>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write failure on " + path.string());
}

inline std::uint32_t read_u32le(const unsigned char* p) {
  return std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 | std::uint32_t(p[2]) << 16 |
         std::uint32_t(p[3]) << 24;
}

inline void append_u32le(std::vector<unsigned char>& out, std::uint32_t v) {
  out.push_back(static_cast<unsigned char>(v & 0xff));
  out.push_back(static_cast<unsigned char>((v >> 8) & 0xff));
  out.push_back(static_cast<unsigned char>((v >> 16) & 0xff));
  out.push_back(static_cast<unsigned char>((v >> 24) & 0xff));
}

}  // namespace detail

/// BRS container: "BRS1", u32le width/height/band count, then row-major
/// 32-bit little-endian float planes. File size is exactly
/// 16 + 4*width*height*bands.
template <typename T = double>
BasicBandStack<T> load_brs(const std::filesystem::path& path) {
  const std::vector<unsigned char> bytes = detail::read_file(path);
  if (bytes.size() < 4 || std::memcmp(bytes.data(), "BRS1", 4) != 0)
    throw FormatError(path.string() + ": bad magic at byte offset 0");
  if (bytes.size() < 16)
    throw FormatError(path.string() + ": truncated header at byte offset " +
                      std::to_string(bytes.size()));
  const std::uint32_t width = detail::read_u32le(bytes.data() + 4);
  const std::uint32_t height = detail::read_u32le(bytes.data() + 8);
  const std::uint32_t band_count = detail::read_u32le(bytes.data() + 12);
  if (width == 0 || height == 0 || band_count == 0)
    throw FormatError(path.string() + ": zero dimension in header at byte offset 4");
  const std::uint64_t expected =
      16 + 4ull * width * height * band_count;
  if (bytes.size() < expected)
    throw FormatError(path.string() + ": truncated file at byte offset " +
                      std::to_string(bytes.size()) + " (expected " +
                      std::to_string(expected) + " bytes)");
  if (bytes.size() > expected)
    throw FormatError(path.string() + ": trailing data at byte offset " +
                      std::to_string(expected));

  std::vector<BasicBand<T>> bands;
  bands.reserve(band_count);
  std::size_t offset = 16;
  for (std::uint32_t b = 0; b < band_count; ++b) {
    std::vector<T> samples(static_cast<std::size_t>(width) * height);
    for (std::size_t i = 0; i < samples.size(); ++i, offset += 4) {
      const float f = std::bit_cast<float>(detail::read_u32le(bytes.data() + offset));
      if (!std::isfinite(f))
        throw FormatError(path.string() + ": non-finite sample at byte offset " +
                          std::to_string(offset));
      samples[i] = static_cast<T>(f);
    }
    bands.emplace_back(width, height, std::move(samples));
  }
  return BasicBandStack<T>(std::move(bands));
}

template <typename T>
void save_brs(const std::filesystem::path& path, const BasicBandStack<T>& stack) {
  if (stack.width() > 0xffffffffull || stack.height() > 0xffffffffull ||
      stack.band_count() > 0xffffffffull)
    throw ParameterError("stack too large for BRS header");
  std::vector<unsigned char> bytes;
  bytes.reserve(16 + 4 * stack.band_count() * stack.band(0).pixel_count());
  bytes.insert(bytes.end(), {'B', 'R', 'S', '1'});
  detail::append_u32le(bytes, static_cast<std::uint32_t>(stack.width()));
  detail::append_u32le(bytes, static_cast<std::uint32_t>(stack.height()));
  detail::append_u32le(bytes, static_cast<std::uint32_t>(stack.band_count()));
  for (const auto& band : stack.bands()) {
    for (const T& v : band.samples()) {
      if (std::abs(static_cast<double>(v)) >
          static_cast<double>(std::numeric_limits<float>::max()))
        throw FormatError("sample " + std::to_string(static_cast<double>(v)) +
                          " not representable as a 32-bit float");
      detail::append_u32le(bytes, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
    }
  }
  detail::write_file(path, bytes);
}

namespace detail {

// PGM header token reader: skips whitespace and '#' comments.
inline std::uint64_t pgm_token(const std::vector<unsigned char>& bytes,
                               std::size_t& offset, const std::string& file) {
  while (offset < bytes.size()) {
    if (std::isspace(bytes[offset])) {
      ++offset;
    } else if (bytes[offset] == '#') {
      while (offset < bytes.size() && bytes[offset] != '\n') ++offset;
    } else {
      break;
    }
  }
  if (offset >= bytes.size() || !std::isdigit(bytes[offset]))
    throw FormatError(file + ": expected header number at byte offset " +
                      std::to_string(offset));
  std::uint64_t v = 0;
  while (offset < bytes.size() && std::isdigit(bytes[offset])) {
    v = v * 10 + (bytes[offset] - '0');
    if (v > 0xffffffffull)
      throw FormatError(file + ": header number overflow at byte offset " +
                        std::to_string(offset));
    ++offset;
  }
  return v;
}

}  // namespace detail

/// Binary PGM (P5) import; samples become real values in [0, maxval].
/// 16-bit rasters are big-endian per the format.
template <typename T = double>
BasicBand<T> load_pgm(const std::filesystem::path& path) {
  const std::vector<unsigned char> bytes = detail::read_file(path);
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5')
    throw FormatError(path.string() + ": bad magic at byte offset 0 (want P5)");
  std::size_t offset = 2;
  const std::uint64_t width = detail::pgm_token(bytes, offset, path.string());
  const std::uint64_t height = detail::pgm_token(bytes, offset, path.string());
  const std::uint64_t maxval = detail::pgm_token(bytes, offset, path.string());
  if (width == 0 || height == 0)
    throw FormatError(path.string() + ": zero dimension in header");
  if (maxval == 0 || maxval > 65535)
    throw FormatError(path.string() + ": maxval " + std::to_string(maxval) +
                      " outside [1, 65535]");
  if (offset >= bytes.size() || !std::isspace(bytes[offset]))
    throw FormatError(path.string() + ": expected whitespace before raster at byte offset " +
                      std::to_string(offset));
  ++offset;

  const std::size_t sample_bytes = maxval > 255 ? 2 : 1;
  const std::uint64_t expected = offset + width * height * sample_bytes;
  if (bytes.size() < expected)
    throw FormatError(path.string() + ": truncated raster at byte offset " +
                      std::to_string(bytes.size()) + " (expected " +
                      std::to_string(expected) + " bytes)");

  std::vector<T> samples(static_cast<std::size_t>(width * height));
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (sample_bytes == 1) {
      samples[i] = static_cast<T>(bytes[offset + i]);
    } else {
      const std::size_t o = offset + 2 * i;
      samples[i] = static_cast<T>((std::uint32_t(bytes[o]) << 8) | bytes[o + 1]);
    }
  }
  return BasicBand<T>(static_cast<std::size_t>(width), static_cast<std::size_t>(height),
                      std::move(samples));
}

/// Binary PGM (P5) export: clamps to [0, maxval], rounds half away from zero.
template <typename T>
void save_pgm(const std::filesystem::path& path, const BasicBand<T>& band,
              unsigned maxval = 255) {
  if (maxval == 0 || maxval > 65535)
    throw ParameterError("pgm maxval must be in [1, 65535]");
  std::string header = "P5\n" + std::to_string(band.width()) + " " +
                       std::to_string(band.height()) + "\n" + std::to_string(maxval) +
                       "\n";
  std::vector<unsigned char> bytes(header.begin(), header.end());
  for (const T& v : band.samples()) {
    double x = std::round(static_cast<double>(v));
    if (x < 0) x = 0;
    if (x > maxval) x = maxval;
    const auto q = static_cast<std::uint32_t>(x);
    if (maxval > 255) bytes.push_back(static_cast<unsigned char>((q >> 8) & 0xff));
    bytes.push_back(static_cast<unsigned char>(q & 0xff));
  }
  detail::write_file(path, bytes);
}

/// CSV report: optional "# key=value" metadata lines, a band,method,cc,uiqi
/// header, then per method one row per band plus a Mean row, 4 decimals.
inline void write_report_csv(
    std::ostream& os,
    const std::vector<std::pair<std::string, QualityReport>>& reports,
    const std::vector<std::pair<std::string, std::string>>& metadata = {}) {
  for (const auto& [key, value] : metadata) os << "# " << key << "=" << value << "\n";
  os << "band,method,cc,uiqi\n";
  char buf[64];
  for (const auto& [label, report] : reports) {
    for (const auto& row : report.per_band) {
      std::snprintf(buf, sizeof buf, "%.4f,%.4f", row.cc, row.uiqi);
      os << row.band << "," << label << "," << buf << "\n";
    }
    std::snprintf(buf, sizeof buf, "%.4f,%.4f", report.mean_cc, report.mean_uiqi);
    os << "Mean," << label << "," << buf << "\n";
  }
}

}  // namespace panfuse
