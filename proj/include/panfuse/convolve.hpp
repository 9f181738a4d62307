#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace panfuse::detail {

// Whole-sample mirror extension: ... 2 1 | 0 1 ... n-1 | n-2 n-3 ...
inline std::size_t mirror_index(std::ptrdiff_t i, std::size_t n) {
  if (n <= 1) return 0;
  const std::ptrdiff_t period = 2 * (static_cast<std::ptrdiff_t>(n) - 1);
  std::ptrdiff_t m = i % period;
  if (m < 0) m += period;
  if (m >= static_cast<std::ptrdiff_t>(n)) m = period - m;
  return static_cast<std::size_t>(m);
}

// Cubic B3-spline scaling taps.
template <typename T>
inline constexpr std::array<T, 5> b3_taps{T(1) / 16, T(4) / 16, T(6) / 16,
                                          T(4) / 16, T(1) / 16};

// One separable smoothing pass with taps dilated by `step` (the "holes"),
// rows then columns, mirror boundary.
template <typename T>
std::vector<T> b3_smooth(const std::vector<T>& src, std::size_t width,
                         std::size_t height, std::size_t step) {
  const auto& h = b3_taps<T>;
  const std::ptrdiff_t s = static_cast<std::ptrdiff_t>(step);
  std::vector<T> rows(src.size()), out(src.size());
  for (std::size_t r = 0; r < height; ++r) {
    const T* in = src.data() + r * width;
    T* o = rows.data() + r * width;
    for (std::size_t c = 0; c < width; ++c) {
      const std::ptrdiff_t ci = static_cast<std::ptrdiff_t>(c);
      o[c] = h[0] * in[mirror_index(ci - 2 * s, width)] +
             h[1] * in[mirror_index(ci - s, width)] + h[2] * in[c] +
             h[3] * in[mirror_index(ci + s, width)] +
             h[4] * in[mirror_index(ci + 2 * s, width)];
    }
  }
  for (std::size_t c = 0; c < width; ++c) {
    for (std::size_t r = 0; r < height; ++r) {
      const std::ptrdiff_t ri = static_cast<std::ptrdiff_t>(r);
      out[r * width + c] = h[0] * rows[mirror_index(ri - 2 * s, height) * width + c] +
                           h[1] * rows[mirror_index(ri - s, height) * width + c] +
                           h[2] * rows[r * width + c] +
                           h[3] * rows[mirror_index(ri + s, height) * width + c] +
                           h[4] * rows[mirror_index(ri + 2 * s, height) * width + c];
    }
  }
  return out;
}

// Separable (2r+1)x(2r+1) mean filter, mirror boundary.
template <typename T>
std::vector<T> box_smooth(const std::vector<T>& src, std::size_t width,
                          std::size_t height, std::size_t radius) {
  const std::ptrdiff_t r0 = static_cast<std::ptrdiff_t>(radius);
  const T inv = T(1) / static_cast<T>(2 * radius + 1);
  std::vector<T> rows(src.size()), out(src.size());
  for (std::size_t r = 0; r < height; ++r) {
    const T* in = src.data() + r * width;
    T* o = rows.data() + r * width;
    for (std::size_t c = 0; c < width; ++c) {
      T acc{};
      for (std::ptrdiff_t k = -r0; k <= r0; ++k)
        acc += in[mirror_index(static_cast<std::ptrdiff_t>(c) + k, width)];
      o[c] = acc * inv;
    }
  }
  for (std::size_t c = 0; c < width; ++c) {
    for (std::size_t r = 0; r < height; ++r) {
      T acc{};
      for (std::ptrdiff_t k = -r0; k <= r0; ++k)
        acc += rows[mirror_index(static_cast<std::ptrdiff_t>(r) + k, height) * width + c];
      out[r * width + c] = acc * inv;
    }
  }
  return out;
}

}  // namespace panfuse::detail
