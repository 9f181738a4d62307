#pragma once

#include <bit>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "convolve.hpp"
#include "core.hpp"

namespace panfuse {

enum class ResampleKernel { Nearest, Bilinear, Bicubic };

struct ResampleSpec {
  std::size_t factor = 1;
  ResampleKernel kernel = ResampleKernel::Bicubic;
};

namespace detail {

// Keys cubic convolution weight (a = -1/2) at distance t in [0, 2].
template <typename T>
inline T keys_weight(T t) {
  if (t <= T(1)) return ((T(1.5) * t - T(2.5)) * t) * t + T(1);
  if (t < T(2)) return ((T(-0.5) * t + T(2.5)) * t - T(4)) * t + T(2);
  return T(0);
}

// Upsample one line by an integer factor; output index f*i lands exactly on
// input index i, intermediate phases interpolate with mirror extension.
template <typename T>
void upsample_line(const T* in, std::size_t n, std::size_t stride_in, T* out,
                   std::size_t stride_out, std::size_t factor, ResampleKernel kernel) {
  auto sample = [&](std::ptrdiff_t i) { return in[mirror_index(i, n) * stride_in]; };
  for (std::size_t c = 0; c < n * factor; ++c) {
    const std::size_t q = c / factor;
    const std::size_t phase = c % factor;
    T v;
    if (phase == 0) {
      v = in[q * stride_in];
    } else {
      const T t = static_cast<T>(phase) / static_cast<T>(factor);
      const std::ptrdiff_t i0 = static_cast<std::ptrdiff_t>(q);
      switch (kernel) {
        case ResampleKernel::Nearest:
          v = t < T(0.5) ? sample(i0) : sample(i0 + 1);
          break;
        case ResampleKernel::Bilinear:
          v = (T(1) - t) * sample(i0) + t * sample(i0 + 1);
          break;
        default:
          v = keys_weight(t + T(1)) * sample(i0 - 1) + keys_weight(t) * sample(i0) +
              keys_weight(T(1) - t) * sample(i0 + 1) +
              keys_weight(T(2) - t) * sample(i0 + 2);
          break;
      }
    }
    out[c * stride_out] = v;
  }
}

}  // namespace detail

/// Enlarge a band by an integer factor; output pixel (factor*r, factor*c)
/// equals input pixel (r, c) for every kernel, so factor 1 is the identity.
template <typename T>
BasicBand<T> upsample(const BasicBand<T>& band, const ResampleSpec& spec) {
  if (spec.factor < 1) throw ParameterError("resample factor must be >= 1");
  const std::size_t w = band.width(), h = band.height(), f = spec.factor;
  if (w > static_cast<std::size_t>(-1) / f || h > static_cast<std::size_t>(-1) / f ||
      w * f > static_cast<std::size_t>(-1) / (h * f))
    throw ParameterError("upsample dimensions overflow: " + std::to_string(w) + "x" +
                         std::to_string(h) + " by factor " + std::to_string(f));
  if (f == 1) return band;

  // horizontal pass, then vertical
  std::vector<T> wide(w * f * h);
  for (std::size_t r = 0; r < h; ++r)
    detail::upsample_line(band.samples().data() + r * w, w, 1, wide.data() + r * w * f,
                          1, f, spec.kernel);
  std::vector<T> out(w * f * h * f);
  for (std::size_t c = 0; c < w * f; ++c)
    detail::upsample_line(wide.data() + c, h, w * f, out.data() + c, w * f, f,
                          spec.kernel);
  return BasicBand<T>(w * f, h * f, std::move(out));
}

template <typename T>
BasicBandStack<T> upsample(const BasicBandStack<T>& stack, const ResampleSpec& spec) {
  std::vector<BasicBand<T>> out;
  out.reserve(stack.band_count());
  for (const auto& b : stack.bands()) out.push_back(upsample(b, spec));
  return BasicBandStack<T>(std::move(out), stack.names());
}

/// Reduce a band by an integer factor: cumulative B3-spline low-pass (the
/// same dilated cascade the wavelet transform uses, ceil(log2(factor))
/// passes) followed by decimation.
template <typename T>
BasicBand<T> degrade(const BasicBand<T>& band, std::size_t factor) {
  if (factor < 1) throw ParameterError("degrade factor must be >= 1");
  if (band.width() % factor != 0 || band.height() % factor != 0)
    throw ShapeError("degrade: " + std::to_string(band.width()) + "x" +
                     std::to_string(band.height()) + " not divisible by " +
                     std::to_string(factor));
  if (factor == 1) return band;

  const int passes = std::bit_width(factor - 1);  // ceil(log2(factor))
  std::vector<T> c = band.samples();
  for (int p = 0; p < passes; ++p)
    c = detail::b3_smooth(c, band.width(), band.height(), std::size_t{1} << p);

  const std::size_t ow = band.width() / factor, oh = band.height() / factor;
  std::vector<T> out(ow * oh);
  for (std::size_t r = 0; r < oh; ++r)
    for (std::size_t cix = 0; cix < ow; ++cix)
      out[r * ow + cix] = c[(r * factor) * band.width() + cix * factor];
  return BasicBand<T>(ow, oh, std::move(out));
}

template <typename T>
BasicBandStack<T> degrade(const BasicBandStack<T>& stack, std::size_t factor) {
  std::vector<BasicBand<T>> out;
  out.reserve(stack.band_count());
  for (const auto& b : stack.bands()) out.push_back(degrade(b, factor));
  return BasicBandStack<T>(std::move(out), stack.names());
}

}  // namespace panfuse
