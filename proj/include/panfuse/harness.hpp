#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "convolve.hpp"
#include "core.hpp"
#include "fusion.hpp"
#include "metrics.hpp"
#include "resample.hpp"

namespace panfuse {

namespace detail {

// mt19937_64 with an explicit bit-to-double mapping so sequences are
// identical across standard libraries.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : gen_(seed) {}

  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  std::uint64_t below(std::uint64_t n) { return gen_() % n; }

  std::uint64_t range(std::uint64_t lo, std::uint64_t hi) {  // [lo, hi)
    return lo + below(hi - lo);
  }

 private:
  std::mt19937_64 gen_;
};

inline std::vector<double> noise_field(SeededRng& rng, std::size_t w, std::size_t h) {
  std::vector<double> out(w * h);
  for (double& v : out) v = rng.uniform();
  return out;
}

// low-passed, min-max normalized noise
inline std::vector<double> smooth_field(SeededRng& rng, std::size_t w, std::size_t h,
                                        int octaves) {
  std::vector<double> f = noise_field(rng, w, h);
  for (int p = 0; p < octaves; ++p) f = b3_smooth(f, w, h, std::size_t{1} << p);
  double lo = f[0], hi = f[0];
  for (double v : f) {
    lo = v < lo ? v : lo;
    hi = v > hi ? v : hi;
  }
  const double span = hi - lo > 0 ? hi - lo : 1.0;
  for (double& v : f) v = (v - lo) / span;
  return f;
}

}  // namespace detail

/// A reproducible test scene: a high-resolution reference stack with smooth
/// chromatic structure plus small sharp objects whose colours differ per
/// band, a correlated PAN with extra fine texture, and the degraded MS.
struct SyntheticScene {
  Band pan;
  BandStack ms;
  BandStack reference;
  std::uint64_t seed = 0;
};

inline SyntheticScene generate_scene(std::size_t width, std::size_t height,
                                     std::size_t bands, std::size_t ratio,
                                     std::uint64_t seed) {
  if (bands < 2) throw ParameterError("synthetic scenes need at least 2 bands");
  if (ratio < 1) throw ParameterError("ratio must be >= 1");
  if (width % ratio != 0 || height % ratio != 0)
    throw ParameterError("scene dimensions " + std::to_string(width) + "x" +
                         std::to_string(height) + " not divisible by ratio " +
                         std::to_string(ratio));
  if (width < 8 || height < 8) throw ParameterError("scene dimensions must be >= 8");

  detail::SeededRng rng(seed);
  const std::vector<double> lum = detail::smooth_field(rng, width, height, 4);

  std::vector<std::vector<double>> ref(bands);
  for (std::size_t b = 0; b < bands; ++b) {
    const std::vector<double> own = detail::smooth_field(rng, width, height, 4);
    const double offset = rng.uniform(0.15, 0.40);
    const double gain = rng.uniform(0.35, 0.60);
    ref[b].resize(width * height);
    for (std::size_t i = 0; i < ref[b].size(); ++i)
      ref[b][i] = offset + gain * (0.45 * lum[i] + 0.55 * own[i]);
  }

  // small sharp objects with independent per-band intensities
  const std::size_t prims = std::max<std::size_t>(8, width * height / 640);
  for (std::size_t k = 0; k < prims; ++k) {
    const bool rect = rng.below(2) == 0;
    const std::size_t cx = rng.range(3, width - 3);
    const std::size_t cy = rng.range(3, height - 3);
    const std::size_t sz = rng.range(2, std::max<std::size_t>(3, width / 10));
    std::vector<double> colors(bands);
    for (double& c : colors) c = 0.08 + 0.88 * rng.uniform();
    const std::size_t x0 = cx > sz ? cx - sz : 0;
    const std::size_t y0 = cy > sz ? cy - sz : 0;
    const std::size_t x1 = std::min(width, cx + sz);
    const std::size_t y1 = std::min(height, cy + sz);
    for (std::size_t y = y0; y < y1; ++y) {
      for (std::size_t x = x0; x < x1; ++x) {
        if (!rect) {
          const double dx = static_cast<double>(x) - static_cast<double>(cx);
          const double dy = static_cast<double>(y) - static_cast<double>(cy);
          if (dx * dx + dy * dy > static_cast<double>(sz * sz)) continue;
        }
        for (std::size_t b = 0; b < bands; ++b) ref[b][y * width + x] = colors[b];
      }
    }
  }

  std::vector<double> weights(bands);
  double wsum = 0;
  for (double& w : weights) {
    w = 0.5 + rng.uniform();
    wsum += w;
  }
  std::vector<double> pan(width * height, 0.0);
  for (std::size_t b = 0; b < bands; ++b) {
    const double w = weights[b] / wsum;
    for (std::size_t i = 0; i < pan.size(); ++i) pan[i] += w * ref[b][i];
  }
  std::vector<double> tex = detail::noise_field(rng, width, height);
  const std::vector<double> tex_low = detail::b3_smooth(tex, width, height, 1);
  for (std::size_t i = 0; i < pan.size(); ++i) pan[i] += 0.015 * (tex[i] - tex_low[i]);

  std::vector<std::string> names;
  if (bands == 4) {
    names = {"Red", "Green", "Blue", "NIR"};
  }
  std::vector<Band> ref_bands;
  ref_bands.reserve(bands);
  for (auto& samples : ref) ref_bands.emplace_back(width, height, std::move(samples));
  BandStack reference(std::move(ref_bands), names);
  BandStack ms = degrade(reference, ratio);
  return {Band(width, height, std::move(pan)), std::move(ms), std::move(reference), seed};
}

/// One full comparison run: which fusers, at what ratio, scored how.
struct ExperimentSpec {
  std::vector<Method> methods;
  int ratio = 4;
  WindowSpec window{};
  ResampleKernel kernel = ResampleKernel::Bicubic;
  std::optional<int> levels;
  std::optional<PanMatch> pan_match;  // aw/sw only
};

namespace detail {

inline void validate_experiment(const ExperimentSpec& spec) {
  if (spec.methods.empty()) throw ParameterError("experiment needs at least one method");
  if (spec.ratio < 2 || (spec.ratio & (spec.ratio - 1)) != 0)
    throw ParameterError("experiment ratio must be a power of two >= 2, got " +
                         std::to_string(spec.ratio));
}

}  // namespace detail

/// Reference protocol: degrade the reference stack by the ratio, resample it
/// back to the PAN grid, fuse with each method, and score every result
/// against the untouched reference.
template <typename T>
std::vector<std::pair<Method, QualityReport>> run_experiment(
    const BasicBand<T>& pan, const BasicBandStack<T>& reference,
    const ExperimentSpec& spec) {
  detail::validate_experiment(spec);
  if (pan.width() != reference.width() || pan.height() != reference.height())
    throw ShapeError("pan and reference stacks must share dimensions");

  const std::size_t ratio = static_cast<std::size_t>(spec.ratio);
  const BasicBandStack<T> ms_low = degrade(reference, ratio);
  const BasicBandStack<T> ms_up = upsample(ms_low, ResampleSpec{ratio, spec.kernel});

  std::vector<std::pair<Method, QualityReport>> out;
  out.reserve(spec.methods.size());
  for (Method method : spec.methods) {
    FusionConfig cfg;
    cfg.method = method;
    cfg.ratio = spec.ratio;
    cfg.levels = spec.levels;
    if (method == Method::AW || method == Method::SW) cfg.pan_match = spec.pan_match;
    const std::string tag = std::string("method ") + method_name(method) + ": ";
    try {
      const auto result = fuse(pan, ms_up, cfg);
      out.emplace_back(method, evaluate_stack(result.fused, reference, spec.window));
    } catch (const ShapeError& e) {
      throw ShapeError(tag + e.what());
    } catch (const ParameterError& e) {
      throw ParameterError(tag + e.what());
    } catch (const NumericError& e) {
      throw NumericError(tag + e.what());
    } catch (const Error& e) {
      throw Error(tag + e.what());
    }
  }
  return out;
}

}  // namespace panfuse
