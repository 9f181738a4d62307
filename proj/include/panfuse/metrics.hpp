#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "core.hpp"

namespace panfuse {

/// Sliding-window protocol: an 8x8 window moved pixel by pixel unless
/// configured otherwise.
struct WindowSpec {
  std::size_t size = 8;
  std::size_t stride = 1;
};

enum class Metric { CC, UIQI };

namespace detail {

// Shared by the scalar metrics and the window sweep so both routes flag the
// same windows degenerate.
inline constexpr double kMomentTol = 1e-13;

struct PairMoments {
  std::size_t count = 0;
  double mean_a = 0, mean_b = 0;
  double var_a = 0, var_b = 0;  // population
  double cov = 0;
  double msq_a = 0, msq_b = 0;  // mean of squares, the degeneracy scale
};

struct Rect {
  std::size_t row = 0, col = 0, height = 0, width = 0;
};

template <typename T>
PairMoments pair_moments(const BasicBand<T>& a, const BasicBand<T>& b, Rect r) {
  PairMoments m;
  m.count = r.width * r.height;
  const std::size_t stride = a.width();
  const T* pa = a.samples().data() + r.row * stride + r.col;
  const T* pb = b.samples().data() + r.row * stride + r.col;
  double sum_a = 0, sum_b = 0, sum_aa = 0, sum_bb = 0;
  for (std::size_t i = 0; i < r.height; ++i) {
    const T* ra = pa + i * stride;
    const T* rb = pb + i * stride;
    for (std::size_t j = 0; j < r.width; ++j) {
      sum_a += ra[j];
      sum_b += rb[j];
      sum_aa += double(ra[j]) * ra[j];
      sum_bb += double(rb[j]) * rb[j];
    }
  }
  const double inv = 1.0 / static_cast<double>(m.count);
  m.mean_a = sum_a * inv;
  m.mean_b = sum_b * inv;
  m.msq_a = sum_aa * inv;
  m.msq_b = sum_bb * inv;
  double da = 0, db = 0, dab = 0;
  for (std::size_t i = 0; i < r.height; ++i) {
    const T* ra = pa + i * stride;
    const T* rb = pb + i * stride;
    for (std::size_t j = 0; j < r.width; ++j) {
      const double xa = ra[j] - m.mean_a;
      const double xb = rb[j] - m.mean_b;
      da += xa * xa;
      db += xb * xb;
      dab += xa * xb;
    }
  }
  m.var_a = da * inv;
  m.var_b = db * inv;
  m.cov = dab * inv;
  return m;
}

inline bool variance_degenerate(double var, double msq) { return var <= kMomentTol * msq; }

inline bool cc_degenerate(const PairMoments& m) {
  return variance_degenerate(m.var_a, m.msq_a) || variance_degenerate(m.var_b, m.msq_b);
}

inline bool uiqi_degenerate(const PairMoments& m) {
  return cc_degenerate(m) ||
         m.mean_a * m.mean_a + m.mean_b * m.mean_b <= kMomentTol * (m.msq_a + m.msq_b);
}

inline double cc_value(const PairMoments& m) {
  return m.cov / std::sqrt(m.var_a * m.var_b);
}

// correlation x luminance x contrast
inline double uiqi_value(const PairMoments& m) {
  const double sa = std::sqrt(m.var_a), sb = std::sqrt(m.var_b);
  const double corr = m.cov / (sa * sb);
  const double lum =
      2.0 * m.mean_a * m.mean_b / (m.mean_a * m.mean_a + m.mean_b * m.mean_b);
  const double con = 2.0 * sa * sb / (m.var_a + m.var_b);
  return corr * lum * con;
}

template <typename T>
bool constant_band(const BasicBand<T>& a) {
  for (const T& v : a.samples())
    if (v != a.samples()[0]) return false;
  return true;
}

template <typename T>
void require_metric_pair(const BasicBand<T>& a, const BasicBand<T>& b) {
  require_same_shape(a, b, "metric operands");
  if (a.pixel_count() < 2) throw ParameterError("metrics need at least 2 pixels");
}

}  // namespace detail

/// Pearson correlation over all pixels. Two identical constant bands score
/// 1; any other zero-variance pairing scores 0.
template <typename T>
double cc(const BasicBand<T>& a, const BasicBand<T>& b) {
  detail::require_metric_pair(a, b);
  if (detail::constant_band(a) && detail::constant_band(b))
    return a.samples()[0] == b.samples()[0] ? 1.0 : 0.0;
  const auto m = detail::pair_moments(a, b, {0, 0, a.height(), a.width()});
  if (detail::cc_degenerate(m)) return 0.0;
  return detail::cc_value(m);
}

/// Universal image quality index: correlation, luminance and contrast
/// factors with population moments. Degenerate inputs (zero variance, or a
/// zero luminance denominator) score 0.
template <typename T>
double uiqi(const BasicBand<T>& a, const BasicBand<T>& b) {
  detail::require_metric_pair(a, b);
  const auto m = detail::pair_moments(a, b, {0, 0, a.height(), a.width()});
  if (detail::uiqi_degenerate(m)) return 0.0;
  return detail::uiqi_value(m);
}

struct WindowedValue {
  double value = 0;
  std::size_t windows = 0;
  std::size_t skipped = 0;
};

namespace detail {

struct WindowSweep {
  WindowedValue cc, uiqi;
};

template <typename T>
WindowSweep windowed_sweep(const BasicBand<T>& a, const BasicBand<T>& b,
                           const WindowSpec& w) {
  require_metric_pair(a, b);
  if (w.size < 2) throw ParameterError("window size must be >= 2");
  if (w.stride < 1) throw ParameterError("window stride must be >= 1");
  if (w.size > a.width() || w.size > a.height())
    throw ParameterError("window " + std::to_string(w.size) + " larger than image " +
                         std::to_string(a.width()) + "x" + std::to_string(a.height()));
  WindowSweep sweep;
  double cc_sum = 0, uiqi_sum = 0;
  std::size_t cc_used = 0, uiqi_used = 0;
  for (std::size_t r = 0; r + w.size <= a.height(); r += w.stride) {
    for (std::size_t c = 0; c + w.size <= a.width(); c += w.stride) {
      const auto m = pair_moments(a, b, {r, c, w.size, w.size});
      ++sweep.cc.windows;
      ++sweep.uiqi.windows;
      if (cc_degenerate(m)) {
        ++sweep.cc.skipped;
      } else {
        cc_sum += cc_value(m);
        ++cc_used;
      }
      if (uiqi_degenerate(m)) {
        ++sweep.uiqi.skipped;
      } else {
        uiqi_sum += uiqi_value(m);
        ++uiqi_used;
      }
    }
  }
  // every window degenerate: fall back to the whole-image metric
  sweep.cc.value = cc_used ? cc_sum / static_cast<double>(cc_used) : panfuse::cc(a, b);
  sweep.uiqi.value =
      uiqi_used ? uiqi_sum / static_cast<double>(uiqi_used) : panfuse::uiqi(a, b);
  return sweep;
}

}  // namespace detail

/// Average of the metric over every full window placement, skipping windows
/// flagged degenerate; skip counts are reported alongside the value.
template <typename T>
WindowedValue windowed_metric_counted(const BasicBand<T>& a, const BasicBand<T>& b,
                                      const WindowSpec& w, Metric metric) {
  const auto sweep = detail::windowed_sweep(a, b, w);
  return metric == Metric::CC ? sweep.cc : sweep.uiqi;
}

template <typename T>
double windowed_metric(const BasicBand<T>& a, const BasicBand<T>& b, const WindowSpec& w,
                       Metric metric) {
  return windowed_metric_counted(a, b, w, metric).value;
}

struct BandQuality {
  std::string band;
  double cc = 0;
  double uiqi = 0;
  std::size_t cc_windows_skipped = 0;
  std::size_t uiqi_windows_skipped = 0;
};

struct QualityReport {
  std::vector<BandQuality> per_band;
  double mean_cc = 0;
  double mean_uiqi = 0;
  WindowSpec window;
  std::size_t windows_per_band = 0;
};

/// Windowed CC and UIQI per band plus their arithmetic means, laid out one
/// row per band with a trailing mean.
template <typename T>
QualityReport evaluate_stack(const BasicBandStack<T>& fused,
                             const BasicBandStack<T>& reference,
                             const WindowSpec& w = {}) {
  if (fused.band_count() != reference.band_count())
    throw ShapeError("band count mismatch: " + std::to_string(fused.band_count()) +
                     " fused vs " + std::to_string(reference.band_count()) + " reference");
  QualityReport report;
  report.window = w;
  double cc_sum = 0, uiqi_sum = 0;
  for (std::size_t b = 0; b < fused.band_count(); ++b) {
    const auto sweep = detail::windowed_sweep(fused.band(b), reference.band(b), w);
    report.per_band.push_back({reference.name(b), sweep.cc.value, sweep.uiqi.value,
                               sweep.cc.skipped, sweep.uiqi.skipped});
    report.windows_per_band = sweep.cc.windows;
    cc_sum += sweep.cc.value;
    uiqi_sum += sweep.uiqi.value;
  }
  report.mean_cc = cc_sum / static_cast<double>(fused.band_count());
  report.mean_uiqi = uiqi_sum / static_cast<double>(fused.band_count());
  return report;
}

}  // namespace panfuse
