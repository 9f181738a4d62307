#pragma once

#include <algorithm>
#include <cstddef>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "convolve.hpp"
#include "core.hpp"

namespace panfuse {

/// Shift-invariant ("a trous") undecimated wavelet decomposition: n detail
/// planes (finest first) plus the level-n low-pass residual, all at the
/// source band's size. residual + sum(planes) reconstructs the source.
template <typename T = double>
struct BasicWaveletDecomposition {
  std::vector<BasicBand<T>> planes;
  BasicBand<T> residual;

  std::size_t levels() const { return planes.size(); }
};

using WaveletDecomposition = BasicWaveletDecomposition<double>;

/// Deepest level whose dilated kernel support 4*2^(L-1)+1 still fits the
/// shorter image side; never less than 1.
inline int max_levels_for(std::size_t width, std::size_t height) {
  const std::size_t dim = std::min(width, height);
  int levels = 1;
  while ((std::size_t{4} << levels) + 1 <= dim) ++levels;  // support of level L+1
  return levels;
}

/// Decompose a band into `levels` detail planes plus a residual using the
/// dilated B3-spline cascade. Levels too deep for the band are clamped with
/// a warning on stderr.
template <typename T>
BasicWaveletDecomposition<T> decompose(const BasicBand<T>& band, int levels) {
  if (levels < 1)
    throw ParameterError("wavelet levels must be >= 1, got " + std::to_string(levels));
  const int fit = max_levels_for(band.width(), band.height());
  if (levels > fit) {
    std::cerr << "panfuse: clamping wavelet levels " << levels << " -> " << fit
              << " for " << band.width() << "x" << band.height() << " band\n";
    levels = fit;
  }

  std::vector<T> c = band.samples();
  std::vector<BasicBand<T>> planes;
  planes.reserve(static_cast<std::size_t>(levels));
  for (int j = 1; j <= levels; ++j) {
    std::vector<T> next =
        detail::b3_smooth(c, band.width(), band.height(), std::size_t{1} << (j - 1));
    std::vector<T> plane(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) plane[i] = c[i] - next[i];
    planes.emplace_back(band.width(), band.height(), std::move(plane));
    c = std::move(next);
  }
  return {std::move(planes), BasicBand<T>(band.width(), band.height(), std::move(c))};
}

/// residual + sum of detail planes.
template <typename T>
BasicBand<T> reconstruct(const BasicWaveletDecomposition<T>& d) {
  std::vector<T> acc = d.residual.samples();
  for (const auto& plane : d.planes) {
    detail::require_same_shape(d.residual, plane, "reconstruct planes");
    const auto& p = plane.samples();
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += p[i];
  }
  return BasicBand<T>(d.residual.width(), d.residual.height(), std::move(acc));
}

/// Detail planes taken from `source`, residual kept from `target`; no
/// scaling or histogram matching of any kind.
template <typename T>
BasicWaveletDecomposition<T> substitute_planes(const BasicWaveletDecomposition<T>& target,
                                               const BasicWaveletDecomposition<T>& source) {
  if (target.levels() != source.levels())
    throw ShapeError("substitute_planes: level counts differ (" +
                     std::to_string(target.levels()) + " vs " +
                     std::to_string(source.levels()) + ")");
  detail::require_same_shape(target.residual, source.residual, "substitute_planes");
  return {source.planes, target.residual};
}

/// Level-n low-pass of a band (the decomposition residual, planes discarded).
template <typename T>
BasicBand<T> residual_of(const BasicBand<T>& band, int levels) {
  if (levels < 1)
    throw ParameterError("wavelet levels must be >= 1, got " + std::to_string(levels));
  const int fit = max_levels_for(band.width(), band.height());
  levels = std::min(levels, fit);
  std::vector<T> c = band.samples();
  for (int j = 1; j <= levels; ++j)
    c = detail::b3_smooth(c, band.width(), band.height(), std::size_t{1} << (j - 1));
  return BasicBand<T>(band.width(), band.height(), std::move(c));
}

}  // namespace panfuse
