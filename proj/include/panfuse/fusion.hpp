#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "core.hpp"
#include "detail/jacobi.hpp"
#include "resample.hpp"
#include "wavelet.hpp"

namespace panfuse {

enum class Method { Brovey, AW, SW, BW, IHS, PCA, HPF };

inline const char* method_name(Method m) {
  switch (m) {
    case Method::Brovey: return "brovey";
    case Method::AW: return "aw";
    case Method::SW: return "sw";
    case Method::BW: return "bw";
    case Method::IHS: return "ihs";
    case Method::PCA: return "pca";
    case Method::HPF: return "hpf";
  }
  return "?";
}

inline std::optional<Method> method_from_string(std::string_view s) {
  if (s == "brovey") return Method::Brovey;
  if (s == "aw") return Method::AW;
  if (s == "sw") return Method::SW;
  if (s == "bw") return Method::BW;
  if (s == "ihs") return Method::IHS;
  if (s == "pca") return Method::PCA;
  if (s == "hpf") return Method::HPF;
  return std::nullopt;
}

enum class PanMatch { None, MeanStd };

/// Knobs shared by all fusers. Unset optionals resolve to the documented
/// defaults at fuse time: levels = log2(ratio) (at least 1), denom_epsilon =
/// 1e-6 * PAN dynamic range, hpf_kernel = 2*ratio+1, pan_match = mean/std
/// for aw/sw. bw never matches, per its definition.
struct FusionConfig {
  Method method = Method::BW;
  int ratio = 4;
  std::optional<int> levels;
  std::optional<double> denom_epsilon;
  std::optional<PanMatch> pan_match;
  std::optional<int> hpf_kernel;

  int effective_levels() const {
    if (levels) return *levels;
    int n = 0;
    for (int r = ratio; r > 1; r /= 2) ++n;  // floor(log2(ratio))
    return n < 1 ? 1 : n;
  }

  int effective_hpf_kernel() const { return hpf_kernel ? *hpf_kernel : 2 * ratio + 1; }
};

namespace detail {

inline void validate_config(const FusionConfig& cfg) {
  if (cfg.ratio < 1)
    throw ParameterError("ratio must be >= 1, got " + std::to_string(cfg.ratio));
  if (cfg.levels && *cfg.levels < 1)
    throw ParameterError("levels must be >= 1, got " + std::to_string(*cfg.levels));
  if (cfg.denom_epsilon && !(*cfg.denom_epsilon > 0.0))
    throw ParameterError("denom_epsilon must be > 0");
  if (cfg.hpf_kernel && (*cfg.hpf_kernel < 3 || *cfg.hpf_kernel % 2 == 0))
    throw ParameterError("hpf kernel must be odd and >= 3, got " +
                         std::to_string(*cfg.hpf_kernel));
  if (cfg.pan_match && cfg.method != Method::AW && cfg.method != Method::SW)
    throw ParameterError(std::string("pan matching is only configurable for aw/sw, not ") +
                         method_name(cfg.method));
}

template <typename T>
void require_fusable(const BasicBand<T>& pan, const BasicBandStack<T>& ms) {
  if (pan.width() != ms.width() || pan.height() != ms.height())
    throw ShapeError("pan " + std::to_string(pan.width()) + "x" +
                     std::to_string(pan.height()) + " vs ms " + std::to_string(ms.width()) +
                     "x" + std::to_string(ms.height()) +
                     " (resample the ms stack to the pan grid first)");
}

template <typename T>
T default_epsilon(const BasicBand<T>& pan) {
  const T range = band_max(pan) - band_min(pan);
  const T eps = T(1e-6) * range;
  return eps > T(0) ? eps : T(1e-6);
}

/// Affine-match src to target's mean and standard deviation. A zero-variance
/// source leaves src unchanged (the scale is undefined there).
template <typename T>
BasicBand<T> match_mean_std(const BasicBand<T>& src, const BasicBand<T>& target) {
  const T ms = band_mean(src), vs = band_variance(src);
  if (vs <= T(0)) return src;
  const T mt = band_mean(target), vt = band_variance(target);
  const T gain = std::sqrt(vt / vs);
  return map1(src, [=](T x) { return (x - ms) * gain + mt; });
}

template <typename T>
BasicBand<T> sum_of_planes(const BasicWaveletDecomposition<T>& d) {
  std::vector<T> acc(d.residual.pixel_count(), T{});
  for (const auto& plane : d.planes) {
    const auto& p = plane.samples();
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += p[i];
  }
  return BasicBand<T>(d.residual.width(), d.residual.height(), std::move(acc));
}

}  // namespace detail

template <typename T = double>
struct BasicFusionResult {
  BasicBandStack<T> fused;
  Method method;
  FusionConfig config;
};

using FusionResult = BasicFusionResult<double>;

/// Brovey: F_i = PAN * MS_i / M with M the pixelwise band mean; pixels whose
/// M is at or below the epsilon guard output 0 instead of amplifying noise.
template <typename T>
BasicFusionResult<T> fuse_brovey(const BasicBand<T>& pan, const BasicBandStack<T>& ms,
                                 const FusionConfig& cfg = {.method = Method::Brovey}) {
  detail::validate_config(cfg);
  detail::require_fusable(pan, ms);
  const T eps = cfg.denom_epsilon ? static_cast<T>(*cfg.denom_epsilon)
                                  : detail::default_epsilon(pan);
  const BasicBand<T> m = pixelwise_mean(ms);
  std::vector<BasicBand<T>> fused;
  fused.reserve(ms.band_count());
  for (std::size_t b = 0; b < ms.band_count(); ++b) {
    std::vector<T> out(pan.pixel_count());
    const auto& msb = ms.band(b).samples();
    for (std::size_t i = 0; i < out.size(); ++i) {
      const T denom = m.samples()[i];
      out[i] = denom > eps ? (pan.samples()[i] / denom) * msb[i] : T{};
    }
    fused.emplace_back(pan.width(), pan.height(), std::move(out));
  }
  return {BasicBandStack<T>(std::move(fused), ms.names()), Method::Brovey, cfg};
}

/// Additive wavelet: F_i = MS_i + sum of PAN detail planes.
template <typename T>
BasicFusionResult<T> fuse_aw(const BasicBand<T>& pan, const BasicBandStack<T>& ms,
                             const FusionConfig& cfg = {.method = Method::AW}) {
  detail::validate_config(cfg);
  detail::require_fusable(pan, ms);
  const int n = cfg.effective_levels();
  const PanMatch match = cfg.pan_match.value_or(PanMatch::MeanStd);
  std::vector<BasicBand<T>> fused;
  fused.reserve(ms.band_count());
  if (match == PanMatch::None) {
    const BasicBand<T> details = detail::sum_of_planes(decompose(pan, n));
    for (const auto& band : ms.bands()) fused.push_back(add(band, details));
  } else {
    for (const auto& band : ms.bands()) {
      const BasicBand<T> matched = detail::match_mean_std(pan, band);
      fused.push_back(add(band, detail::sum_of_planes(decompose(matched, n))));
    }
  }
  return {BasicBandStack<T>(std::move(fused), ms.names()), Method::AW, cfg};
}

/// Substitution wavelet: F_i = MS_i + sum(PAN planes) - sum(MS_i planes);
/// the MS detail planes are discarded in favour of PAN's.
template <typename T>
BasicFusionResult<T> fuse_sw(const BasicBand<T>& pan, const BasicBandStack<T>& ms,
                             const FusionConfig& cfg = {.method = Method::SW}) {
  detail::validate_config(cfg);
  detail::require_fusable(pan, ms);
  const int n = cfg.effective_levels();
  const PanMatch match = cfg.pan_match.value_or(PanMatch::MeanStd);
  std::optional<BasicBand<T>> shared_details;
  if (match == PanMatch::None) shared_details = detail::sum_of_planes(decompose(pan, n));
  std::vector<BasicBand<T>> fused;
  fused.reserve(ms.band_count());
  for (const auto& band : ms.bands()) {
    const BasicBand<T> pan_details =
        match == PanMatch::None
            ? *shared_details
            : detail::sum_of_planes(decompose(detail::match_mean_std(pan, band), n));
    const BasicBand<T> ms_details = detail::sum_of_planes(decompose(band, n));
    fused.push_back(add(band, sub(pan_details, ms_details)));
  }
  return {BasicBandStack<T>(std::move(fused), ms.names()), Method::SW, cfg};
}

/// Brovey-wavelet hybrid: run Brovey, decompose both the Brovey result and
/// the MS band, graft the Brovey detail planes onto the MS residual, and
/// invert. No histogram matching anywhere on this path.
template <typename T>
BasicFusionResult<T> fuse_bw(const BasicBand<T>& pan, const BasicBandStack<T>& ms,
                             const FusionConfig& cfg = {.method = Method::BW}) {
  detail::validate_config(cfg);
  detail::require_fusable(pan, ms);
  const int n = cfg.effective_levels();
  const BasicBandStack<T> brovey = fuse_brovey(pan, ms, FusionConfig{Method::Brovey,
                                                                     cfg.ratio,
                                                                     cfg.levels,
                                                                     cfg.denom_epsilon,
                                                                     std::nullopt,
                                                                     cfg.hpf_kernel})
                                       .fused;
  std::vector<BasicBand<T>> fused;
  fused.reserve(ms.band_count());
  for (std::size_t b = 0; b < ms.band_count(); ++b) {
    const auto d_brovey = decompose(brovey.band(b), n);
    const auto d_ms = decompose(ms.band(b), n);
    fused.push_back(reconstruct(substitute_planes(d_ms, d_brovey)));
  }
  return {BasicBandStack<T>(std::move(fused), ms.names()), Method::BW, cfg};
}

/// Generalized IHS for any band count: F_i = MS_i + (P' - I) with I the band
/// mean and P' the PAN matched to I.
template <typename T>
BasicFusionResult<T> fuse_ihs(const BasicBand<T>& pan, const BasicBandStack<T>& ms,
                              const FusionConfig& cfg = {.method = Method::IHS}) {
  detail::validate_config(cfg);
  detail::require_fusable(pan, ms);
  const BasicBand<T> intensity = pixelwise_mean(ms);
  const BasicBand<T> delta = sub(detail::match_mean_std(pan, intensity), intensity);
  std::vector<BasicBand<T>> fused;
  fused.reserve(ms.band_count());
  for (const auto& band : ms.bands()) fused.push_back(add(band, delta));
  return {BasicBandStack<T>(std::move(fused), ms.names()), Method::IHS, cfg};
}

/// PCA substitution: project bands onto principal components, replace the
/// first component with the PAN matched to it, invert the projection.
/// Eigenvectors are sorted by descending eigenvalue (input order breaks
/// ties) with signs fixed so each component sum is non-negative.
template <typename T>
BasicFusionResult<T> fuse_pca(const BasicBand<T>& pan, const BasicBandStack<T>& ms,
                              const FusionConfig& cfg = {.method = Method::PCA}) {
  detail::validate_config(cfg);
  detail::require_fusable(pan, ms);
  const std::size_t nb = ms.band_count();
  if (nb < 2) throw ParameterError("pca fusion needs at least 2 bands");
  const std::size_t npix = pan.pixel_count();

  std::vector<T> mean(nb);
  for (std::size_t b = 0; b < nb; ++b) mean[b] = band_mean(ms.band(b));
  std::vector<T> cov(nb * nb, T{});
  for (std::size_t b = 0; b < nb; ++b) {
    for (std::size_t k = b; k < nb; ++k) {
      const auto& xb = ms.band(b).samples();
      const auto& xk = ms.band(k).samples();
      T acc{};
      for (std::size_t i = 0; i < npix; ++i) acc += (xb[i] - mean[b]) * (xk[i] - mean[k]);
      cov[b * nb + k] = cov[k * nb + b] = acc / static_cast<T>(npix);
    }
  }

  auto eig = detail::jacobi_symmetric(cov, nb);
  std::vector<std::size_t> order(nb);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return eig.values[i] > eig.values[j]; });
  const T lead = eig.values[order[0]];
  for (std::size_t k = 0; k < nb; ++k) {
    const T lambda = eig.values[order[k]];
    if (!(lambda > T(0)) || lambda <= lead * T(1e-12))
      throw NumericError("rank-deficient band covariance: eigenvalue " +
                         std::to_string(k + 1) + " = " + std::to_string(lambda));
  }

  // columns of basis = sorted, sign-fixed eigenvectors
  std::vector<T> basis(nb * nb);
  for (std::size_t k = 0; k < nb; ++k) {
    const std::size_t src = order[k];
    T sum{};
    for (std::size_t i = 0; i < nb; ++i) sum += eig.vectors[i * nb + src];
    T sign = sum > T(0) ? T(1) : sum < T(0) ? T(-1) : T(0);
    if (sign == T(0)) {
      for (std::size_t i = 0; i < nb && sign == T(0); ++i)
        if (eig.vectors[i * nb + src] != T(0))
          sign = eig.vectors[i * nb + src] > T(0) ? T(1) : T(-1);
      if (sign == T(0)) sign = T(1);
    }
    for (std::size_t i = 0; i < nb; ++i) basis[i * nb + k] = sign * eig.vectors[i * nb + src];
  }

  std::vector<std::vector<T>> scores(nb, std::vector<T>(npix, T{}));
  for (std::size_t k = 0; k < nb; ++k)
    for (std::size_t b = 0; b < nb; ++b) {
      const T w = basis[b * nb + k];
      const auto& xb = ms.band(b).samples();
      for (std::size_t i = 0; i < npix; ++i) scores[k][i] += w * (xb[i] - mean[b]);
    }

  const BasicBand<T> pc1(pan.width(), pan.height(), std::move(scores[0]));
  scores[0] = detail::match_mean_std(pan, pc1).samples();

  std::vector<BasicBand<T>> fused;
  fused.reserve(nb);
  for (std::size_t b = 0; b < nb; ++b) {
    std::vector<T> out(npix, mean[b]);
    for (std::size_t k = 0; k < nb; ++k) {
      const T w = basis[b * nb + k];
      for (std::size_t i = 0; i < npix; ++i) out[i] += w * scores[k][i];
    }
    fused.emplace_back(pan.width(), pan.height(), std::move(out));
  }
  return {BasicBandStack<T>(std::move(fused), ms.names()), Method::PCA, cfg};
}

/// High-pass filter injection: F_i = MS_i + (PAN - boxcar(PAN)).
template <typename T>
BasicFusionResult<T> fuse_hpf(const BasicBand<T>& pan, const BasicBandStack<T>& ms,
                              const FusionConfig& cfg = {.method = Method::HPF}) {
  detail::validate_config(cfg);
  detail::require_fusable(pan, ms);
  const int kernel = cfg.effective_hpf_kernel();
  if (kernel < 3 || kernel % 2 == 0)
    throw ParameterError("hpf kernel must be odd and >= 3, got " + std::to_string(kernel));
  std::vector<T> low = detail::box_smooth(pan.samples(), pan.width(), pan.height(),
                                          static_cast<std::size_t>(kernel / 2));
  std::vector<T> high(low.size());
  for (std::size_t i = 0; i < low.size(); ++i) high[i] = pan.samples()[i] - low[i];
  const BasicBand<T> detail_band(pan.width(), pan.height(), std::move(high));
  std::vector<BasicBand<T>> fused;
  fused.reserve(ms.band_count());
  for (const auto& band : ms.bands()) fused.push_back(add(band, detail_band));
  return {BasicBandStack<T>(std::move(fused), ms.names()), Method::HPF, cfg};
}

/// Dispatch on cfg.method.
template <typename T>
BasicFusionResult<T> fuse(const BasicBand<T>& pan, const BasicBandStack<T>& ms,
                          const FusionConfig& cfg) {
  switch (cfg.method) {
    case Method::Brovey: return fuse_brovey(pan, ms, cfg);
    case Method::AW: return fuse_aw(pan, ms, cfg);
    case Method::SW: return fuse_sw(pan, ms, cfg);
    case Method::BW: return fuse_bw(pan, ms, cfg);
    case Method::IHS: return fuse_ihs(pan, ms, cfg);
    case Method::PCA: return fuse_pca(pan, ms, cfg);
    case Method::HPF: return fuse_hpf(pan, ms, cfg);
  }
  throw ParameterError("unknown fusion method");
}

}  // namespace panfuse
