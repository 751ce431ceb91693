#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "qaq/error.hpp"
#include "qaq/image.hpp"
#include "qaq/local_stats.hpp"

namespace qaq {

struct SsimParams {
  double c1 = (0.01 * 255.0) * (0.01 * 255.0);
  double c2 = (0.03 * 255.0) * (0.03 * 255.0);
  Window window = ssim_default_window();

  void validate() const {
    if (!(c1 > 0.0) || !(c2 > 0.0) || !std::isfinite(c1) || !std::isfinite(c2)) {
      throw DomainError("SSIM stabilizers C1 and C2 must be positive");
    }
  }
};

/// Per-pixel SSIM components. ssim = luminance * contrast_structure.
struct SsimMaps {
  GrayImage luminance;
  GrayImage contrast_structure;
  GrayImage ssim;
};

inline SsimMaps ssim_maps(const GrayImage& p, const GrayImage& t, const SsimParams& params = {}) {
  params.validate();
  require_same_shape(p, t);
  const LocalStatsField sp = local_stats(p, params.window);
  const LocalStatsField st = local_stats(t, params.window);
  const GrayImage cov = cross_covariance(p, t, params.window);

  const std::size_t n = p.size();
  std::vector<double> lum(n), cs(n), prod(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double mp = sp.mu.values()[i];
    const double mt = st.mu.values()[i];
    const double vp = sp.variance.values()[i];
    const double vt = st.variance.values()[i];
    double c = cov.values()[i];
    // |cov| <= sigma_p sigma_t can be broken by rounding when a variance
    // was clamped to zero.
    if (c * c > vp * vt) c = std::copysign(std::sqrt(vp * vt), c);

    lum[i] = (2.0 * (mp * mt) + params.c1) / (mp * mp + mt * mt + params.c1);
    cs[i] = (2.0 * c + params.c2) / (vp + vt + params.c2);
    prod[i] = lum[i] * cs[i];
  }
  const auto w = p.width();
  const auto h = p.height();
  return {GrayImage(w, h, std::move(lum)), GrayImage(w, h, std::move(cs)),
          GrayImage(w, h, std::move(prod))};
}

namespace detail {

inline double mean_of(const GrayImage& img) {
  double sum = 0.0;
  for (double v : img.values()) sum += v;
  return sum / static_cast<double>(img.size());
}

template <typename PixelFn>
double mean_over_maps(const SsimMaps& maps, PixelFn fn) {
  const auto& l = maps.luminance.values();
  const auto& cs = maps.contrast_structure.values();
  double sum = 0.0;
  for (std::size_t i = 0; i < l.size(); ++i) sum += fn(l[i], cs[i]);
  return sum / static_cast<double>(l.size());
}

inline double dq_pixel(double l, double cs) { return std::sqrt(std::max(0.0, 2.0 - l - cs)); }
inline double d1_pixel(double l, double) { return std::sqrt(std::max(0.0, 1.0 - l)); }
inline double d2_pixel(double, double cs) { return std::sqrt(std::max(0.0, 1.0 - cs)); }

}  // namespace detail

/// Image-level SSIM: mean of the per-pixel SSIM map.
inline double ssim_index(const GrayImage& p, const GrayImage& t, const SsimParams& params = {}) {
  return detail::mean_of(ssim_maps(p, t, params).ssim);
}

/// Pixel-averaged sqrt(2 - L - CS).
inline double dq_distance(const GrayImage& p, const GrayImage& t,
                          const SsimParams& params = {}) {
  return detail::mean_over_maps(ssim_maps(p, t, params), detail::dq_pixel);
}

/// Pixel-averaged sqrt(1 - L).
inline double d1_distance(const GrayImage& p, const GrayImage& t,
                          const SsimParams& params = {}) {
  return detail::mean_over_maps(ssim_maps(p, t, params), detail::d1_pixel);
}

/// Pixel-averaged sqrt(1 - CS).
inline double d2_distance(const GrayImage& p, const GrayImage& t,
                          const SsimParams& params = {}) {
  return detail::mean_over_maps(ssim_maps(p, t, params), detail::d2_pixel);
}

/// All four full-reference scores from a single pass over the maps.
struct SsimScores {
  double ssim;
  double d1;
  double d2;
  double dq;
};

inline SsimScores ssim_scores(const GrayImage& p, const GrayImage& t,
                              const SsimParams& params = {}) {
  const SsimMaps maps = ssim_maps(p, t, params);
  return {detail::mean_of(maps.ssim), detail::mean_over_maps(maps, detail::d1_pixel),
          detail::mean_over_maps(maps, detail::d2_pixel),
          detail::mean_over_maps(maps, detail::dq_pixel)};
}

inline constexpr double kDefaultDistanceFloor = 1e-8;

/// One summand of the SSIM gradient penalty:
///   (|dX - dY| / max(dQ(X, Y), floor) - 1)^2
/// where dX, dY are discriminator outputs for X and Y. Averaging over
/// pairs is left to the caller.
inline double ssim_gp_penalty(double d_x, double d_y, const GrayImage& x, const GrayImage& y,
                              const SsimParams& params = {},
                              double floor = kDefaultDistanceFloor) {
  if (!std::isfinite(d_x) || !std::isfinite(d_y)) {
    throw DomainError("discriminator outputs must be finite");
  }
  if (!(floor > 0.0)) throw DomainError("distance floor must be positive");
  require_same_shape(x, y);
  const double dist = std::max(dq_distance(x, y, params), floor);
  const double ratio = std::abs(d_x - d_y) / dist;
  return (ratio - 1.0) * (ratio - 1.0);
}

}  // namespace qaq
