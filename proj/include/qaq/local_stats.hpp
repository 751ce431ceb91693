#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "qaq/error.hpp"
#include "qaq/filters.hpp"
#include "qaq/image.hpp"

namespace qaq {

/// Per-pixel windowed statistics of one image.
struct LocalStatsField {
  GrayImage mu;
  GrayImage sigma;
  // sigma squared, kept separately so that sigma^2 terms stay bit-identical
  // to the covariance computed through the same path.
  GrayImage variance;
};

namespace detail {

inline void require_window_fits(const GrayImage& img, const Window& window) {
  if (img.width() < window.diameter() || img.height() < window.diameter()) {
    throw DimensionError("image " + std::to_string(img.width()) + "x" +
                         std::to_string(img.height()) + " is smaller than the " +
                         std::to_string(window.diameter()) + "x" +
                         std::to_string(window.diameter()) + " window");
  }
}

inline GrayImage product(const GrayImage& a, const GrayImage& b) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.values()[i] * b.values()[i];
  return GrayImage(a.width(), a.height(), std::move(out));
}

// E[x^2] - mu^2 loses everything below this many ulps of E[x^2]; treat the
// remainder as zero so flat regions get exactly zero deviation.
inline constexpr double kCancellationFloor = 64.0 * std::numeric_limits<double>::epsilon();

}  // namespace detail

/// Weighted local mean and standard deviation with reflection padding.
/// sigma = sqrt(max(0, E[x^2] - mu^2)).
inline LocalStatsField local_stats(const GrayImage& img, const Window& window) {
  detail::require_window_fits(img, window);
  GrayImage mu = filter(img, window);
  GrayImage ex2 = filter(detail::product(img, img), window);

  std::vector<double> var(img.size());
  std::vector<double> sd(img.size());
  for (std::size_t i = 0; i < var.size(); ++i) {
    const double m = mu.values()[i];
    const double e = ex2.values()[i];
    double v = e - m * m;
    if (v <= detail::kCancellationFloor * e) v = 0.0;
    var[i] = v;
    sd[i] = std::sqrt(v);
  }
  const auto w = img.width();
  const auto h = img.height();
  return {std::move(mu), GrayImage(w, h, std::move(sd)), GrayImage(w, h, std::move(var))};
}

/// Weighted local covariance E[(P - mu_P)(T - mu_T)], same window and
/// padding as local_stats.
inline GrayImage cross_covariance(const GrayImage& p, const GrayImage& t, const Window& window) {
  require_same_shape(p, t);
  detail::require_window_fits(p, window);
  const GrayImage mu_p = filter(p, window);
  const GrayImage mu_t = filter(t, window);
  GrayImage ept = filter(detail::product(p, t), window);
  for (std::size_t i = 0; i < ept.size(); ++i) {
    ept.pixels()[i] -= mu_p.values()[i] * mu_t.values()[i];
  }
  return ept;
}

}  // namespace qaq
