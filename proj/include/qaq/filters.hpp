#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "qaq/error.hpp"
#include "qaq/image.hpp"

namespace qaq {

/// Correlates `img` with the separable kernel kernel1d x kernel1d, using
/// symmetric reflection at the borders. The kernel length must be odd.
inline GrayImage separable_filter(const GrayImage& img, std::span<const double> kernel1d) {
  const std::size_t w = img.width();
  const std::size_t h = img.height();
  const auto r = static_cast<std::ptrdiff_t>(kernel1d.size() / 2);

  std::vector<double> tmp(w * h);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      double acc = 0.0;
      for (std::ptrdiff_t k = -r; k <= r; ++k) {
        const std::size_t xx = reflect_index(static_cast<std::ptrdiff_t>(x) + k, w);
        acc += kernel1d[static_cast<std::size_t>(k + r)] * img(y, xx);
      }
      tmp[y * w + x] = acc;
    }
  }

  std::vector<double> out(w * h);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      double acc = 0.0;
      for (std::ptrdiff_t k = -r; k <= r; ++k) {
        const std::size_t yy = reflect_index(static_cast<std::ptrdiff_t>(y) + k, h);
        acc += kernel1d[static_cast<std::size_t>(k + r)] * tmp[yy * w + x];
      }
      out[y * w + x] = acc;
    }
  }
  return GrayImage(w, h, std::move(out));
}

inline GrayImage filter(const GrayImage& img, const Window& window) {
  return separable_filter(img, window.profile());
}

/// Gaussian blur with kernel radius ceil(4 std) (at least 1).
inline GrayImage gaussian_blur(const GrayImage& img, double std_dev) {
  if (!(std_dev > 0.0) || !std::isfinite(std_dev)) {
    throw DomainError("blur std must be positive and finite");
  }
  const int radius = std::max(1, static_cast<int>(std::ceil(4.0 * std_dev)));
  const auto kernel = gaussian_profile(radius, std_dev);
  return separable_filter(img, kernel);
}

/// Sobel gradient magnitude sqrt(Gx^2 + Gy^2) with reflection padding.
inline GrayImage spatial_gradient(const GrayImage& img) {
  const std::size_t w = img.width();
  const std::size_t h = img.height();
  if (w < 3 || h < 3) throw DimensionError("spatial_gradient needs at least a 3x3 image");

  auto px = [&](std::ptrdiff_t y, std::ptrdiff_t x) {
    return img(reflect_index(y, h), reflect_index(x, w));
  };

  std::vector<double> out(w * h);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const auto yi = static_cast<std::ptrdiff_t>(y);
      const auto xi = static_cast<std::ptrdiff_t>(x);
      const double gx = (px(yi - 1, xi + 1) + 2.0 * px(yi, xi + 1) + px(yi + 1, xi + 1)) -
                        (px(yi - 1, xi - 1) + 2.0 * px(yi, xi - 1) + px(yi + 1, xi - 1));
      const double gy = (px(yi + 1, xi - 1) + 2.0 * px(yi + 1, xi) + px(yi + 1, xi + 1)) -
                        (px(yi - 1, xi - 1) + 2.0 * px(yi - 1, xi) + px(yi - 1, xi + 1));
      out[y * w + x] = std::sqrt(gx * gx + gy * gy);
    }
  }
  return GrayImage(w, h, std::move(out));
}

/// Halves both dimensions (floor) by 2x2 box averaging.
inline GrayImage downscale_by_two(const GrayImage& img) {
  const std::size_t w = img.width() / 2;
  const std::size_t h = img.height() / 2;
  if (w == 0 || h == 0) throw DimensionError("image too small to downscale");
  std::vector<double> out(w * h);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      out[y * w + x] = 0.25 * (img(2 * y, 2 * x) + img(2 * y, 2 * x + 1) +
                               img(2 * y + 1, 2 * x) + img(2 * y + 1, 2 * x + 1));
    }
  }
  return GrayImage(w, h, std::move(out));
}

/// Copies the w x h rectangle whose top-left corner is (x0, y0).
inline GrayImage crop(const GrayImage& img, std::size_t x0, std::size_t y0, std::size_t w,
                      std::size_t h) {
  if (x0 + w > img.width() || y0 + h > img.height()) {
    throw DimensionError("crop rectangle exceeds image bounds");
  }
  std::vector<double> out;
  out.reserve(w * h);
  for (std::size_t y = y0; y < y0 + h; ++y) {
    for (std::size_t x = x0; x < x0 + w; ++x) out.push_back(img(y, x));
  }
  return GrayImage(w, h, std::move(out));
}

}  // namespace qaq
