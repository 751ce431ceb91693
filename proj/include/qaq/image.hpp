#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qaq/error.hpp"

namespace qaq {

/// Real-valued 2-D field in row-major order.
///
/// Used for luminance images (nominal range [0, 255]) as well as for any
/// derived map: local statistics, SSIM maps, spatial or discriminator
/// gradient fields. Construction rejects empty shapes, size mismatches and
/// non-finite samples.
class GrayImage {
public:
  GrayImage(std::size_t width, std::size_t height, double fill = 0.0)
      : GrayImage(width, height, std::vector<double>(width * height, fill)) {}

  GrayImage(std::size_t width, std::size_t height, std::vector<double> data)
      : width_(width), height_(height), data_(std::move(data)) {
    if (width_ == 0 || height_ == 0) {
      throw DimensionError("image must be at least 1x1");
    }
    if (data_.size() != width_ * height_) {
      throw DimensionError("image data length " + std::to_string(data_.size()) +
                           " does not match " + std::to_string(width_) + "x" +
                           std::to_string(height_));
    }
    for (double v : data_) {
      if (!std::isfinite(v)) throw DomainError("image contains a non-finite value");
    }
  }

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }

  double operator()(std::size_t row, std::size_t col) const noexcept {
    return data_[row * width_ + col];
  }
  double& operator()(std::size_t row, std::size_t col) noexcept {
    return data_[row * width_ + col];
  }

  std::span<const double> pixels() const noexcept { return data_; }
  std::span<double> pixels() noexcept { return data_; }
  const std::vector<double>& values() const noexcept { return data_; }

  bool same_shape(const GrayImage& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

private:
  std::size_t width_;
  std::size_t height_;
  std::vector<double> data_;
};

inline void require_same_shape(const GrayImage& a, const GrayImage& b) {
  if (!a.same_shape(b)) {
    throw DimensionError("image dimensions differ: " + std::to_string(a.width()) + "x" +
                         std::to_string(a.height()) + " vs " + std::to_string(b.width()) +
                         "x" + std::to_string(b.height()));
  }
}

/// Maps an out-of-range index onto [0, n) by half-sample symmetric
/// reflection: ... c b a | a b c ... | c b a ...
inline std::size_t reflect_index(std::ptrdiff_t i, std::size_t n) noexcept {
  const auto period = static_cast<std::ptrdiff_t>(2 * n);
  std::ptrdiff_t m = i % period;
  if (m < 0) m += period;
  const auto nn = static_cast<std::ptrdiff_t>(n);
  return static_cast<std::size_t>(m < nn ? m : period - 1 - m);
}

/// Square averaging window of radius K, stored both as the full
/// (2K+1)x(2K+1) weight table and as its separable 1-D profile.
class Window {
public:
  int radius() const noexcept { return radius_; }
  std::size_t diameter() const noexcept { return profile_.size(); }
  double std_dev() const noexcept { return std_; }

  /// Weight at offset (m, n), m and n in [-K, K].
  double at(int m, int n) const noexcept {
    return weights_[static_cast<std::size_t>(m + radius_) * diameter() +
                    static_cast<std::size_t>(n + radius_)];
  }
  std::span<const double> weights() const noexcept { return weights_; }
  std::span<const double> profile() const noexcept { return profile_; }

  friend Window gaussian_window(int radius, double std_dev);
  friend Window uniform_window(int radius);

private:
  Window(int radius, double std_dev, std::vector<double> profile)
      : radius_(radius), std_(std_dev), profile_(std::move(profile)) {
    weights_.reserve(profile_.size() * profile_.size());
    for (double a : profile_) {
      for (double b : profile_) weights_.push_back(a * b);
    }
  }

  int radius_;
  double std_;  // 0 for the uniform window
  std::vector<double> profile_;
  std::vector<double> weights_;
};

/// Normalized 1-D Gaussian profile over [-radius, radius].
inline std::vector<double> gaussian_profile(int radius, double std_dev) {
  if (radius < 0) throw DomainError("kernel radius must be non-negative");
  if (!(std_dev > 0.0) || !std::isfinite(std_dev)) {
    throw DomainError("Gaussian std must be positive and finite");
  }
  std::vector<double> g(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (int m = -radius; m <= radius; ++m) {
    const double v = std::exp(-(m * m) / (2.0 * std_dev * std_dev));
    g[static_cast<std::size_t>(m + radius)] = v;
    sum += v;
  }
  for (double& v : g) v /= sum;
  return g;
}

/// weights[m,n] proportional to exp(-(m^2+n^2) / (2 std^2)), normalized to sum 1.
inline Window gaussian_window(int radius, double std_dev) {
  if (radius < 1) throw DomainError("window radius must be >= 1");
  return Window(radius, std_dev, gaussian_profile(radius, std_dev));
}

inline Window uniform_window(int radius) {
  if (radius < 1) throw DomainError("window radius must be >= 1");
  const auto d = static_cast<std::size_t>(2 * radius + 1);
  return Window(radius, 0.0, std::vector<double>(d, 1.0 / static_cast<double>(d)));
}

/// 11x11, std 1.5: the usual SSIM window.
inline Window ssim_default_window() { return gaussian_window(5, 1.5); }

/// 7x7, std 7/6: the usual NIQE/MSCN window.
inline Window mscn_default_window() { return gaussian_window(3, 7.0 / 6.0); }

}  // namespace qaq
