#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "qaq/error.hpp"

namespace qaq {

/// Zero-mean generalized Gaussian, density ~ exp(-(|x| / beta)^alpha).
/// `sigma` is the standard deviation sqrt(E[x^2]), not beta.
struct GgdParams {
  double alpha;
  double sigma;
};

/// Asymmetric generalized Gaussian. sigma_l / sigma_r are the left and right
/// scale parameters (beta_l, beta_r); eta is the distribution mean.
struct AggdParams {
  double alpha;
  double sigma_l;
  double sigma_r;
  double eta;
};

/// Gamma(2/a)^2 / (Gamma(1/a) Gamma(3/a)), strictly increasing in a.
inline double ggd_ratio(double alpha) {
  const double l1 = std::lgamma(1.0 / alpha);
  const double l2 = std::lgamma(2.0 / alpha);
  const double l3 = std::lgamma(3.0 / alpha);
  return std::exp(2.0 * l2 - l1 - l3);
}

/// Tabulated ggd_ratio over alpha in [0.2, 10] with step 0.001.
class ShapeGrid {
public:
  static constexpr double kMinAlpha = 0.2;
  static constexpr double kMaxAlpha = 10.0;
  static constexpr double kStep = 0.001;

  ShapeGrid() {
    const auto count = static_cast<std::size_t>(std::lround((kMaxAlpha - kMinAlpha) / kStep)) + 1;
    alphas_.reserve(count);
    ratios_.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
      const double a = kMinAlpha + static_cast<double>(i) * kStep;
      alphas_.push_back(a);
      ratios_.push_back(ggd_ratio(a));
      if (i > 0 && !(ratios_[i] > ratios_[i - 1])) {
        throw Error("shape ratio grid is not strictly increasing at alpha=" + std::to_string(a));
      }
    }
  }

  /// Grid alpha whose ratio is nearest to `ratio`.
  double invert(double ratio) const {
    const auto it = std::lower_bound(ratios_.begin(), ratios_.end(), ratio);
    if (it == ratios_.begin()) return alphas_.front();
    if (it == ratios_.end()) return alphas_.back();
    auto idx = static_cast<std::size_t>(it - ratios_.begin());
    if (ratio - ratios_[idx - 1] <= *it - ratio) --idx;
    return alphas_[idx];
  }

  std::span<const double> alphas() const noexcept { return alphas_; }
  std::span<const double> ratios() const noexcept { return ratios_; }

private:
  std::vector<double> alphas_;
  std::vector<double> ratios_;
};

inline const ShapeGrid& shape_grid() {
  static const ShapeGrid grid;
  return grid;
}

inline constexpr std::size_t kMinFitSamples = 100;

namespace detail {

inline void require_fit_samples(std::span<const double> samples, const char* what) {
  if (samples.size() < kMinFitSamples) {
    throw DegenerateInputError(std::string(what) + " fit needs at least " +
                               std::to_string(kMinFitSamples) + " samples, got " +
                               std::to_string(samples.size()));
  }
}

}  // namespace detail

/// Moment-matching GGD fit: rho = (E|x|)^2 / E[x^2] is inverted on the
/// shape grid; sigma = sqrt(E[x^2]).
inline GgdParams fit_ggd(std::span<const double> samples) {
  detail::require_fit_samples(samples, "GGD");
  const auto n = static_cast<double>(samples.size());
  double sum = 0.0, sum_abs = 0.0, sum_sq = 0.0;
  for (double x : samples) {
    sum += x;
    sum_abs += std::abs(x);
    sum_sq += x * x;
  }
  const double mean = sum / n;
  double var = 0.0;
  for (double x : samples) var += (x - mean) * (x - mean);
  if (!(var > 0.0)) throw DegenerateInputError("GGD fit: samples have zero variance");

  const double mean_abs = sum_abs / n;
  const double mean_sq = sum_sq / n;
  const double rho = mean_abs * mean_abs / mean_sq;
  return {shape_grid().invert(rho), std::sqrt(mean_sq)};
}

/// Moment-matching AGGD fit on left/right one-sided second moments.
inline AggdParams fit_aggd(std::span<const double> samples) {
  detail::require_fit_samples(samples, "AGGD");
  double left_sq = 0.0, right_sq = 0.0, sum_abs = 0.0, sum_sq = 0.0;
  std::size_t left_n = 0, right_n = 0;
  for (double x : samples) {
    if (x < 0.0) {
      left_sq += x * x;
      ++left_n;
    } else if (x > 0.0) {
      right_sq += x * x;
      ++right_n;
    }
    sum_abs += std::abs(x);
    sum_sq += x * x;
  }
  if (left_n == 0 || right_n == 0) {
    throw DegenerateInputError("AGGD fit needs samples of both signs");
  }
  const auto n = static_cast<double>(samples.size());
  const double left_std = std::sqrt(left_sq / static_cast<double>(left_n));
  const double right_std = std::sqrt(right_sq / static_cast<double>(right_n));
  const double gamma = left_std / right_std;
  const double mean_abs = sum_abs / n;
  const double r_hat = mean_abs * mean_abs / (sum_sq / n);
  const double g2 = gamma * gamma;
  const double r_norm = r_hat * (g2 * gamma + 1.0) * (gamma + 1.0) / ((g2 + 1.0) * (g2 + 1.0));

  const double alpha = shape_grid().invert(r_norm);
  const double lg1 = std::lgamma(1.0 / alpha);
  const double lg2 = std::lgamma(2.0 / alpha);
  const double lg3 = std::lgamma(3.0 / alpha);
  const double to_scale = std::exp(0.5 * (lg1 - lg3));
  const double beta_l = to_scale * left_std;
  const double beta_r = to_scale * right_std;
  const double eta = (beta_r - beta_l) * std::exp(lg2 - lg1);
  return {alpha, beta_l, beta_r, eta};
}

}  // namespace qaq
