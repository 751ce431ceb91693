#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "qaq/error.hpp"
#include "qaq/features.hpp"
#include "qaq/image.hpp"
#include "qaq/mvg.hpp"

namespace qaq {

struct PenaltyWeights {
  double lambda1 = 1.0;  // gradient-norm (1-GP) term
  double lambda2 = 0.1;  // quality term (SSIM-GP or NIQE-GP mean)
};

/// Discriminator input-gradient for one sample, same shape as the image.
struct GradientField {
  GrayImage field;
};

/// epsilon * x_real + (1 - epsilon) * x_fake.
inline GrayImage interpolate_sample(const GrayImage& x_real, const GrayImage& x_fake,
                                    double epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw DomainError("interpolation epsilon must lie in [0, 1]");
  }
  require_same_shape(x_real, x_fake);
  std::vector<double> out(x_real.size());
  const auto& r = x_real.values();
  const auto& f = x_fake.values();
  for (std::size_t i = 0; i < out.size(); ++i) {
    // Endpoints reproduce the inputs exactly.
    if (epsilon == 1.0) {
      out[i] = r[i];
    } else if (epsilon == 0.0) {
      out[i] = f[i];
    } else {
      out[i] = epsilon * r[i] + (1.0 - epsilon) * f[i];
    }
  }
  return GrayImage(x_real.width(), x_real.height(), std::move(out));
}

/// (||grad||_2 - 1)^2 over all entries of the field.
inline double one_gp_penalty(const GradientField& grad) {
  double sq = 0.0;
  for (double v : grad.field.values()) sq += v * v;
  const double norm = std::sqrt(sq);
  return (norm - 1.0) * (norm - 1.0);
}

/// NIQE distance of the gradient field's feature MVG from the pristine
/// gradient model. Unsquared; batch averaging is left to the caller.
inline double niqe_gp_penalty(const GradientField& grad, const MvgModel& pristine,
                              const FeatureConfig& config) {
  return score_image(grad.field, pristine, config, pristine.meta.domain);
}

inline double niqe_gp_penalty(const GradientField& grad, const MvgModel& pristine) {
  return niqe_gp_penalty(grad, pristine, pristine.meta.config());
}

/// wasserstein_gap + lambda1 * one_gp_mean + lambda2 * quality_mean.
/// The quality slot takes either the SSIM-GP or the NIQE-GP batch mean.
inline double discriminator_loss_terms(double wasserstein_gap, double one_gp_mean,
                                       double quality_mean, const PenaltyWeights& weights = {}) {
  if (!std::isfinite(wasserstein_gap) || !std::isfinite(one_gp_mean) ||
      !std::isfinite(quality_mean) || !std::isfinite(weights.lambda1) ||
      !std::isfinite(weights.lambda2)) {
    throw DomainError("loss terms must be finite");
  }
  if (weights.lambda1 < 0.0 || weights.lambda2 < 0.0) {
    throw DomainError("penalty weights must be non-negative");
  }
  return wasserstein_gap + weights.lambda1 * one_gp_mean + weights.lambda2 * quality_mean;
}

}  // namespace qaq
