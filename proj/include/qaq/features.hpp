#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "qaq/error.hpp"
#include "qaq/filters.hpp"
#include "qaq/ggd.hpp"
#include "qaq/image.hpp"
#include "qaq/local_stats.hpp"
#include "qaq/mscn.hpp"

namespace qaq {

/// Per-scale layout: [GGD alpha, GGD sigma^2] followed, for H, V, D1, D2,
/// by [AGGD alpha, eta, sigma_l^2, sigma_r^2].
inline constexpr std::size_t kFeaturesPerScale = 18;

/// Smallest per-scale patch side that still yields enough samples for the
/// product fits ((s - 1)^2 >= kMinFitSamples).
inline constexpr std::size_t kMinScalePatchSide = 11;

using NiqeFeatures = std::vector<double>;

struct FeatureConfig {
  std::size_t patch_size = 96;
  double sharpness_fraction = 0.75;
  std::size_t scales = 2;
  Window window = mscn_default_window();

  std::size_t feature_dim() const noexcept { return kFeaturesPerScale * scales; }
  std::size_t scale_divisor() const noexcept { return std::size_t{1} << (scales - 1); }

  void validate() const {
    if (scales < 1 || scales > 4) throw DomainError("scales must be in [1, 4]");
    if (!(sharpness_fraction >= 0.0 && sharpness_fraction <= 1.0)) {
      throw DomainError("sharpness fraction must lie in [0, 1]");
    }
    if (patch_size % scale_divisor() != 0) {
      throw DomainError("patch size " + std::to_string(patch_size) + " must be divisible by " +
                        std::to_string(scale_divisor()) + " for " + std::to_string(scales) +
                        " scales");
    }
    if (patch_size / scale_divisor() < kMinScalePatchSide) {
      throw DomainError("patch size " + std::to_string(patch_size) + " is too small for " +
                        std::to_string(scales) + " scales");
    }
  }
};

/// Features of every patch that survived selection, in raster order.
struct PatchFeatures {
  std::vector<NiqeFeatures> patches;
  std::size_t effective_patch_size = 0;
  std::size_t candidate_patches = 0;
  std::vector<std::string> warnings;

  /// Patch-averaged feature vector.
  NiqeFeatures mean() const {
    NiqeFeatures avg(patches.empty() ? 0 : patches.front().size(), 0.0);
    for (const auto& p : patches) {
      for (std::size_t i = 0; i < avg.size(); ++i) avg[i] += p[i];
    }
    for (double& v : avg) v /= static_cast<double>(patches.size());
    return avg;
  }
};

namespace detail {

inline void append_scale_features(const GrayImage& mscn_patch, NiqeFeatures& out) {
  const GgdParams ggd = fit_ggd(mscn_patch.values());
  out.push_back(ggd.alpha);
  out.push_back(ggd.sigma * ggd.sigma);
  for (Orientation o : kOrientations) {
    const auto products = paired_products(mscn_patch, o);
    const AggdParams aggd = fit_aggd(products);
    out.push_back(aggd.alpha);
    out.push_back(aggd.eta);
    out.push_back(aggd.sigma_l * aggd.sigma_l);
    out.push_back(aggd.sigma_r * aggd.sigma_r);
  }
}

// Patch side actually used for `img`; shrinks to the image when the
// configured patch does not fit.
inline std::size_t effective_patch_size(const GrayImage& img, const FeatureConfig& config,
                                        std::vector<std::string>& warnings) {
  const std::size_t side = std::min(img.width(), img.height());
  std::size_t patch = config.patch_size;
  if (side < patch) {
    const std::size_t div = config.scale_divisor();
    patch = side / div * div;
    if (patch / div < kMinScalePatchSide || patch / div < config.window.diameter()) {
      throw DimensionError("image " + std::to_string(img.width()) + "x" +
                           std::to_string(img.height()) + " is too small for " +
                           std::to_string(config.scales) + "-scale feature extraction");
    }
    warnings.push_back("patch size clamped from " + std::to_string(config.patch_size) + " to " +
                       std::to_string(patch) + " for a " + std::to_string(img.width()) + "x" +
                       std::to_string(img.height()) + " image");
  }
  return patch;
}

}  // namespace detail

/// Tiles the image into non-overlapping patches, keeps the patches whose
/// mean local deviation (at full resolution) reaches
/// sharpness_fraction * peak, and fits GGD/AGGD features on the MSCN field
/// of every scale. Each further scale halves the image by 2x2 averaging.
inline PatchFeatures extract_patch_features(const GrayImage& img,
                                            const FeatureConfig& config = {}) {
  config.validate();
  PatchFeatures result;
  const std::size_t patch = detail::effective_patch_size(img, config, result.warnings);
  result.effective_patch_size = patch;

  const std::size_t nx = img.width() / patch;
  const std::size_t ny = img.height() / patch;
  result.candidate_patches = nx * ny;

  GrayImage scaled = crop(img, 0, 0, nx * patch, ny * patch);
  std::vector<NiqeFeatures> features;
  std::vector<std::size_t> kept;

  for (std::size_t s = 0; s < config.scales; ++s) {
    if (s > 0) scaled = downscale_by_two(scaled);
    const std::size_t ps = patch >> s;
    const LocalStatsField stats = local_stats(scaled, config.window);
    const MscnField field = mscn_from_stats(scaled, stats);

    if (s == 0) {
      std::vector<double> sharpness(nx * ny, 0.0);
      for (std::size_t py = 0; py < ny; ++py) {
        for (std::size_t px = 0; px < nx; ++px) {
          double sum = 0.0;
          for (std::size_t y = py * ps; y < (py + 1) * ps; ++y)
            for (std::size_t x = px * ps; x < (px + 1) * ps; ++x) sum += stats.sigma(y, x);
          sharpness[py * nx + px] = sum / static_cast<double>(ps * ps);
        }
      }
      const double peak = *std::max_element(sharpness.begin(), sharpness.end());
      for (std::size_t i = 0; i < sharpness.size(); ++i) {
        if (sharpness[i] > 0.0 && sharpness[i] >= config.sharpness_fraction * peak) {
          kept.push_back(i);
        }
      }
      features.assign(kept.size(), NiqeFeatures{});
    }

    for (std::size_t k = 0; k < kept.size(); ++k) {
      if (features[k].empty() && s > 0) continue;  // dropped at an earlier scale
      const std::size_t py = kept[k] / nx;
      const std::size_t px = kept[k] % nx;
      const GrayImage tile = crop(field.coefficients, px * ps, py * ps, ps, ps);
      try {
        detail::append_scale_features(tile, features[k]);
      } catch (const DegenerateInputError&) {
        features[k].clear();
      }
    }
  }

  std::size_t degenerate = 0;
  for (auto& f : features) {
    if (f.size() == config.feature_dim()) {
      result.patches.push_back(std::move(f));
    } else {
      ++degenerate;
    }
  }
  if (degenerate > 0) {
    result.warnings.push_back(std::to_string(degenerate) +
                              " patch(es) dropped for degenerate coefficient statistics");
  }
  if (result.patches.empty()) {
    throw SelectionError("no patch survived sharpness selection (" +
                         std::to_string(result.candidate_patches) +
                         " candidates); try a lower sharpness fraction");
  }
  return result;
}

/// Patch-averaged feature vector of length 18 * scales.
inline NiqeFeatures extract_features(const GrayImage& img, const FeatureConfig& config = {}) {
  return extract_patch_features(img, config).mean();
}

}  // namespace qaq
