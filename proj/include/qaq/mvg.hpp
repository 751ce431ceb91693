#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <fstream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qaq/error.hpp"
#include "qaq/features.hpp"
#include "qaq/image.hpp"

namespace qaq {

/// What the model's features were computed on.
enum class FieldDomain { Image, Gradient };

inline std::string to_string(FieldDomain d) { return d == FieldDomain::Image ? "image" : "gradient"; }

inline FieldDomain parse_domain(const std::string& s) {
  if (s == "image") return FieldDomain::Image;
  if (s == "gradient") return FieldDomain::Gradient;
  throw CorruptionError("unknown model domain '" + s + "'");
}

/// Feature-configuration fingerprint of a model plus its sample count.
struct ModelMeta {
  std::size_t patch_size = 96;
  double sharpness_fraction = 0.75;
  std::size_t scales = 2;
  int window_radius = 3;
  double window_std = 7.0 / 6.0;
  FieldDomain domain = FieldDomain::Image;
  std::size_t sample_count = 0;

  static ModelMeta from_config(const FeatureConfig& config,
                               FieldDomain domain = FieldDomain::Image) {
    ModelMeta m;
    m.patch_size = config.patch_size;
    m.sharpness_fraction = config.sharpness_fraction;
    m.scales = config.scales;
    m.window_radius = config.window.radius();
    m.window_std = config.window.std_dev();
    m.domain = domain;
    return m;
  }

  /// Rebuilds the feature configuration the model was fitted with.
  FeatureConfig config() const {
    FeatureConfig c;
    c.patch_size = patch_size;
    c.sharpness_fraction = sharpness_fraction;
    c.scales = scales;
    c.window = window_std > 0.0 ? gaussian_window(window_radius, window_std)
                                : uniform_window(window_radius);
    return c;
  }

  /// Name of the first fingerprint field that differs, if any.
  /// sample_count is not part of the fingerprint.
  std::optional<std::string> mismatch(const ModelMeta& o) const {
    if (patch_size != o.patch_size) return "patch_size";
    if (sharpness_fraction != o.sharpness_fraction) return "sharpness_fraction";
    if (scales != o.scales) return "scales";
    if (window_radius != o.window_radius) return "window_radius";
    if (window_std != o.window_std) return "window_std";
    if (domain != o.domain) return "domain";
    return std::nullopt;
  }
};

/// Multivariate Gaussian over feature vectors; sigma is row-major.
struct MvgModel {
  std::vector<double> mu;
  std::vector<double> sigma;
  ModelMeta meta;

  std::size_t dim() const noexcept { return mu.size(); }
  double cov(std::size_t i, std::size_t j) const { return sigma[i * dim() + j]; }
};

namespace detail {

inline MvgModel fit_mvg_unchecked(std::span<const NiqeFeatures> vectors, ModelMeta meta) {
  const std::size_t n = vectors.size();
  const std::size_t d = vectors.front().size();
  MvgModel model;
  model.mu.assign(d, 0.0);
  for (const auto& v : vectors) {
    for (std::size_t i = 0; i < d; ++i) model.mu[i] += v[i];
  }
  for (double& m : model.mu) m /= static_cast<double>(n);

  model.sigma.assign(d * d, 0.0);
  if (n > 1) {
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = i; j < d; ++j) {
        double acc = 0.0;
        for (const auto& v : vectors) acc += (v[i] - model.mu[i]) * (v[j] - model.mu[j]);
        acc /= static_cast<double>(n - 1);
        model.sigma[i * d + j] = acc;
        model.sigma[j * d + i] = acc;
      }
    }
  }
  meta.sample_count = n;
  model.meta = meta;
  return model;
}

inline void validate_vectors(std::span<const NiqeFeatures> vectors) {
  const std::size_t d = vectors.front().size();
  if (d == 0) throw DimensionError("feature vectors must be non-empty");
  for (const auto& v : vectors) {
    if (v.size() != d) {
      throw DimensionError("feature vector length " + std::to_string(v.size()) +
                           " differs from " + std::to_string(d));
    }
    for (double x : v) {
      if (!std::isfinite(x)) throw DomainError("feature vector contains a non-finite value");
    }
  }
}

}  // namespace detail

/// Sample mean and unbiased (n - 1) sample covariance.
inline MvgModel fit_mvg(std::span<const NiqeFeatures> vectors, const ModelMeta& meta = {}) {
  if (vectors.size() < 2) {
    throw InsufficientDataError("MVG fit needs at least 2 feature vectors, got " +
                                std::to_string(vectors.size()));
  }
  detail::validate_vectors(vectors);
  return detail::fit_mvg_unchecked(vectors, meta);
}

/// Relative eigenvalue cutoff of the covariance pseudo-inverse.
inline constexpr double kPinvCutoff = 1e-10;

/// sqrt((mu_P - mu_T)^T ((Sigma_P + Sigma_T) / 2)^+ (mu_P - mu_T)), with ^+ the
/// pseudo-inverse. Eigen-directions below kPinvCutoff * largest |eigenvalue|
/// are ignored.
inline double niqe_distance(const MvgModel& p, const MvgModel& t) {
  if (p.dim() != t.dim() || p.sigma.size() != p.dim() * p.dim() ||
      t.sigma.size() != t.dim() * t.dim() || p.dim() == 0) {
    throw DimensionError("model dimensions disagree: " + std::to_string(p.dim()) + " vs " +
                         std::to_string(t.dim()));
  }
  if (auto field = p.meta.mismatch(t.meta)) {
    throw IncompatibleModelError("models were built with different feature settings: " +
                                 *field);
  }
  const auto d = static_cast<Eigen::Index>(p.dim());
  Eigen::MatrixXd avg(d, d);
  Eigen::VectorXd diff(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    diff(i) = p.mu[static_cast<std::size_t>(i)] - t.mu[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < d; ++j) {
      const auto k = static_cast<std::size_t>(i * d + j);
      avg(i, j) = (p.sigma[k] + t.sigma[k]) / 2.0;
    }
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(avg);
  if (eig.info() != Eigen::Success) throw Error("eigen-decomposition of covariance failed");
  const Eigen::VectorXd& lambda = eig.eigenvalues();
  const double largest = lambda.cwiseAbs().maxCoeff();
  const Eigen::VectorXd proj = eig.eigenvectors().transpose() * diff;
  double q = 0.0;
  for (Eigen::Index k = 0; k < d; ++k) {
    if (std::abs(lambda(k)) > kPinvCutoff * largest) q += proj(k) * proj(k) / lambda(k);
  }
  return std::sqrt(std::max(0.0, q));
}

/// MVG of one image's patch features. A single surviving patch gives a
/// zero covariance.
inline MvgModel fit_test_model(const GrayImage& img, const FeatureConfig& config,
                               FieldDomain domain = FieldDomain::Image) {
  const PatchFeatures pf = extract_patch_features(img, config);
  return detail::fit_mvg_unchecked(pf.patches, ModelMeta::from_config(config, domain));
}

/// Distance of the image's feature MVG from the pristine model; lower
/// means more natural.
inline double score_image(const GrayImage& img, const MvgModel& pristine,
                          const FeatureConfig& config,
                          FieldDomain domain = FieldDomain::Image) {
  return niqe_distance(pristine, fit_test_model(img, config, domain));
}

/// Scores with the feature configuration and domain recorded in the model.
inline double score_image(const GrayImage& img, const MvgModel& pristine) {
  return score_image(img, pristine, pristine.meta.config(), pristine.meta.domain);
}

// ---------------------------------------------------------------------------
// Persistence

inline constexpr const char* kModelFormatVersion = "1";

inline nlohmann::json to_json(const MvgModel& m) {
  nlohmann::json j;
  j["version"] = kModelFormatVersion;
  j["feature_dim"] = m.dim();
  j["mu"] = m.mu;
  j["sigma"] = m.sigma;
  j["meta"] = {{"patch_size", m.meta.patch_size},
               {"sharpness_fraction", m.meta.sharpness_fraction},
               {"scales", m.meta.scales},
               {"window_radius", m.meta.window_radius},
               {"window_std", m.meta.window_std},
               {"domain", to_string(m.meta.domain)},
               {"sample_count", m.meta.sample_count}};
  return j;
}

inline std::string serialize_model(const MvgModel& m) { return to_json(m).dump() + "\n"; }

inline MvgModel model_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw CorruptionError("model file is not a JSON object");
  if (!j.contains("version")) throw VersionError("model file has no version; supported: 1");
  const auto& v = j["version"];
  const std::string version = v.is_string() ? v.get<std::string>() : v.dump();
  if (version != kModelFormatVersion) {
    throw VersionError("unsupported model version '" + version + "'; supported versions: 1");
  }
  try {
    MvgModel m;
    const auto dim = j.at("feature_dim").get<std::size_t>();
    m.mu = j.at("mu").get<std::vector<double>>();
    m.sigma = j.at("sigma").get<std::vector<double>>();
    if (dim == 0 || m.mu.size() != dim || m.sigma.size() != dim * dim) {
      throw CorruptionError("model shape mismatch: feature_dim " + std::to_string(dim) +
                            ", mu " + std::to_string(m.mu.size()) + ", sigma " +
                            std::to_string(m.sigma.size()));
    }
    const auto& meta = j.at("meta");
    m.meta.patch_size = meta.at("patch_size").get<std::size_t>();
    m.meta.sharpness_fraction = meta.at("sharpness_fraction").get<double>();
    m.meta.scales = meta.at("scales").get<std::size_t>();
    m.meta.window_radius = meta.at("window_radius").get<int>();
    m.meta.window_std = meta.at("window_std").get<double>();
    m.meta.domain = parse_domain(meta.at("domain").get<std::string>());
    m.meta.sample_count = meta.at("sample_count").get<std::size_t>();

    if (m.meta.sample_count < 2) throw CorruptionError("model sample_count must be >= 2");
    if (dim != kFeaturesPerScale * m.meta.scales) {
      throw CorruptionError("feature_dim " + std::to_string(dim) + " does not match " +
                            std::to_string(m.meta.scales) + " scales");
    }
    for (std::size_t i = 0; i < dim; ++i) {
      if (m.sigma[i * dim + i] < 0.0) throw CorruptionError("negative covariance diagonal");
      for (std::size_t k = i + 1; k < dim; ++k) {
        if (std::abs(m.sigma[i * dim + k] - m.sigma[k * dim + i]) > 1e-10) {
          throw CorruptionError("covariance matrix is not symmetric");
        }
      }
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw CorruptionError(std::string("malformed model file: ") + e.what());
  }
}

inline MvgModel parse_model(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw CorruptionError(std::string("model file is not valid JSON: ") + e.what());
  }
  return model_from_json(j);
}

inline void save_model(const MvgModel& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << serialize_model(m);
  if (!out) throw IoError("failed writing '" + path + "'");
}

inline MvgModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model(buf.str());
}

}  // namespace qaq
