#pragma once

// Implementation of the `qaq` command-line verbs. Each command writes its
// result to `out`, diagnostics to `err`, and returns the process exit code:
//   0 success, 2 input error, 3 degenerate data, 4 model incompatibility.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "qaq/qaq.hpp"

namespace qaq::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitDegenerate = 3;
inline constexpr int kExitIncompatible = 4;

inline int exit_code_for(const Error& e) {
  if (dynamic_cast<const IncompatibleModelError*>(&e) || dynamic_cast<const VersionError*>(&e)) {
    return kExitIncompatible;
  }
  if (dynamic_cast<const DegenerateInputError*>(&e)) return kExitDegenerate;
  return kExitInput;
}

inline std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

template <typename Fn>
int run_guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }
}

inline GrayImage maybe_gradient(GrayImage img, bool gradient) {
  return gradient ? spatial_gradient(img) : img;
}

// score-ssim -----------------------------------------------------------------

inline int score_ssim(const std::string& ref, const std::string& test, std::ostream& out,
                      std::ostream& err) {
  return run_guarded(err, [&] {
    const GrayImage p = load_image(ref);
    const GrayImage t = load_image(test);
    const SsimScores s = ssim_scores(p, t);
    out << "SSIM " << fixed6(s.ssim) << "\n"
        << "d1 " << fixed6(s.d1) << "\n"
        << "d2 " << fixed6(s.d2) << "\n"
        << "dQ " << fixed6(s.dq) << "\n";
    return kExitOk;
  });
}

// fit-pristine ---------------------------------------------------------------

struct FitOptions {
  bool gradient = false;
  std::size_t patch_size = 96;
  double sharpness = 0.75;
  std::size_t scales = 2;
  // 0 = QAQ_THREADS or hardware concurrency.
  unsigned threads = 0;
};

inline unsigned thread_budget(unsigned requested) {
  if (requested > 0) return requested;
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("QAQ_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) n = std::min(n, static_cast<unsigned>(cap));
  }
  return n;
}

/// Regular files with a .png/.pgm extension directly inside `dir`, sorted.
inline std::vector<std::filesystem::path> list_corpus(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw IoError("'" + dir.string() + "' is not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (ext == ".png" || ext == ".pgm") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

inline int fit_pristine(const std::string& corpus_dir, const std::string& output,
                        const FitOptions& opt, std::ostream& out, std::ostream& err) {
  return run_guarded(err, [&]() -> int {
    FeatureConfig config;
    config.patch_size = opt.patch_size;
    config.sharpness_fraction = opt.sharpness;
    config.scales = opt.scales;
    config.validate();

    const auto files = list_corpus(corpus_dir);
    if (files.size() < 2) {
      err << "error: corpus '" << corpus_dir << "' needs at least 2 PNG/PGM images, found "
          << files.size() << "\n";
      return kExitInput;
    }

    struct Slot {
      bool loaded = false;
      std::optional<PatchFeatures> features;
      std::string error;
    };
    std::vector<Slot> slots(files.size());

    auto work = [&](std::size_t i) {
      try {
        const GrayImage img = maybe_gradient(load_image(files[i].string()), opt.gradient);
        slots[i].loaded = true;
        slots[i].features = extract_patch_features(img, config);
      } catch (const std::exception& e) {
        slots[i].error = e.what();
      }
    };

    const unsigned n_threads =
        std::min<unsigned>(thread_budget(opt.threads), static_cast<unsigned>(files.size()));
    if (n_threads <= 1) {
      for (std::size_t i = 0; i < files.size(); ++i) work(i);
    } else {
      std::vector<std::thread> pool;
      for (unsigned t = 0; t < n_threads; ++t) {
        pool.emplace_back([&, t] {
          for (std::size_t i = t; i < files.size(); i += n_threads) work(i);
        });
      }
      for (auto& th : pool) th.join();
    }

    // Ordered aggregation keeps the model independent of the thread count.
    std::vector<NiqeFeatures> vectors;
    std::size_t loaded = 0;
    for (std::size_t i = 0; i < files.size(); ++i) {
      const auto name = files[i].filename().string();
      if (slots[i].loaded) ++loaded;
      if (!slots[i].error.empty()) {
        err << "warning: " << name << ": skipped: " << slots[i].error << "\n";
        continue;
      }
      for (const auto& w : slots[i].features->warnings) err << "warning: " << name << ": " << w << "\n";
      for (auto& v : slots[i].features->patches) vectors.push_back(std::move(v));
    }
    if (loaded < 2) {
      err << "error: fewer than 2 usable images in '" << corpus_dir << "'\n";
      return kExitInput;
    }
    if (vectors.size() < 2) {
      err << "error: only " << vectors.size()
          << " patch(es) survived sharpness selection; lower --sharpness\n";
      return kExitDegenerate;
    }

    const MvgModel model = fit_mvg(
        vectors, ModelMeta::from_config(config, opt.gradient ? FieldDomain::Gradient
                                                             : FieldDomain::Image));
    save_model(model, output);
    out << "patches " << vectors.size() << "\n";
    return kExitOk;
  });
}

// score-niqe -----------------------------------------------------------------

inline int score_niqe(const std::string& image, const std::string& model_path, bool gradient,
                      std::ostream& out, std::ostream& err) {
  return run_guarded(err, [&] {
    const MvgModel model = load_model(model_path);
    const FieldDomain domain = gradient ? FieldDomain::Gradient : FieldDomain::Image;
    if (model.meta.domain != domain) {
      throw IncompatibleModelError("model domain is '" + to_string(model.meta.domain) +
                                   "' but the image is scored as '" + to_string(domain) +
                                   "' (field: domain)");
    }
    const GrayImage img = maybe_gradient(load_image(image), gradient);
    out << fixed6(score_image(img, model, model.meta.config(), domain)) << "\n";
    return kExitOk;
  });
}

// distort --------------------------------------------------------------------

enum class DistortionKind { Blur, Awgn };

struct DistortionSpec {
  DistortionKind kind = DistortionKind::Blur;
  double level = 1.0;
  std::uint64_t seed = 0;
};

inline GrayImage apply_distortion(const GrayImage& img, const DistortionSpec& spec) {
  if (!(spec.level > 0.0) || !std::isfinite(spec.level)) {
    throw DomainError("distortion level must be positive");
  }
  if (spec.kind == DistortionKind::Blur) return gaussian_blur(img, spec.level);

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> noise(0.0, spec.level);
  std::vector<double> out(img.values());
  for (double& v : out) v = std::clamp(v + noise(rng), 0.0, 255.0);
  return GrayImage(img.width(), img.height(), std::move(out));
}

inline int distort(const std::string& input, const std::string& output, const DistortionSpec& spec,
                   std::ostream& err) {
  return run_guarded(err, [&] {
    write_pgm(apply_distortion(load_image(input), spec), output);
    return kExitOk;
  });
}

// mscn-hist ------------------------------------------------------------------

/// Normalized histogram over `bins` equal bins on [lo, hi]; samples outside
/// the range are not counted.
inline std::vector<std::pair<double, double>> histogram(std::span<const double> values,
                                                        std::size_t bins, double lo, double hi) {
  if (bins == 0) throw DomainError("histogram needs at least one bin");
  if (!(hi > lo)) throw DomainError("histogram range must satisfy lo < hi");
  std::vector<double> counts(bins, 0.0);
  std::size_t total = 0;
  const double width = (hi - lo) / static_cast<double>(bins);
  for (double v : values) {
    if (v < lo || v > hi) continue;
    auto idx = static_cast<std::size_t>((v - lo) / width);
    if (idx >= bins) idx = bins - 1;
    counts[idx] += 1.0;
    ++total;
  }
  std::vector<std::pair<double, double>> rows(bins);
  for (std::size_t i = 0; i < bins; ++i) {
    rows[i] = {lo + (static_cast<double>(i) + 0.5) * width,
               total ? counts[i] / static_cast<double>(total) : 0.0};
  }
  return rows;
}

inline int mscn_hist(const std::string& image, bool gradient, std::size_t bins, double lo,
                     double hi, std::ostream& out, std::ostream& err) {
  return run_guarded(err, [&] {
    const GrayImage img = maybe_gradient(load_image(image), gradient);
    const MscnField field = mscn(img);
    for (const auto& [center, mass] : histogram(field.coefficients.values(), bins, lo, hi)) {
      out << fixed6(center) << "," << fixed6(mass) << "\n";
    }
    return kExitOk;
  });
}

// penalty-eval ---------------------------------------------------------------

inline int penalty_eval(double gap, double one_gp, double quality, const PenaltyWeights& w,
                        std::ostream& out, std::ostream& err) {
  return run_guarded(err, [&] {
    out << fixed6(discriminator_loss_terms(gap, one_gp, quality, w)) << "\n";
    return kExitOk;
  });
}

}  // namespace qaq::cli
