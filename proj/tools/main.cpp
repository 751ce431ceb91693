#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"

int main(int argc, char** argv) {
  using namespace qaq::cli;

  CLI::App app{"Quality-aware image metrics and discriminator penalties"};
  app.require_subcommand(1);

  std::string ref, test;
  auto* ssim_cmd = app.add_subcommand("score-ssim", "SSIM, d1, d2 and dQ between two images");
  ssim_cmd->add_option("ref", ref, "Reference image")->required();
  ssim_cmd->add_option("test", test, "Test image")->required();

  std::string corpus, model_out;
  FitOptions fit;
  auto* fit_cmd = app.add_subcommand("fit-pristine", "Fit a pristine MVG model over a corpus");
  fit_cmd->add_option("corpus", corpus, "Directory of PNG/PGM images")->required();
  fit_cmd->add_option("output", model_out, "Model file to write")->required();
  fit_cmd->add_flag("--gradient", fit.gradient, "Use Sobel gradient fields of the images");
  fit_cmd->add_option("--patch-size", fit.patch_size, "Patch side in pixels")
      ->capture_default_str();
  fit_cmd->add_option("--sharpness", fit.sharpness, "Sharpness selection fraction")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  fit_cmd->add_option("--scales", fit.scales, "Number of scales")
      ->capture_default_str()
      ->check(CLI::Range(1, 4));

  std::string niqe_image, model_in;
  bool niqe_gradient = false;
  auto* niqe_cmd = app.add_subcommand("score-niqe", "Distance of an image from a pristine model");
  niqe_cmd->add_option("image", niqe_image, "Image to score")->required();
  niqe_cmd->add_option("--model", model_in, "Pristine model file")->required();
  niqe_cmd->add_flag("--gradient", niqe_gradient, "Score the Sobel gradient field");

  std::string d_in, d_out;
  DistortionSpec spec;
  const std::map<std::string, DistortionKind> kinds{{"blur", DistortionKind::Blur},
                                                     {"awgn", DistortionKind::Awgn}};
  auto* distort_cmd = app.add_subcommand("distort", "Write a blurred or noisy copy (PGM)");
  distort_cmd->add_option("input", d_in, "Input image")->required();
  distort_cmd->add_option("output", d_out, "Output PGM")->required();
  distort_cmd->add_option("--kind", spec.kind, "blur or awgn")
      ->required()
      ->transform(CLI::CheckedTransformer(kinds, CLI::ignore_case));
  distort_cmd->add_option("--level", spec.level, "Blur std (px) or noise std (luminance)")
      ->required();
  distort_cmd->add_option("--seed", spec.seed, "Noise seed")->capture_default_str();

  std::string h_image;
  bool h_gradient = false;
  std::size_t bins = 101;
  std::vector<double> range{-3.0, 3.0};
  auto* hist_cmd = app.add_subcommand("mscn-hist", "CSV histogram of MSCN coefficients");
  hist_cmd->add_option("image", h_image, "Image")->required();
  hist_cmd->add_flag("--gradient", h_gradient, "Use the Sobel gradient field");
  hist_cmd->add_option("--bins", bins, "Number of bins")->capture_default_str();
  hist_cmd->add_option("--range", range, "Histogram range: lo hi")->expected(2);

  double gap = 0.0, one_gp = 0.0, quality = 0.0;
  qaq::PenaltyWeights weights;
  auto* pen_cmd = app.add_subcommand("penalty-eval", "Compose the discriminator loss");
  pen_cmd->add_option("--gap", gap, "Wasserstein gap E[D(G(z))] - E[D(x)]")->required();
  pen_cmd->add_option("--one-gp", one_gp, "Mean 1-GP penalty")->required();
  pen_cmd->add_option("--quality", quality, "Mean quality penalty (SSIM-GP or NIQE-GP)")
      ->required();
  pen_cmd->add_option("--lambda1", weights.lambda1)->capture_default_str();
  pen_cmd->add_option("--lambda2", weights.lambda2)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  if (*ssim_cmd) return score_ssim(ref, test, std::cout, std::cerr);
  if (*fit_cmd) return fit_pristine(corpus, model_out, fit, std::cout, std::cerr);
  if (*niqe_cmd) return score_niqe(niqe_image, model_in, niqe_gradient, std::cout, std::cerr);
  if (*distort_cmd) return distort(d_in, d_out, spec, std::cerr);
  if (*hist_cmd) return mscn_hist(h_image, h_gradient, bins, range[0], range[1], std::cout, std::cerr);
  if (*pen_cmd) return penalty_eval(gap, one_gp, quality, weights, std::cout, std::cerr);
  return kExitInput;
}
