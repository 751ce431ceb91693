#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <algorithm>
#include <cstring>
#include <random>

#include "oracles.hpp"
#include "qaq/filters.hpp"
#include "qaq/mvg.hpp"
#include "support.hpp"

using namespace qaq;

namespace {

MvgModel make_model(std::vector<double> mu, std::vector<double> sigma) {
  MvgModel m;
  m.mu = std::move(mu);
  m.sigma = std::move(sigma);
  m.meta.sample_count = 10;
  return m;
}

// Random SPD matrix with eigenvalues in [lo, hi].
Eigen::MatrixXd random_spd(std::mt19937_64& rng, int d, double lo, double hi) {
  std::normal_distribution<double> n;
  Eigen::MatrixXd a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = n(rng);
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  const Eigen::MatrixXd q = qr.householderQ();
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::VectorXd ev(d);
  for (int i = 0; i < d; ++i) ev(i) = u(rng);
  return q * ev.asDiagonal() * q.transpose();
}

Eigen::MatrixXd random_rotation(std::mt19937_64& rng, int d) {
  std::normal_distribution<double> n;
  Eigen::MatrixXd a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = n(rng);
  return Eigen::HouseholderQR<Eigen::MatrixXd>(a).householderQ();
}

MvgModel from_eigen(const Eigen::VectorXd& mu, const Eigen::MatrixXd& s) {
  MvgModel m;
  m.mu.assign(mu.data(), mu.data() + mu.size());
  m.sigma.resize(static_cast<std::size_t>(s.size()));
  for (int i = 0; i < s.rows(); ++i)
    for (int j = 0; j < s.cols(); ++j) m.sigma[static_cast<std::size_t>(i * s.cols() + j)] = s(i, j);
  m.meta.sample_count = 10;
  return m;
}

// Per-image features of the bundled corpus, extracted once.
const std::vector<PatchFeatures>& corpus_features() {
  static const std::vector<PatchFeatures> feats = [] {
    std::vector<PatchFeatures> out;
    for (const auto& f : support::corpus_files())
      out.push_back(extract_patch_features(load_image(f.string())));
    return out;
  }();
  return feats;
}

MvgModel corpus_model(std::size_t skip = static_cast<std::size_t>(-1)) {
  std::vector<NiqeFeatures> all;
  const auto& feats = corpus_features();
  for (std::size_t i = 0; i < feats.size(); ++i)
    if (i != skip) all.insert(all.end(), feats[i].patches.begin(), feats[i].patches.end());
  return fit_mvg(all);
}

}  // namespace

// fit_mvg --------------------------------------------------------------------

TEST(FitMvg, TwoVectorClosedForm) {
  const std::vector<NiqeFeatures> v{{1.0, 4.0, -2.0}, {3.0, 0.0, 2.0}};
  const MvgModel m = fit_mvg(v);
  EXPECT_EQ(m.mu, (std::vector<double>{2.0, 2.0, 0.0}));
  const double d[3] = {-2.0, 4.0, -4.0};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) EXPECT_DOUBLE_EQ(m.cov(i, j), d[i] * d[j] / 2.0);
  EXPECT_EQ(m.meta.sample_count, 2u);
}

TEST(FitMvg, RecoversSamplingDistributionMean) {
  std::mt19937_64 rng(1);
  const int d = 5;
  const Eigen::MatrixXd cov = random_spd(rng, d, 0.5, 3.0);
  const Eigen::MatrixXd chol = cov.llt().matrixL();
  Eigen::VectorXd mu0(d);
  mu0 << 1.0, -2.0, 0.5, 10.0, 0.0;
  std::normal_distribution<double> n;
  std::vector<NiqeFeatures> draws;
  const int count = 10000;
  for (int k = 0; k < count; ++k) {
    Eigen::VectorXd z(d);
    for (int i = 0; i < d; ++i) z(i) = n(rng);
    const Eigen::VectorXd x = mu0 + chol * z;
    draws.emplace_back(x.data(), x.data() + d);
  }
  const MvgModel m = fit_mvg(draws);
  for (int i = 0; i < d; ++i) {
    const double se = std::sqrt(cov(i, i) / count);
    EXPECT_NEAR(m.mu[static_cast<std::size_t>(i)], mu0(i), 3.0 * se);
    EXPECT_NEAR(m.cov(static_cast<std::size_t>(i), static_cast<std::size_t>(i)), cov(i, i),
                0.1 * cov(i, i));
  }
}

TEST(FitMvg, RepeatedVectorHasZeroCovariance) {
  const std::vector<NiqeFeatures> v(6, NiqeFeatures{1.5, -2.0, 7.0});
  for (double s : fit_mvg(v).sigma) EXPECT_EQ(s, 0.0);
}

TEST(FitMvg, Errors) {
  EXPECT_THROW(fit_mvg(std::vector<NiqeFeatures>{{1.0, 2.0}}), InsufficientDataError);
  EXPECT_THROW(fit_mvg(std::vector<NiqeFeatures>{{1.0, 2.0}, {1.0}}), DimensionError);
  EXPECT_THROW(fit_mvg(std::vector<NiqeFeatures>{{1.0, std::nan("")}, {1.0, 2.0}}), DomainError);
}

// niqe_distance --------------------------------------------------------------

TEST(NiqeDistance, SelfDistanceIsZero) {
  std::mt19937_64 rng(2);
  const Eigen::MatrixXd s = random_spd(rng, 6, 0.1, 2.0);
  const MvgModel m = from_eigen(Eigen::VectorXd::Random(6), s);
  EXPECT_EQ(niqe_distance(m, m), 0.0);
}

TEST(NiqeDistance, ScalarHandValue) {
  // sqrt((0 - 3)^2 / ((4 + 4) / 2)) = 1.5
  EXPECT_DOUBLE_EQ(niqe_distance(make_model({0.0}, {4.0}), make_model({3.0}, {4.0})), 1.5);
}

TEST(NiqeDistance, Symmetric) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const MvgModel a = from_eigen(Eigen::VectorXd::Random(8), random_spd(rng, 8, 0.01, 5.0));
    const MvgModel b = from_eigen(Eigen::VectorXd::Random(8), random_spd(rng, 8, 0.01, 5.0));
    EXPECT_NEAR(niqe_distance(a, b), niqe_distance(b, a), 1e-12);
  }
}

TEST(NiqeDistance, InvariantUnderSharedRotation) {
  std::mt19937_64 rng(4);
  const int d = 7;
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::VectorXd ma = Eigen::VectorXd::Random(d), mb = Eigen::VectorXd::Random(d);
    const Eigen::MatrixXd sa = random_spd(rng, d, 0.1, 4.0), sb = random_spd(rng, d, 0.1, 4.0);
    const Eigen::MatrixXd r = random_rotation(rng, d);
    const double before = niqe_distance(from_eigen(ma, sa), from_eigen(mb, sb));
    const double after = niqe_distance(from_eigen(r * ma, r * sa * r.transpose()),
                                       from_eigen(r * mb, r * sb * r.transpose()));
    EXPECT_NEAR(before, after, 1e-8);
  }
}

TEST(NiqeDistance, PseudoInverseMatchesExactInverseWhenWellConditioned) {
  std::mt19937_64 rng(5);
  const int d = 10;
  const Eigen::VectorXd ma = Eigen::VectorXd::Random(d), mb = Eigen::VectorXd::Random(d);
  const Eigen::MatrixXd sa = random_spd(rng, d, 0.5, 50.0), sb = random_spd(rng, d, 0.5, 50.0);
  const Eigen::MatrixXd avg = (sa + sb) / 2.0;
  const Eigen::VectorXd diff = ma - mb;
  const double exact = std::sqrt(diff.dot(avg.inverse() * diff));
  EXPECT_NEAR(niqe_distance(from_eigen(ma, sa), from_eigen(mb, sb)), exact, 1e-8);
}

TEST(NiqeDistance, RankDeficientCovarianceStaysFinite) {
  // Both covariances are rank one along e1; the e2 mean offset is ignored.
  const MvgModel a = make_model({0.0, 0.0}, {2.0, 0.0, 0.0, 0.0});
  const MvgModel b = make_model({2.0, 5.0}, {2.0, 0.0, 0.0, 0.0});
  EXPECT_NEAR(niqe_distance(a, b), std::sqrt(4.0 / 2.0), 1e-12);
}

TEST(NiqeDistance, Errors) {
  const MvgModel a = make_model({0.0}, {1.0});
  const MvgModel b = make_model({0.0, 1.0}, {1, 0, 0, 1});
  EXPECT_THROW(niqe_distance(a, b), DimensionError);
  MvgModel c = a;
  c.meta.patch_size = 48;
  try {
    niqe_distance(a, c);
    FAIL() << "expected IncompatibleModelError";
  } catch (const IncompatibleModelError& e) {
    EXPECT_NE(std::string(e.what()).find("patch_size"), std::string::npos);
  }
  MvgModel g = a;
  g.meta.domain = FieldDomain::Gradient;
  EXPECT_THROW(niqe_distance(a, g), IncompatibleModelError);
}

// score_image ----------------------------------------------------------------

TEST(ScoreImage, CorpusImageScoresBelowLeaveOneOutMedian) {
  const auto files = support::corpus_files();
  std::vector<double> loo;
  for (std::size_t i = 0; i < files.size(); ++i) {
    loo.push_back(score_image(load_image(files[i].string()), corpus_model(i)));
  }
  std::vector<double> sorted = loo;
  std::sort(sorted.begin(), sorted.end());
  const double median = 0.5 * (sorted[sorted.size() / 2 - 1] + sorted[sorted.size() / 2]);
  const MvgModel full = corpus_model();
  const double in_sample = score_image(support::corpus_image("camera.png"), full);
  EXPECT_LT(in_sample, median);
}

TEST(ScoreImage, BlurRaisesScore) {
  const MvgModel model = corpus_model();
  for (const char* name : {"camera.png", "coffee.png", "grass.png"}) {
    const GrayImage img = support::corpus_image(name);
    EXPECT_GT(score_image(gaussian_blur(img, 3.0), model), score_image(img, model)) << name;
  }
}

TEST(ScoreImage, ConstantImagePropagatesSelectionError) {
  EXPECT_THROW(score_image(GrayImage(200, 200, 9.0), corpus_model()), SelectionError);
}

TEST(ScoreImage, ConfigMismatchIsIncompatible) {
  FeatureConfig other;
  other.sharpness_fraction = 0.5;
  EXPECT_THROW(score_image(support::corpus_image("coins.png"), corpus_model(), other),
               IncompatibleModelError);
}

// persistence ----------------------------------------------------------------

TEST(ModelFile, RoundTripIsBitwise) {
  const auto dir = support::scratch_dir("model_rt");
  const MvgModel m = corpus_model();
  save_model(m, (dir / "m.json").string());
  const MvgModel back = load_model((dir / "m.json").string());
  ASSERT_EQ(back.mu.size(), m.mu.size());
  ASSERT_EQ(back.sigma.size(), m.sigma.size());
  EXPECT_EQ(std::memcmp(back.mu.data(), m.mu.data(), m.mu.size() * sizeof(double)), 0);
  EXPECT_EQ(std::memcmp(back.sigma.data(), m.sigma.data(), m.sigma.size() * sizeof(double)), 0);
  EXPECT_FALSE(back.meta.mismatch(m.meta).has_value());
  EXPECT_EQ(back.meta.sample_count, m.meta.sample_count);
}

TEST(ModelFile, TruncatedFileIsCorruption) {
  const std::string text = serialize_model(corpus_model());
  EXPECT_THROW(parse_model(text.substr(0, text.size() / 2)), CorruptionError);

  auto j = nlohmann::json::parse(text);
  auto sigma = j["sigma"].get<std::vector<double>>();
  sigma.pop_back();
  j["sigma"] = sigma;
  EXPECT_THROW(model_from_json(j), CorruptionError);
}

TEST(ModelFile, WrongVersionNamesSupportedVersions) {
  auto j = nlohmann::json::parse(serialize_model(corpus_model()));
  j["version"] = "0";
  try {
    model_from_json(j);
    FAIL() << "expected VersionError";
  } catch (const VersionError& e) {
    EXPECT_NE(std::string(e.what()).find("supported versions: 1"), std::string::npos);
  }
}

TEST(ModelFile, AsymmetricCovarianceIsCorruption) {
  auto j = nlohmann::json::parse(serialize_model(corpus_model()));
  auto sigma = j["sigma"].get<std::vector<double>>();
  sigma[1] += 1.0;
  j["sigma"] = sigma;
  EXPECT_THROW(model_from_json(j), CorruptionError);
}

TEST(ModelFile, MissingFileIsIoError) {
  EXPECT_THROW(load_model("/nonexistent/qaq/model.json"), IoError);
}
