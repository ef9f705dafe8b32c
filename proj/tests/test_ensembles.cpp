#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include <Eigen/LU>

#include "lyapinit/ensembles.hpp"
#include "lyapinit/errors.hpp"
#include "lyapinit/stats.hpp"

namespace lyapinit {
namespace {

using namespace ensembles;

TEST(GaussianMatrix, MeanAndVariance) {
  RngStream rng(1, 0);
  const int n_mats = 62500;  // 10^6 entries at d = 4
  double s = 0;
  for (int k = 0; k < n_mats; ++k) s += sample_gaussian_matrix(4, 1.0, rng).sum();
  EXPECT_NEAR(s / 1e6, 0.0, 3e-3);

  RngStream rng2(2, 0);
  double s2 = 0;
  for (int k = 0; k < n_mats; ++k) s2 += sample_gaussian_matrix(4, 0.5, rng2).squaredNorm();
  EXPECT_NEAR(s2 / 1e6, 0.25, 3 * std::sqrt(2.0) * 0.25 / 1e3);
}

TEST(GaussianMatrix, ReplayAndErrors) {
  RngStream a(3, 9), b(3, 9);
  EXPECT_EQ(sample_gaussian_matrix(5, 0.3, a), sample_gaussian_matrix(5, 0.3, b));
  EXPECT_THROW(sample_gaussian_matrix(3, 0.0, a), DomainError);
  EXPECT_THROW(sample_gaussian_matrix(3, -1.0, a), DomainError);
  EXPECT_THROW(sample_gaussian_matrix(0, 1.0, a), DomainError);
}

TEST(Haar, OrthogonalAndScaled) {
  RngStream rng(4, 0);
  for (int d : {2, 3, 8}) {
    for (int k = 0; k < 100; ++k) {
      const Matrix q = sample_haar_orthogonal(d, 1.0, rng);
      EXPECT_LE((q.transpose() * q - Matrix::Identity(d, d)).cwiseAbs().maxCoeff(), 1e-10);
    }
    const Matrix q = sample_haar_orthogonal(d, 2.5, rng);
    EXPECT_LE((q.transpose() * q - 6.25 * Matrix::Identity(d, d)).cwiseAbs().maxCoeff(), 1e-9);
  }
  EXPECT_THROW(sample_haar_orthogonal(3, 0.0, rng), DomainError);
}

TEST(Haar, DeterminantSignsSplitEvenly) {
  RngStream rng(5, 0);
  const int n = 10000;
  int positive = 0;
  for (int k = 0; k < n; ++k) positive += sample_haar_orthogonal(3, 1.0, rng).determinant() > 0 ? 1 : 0;
  EXPECT_NEAR(static_cast<double>(positive) / n, 0.5, 0.015);
}

TEST(Haar, RotatesFixedVectorIsotropically) {
  RngStream rng(6, 0);
  const int d = 3, n = 100000;
  Vector x(d);
  x << 0.6, 0.0, 0.8;
  Matrix m = Matrix::Zero(d, d);
  for (int k = 0; k < n; ++k) {
    const Vector y = sample_haar_orthogonal(d, 1.0, rng) * x;
    m.noalias() += y * y.transpose();
  }
  m /= n;
  EXPECT_LE((m - Matrix::Identity(d, d) / d).cwiseAbs().maxCoeff(), 5e-3);
}

TEST(UnitSphere, NormAndMoments) {
  RngStream rng(7, 0);
  const int d = 4, n = 100000;
  Vector mean = Vector::Zero(d);
  Matrix second = Matrix::Zero(d, d);
  for (int k = 0; k < n; ++k) {
    const Vector x = sample_unit_sphere(d, rng);
    ASSERT_NEAR(x.norm(), 1.0, 1e-12);
    mean += x;
    second.noalias() += x * x.transpose();
  }
  mean /= n;
  second /= n;
  EXPECT_LE(mean.cwiseAbs().maxCoeff(), 3.0 / std::sqrt(static_cast<double>(n) * d));
  EXPECT_LE((second - Matrix::Identity(d, d) / d).cwiseAbs().maxCoeff(), 5e-3);
  const Vector one = sample_unit_sphere(1, rng);
  EXPECT_EQ(std::abs(one(0)), 1.0);
}

TEST(UniformPositive, RangeMeanReplay) {
  RngStream rng(8, 0);
  const double a = 3.0;
  double s = 0;
  for (int k = 0; k < 62500; ++k) {
    const Matrix m = sample_uniform_positive_matrix(4, a, rng);
    ASSERT_GE(m.minCoeff(), 0.0);
    ASSERT_LE(m.maxCoeff(), a);
    s += m.sum();
  }
  EXPECT_NEAR(s / 1e6, a / 2, 3 * (a / std::sqrt(12.0)) / 1e3);
  RngStream b(8, 1), c(8, 1);
  EXPECT_EQ(sample_uniform_positive_matrix(3, a, b), sample_uniform_positive_matrix(3, a, c));
  EXPECT_THROW(sample_uniform_positive_matrix(3, 0.0, b), DomainError);
}

// Kolmogorov-Smirnov 1% two-sample critical value for n = m = 10^4.
constexpr double kKsCritical = 1.628 * 0.01414213562373095;

TEST(EnsembleProperty, GaussianIsRightInvariant) {
  RngStream setup(9, 0);
  const int d = 3, n = 10000;
  const Matrix q0 = sample_haar_orthogonal(d, 1.0, setup);
  RngStream ra(9, 1), rb(9, 2);
  std::vector<double> rotated_entry(n), plain_entry(n), rotated_norm(n), plain_norm(n);
  for (int k = 0; k < n; ++k) {
    const Matrix wq = sample_gaussian_matrix(d, 1.0, ra) * q0;
    const Matrix w = sample_gaussian_matrix(d, 1.0, rb);
    rotated_entry[k] = wq(0, 0);
    plain_entry[k] = w(0, 0);
    rotated_norm[k] = wq.col(0).norm();
    plain_norm[k] = w.col(0).norm();
  }
  EXPECT_LT(ks_statistic(rotated_entry, plain_entry), kKsCritical);
  EXPECT_LT(ks_statistic(rotated_norm, plain_norm), kKsCritical);
}

TEST(EnsembleProperty, FrobeniusNormPreserved) {
  RngStream rng(10, 0);
  for (int k = 0; k < 50; ++k) {
    const Matrix w = sample_gaussian_matrix(6, 1.3, rng);
    const Matrix q = sample_haar_orthogonal(6, 1.0, rng);
    EXPECT_NEAR((w * q).norm(), w.norm(), 1e-10);
  }
}

TEST(EnsembleProperty, ReplayIndependentOfOtherStreams) {
  const auto spec = EnsembleSpec::orthogonal(4, 1.2);
  RngStream a(11, 5);
  const Matrix first = sample(spec, a);
  for (std::uint64_t id = 0; id < 5; ++id) {
    RngStream other(11, id);
    sample(spec, other);
  }
  RngStream b(11, 5);
  EXPECT_EQ(sample(spec, b), first);
}

TEST(SampleInto, MatchesSample) {
  for (const auto& spec : {EnsembleSpec::gaussian(3, 0.7), EnsembleSpec::orthogonal(3, 0.7)}) {
    RngStream a(12, 0), b(12, 0);
    Matrix out;
    sample_into(spec, a, out);
    EXPECT_EQ(out, sample(spec, b));
  }
}

TEST(WeightStack, ShapeAndOrthogonality) {
  RngStream rng(13, 2);
  const auto stack = sample_stack(EnsembleSpec::orthogonal(5, 1.5), 7, rng);
  EXPECT_EQ(stack.depth(), 7);
  EXPECT_EQ(stack.seed.master, 13u);
  EXPECT_EQ(stack.seed.stream, 2u);
  for (const Matrix& m : stack.matrices) {
    ASSERT_EQ(m.rows(), 5);
    ASSERT_EQ(m.cols(), 5);
    EXPECT_LE((m.transpose() * m - 2.25 * Matrix::Identity(5, 5)).cwiseAbs().maxCoeff(), 1e-9);
  }
  EXPECT_THROW(sample_stack(EnsembleSpec::gaussian(2, 1.0), 0, rng), DomainError);
}

TEST(WeightStack, ValidateRejectsBadShapes) {
  WeightStack s;
  s.d = 2;
  s.matrices = {Matrix::Identity(2, 2), Matrix::Identity(3, 3)};
  EXPECT_THROW(s.validate(), UsageError);
  s.matrices = {Matrix::Constant(2, 2, std::nan(""))};
  EXPECT_THROW(s.validate(), UsageError);
}

TEST(WeightStackJson, RoundTripIsExact) {
  RngStream rng(14, 0);
  auto stack = sample_stack(EnsembleSpec::gaussian(3, 0.123456789), 4, rng);
  stack.diagnostics = {{"note", "x"}, {"value", 0.1}};
  const std::string text = to_json_string(stack);
  const auto back = weight_stack_from_json(nlohmann::json::parse(text));
  EXPECT_EQ(back.d, 3);
  EXPECT_EQ(back.depth(), 4);
  EXPECT_EQ(back.ensemble.kind, EnsembleKind::GaussianIID);
  EXPECT_EQ(back.ensemble.scale, 0.123456789);
  EXPECT_EQ(back.seed.master, 14u);
  for (int k = 0; k < 4; ++k) EXPECT_EQ(back.matrices[k], stack.matrices[k]);
  EXPECT_EQ(to_json_string(back), text);
}

TEST(WeightStackJson, LayoutIsRowMajor) {
  WeightStack s;
  s.d = 2;
  s.ensemble = EnsembleSpec::orthogonal(2, 1.0);
  Matrix m(2, 2);
  m << 1, 2, 3, 4;
  s.matrices = {m};
  const auto j = to_json(s);
  EXPECT_EQ(j["matrices"][0], nlohmann::json::parse("[1.0, 2.0, 3.0, 4.0]"));
  EXPECT_EQ(j["ensemble"]["kind"], "orthogonal");
  EXPECT_EQ(j["depth"], 1);
}

TEST(WeightStackJson, RejectsMalformed) {
  EXPECT_THROW(weight_stack_from_json(nlohmann::json::parse(R"({"d": 2})")), UsageError);
  EXPECT_THROW(weight_stack_from_json(nlohmann::json::parse(
                   R"({"d":2,"depth":1,"ensemble":{"kind":"gaussian","scale":1},"seed":{"master":0,"stream":0},"matrices":[[1,2,3]]})")),
               UsageError);
}

TEST(DumpJson17, SeventeenDigits) {
  const nlohmann::json j = {{"x", 0.1}, {"n", 3}, {"bad", std::nan("")}};
  const std::string s = dump_json17(j, -1);
  EXPECT_NE(s.find("0.10000000000000001"), std::string::npos);
  EXPECT_NE(s.find("\"bad\":null"), std::string::npos);
  EXPECT_EQ(nlohmann::json::parse(s)["x"].get<double>(), 0.1);
}

}  // namespace
}  // namespace lyapinit
