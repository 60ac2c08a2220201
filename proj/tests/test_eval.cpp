#include <gtest/gtest.h>

#include <cmath>

#include "craftmaps/error.hpp"
#include "craftmaps/eval.hpp"
#include "oracles.hpp"

using namespace craftmaps;

TEST(Nrms, Examples) {
  std::mt19937_64 gen(1);
  Matrix A = oracle::random_matrix(6, 6, gen);
  EXPECT_EQ(nrms_error(A, A), 0.0);
  EXPECT_DOUBLE_EQ(nrms_error(A, 2.0 * A), 1.0);
  EXPECT_THROW(nrms_error(A, Matrix::Zero(5, 6)), DimensionMismatch);
  EXPECT_THROW(nrms_error(Matrix::Zero(3, 3), Matrix::Zero(3, 3)), InvalidArgument);
}

TEST(Nrms, MatchesDoubleLoop) {
  std::mt19937_64 gen(2);
  Matrix A = oracle::random_matrix(50, 50, gen), B = oracle::random_matrix(50, 50, gen);
  double num = 0, den = 0;
  for (int i = 0; i < 50; ++i)
    for (int j = 0; j < 50; ++j) {
      num += (A(i, j) - B(i, j)) * (A(i, j) - B(i, j));
      den += A(i, j) * A(i, j);
    }
  EXPECT_NEAR(nrms_error(A, B), std::sqrt(num / den), 1e-12);
}

TEST(FeatureGram, MatchesProduct) {
  std::mt19937_64 gen(3);
  Matrix F = oracle::random_matrix(20, 7, gen);
  Matrix G = feature_gram(F);
  Matrix ref = F * F.transpose();
  EXPECT_LE((G - ref).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(G, G.transpose());
}

TEST(Scree, Identity) {
  auto r = scree(Matrix::Identity(4, 4));
  EXPECT_EQ(r.numerical_rank, 4u);
  for (double s : r.singular_values) EXPECT_NEAR(s, 1.0, 1e-14);
}

TEST(Scree, RepeatedColumn) {
  Matrix F(5, 2);
  F << 1, 1, 2, 2, 3, 3, 4, 4, 5, 5;
  EXPECT_EQ(scree(F).numerical_rank, 1u);
}

TEST(Scree, ConstructedRank) {
  std::mt19937_64 gen(4);
  Matrix F = oracle::random_matrix(40, 3, gen) * oracle::random_matrix(3, 25, gen);
  auto r = scree(F);
  EXPECT_EQ(r.numerical_rank, 3u);
  EXPECT_TRUE(std::is_sorted(r.singular_values.rbegin(), r.singular_values.rend()));
}

TEST(Scree, SquaresMatchGramEigenvalues) {
  std::mt19937_64 gen(5);
  Matrix F = oracle::random_matrix(12, 30, gen);
  auto sv = scree(F).singular_values;
  auto ev = symmetric_spectrum(F * F.transpose());
  ASSERT_EQ(ev.size(), 12u);
  for (std::size_t i = 0; i < 12; ++i) EXPECT_NEAR(sv[i] * sv[i], ev[i], 1e-9 * ev[0]);
  EXPECT_EQ(scree(Matrix::Zero(3, 3)).numerical_rank, 0u);
  EXPECT_THROW(scree(Matrix(0, 0)), InvalidArgument);
}

TEST(Histogram, Examples) {
  auto zero = weight_histogram(Eigen::MatrixXd::Zero(4, 3), 3);
  EXPECT_EQ(zero.counts, (std::vector<std::size_t>{0, 12, 0}));

  Eigen::MatrixXd pm(2, 2);
  pm << -1, 1, 1, -1;
  auto h = weight_histogram(pm, 4);
  EXPECT_EQ(h.counts.front(), 2u);
  EXPECT_EQ(h.counts.back(), 2u);

  std::mt19937_64 gen(6);
  Matrix W = oracle::random_matrix(30, 11, gen);
  auto r = weight_histogram(W, 17);
  std::size_t total = 0;
  for (auto c : r.counts) total += c;
  EXPECT_EQ(total, 330u);
  EXPECT_THROW(weight_histogram(W, 0), InvalidArgument);
}

TEST(Classification, ErrorAndConfusion) {
  std::vector<int> truth{0, 1, 1, 0, 1};
  EXPECT_EQ(classification_error(truth, truth), 0.0);
  std::vector<int> flipped{1, 0, 0, 1, 0};
  EXPECT_EQ(classification_error(flipped, truth), 1.0);
  std::vector<int> t(10), majority(10, 0);
  for (int i = 0; i < 10; ++i) t[i] = i < 6 ? 0 : 1;
  EXPECT_DOUBLE_EQ(classification_error(majority, t), 0.4);
  auto cm = confusion_matrix(majority, t, 2);
  EXPECT_EQ(cm[0][0], 6u);
  EXPECT_EQ(cm[1][0], 4u);
  EXPECT_EQ(cm[1][1], 0u);
  std::vector<int> short_pred{0};
  EXPECT_THROW(classification_error(short_pred, t), DimensionMismatch);
}

TEST(DecayStudy, SingleTrialPlumbing) {
  std::vector<std::size_t> dims{16, 64};
  auto rows = decay_study(4, {1, 2}, dims, 10, 1, 1);
  ASSERT_EQ(rows.size(), 2u);
  for (const auto& r : rows) {
    EXPECT_EQ(r.per_trial.size(), 1u);
    EXPECT_EQ(r.median_nrms, r.per_trial[0]);
  }
  std::vector<std::size_t> bad{64, 16};
  EXPECT_THROW(decay_study(4, {1, 2}, bad, 10, 1, 1), InvalidArgument);
}

TEST(DecayStudy, ErrorShrinksWithDimension) {
  std::vector<std::size_t> dims{64, 1024};
  auto rows = decay_study(8, {1, 3}, dims, 40, 5, 2);
  EXPECT_LT(rows[1].median_nrms, rows[0].median_nrms);
}

TEST(Median, Values) {
  EXPECT_EQ(median({3.0, 1.0, 2.0}), 2.0);
  EXPECT_EQ(median({4.0, 1.0, 2.0, 3.0}), 2.5);
  EXPECT_THROW(median({}), InvalidArgument);
}
