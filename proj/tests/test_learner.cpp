#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "craftmaps/error.hpp"
#include "craftmaps/learner.hpp"
#include "oracles.hpp"

using namespace craftmaps;

namespace {

std::vector<int> random_labels(std::size_t n, int k, std::mt19937_64& gen) {
  std::uniform_int_distribution<int> dist(0, k - 1);
  std::vector<int> y(n);
  for (auto& v : y) v = dist(gen);
  return y;
}

// Ridge solution for one code bit via QR of the augmented system
// [Z; sqrt(lambda) I] w = [t; 0].
Eigen::VectorXd ridge_qr(const Matrix& Z, const Eigen::VectorXd& t, double lambda) {
  const Eigen::Index n = Z.rows(), E = Z.cols();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n + E, E);
  A.topRows(n) = Z;
  A.bottomRows(E) = std::sqrt(lambda) * Eigen::MatrixXd::Identity(E, E);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n + E);
  b.head(n) = t;
  return A.colPivHouseholderQr().solve(b);
}

}  // namespace

TEST(CodeBook, TwoClassesOneBit) {
  auto cb = make_codebook(2, 1, 5);
  ASSERT_EQ(cb.codes().rows(), 2);
  EXPECT_EQ(cb.codes()(0, 0), -cb.codes()(1, 0));
}

TEST(CodeBook, InvariantsHold) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto cb = make_codebook(4, 3, seed);
    std::set<std::vector<double>> rows;
    for (int i = 0; i < 4; ++i) rows.insert({cb.codes().row(i).begin(), cb.codes().row(i).end()});
    EXPECT_EQ(rows.size(), 4u);
    for (int j = 0; j < 3; ++j) {
      EXPECT_GT(cb.codes().col(j).maxCoeff(), 0);
      EXPECT_LT(cb.codes().col(j).minCoeff(), 0);
    }
  }
}

TEST(CodeBook, LongCodesAreWellSeparated) {
  for (std::uint64_t seed = 0; seed < 10; ++seed)
    EXPECT_GE(make_codebook(10, 200, seed).min_hamming_distance(), 60u);
}

TEST(CodeBook, Errors) {
  EXPECT_THROW(make_codebook(1, 4, 0), InvalidArgument);
  EXPECT_THROW(make_codebook(5, 2, 0), InvalidArgument);
  Eigen::MatrixXd dup(2, 2);
  dup << 1, -1, 1, -1;
  EXPECT_THROW(CodeBook{dup}, InvalidArgument);
  Eigen::MatrixXd constant(2, 2);
  constant << 1, 1, -1, 1;
  EXPECT_THROW(CodeBook{constant}, InvalidArgument);
  Eigen::MatrixXd bad(2, 1);
  bad << 1, 0;
  EXPECT_THROW(CodeBook{bad}, InvalidArgument);
  EXPECT_EQ(make_codebook(6, 10, 3), make_codebook(6, 10, 3));
}

TEST(Decode, NearestCodeword) {
  Eigen::MatrixXd codes(3, 2);
  codes << 1, 1, 1, -1, -1, 1;
  CodeBook cb(codes);
  std::vector<double> s{0.9, -0.8};
  EXPECT_EQ(nearest_codeword(cb, s), 1);
  std::vector<double> exact{-1, 1};
  EXPECT_EQ(nearest_codeword(cb, exact), 2);
  std::vector<double> tie{0, 1};
  EXPECT_EQ(nearest_codeword(cb, tie), 0);
}

TEST(Accumulator, SingleExample) {
  auto cb = make_codebook(3, 4, 1);
  RidgeAccumulator acc(3, cb);
  Matrix z(1, 3);
  z << 1.0, -2.0, 0.5;
  std::vector<int> y{2};
  acc.accumulate(z, y);
  EXPECT_TRUE(acc.hessian().isApprox(z.transpose() * z));
  EXPECT_TRUE(acc.gradient().isApprox(z.transpose() * cb.codes().row(2)));
  EXPECT_EQ(acc.count(), 1u);
}

TEST(Accumulator, EmptyBlockNoOp) {
  auto cb = make_codebook(2, 3, 1);
  RidgeAccumulator acc(4, cb);
  acc.accumulate(Matrix(0, 4), std::vector<int>{});
  EXPECT_EQ(acc.count(), 0u);
  EXPECT_EQ(acc.hessian().norm(), 0.0);
}

TEST(Accumulator, Errors) {
  auto cb = make_codebook(2, 3, 1);
  RidgeAccumulator acc(4, cb);
  std::vector<int> bad{2};
  EXPECT_THROW(acc.accumulate(Matrix::Ones(1, 4), bad), InvalidArgument);
  std::vector<int> one{0};
  EXPECT_THROW(acc.accumulate(Matrix::Ones(1, 3), one), DimensionMismatch);
  RidgeAccumulator other(5, cb);
  EXPECT_THROW(acc.merge(other), DimensionMismatch);
  RidgeAccumulator other_code(4, make_codebook(2, 3, 2));
  if (!(other_code.codebook() == cb)) EXPECT_THROW(acc.merge(other_code), InvalidArgument);
}

TEST(Accumulator, ShardsMatchSinglePass) {
  std::mt19937_64 gen(7);
  Matrix Z = oracle::random_matrix(350, 12, gen);
  auto y = random_labels(350, 4, gen);
  auto cb = make_codebook(4, 6, 8);
  RidgeAccumulator whole(12, cb);
  whole.accumulate(Z, y);

  RidgeAccumulator a(12, cb), b(12, cb);
  a.accumulate(Z.topRows(100), std::span<const int>(y).first(100));
  b.accumulate(Z.bottomRows(250), std::span<const int>(y).subspan(100));
  EXPECT_EQ(a.count() + b.count(), 350u);
  RidgeAccumulator ab = merge(a, b), ba = merge(b, a);
  EXPECT_EQ(ab.count(), 350u);
  EXPECT_LE(oracle::rel_diff(ab.hessian(), whole.hessian()), 1e-10);
  EXPECT_LE(oracle::rel_diff(ab.gradient(), whole.gradient()), 1e-10);
  EXPECT_LE(oracle::rel_diff(ab.hessian(), ba.hessian()), 1e-14);

  RidgeAccumulator zero(12, cb);
  RidgeAccumulator same = merge(whole, zero);
  EXPECT_EQ(same.hessian(), whole.hessian());
  EXPECT_EQ(same.gradient(), whole.gradient());

  std::vector<RidgeAccumulator> shards(4, RidgeAccumulator(12, cb));
  for (int i = 0; i < 350; ++i) {
    Matrix row = Z.row(i);
    shards[i % 4].accumulate(row, std::span<const int>(y).subspan(i, 1));
  }
  for (int s = 1; s < 4; ++s) shards[0].merge(shards[s]);
  EXPECT_LE(oracle::rel_diff(shards[0].hessian(), whole.hessian()), 1e-10);
}

TEST(Solve, IdentityCase) {
  Eigen::MatrixXd codes(2, 2);
  codes << 1, -1, -1, 1;
  CodeBook cb(codes);
  RidgeAccumulator acc(2, cb);
  Matrix Z = Matrix::Identity(2, 2);
  std::vector<int> y{0, 1};
  acc.accumulate(Z, y);
  EcocModel m = solve(acc, 1.0);
  EXPECT_TRUE(m.weights().isApprox(acc.gradient() / 2.0, 1e-15));
}

TEST(Solve, MatchesQrOracleAndResidual) {
  std::mt19937_64 gen(9);
  Matrix Z = oracle::random_matrix(200, 16, gen);
  auto y = random_labels(200, 5, gen);
  auto cb = make_codebook(5, 4, 10);
  RidgeAccumulator acc(16, cb);
  acc.accumulate(Z, y);
  for (double lambda : {1e-3, 0.5, 10.0}) {
    EcocModel m = solve(acc, lambda);
    EXPECT_LE(relative_residual(acc, m), 1e-10);
    for (int b = 0; b < 4; ++b) {
      Eigen::VectorXd t(200);
      for (int i = 0; i < 200; ++i) t(i) = cb.codes()(y[i], b);
      Eigen::VectorXd w = ridge_qr(Z, t, lambda);
      EXPECT_LE((m.weights().col(b) - w).norm() / w.norm(), 1e-8);
    }
  }
}

TEST(Solve, LargeLambdaShrinks) {
  std::mt19937_64 gen(11);
  Matrix Z = oracle::random_matrix(50, 8, gen);
  auto y = random_labels(50, 3, gen);
  RidgeAccumulator acc(8, make_codebook(3, 5, 1));
  acc.accumulate(Z, y);
  EcocModel m = solve(acc, 1e12);
  EXPECT_NEAR(m.weights().norm() * 1e12 / acc.gradient().norm(), 1.0, 1e-6);
}

TEST(Solve, Errors) {
  RidgeAccumulator acc(3, make_codebook(2, 2, 1));
  EXPECT_THROW(solve(acc, 0.0), InvalidArgument);
  EXPECT_THROW(solve(acc, -1.0), InvalidArgument);
  Matrix Z = Matrix::Ones(1, 3);
  Z(0, 1) = std::numeric_limits<double>::quiet_NaN();
  std::vector<int> y{0};
  EXPECT_ANY_THROW({
    acc.accumulate(Z, y);
    solve(acc, 1.0);
  });
}

TEST(Predict, BatchAgreesWithSingle) {
  std::mt19937_64 gen(12);
  Matrix Z = oracle::random_matrix(60, 6, gen);
  auto y = random_labels(60, 3, gen);
  RidgeAccumulator acc(6, make_codebook(3, 7, 2));
  acc.accumulate(Z, y);
  EcocModel m = solve(acc, 0.1);
  auto batch = m.predict_batch(Z);
  for (int i = 0; i < 60; ++i) {
    std::vector<double> z(Z.row(i).data(), Z.row(i).data() + 6);
    EXPECT_EQ(batch[i], m.predict(z));
  }
  std::vector<double> wrong(5);
  EXPECT_THROW(m.predict(wrong), DimensionMismatch);
}

TEST(SelectLambda, SingleValueGrid) {
  std::mt19937_64 gen(13);
  Matrix Z = oracle::random_matrix(50, 4, gen);
  std::vector<int> y(50);
  for (int i = 0; i < 50; ++i) y[i] = i % 2;
  std::vector<double> grid{0.3};
  auto sel = select_lambda(Z, y, make_codebook(2, 3, 1), 5, grid, 1);
  EXPECT_EQ(sel.lambda, 0.3);
  EXPECT_EQ(sel.cv_error.size(), 1u);
}

TEST(SelectLambda, SeparablePrefersSmallLambda) {
  std::mt19937_64 gen(14);
  std::normal_distribution<double> noise(0.0, 0.1);
  Matrix Z(100, 3);
  std::vector<int> y(100);
  for (int i = 0; i < 100; ++i) {
    y[i] = i % 2;
    Z(i, 0) = (y[i] ? 1.0 : -1.0) + noise(gen);
    Z(i, 1) = noise(gen);
    Z(i, 2) = noise(gen);
  }
  std::vector<double> grid{1e6, 1e-6};
  auto sel = select_lambda(Z, y, make_codebook(2, 1, 1), 5, grid, 3);
  EXPECT_EQ(sel.lambda, 1e-6);
  EXPECT_EQ(sel.grid, (std::vector<double>{1e-6, 1e6}));
}

TEST(SelectLambda, GridOrderIrrelevant) {
  std::mt19937_64 gen(15);
  Matrix Z = oracle::random_matrix(90, 5, gen);
  auto y = random_labels(90, 3, gen);
  auto cb = make_codebook(3, 6, 4);
  std::vector<double> g1{1e-4, 1e-2, 1.0, 100.0}, g2{100.0, 1.0, 1e-4, 1e-2, 1.0};
  auto a = select_lambda(Z, y, cb, 4, g1, 9);
  auto b = select_lambda(Z, y, cb, 4, g2, 9);
  EXPECT_EQ(a.lambda, b.lambda);
  EXPECT_EQ(a.cv_error, b.cv_error);
}

TEST(SelectLambda, Errors) {
  std::mt19937_64 gen(16);
  Matrix Z = oracle::random_matrix(20, 3, gen);
  std::vector<int> y(20, 0);
  y[0] = 1;
  auto cb = make_codebook(2, 2, 1);
  std::vector<double> grid{1.0};
  EXPECT_THROW(select_lambda(Z, y, cb, 5, grid, 1), InvalidArgument);
  std::vector<int> ok(20);
  for (int i = 0; i < 20; ++i) ok[i] = i % 2;
  EXPECT_THROW(select_lambda(Z, ok, cb, 1, grid, 1), InvalidArgument);
  EXPECT_THROW(select_lambda(Z, ok, cb, 5, std::vector<double>{}, 1), InvalidArgument);
  EXPECT_THROW(select_lambda(Z, ok, cb, 5, std::vector<double>{-1.0}, 1), InvalidArgument);
  EXPECT_THROW(select_lambda(Z, ok, cb, 30, grid, 1), InvalidArgument);
}

TEST(SelectLambda, DefaultGrid) {
  auto g = default_lambda_grid();
  ASSERT_EQ(g.size(), 8u);
  EXPECT_DOUBLE_EQ(g.front(), 1e-6);
  EXPECT_NEAR(g.back(), 1e2, 1e-10);
  for (std::size_t i = 1; i < g.size(); ++i) EXPECT_NEAR(g[i] / g[i - 1], std::pow(1e8, 1.0 / 7), 1e-9);
}
