#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "craftmaps/error.hpp"
#include "craftmaps/kernel.hpp"
#include "oracles.hpp"

using namespace craftmaps;

TEST(Kernel, ParamsValidation) {
  EXPECT_THROW(PolyKernelParams(-1, 2), InvalidArgument);
  EXPECT_THROW(PolyKernelParams(1, 0), InvalidArgument);
  PolyKernelParams p(0, 1);
  EXPECT_EQ(p.offset(), 0);
  EXPECT_EQ(p.degree(), 1);
}

TEST(Kernel, EvalExamples) {
  PolyKernelParams p17(1, 7);
  std::vector<double> e1{1, 0, 0}, e2{0, 1, 0};
  EXPECT_DOUBLE_EQ(eval_kernel(e1, e1, p17), 128.0);
  EXPECT_DOUBLE_EQ(eval_kernel(e1, e2, p17), 1.0);
  std::vector<double> x{0.6, 0.8}, y{0.8, 0.6};
  EXPECT_NEAR(eval_kernel(x, y, PolyKernelParams(0, 2)), 0.9216, 1e-15);
}

TEST(Kernel, EvalErrors) {
  PolyKernelParams p(1, 2);
  std::vector<double> a{1, 2}, b{1, 2, 3};
  EXPECT_THROW(eval_kernel(a, b, p), DimensionMismatch);
  std::vector<double> bad{1, std::numeric_limits<double>::quiet_NaN()};
  EXPECT_THROW(eval_kernel(a, bad, p), InvalidArgument);
}

TEST(Kernel, MaclaurinExamples) {
  EXPECT_EQ(maclaurin_coeffs({1, 2}).values(), (std::vector<double>{1, 2, 1}));
  EXPECT_EQ(maclaurin_coeffs({0, 3}).values(), (std::vector<double>{0, 0, 0, 1}));
  EXPECT_EQ(maclaurin_coeffs({2, 2}).values(), (std::vector<double>{4, 4, 1}));
  auto a = maclaurin_coeffs({1, 2});
  EXPECT_EQ(a[5], 0.0);
}

TEST(Kernel, MaclaurinMatchesBinomialAndProfile) {
  for (int q = 0; q <= 3; ++q) {
    for (int r = 1; r <= 12; ++r) {
      auto a = maclaurin_coeffs({q, r});
      ASSERT_EQ(a.size(), static_cast<std::size_t>(r + 1));
      for (int n = 0; n <= r; ++n) {
        double binom = std::tgamma(r + 1.0) / (std::tgamma(n + 1.0) * std::tgamma(r - n + 1.0));
        EXPECT_NEAR(a[n], binom * oracle::int_pow(q, r - n), 1e-9 * std::max(1.0, a[n]));
      }
      for (double t : {-0.7, 0.0, 0.3, 1.0}) {
        double exact = oracle::int_pow(t + q, r);
        EXPECT_NEAR(a.evaluate(t), exact, 1e-10 * std::max(1.0, std::abs(exact)));
      }
    }
  }
}

TEST(Kernel, GramExamples) {
  Matrix I = Matrix::Identity(2, 2);
  Matrix G = gram_matrix(I, {1, 2});
  EXPECT_DOUBLE_EQ(G(0, 0), 4);
  EXPECT_DOUBLE_EQ(G(0, 1), 1);
  EXPECT_DOUBLE_EQ(G(1, 0), 1);
  EXPECT_DOUBLE_EQ(G(1, 1), 4);

  Matrix x(1, 3);
  x << 0.5, -1.0, 2.0;
  Matrix g = gram_matrix(x, {3, 2});
  ASSERT_EQ(g.rows(), 1);
  EXPECT_DOUBLE_EQ(g(0, 0), std::pow(5.25 + 3, 2));
}

TEST(Kernel, GramMatchesDoubleLoop) {
  std::mt19937_64 gen(1);
  Matrix X = oracle::random_matrix(5, 3, gen);
  Matrix G = gram_matrix(X, {1, 3});
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      double ref = oracle::poly_kernel(X.row(i).data(), X.row(j).data(), 3, 1, 3);
      EXPECT_NEAR(G(i, j), ref, 1e-12 * std::max(1.0, std::abs(ref)));
    }
  EXPECT_TRUE(G.isApprox(G.transpose(), 0.0));
}

TEST(Kernel, GramErrors) {
  EXPECT_THROW(gram_matrix(Matrix(0, 3), {1, 2}), InvalidArgument);
  Matrix X = Matrix::Ones(2, 2);
  X(1, 1) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(gram_matrix(X, {1, 2}), InvalidArgument);
}
