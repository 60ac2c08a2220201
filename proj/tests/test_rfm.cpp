#include <gtest/gtest.h>

#include <cmath>

#include "craftmaps/error.hpp"
#include "craftmaps/rfm.hpp"
#include "oracles.hpp"

using namespace craftmaps;

TEST(DegreeSampler, TruncatedFrequencies) {
  DegreeSampler s(2.0, 2, DegreeSampling::kTruncated);
  EXPECT_NEAR(s.probs()[0], 4.0 / 7, 1e-15);
  EXPECT_NEAR(s.probs()[1], 2.0 / 7, 1e-15);
  EXPECT_NEAR(s.probs()[2], 1.0 / 7, 1e-15);
  Rng rng(1);
  std::vector<int> counts(3, 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) counts[s.sample(rng)]++;
  EXPECT_NEAR(counts[0] / double(n), 4.0 / 7, 0.01);
  EXPECT_NEAR(counts[1] / double(n), 2.0 / 7, 0.01);
  EXPECT_NEAR(counts[2] / double(n), 1.0 / 7, 0.01);
}

TEST(DegreeSampler, DegreeZeroOnly) {
  DegreeSampler s(2.0, 0, DegreeSampling::kTruncated);
  Rng rng(2);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(s.sample(rng), 0);
}

TEST(DegreeSampler, UntruncatedMeanIsOne) {
  DegreeSampler s(2.0, 3, DegreeSampling::kUntruncated);
  Rng rng(3);
  const int n = 100000;
  double sum = 0;
  int beyond = 0;
  for (int i = 0; i < n; ++i) {
    int v = s.sample(rng);
    sum += v;
    beyond += v > 3;
  }
  EXPECT_NEAR(sum / n, 1.0, 0.02);
  EXPECT_GT(beyond, 0);
  EXPECT_DOUBLE_EQ(s.probability(5), 1.0 / 64);
}

TEST(DegreeSampler, Validation) {
  EXPECT_THROW(DegreeSampler(1.0, 2, DegreeSampling::kTruncated), InvalidArgument);
  EXPECT_THROW(DegreeSampler(NAN, 2, DegreeSampling::kTruncated), InvalidArgument);
  EXPECT_THROW(DegreeSampler(3.0, 2, DegreeSampling::kUntruncated), InvalidArgument);
  EXPECT_NO_THROW(DegreeSampler(3.0, 2, DegreeSampling::kTruncated));
}

TEST(Rfm, ScalesFollowFormula) {
  auto model = build_rfm(3, 400, {1, 2}, 5);
  DegreeSampler s(2.0, 2, DegreeSampling::kTruncated);
  auto a = maclaurin_coeffs({1, 2});
  bool saw_zero = false;
  for (std::size_t i = 0; i < model.output_dim(); ++i) {
    int n = model.degrees()[i];
    EXPECT_NEAR(model.scales()[i], std::sqrt(a[n] / s.probs()[n]), 1e-15);
    if (n == 0) {
      saw_zero = true;
      EXPECT_NEAR(model.scales()[i], std::sqrt(7.0) / 2.0, 1e-15);
    }
  }
  EXPECT_TRUE(saw_zero);
}

TEST(Rfm, HomogeneousKernelZeroScales) {
  auto model = build_rfm(4, 300, {0, 3}, 6);
  for (std::size_t i = 0; i < model.output_dim(); ++i) {
    if (model.degrees()[i] < 3) EXPECT_EQ(model.scales()[i], 0.0);
    else EXPECT_GT(model.scales()[i], 0.0);
  }
}

TEST(Rfm, Determinism) {
  auto a = build_rfm(8, 64, {1, 3}, 77);
  auto b = build_rfm(8, 64, {1, 3}, 77);
  EXPECT_EQ(a.degrees(), b.degrees());
  EXPECT_EQ(a.weight_rows(), b.weight_rows());
  auto c = build_rfm(8, 64, {1, 3}, 78);
  EXPECT_NE(a.weight_rows(), c.weight_rows());
}

TEST(Rfm, MatchesDenseProductOracle) {
  const std::size_t d = 7, D = 50;
  auto model = build_rfm(d, D, {2, 4}, 9);
  std::mt19937_64 gen(10);
  auto x = oracle::random_vector(d, gen);
  auto z = apply_rfm(model, x);
  ASSERT_EQ(z.size(), D);
  for (std::size_t i = 0; i < D; ++i) {
    double prod = 1.0;
    for (int f = 0; f < model.degrees()[i]; ++f) {
      double dot = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        int w = model.weight(i, f, k);
        ASSERT_TRUE(w == 1 || w == -1);
        dot += w * x[k];
      }
      prod *= dot;
    }
    double ref = model.scales()[i] * prod / std::sqrt(double(D));
    EXPECT_NEAR(z[i], ref, 1e-12 * std::max(1.0, std::abs(ref)));
  }
}

TEST(Rfm, ZeroInputKeepsOnlyConstantFeatures) {
  auto model = build_rfm(5, 100, {1, 3}, 12);
  std::vector<double> x(5, 0.0);
  auto z = apply_rfm(model, x);
  for (std::size_t i = 0; i < z.size(); ++i) {
    double expect = model.degrees()[i] == 0 ? model.scales()[i] / 10.0 : 0.0;
    EXPECT_DOUBLE_EQ(z[i], expect);
  }
}

TEST(Rfm, MaterializedAndRegeneratedAgreeBitwise) {
  std::mt19937_64 gen(13);
  Matrix X = oracle::random_matrix(300, 9, gen);
  RfmOptions lazy;
  lazy.materialize = false;
  auto a = build_rfm(9, 120, {1, 5}, 14);
  auto b = build_rfm(9, 120, {1, 5}, 14, lazy);
  EXPECT_TRUE(a.materialized());
  EXPECT_FALSE(b.materialized());
  EXPECT_EQ(apply_rfm_batch(a, X), apply_rfm_batch(b, X));
  a.release();
  EXPECT_FALSE(a.materialized());
  EXPECT_EQ(apply_rfm_batch(a, X), apply_rfm_batch(b, X));
}

TEST(Rfm, BatchMatchesSingleRowsAndThreads) {
  std::mt19937_64 gen(15);
  Matrix X = oracle::random_matrix(100, 6, gen);
  auto model = build_rfm(6, 80, {1, 4}, 16);
  Matrix Z = apply_rfm_batch(model, X);
  Matrix Z4 = apply_rfm_batch(model, X, 4);
  EXPECT_LE((Z - Z4).cwiseAbs().maxCoeff(), 1e-12);
  for (int i = 0; i < 100; ++i) {
    std::vector<double> row(X.row(i).data(), X.row(i).data() + 6);
    auto z = apply_rfm(model, row);
    for (int j = 0; j < 80; ++j) EXPECT_NEAR(Z(i, j), z[j], 1e-12 * std::max(1.0, std::abs(z[j])));
  }
}

TEST(Rfm, DimensionErrors) {
  auto model = build_rfm(3, 10, {1, 2}, 1);
  std::vector<double> x(4, 1.0);
  EXPECT_THROW(apply_rfm(model, x), DimensionMismatch);
  EXPECT_THROW(build_rfm(0, 10, {1, 2}, 1), InvalidArgument);
  EXPECT_THROW(build_rfm(3, 0, {1, 2}, 1), InvalidArgument);
}

namespace {

template <typename Build, typename Apply>
int count_unbiased_pairs(Build build, Apply apply, int models, int pairs) {
  std::mt19937_64 gen(2024);
  int within = 0;
  for (int p = 0; p < pairs; ++p) {
    auto x = oracle::random_unit(16, gen);
    auto y = oracle::random_unit(16, gen);
    std::vector<double> est;
    for (int m = 0; m < models; ++m) {
      auto model = build(derive_seed(p, "unbiased", m));
      est.push_back(oracle::dot(apply(model, x), apply(model, y)));
    }
    auto [mean, se] = oracle::mean_se(est);
    double exact = oracle::poly_kernel(x.data(), y.data(), 16, 1, 3);
    within += std::abs(mean - exact) <= 3 * se;
  }
  return within;
}

}  // namespace

TEST(Rfm, UnbiasedMonteCarlo) {
  int ok = count_unbiased_pairs([](std::uint64_t s) { return build_rfm(16, 512, {1, 3}, s); },
                                [](const RfmModel& m, const std::vector<double>& v) {
                                  return apply_rfm(m, v);
                                },
                                500, 5);
  EXPECT_GE(ok, 4);
}

TEST(SrhtRfm, BlockCount) {
  std::vector<int> degrees{2, 1, 3, 0};
  std::vector<std::int8_t> signs(8, 1);
  std::vector<std::uint32_t> perm(8);
  for (std::uint32_t i = 0; i < 8; ++i) perm[i] = i;
  auto m = SrhtRfmModel::from_parts(4, {1, 3}, {}, degrees, signs, perm, 0);
  EXPECT_EQ(m.num_blocks(), 2u);
  EXPECT_EQ(m.total_rows(), 6u);
}

TEST(SrhtRfm, DegenerateAllZeroDegrees) {
  auto m = SrhtRfmModel::from_parts(4, {1, 3}, {}, {0, 0, 0}, {}, {}, 0);
  EXPECT_EQ(m.num_blocks(), 0u);
  std::vector<double> x{1, 2, 3, 4};
  auto z = apply_srht_rfm(m, x);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(z[i], m.scales()[i] / std::sqrt(3.0));
}

TEST(SrhtRfm, HandComputedSingleFeature) {
  auto m = SrhtRfmModel::from_parts(4, {1, 3}, {}, {1}, {1, 1, 1, 1}, {0, 1, 2, 3}, 0);
  std::vector<double> e1{1, 0, 0, 0};
  auto z = apply_srht_rfm(m, e1);
  ASSERT_EQ(z.size(), 1u);
  EXPECT_DOUBLE_EQ(z[0], m.scales()[0]);
}

TEST(SrhtRfm, PartsValidation) {
  EXPECT_THROW(SrhtRfmModel::from_parts(4, {1, 3}, {}, {1}, {1, 1, 1}, {0, 1, 2, 3}, 0),
               DimensionMismatch);
  EXPECT_THROW(SrhtRfmModel::from_parts(4, {1, 3}, {}, {1}, {1, 1, 1, 1}, {0, 1, 1, 3}, 0),
               InvalidArgument);
  EXPECT_THROW(SrhtRfmModel::from_parts(4, {1, 3}, {}, {1}, {1, 1, 0, 1}, {0, 1, 2, 3}, 0),
               InvalidArgument);
}

TEST(SrhtRfm, MatchesDenseRowOracle) {
  const std::size_t d = 5, D = 40;
  auto m = build_srht_rfm(d, D, {1, 4}, 31);
  EXPECT_EQ(m.padded_dim(), 8u);
  std::mt19937_64 gen(32);
  auto x = oracle::random_vector(d, gen);
  auto z = apply_srht_rfm(m, x);
  const std::size_t pad = m.padded_dim();
  std::size_t row = 0;
  for (std::size_t i = 0; i < D; ++i) {
    double prod = 1.0;
    for (int f = 0; f < m.degrees()[i]; ++f, ++row) {
      std::size_t slot = m.permutation()[row];
      std::size_t block = slot / pad, r = slot % pad;
      double dot = 0.0;
      for (std::size_t k = 0; k < d; ++k)
        dot += oracle::hadamard_entry(r, k) * m.block_signs()[block * pad + k] * x[k];
      prod *= dot;
    }
    double ref = m.scales()[i] * prod / std::sqrt(double(D));
    EXPECT_NEAR(z[i], ref, 1e-11 * std::max(1.0, std::abs(ref)));
  }
}

TEST(SrhtRfm, ZeroInputMatchesDenseMap) {
  auto dense = build_rfm(6, 64, {1, 3}, 40);
  auto srht = build_srht_rfm(6, 64, {1, 3}, 40);
  EXPECT_EQ(dense.degrees(), srht.degrees());
  std::vector<double> x(6, 0.0);
  EXPECT_EQ(apply_rfm(dense, x), apply_srht_rfm(srht, x));
}

TEST(SrhtRfm, Determinism) {
  auto a = build_srht_rfm(10, 100, {1, 3}, 41);
  auto b = build_srht_rfm(10, 100, {1, 3}, 41);
  EXPECT_EQ(a.block_signs(), b.block_signs());
  EXPECT_EQ(a.permutation(), b.permutation());
}

TEST(SrhtRfm, UnbiasedMonteCarlo) {
  int ok = count_unbiased_pairs([](std::uint64_t s) { return build_srht_rfm(16, 512, {1, 3}, s); },
                                [](const SrhtRfmModel& m, const std::vector<double>& v) {
                                  return apply_srht_rfm(m, v);
                                },
                                500, 5);
  EXPECT_GE(ok, 4);
}
