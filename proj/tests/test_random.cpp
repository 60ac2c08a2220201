#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "craftmaps/error.hpp"
#include "craftmaps/random.hpp"

using namespace craftmaps;

TEST(Random, SplitmixReferenceOutput) {
  // First output of the reference splitmix64 generator seeded with 0.
  EXPECT_EQ(splitmix64(0), 0xe220a8397b1dcdafULL);
}

TEST(Random, Fnv1aReferenceValues) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
}

TEST(Random, DeriveSeedSeparatesTagsAndIndices) {
  std::set<std::uint64_t> seen{derive_seed(1, "a"), derive_seed(1, "b"), derive_seed(2, "a"),
                               derive_seed(1, "a", 1), derive_seed(1, "a", 2)};
  EXPECT_EQ(seen.size(), 5u);
  EXPECT_EQ(derive_seed(7, "map", 3), derive_seed(7, "map", 3));
}

TEST(Random, RngIsDeterministic) {
  Rng a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    auto x = a.next_u64();
    EXPECT_EQ(x, b.next_u64());
    differs |= x != c.next_u64();
  }
  EXPECT_TRUE(differs);
}

TEST(Random, UniformBelowStaysInRangeAndCoversIt) {
  Rng rng(5);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 70000; ++i) {
    auto v = rng.uniform_below(7);
    ASSERT_LT(v, 7u);
    counts[v]++;
  }
  for (int c : counts) EXPECT_NEAR(c, 10000, 500);
}

TEST(Random, UniformAndNormalMoments) {
  Rng rng(9);
  const int n = 200000;
  double su = 0, sn = 0, sn2 = 0;
  for (int i = 0; i < n; ++i) {
    double u = rng.uniform01();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    su += u;
    double z = rng.normal();
    sn += z;
    sn2 += z * z;
  }
  EXPECT_NEAR(su / n, 0.5, 0.005);
  EXPECT_NEAR(sn / n, 0.0, 0.01);
  EXPECT_NEAR(sn2 / n, 1.0, 0.02);
}

TEST(Random, RademacherBalanced) {
  Rng rng(3);
  int sum = 0;
  for (int i = 0; i < 100000; ++i) {
    int s = rng.rademacher();
    ASSERT_TRUE(s == 1 || s == -1);
    sum += s;
  }
  EXPECT_LT(std::abs(sum), 1500);
}

TEST(Random, SampleWithoutReplacement) {
  Rng rng(11);
  auto s = sample_without_replacement(100, 100, rng);
  std::sort(s.begin(), s.end());
  for (std::uint32_t i = 0; i < 100; ++i) EXPECT_EQ(s[i], i);
  auto t = sample_without_replacement(1000, 10, rng);
  EXPECT_EQ(std::set<std::uint32_t>(t.begin(), t.end()).size(), 10u);
  for (auto v : t) EXPECT_LT(v, 1000u);
  EXPECT_THROW(sample_without_replacement(5, 6, rng), InvalidArgument);
}

TEST(Random, ShuffleIsPermutation) {
  Rng rng(13);
  std::vector<int> v(50);
  for (int i = 0; i < 50; ++i) v[i] = i;
  rng.shuffle(v);
  auto sorted = v;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 50; ++i) EXPECT_EQ(sorted[i], i);
  EXPECT_FALSE(std::is_sorted(v.begin(), v.end()));
}

TEST(Random, BitsToUnitRange) {
  EXPECT_EQ(bits_to_unit(0), 0.0);
  EXPECT_LT(bits_to_unit(~0ULL), 1.0);
  EXPECT_TRUE(std::isfinite(box_muller(0.0, 0.25)));
}
