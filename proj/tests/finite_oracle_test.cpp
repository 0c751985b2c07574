#include <random>

#include <gtest/gtest.h>

#include "sbab/error.hpp"
#include "sbab/finite_oracle.hpp"
#include "support.hpp"

namespace sbab {
namespace {

std::vector<BigInt> big(std::initializer_list<long> xs) { return {xs.begin(), xs.end()}; }

void expect_valid_smith(const IntMatrix& a, const SmithForm& s) {
  EXPECT_EQ(s.u * a * s.v, s.diagonal);
  EXPECT_TRUE(s.diagonal.is_diagonal());
  EXPECT_EQ(abs(s.u.determinant()), 1);
  EXPECT_EQ(abs(s.v.determinant()), 1);
  const std::size_t n = std::min(a.rows(), a.cols());
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const BigInt& d = s.diagonal(i, i);
    const BigInt& e = s.diagonal(i + 1, i + 1);
    EXPECT_GE(d, 0);
    if (d == 0) {
      EXPECT_EQ(e, 0);
    } else {
      EXPECT_EQ(e % d, 0);
    }
  }
}

TEST(SmithNormalForm, Examples) {
  auto diag = smith_normal_form(IntMatrix::diagonal(big({2, 3})));
  EXPECT_EQ(diag.invariant_factors, big({6}));
  auto m = IntMatrix::from_rows({big({4, 2}), big({0, 2})});
  auto s = smith_normal_form(m);
  EXPECT_EQ(s.invariant_factors, big({2, 4}));
  expect_valid_smith(m, s);
  EXPECT_TRUE(smith_normal_form(IntMatrix::identity(2)).invariant_factors.empty());
  auto zero = smith_normal_form(IntMatrix(2, 3));
  EXPECT_EQ(zero.free_rank, 2u);
}

TEST(SmithNormalForm, RandomMatrices) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> entry(-12, 12);
  std::uniform_int_distribution<int> dim(1, 5);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t r = dim(rng), c = dim(rng);
    IntMatrix a(r, c);
    for (std::size_t i = 0; i < r; ++i) {
      for (std::size_t j = 0; j < c; ++j) a(i, j) = entry(rng);
    }
    auto s = smith_normal_form(a);
    expect_valid_smith(a, s);
    if (r == c) {
      // Square: |det A| is the product of the diagonal.
      BigInt prod = 1;
      for (std::size_t i = 0; i < r; ++i) prod *= s.diagonal(i, i);
      EXPECT_EQ(abs(a.determinant()), prod);
      EXPECT_EQ(s.free_rank == 0, a.determinant() != 0);
    }
  }
}

TEST(SmithNormalForm, LargeEntries) {
  BigInt huge = BigInt(1) << 200;
  auto m = IntMatrix::from_rows({{huge, huge * 3}, {huge * 2, huge * 5}});
  auto s = smith_normal_form(m);
  expect_valid_smith(m, s);
  EXPECT_EQ(s.invariant_factors, (std::vector<BigInt>{huge, huge}));
}

TEST(FiniteAbelianGroup, Arithmetic) {
  FiniteAbelianGroup g({4, 6});
  EXPECT_EQ(g.order(), 24u);
  EXPECT_EQ(g.exponent(), 12u);
  auto x = g.encode({3, 5});
  EXPECT_EQ(g.coords(x), (std::vector<std::uint64_t>{3, 5}));
  EXPECT_EQ(g.coords(g.add(x, x)), (std::vector<std::uint64_t>{2, 4}));
  EXPECT_EQ(g.add(x, g.neg(x)), 0u);
  EXPECT_EQ(g.element_order(x), 12u);
  EXPECT_EQ(g.scale(12, x), 0u);
}

TEST(FiniteAbelianGroup, RefusesOversizedGroups) {
  EXPECT_THROW(FiniteAbelianGroup({256, 256, 2}), Error);
  EXPECT_NO_THROW(FiniteAbelianGroup({256, 256}));
  EXPECT_THROW(FiniteAbelianGroup({8, 8}, 32), Error);
  EXPECT_THROW(FiniteAbelianGroup({1}), Error);
}

TEST(Subgroups, KnownCounts) {
  EXPECT_EQ(enumerate_subgroups(FiniteAbelianGroup({8})).size(), 4u);
  EXPECT_EQ(enumerate_subgroups(FiniteAbelianGroup({2, 2, 2})).size(), 16u);
  EXPECT_EQ(enumerate_subgroups(FiniteAbelianGroup({2, 4})).size(), 8u);
  EXPECT_EQ(enumerate_subgroups(FiniteAbelianGroup({12})).size(), 6u);
  EXPECT_EQ(enumerate_subgroups(FiniteAbelianGroup({3, 3})).size(), 6u);
}

TEST(Subgroups, TypeMatchesClosureSize) {
  for (const auto& divisors : testing::groups_up_to(64)) {
    if (divisors.empty()) continue;
    FiniteAbelianGroup g(divisors);
    for (const auto& h : enumerate_subgroups(g)) {
      auto t = subgroup_type(g, h);
      EXPECT_EQ(t.order(), static_cast<std::uint64_t>(std::count(h.begin(), h.end(), true)));
    }
  }
}

TEST(Purity, Examples) {
  FiniteAbelianGroup z4({4});
  EXPECT_FALSE(is_pure_subgroup_bruteforce(z4, std::vector<FiniteAbelianGroup::Element>{2}));
  FiniteAbelianGroup g({2, 4});
  EXPECT_TRUE(is_pure_subgroup_bruteforce(g, std::vector<FiniteAbelianGroup::Element>{g.encode({1, 0})}));
  // <(1,2)> is a summand with complement <(0,1)>.
  EXPECT_TRUE(is_pure_subgroup_bruteforce(g, std::vector<FiniteAbelianGroup::Element>{g.encode({1, 2})}));
  // <(0,2)> has height 1 in G.
  EXPECT_FALSE(is_pure_subgroup_bruteforce(g, std::vector<FiniteAbelianGroup::Element>{g.encode({0, 2})}));
}

TEST(Purity, TrivialAndWholeGroup) {
  for (const auto& divisors : testing::groups_up_to(96)) {
    if (divisors.empty()) continue;
    FiniteAbelianGroup g(divisors);
    EXPECT_TRUE(is_pure_subgroup_bruteforce(g, std::vector<FiniteAbelianGroup::Element>{}));
    EXPECT_TRUE(is_pure_subgroup_bruteforce(g, ElementSet(g.order(), true)));
  }
}

TEST(Ulm, Examples) {
  FiniteAbelianGroup g({2, 8});
  EXPECT_EQ(ulm_bruteforce(g, 2, 0), 1u);
  EXPECT_EQ(ulm_bruteforce(g, 2, 2), 1u);
  EXPECT_EQ(ulm_bruteforce(g, 2, 1), 0u);
  FiniteAbelianGroup z8({8});
  EXPECT_EQ(ulm_bruteforce(z8, 2, 2), 1u);
  EXPECT_EQ(ulm_bruteforce(z8, 2, 3), 0u);
  FiniteAbelianGroup trivial({});
  EXPECT_EQ(ulm_bruteforce(trivial, 3, 0), 0u);
  EXPECT_THROW(ulm_bruteforce(FiniteAbelianGroup({6}), 2, 0), Error);
}

TEST(Ulm, CountsCyclicFactorsOfNextExponent) {
  for (std::uint64_t p : {2, 3, 5}) {
    for (unsigned n = 0; checked_pow(p, n) <= 256; ++n) {
      for (const auto& divisors : testing::p_groups(p, n)) {
        FiniteAbelianGroup g(divisors);
        for (unsigned i = 0; i <= n + 1; ++i) {
          const auto target = checked_pow(p, i + 1);
          const auto expect = static_cast<std::uint64_t>(std::count(divisors.begin(), divisors.end(), target));
          EXPECT_EQ(ulm_bruteforce(g, p, i), expect);
        }
      }
    }
  }
}

TEST(Iso, Examples) {
  EXPECT_FALSE(iso_finite_bruteforce(FiniteAbelianGroup({4}), FiniteAbelianGroup({2, 2})));
  EXPECT_TRUE(iso_finite_bruteforce(FiniteAbelianGroup({6}), FiniteAbelianGroup({2, 3})));
  EXPECT_TRUE(iso_finite_bruteforce(FiniteAbelianGroup({12, 18}), FiniteAbelianGroup({12, 18})));
  EXPECT_EQ(invariant_factors(FiniteAbelianGroup({12, 18})), big({6, 36}));
}

TEST(Iso, AgreesWithNormalForms) {
  std::vector<std::vector<std::uint64_t>> presentations;
  // Non-prime-power factors, so realization is not the identity map.
  for (std::uint64_t a = 2; a <= 12; ++a) {
    presentations.push_back({a});
    for (std::uint64_t b = a; b <= 12; ++b) presentations.push_back({a, b});
  }
  for (const auto& x : presentations) {
    for (const auto& y : presentations) {
      FiniteAbelianGroup gx(x), gy(y);
      auto nx = testing::spec_from_divisors(x), ny = testing::spec_from_divisors(y);
      EXPECT_EQ(iso_finite_bruteforce(gx, gy), nx == ny);
    }
  }
}

}  // namespace
}  // namespace sbab
