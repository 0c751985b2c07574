#include <gtest/gtest.h>

#include <random>
#include <thread>

#include "sbab/error.hpp"
#include "sbab/padic.hpp"

namespace sbab {
namespace {

template <typename F>
std::string error_code(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return "";
}

TEST(PAdicApprox, Examples) {
  EXPECT_EQ(PAdicApprox(5, 3, 2).inverse().residue(), 63);
  EXPECT_EQ(PAdicApprox(5, 3, 50).valuation(), (Valuation{2, true}));
  EXPECT_EQ((PAdicApprox(5, 3, 124) + PAdicApprox(5, 3, 1)).residue(), 0);
  EXPECT_EQ(PAdicApprox(5, 3, 0).valuation().to_string(), ">=3");
  EXPECT_EQ(PAdicApprox(5, 3, -1).residue(), 124);
  EXPECT_EQ(error_code([] { PAdicApprox(5, 3, 10).inverse(); }), "NonUnit");
  EXPECT_EQ(error_code([] { PAdicApprox(5, 3, 1) + PAdicApprox(5, 4, 1); }), "PrecisionMismatch");
  EXPECT_EQ(error_code([] { PAdicApprox(5, 3, 1) * PAdicApprox(7, 3, 1); }), "PrecisionMismatch");
}

TEST(PAdicApprox, InverseMatchesLinearSearch) {
  for (std::uint64_t p : {2, 3, 5, 7}) {
    for (unsigned n = 1; n <= 3; ++n) {
      const std::uint64_t m = checked_pow(p, n);
      for (std::uint64_t a = 0; a < m; ++a) {
        if (a % p == 0) continue;
        std::uint64_t want = 0;
        while (a * want % m != 1) ++want;
        EXPECT_EQ(PAdicApprox(p, n, a).inverse().residue(), want) << p << " " << n << " " << a;
      }
    }
  }
}

TEST(PAdicApprox, RingLawsAndValuation) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    const std::uint64_t p = std::array<std::uint64_t, 4>{2, 3, 5, 7}[rng() % 4];
    const unsigned n = 1 + rng() % 20;
    auto draw = [&] { return PAdicApprox(p, n, BigInt(rng()) * rng()); };
    auto a = draw(), b = draw(), c = draw();
    EXPECT_EQ((a + b) * c, a * c + b * c);
    EXPECT_EQ(a + (-a), PAdicApprox(p, n, 0));
    EXPECT_EQ((a - b) + b, a);
    if (a.is_unit()) EXPECT_EQ(a * a.inverse(), PAdicApprox(p, n, 1));
    const auto v = a.valuation();
    if (a.residue() == 0) {
      EXPECT_FALSE(v.exact);
      EXPECT_EQ(v.value, n);
    } else {
      BigInt r = a.residue();
      unsigned want = 0;
      while (r % p == 0) r /= p, ++want;
      EXPECT_EQ(v, (Valuation{want, true}));
      EXPECT_LT(want, n);
    }
  }
}

TEST(PAdicApprox, FromRational) {
  // 1/3 at p = 5: 3 * 42 = 126 = 1 mod 125
  EXPECT_EQ(PAdicApprox::from_rational(5, 3, BigRational(1, 3)).residue(), 42);
  EXPECT_EQ(PAdicApprox::from_rational(5, 3, BigRational(-1)).residue(), 124);
  EXPECT_EQ(error_code([] { PAdicApprox::from_rational(5, 3, BigRational(1, 10)); }), "NotInLocalization");
}

TEST(PAdicApprox, CompletionPreservesDivisibility) {
  std::mt19937_64 rng(11);
  for (std::uint64_t p : {2, 3, 5}) {
    const unsigned n = 40;
    for (int trial = 0; trial < 1000; ++trial) {
      BigInt num = BigInt(rng() % 1000000 + 1) * boost::multiprecision::pow(BigInt(p), rng() % 12);
      if (rng() % 2) num = -num;
      BigInt den = rng() % 10000 + 1;
      while (den % p == 0) den /= p;
      const BigRational x(num, den);
      // p^k | x in Z_(p) iff p^k divides the reduced numerator.
      const unsigned v_exact = valuation(numerator(x), p);
      const auto v = PAdicApprox::from_rational(p, n, x).valuation();
      for (unsigned k = 0; k <= n; ++k) EXPECT_EQ(v_exact >= k, v.value >= k);
    }
  }
}

TEST(PAdicLazy, TruncationCoherence) {
  for (std::uint64_t p : {2, 3, 5, 101}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      auto g = PAdicLazy::seeded_unit(p, seed);
      auto h = PAdicLazy::seeded_unit(p, seed + 100);
      const PAdicLazy xs[] = {g, h, g + h, g * h, -g, g * g + PAdicLazy::integer(p, 7),
                              PAdicLazy::rational(p, BigRational(2, p == 2 ? 3 : 2 * p + 1)) * h};
      for (const auto& x : xs) {
        const BigInt big = x.truncate(30);
        for (unsigned n = 1; n <= 30; ++n) EXPECT_EQ(big % power(p, n), x.truncate(n)) << x.describe();
      }
      EXPECT_NE(g.digit(0), 0u);
    }
  }
}

TEST(PAdicLazy, ArithmeticMatchesApprox) {
  auto g = PAdicLazy::seeded_unit(7, 1), h = PAdicLazy::seeded_unit(7, 2);
  EXPECT_EQ((g * h).approx(25), g.approx(25) * h.approx(25));
  EXPECT_EQ((g + h).approx(25), g.approx(25) + h.approx(25));
  EXPECT_EQ((-g).approx(25), -g.approx(25));
  EXPECT_EQ(PAdicLazy::integer(7, -1).approx(4).residue(), 2400);
  // Fresh copies with the same seed agree digit for digit.
  auto g2 = PAdicLazy::seeded_unit(7, 1);
  EXPECT_EQ(g2.truncate(40), g.truncate(40));
  EXPECT_NE(g.truncate(40), h.truncate(40));
  EXPECT_EQ(g.describe(), "seeded(7,1)");
  EXPECT_EQ((g * h).describe(), "(seeded(7,1)*seeded(7,2))");
}

TEST(PAdicLazy, ConcurrentReadersSeeOnePrefix) {
  auto g = PAdicLazy::seeded_unit(5, 42);
  const BigInt reference = PAdicLazy::seeded_unit(5, 42).truncate(200);
  std::vector<std::thread> threads;
  std::vector<int> ok(8, 1);
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&, t] {
      for (unsigned n = 1 + t; n <= 200; n += 7) ok[t] &= g.truncate(n) == reference % power(5, n);
    });
  }
  for (auto& th : threads) th.join();
  for (int v : ok) EXPECT_TRUE(v);
}

MatrixModPk scalar(std::uint64_t p, unsigned n, std::uint64_t v) {
  MatrixModPk m(p, n, 1);
  m.set(0, 0, v);
  return m;
}

TEST(MatrixLimitInverse, Examples) {
  auto b = matrix_limit_inverse({scalar(5, 1, 2), scalar(5, 2, 2)});
  ASSERT_EQ(b.size(), 2u);
  EXPECT_EQ(b[0].at(0, 0), 3);
  EXPECT_EQ(b[1].at(0, 0), 13);

  std::vector<MatrixModPk> ids;
  for (unsigned n = 1; n <= 5; ++n) ids.push_back(MatrixModPk::identity(3, n, 3));
  auto inv = matrix_limit_inverse(ids);
  for (unsigned n = 1; n <= 5; ++n) EXPECT_EQ(inv[n - 1], ids[n - 1]);

  EXPECT_EQ(error_code([] { matrix_limit_inverse({scalar(5, 1, 5)}); }), "SingularModP");
  EXPECT_EQ(error_code([] { matrix_limit_inverse({scalar(5, 1, 2), scalar(5, 2, 3)}); }), "IncompatibleSequence");
}

TEST(MatrixLimitInverse, RandomCompatibleSequences) {
  std::mt19937_64 rng(5);
  int tested = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::uint64_t p = std::array<std::uint64_t, 3>{2, 3, 5}[rng() % 3];
    const std::size_t k = 1 + rng() % 4;
    const unsigned top = 1 + rng() % 12;
    MatrixModPk a(p, top, k);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) a.set(i, j, BigInt(rng()) * rng());
    std::vector<MatrixModPk> seq;
    for (unsigned n = 1; n <= top; ++n) seq.push_back(a.reduce(n));
    if (a.determinant() % p == 0) {
      EXPECT_EQ(error_code([&] { matrix_limit_inverse(seq); }), "SingularModP");
      continue;
    }
    ++tested;
    auto b = matrix_limit_inverse(seq);
    for (unsigned n = 1; n <= top; ++n) {
      const auto id = MatrixModPk::identity(p, n, k);
      EXPECT_EQ(seq[n - 1] * b[n - 1], id);
      EXPECT_EQ(b[n - 1] * seq[n - 1], id);
      if (n > 1) EXPECT_EQ(b[n - 1].reduce(n - 1), b[n - 2]);
    }
  }
  EXPECT_GT(tested, 50);
}

TEST(MatrixModPk, DeterminantExample) {
  MatrixModPk m(7, 2, 2);
  m.set(0, 0, 1);
  m.set(0, 1, 2);
  m.set(1, 0, 3);
  m.set(1, 1, 4);
  EXPECT_EQ(m.determinant(), 47);  // -2 mod 49
}

TEST(IntPolynomial2, Basics) {
  IntPolynomial2 q({{{1, 0}, 1}, {{0, 1}, -1}, {{2, 2}, 0}});
  EXPECT_EQ(q.to_string(), "x - y");
  EXPECT_EQ(q.degree(), 1u);
  EXPECT_EQ(q.height(), 1);
  IntPolynomial2 r({{{0, 0}, -3}, {{2, 1}, 2}, {{0, 1}, 1}});
  EXPECT_EQ(r.to_string(), "-3 + y + 2*x^2*y");
  EXPECT_EQ(r.degree(), 2u);
  EXPECT_EQ(r.height(), 3);
  // 2*4*3 + 3 - 3 = 24
  EXPECT_EQ(r.evaluate(PAdicApprox(5, 3, 2), PAdicApprox(5, 3, 3)).residue(), 24);
  EXPECT_EQ(IntPolynomial2().to_string(), "0");
}

TEST(IndependenceCertificate, Examples) {
  auto g = PAdicLazy::seeded_unit(5, 7);
  for (unsigned d = 1; d <= 2; ++d) {
    for (unsigned b = 1; b <= 2; ++b) {
      auto c = independence_certificate(g, g, d, b, 20);
      EXPECT_FALSE(c.pass);
      ASSERT_TRUE(c.violation);
      EXPECT_EQ(c.violation->to_string(), "x - y");
    }
  }
  auto sq = independence_certificate(g, g * g, 2, 1, 20);
  EXPECT_FALSE(sq.pass);
  EXPECT_EQ(sq.violation->to_string(), "y - x^2");
  EXPECT_TRUE(independence_certificate(g, g * g, 1, 2, 20).pass);

  auto generic = independence_certificate(PAdicLazy::seeded_unit(5, 1), PAdicLazy::seeded_unit(5, 2), 1, 1, 10);
  EXPECT_TRUE(generic.pass);
  EXPECT_EQ(generic.candidates, 80u);
  auto j = generic.to_json();
  EXPECT_EQ(j["verdict"], "pass");
  EXPECT_EQ(j["g1"], "seeded(5,1)");
  EXPECT_TRUE(j["violation"].is_null());

  EXPECT_EQ(error_code([&] { independence_certificate(g, g, 4, 10, 10, 1000); }), "BudgetExceeded");
  EXPECT_EQ(error_code([&] { independence_certificate(g, PAdicLazy::integer(5, 5), 1, 1, 10); }), "NotAUnit");
}

// Exhaustive oracle by direct evaluation of every candidate polynomial.
bool brute_pass(const PAdicLazy& g1, const PAdicLazy& g2, unsigned d, int b, unsigned n) {
  const auto x = g1.approx(n), y = g2.approx(n);
  const unsigned m = (d + 1) * (d + 1);
  std::vector<int> c(m, -b);
  while (true) {
    std::map<std::pair<unsigned, unsigned>, BigInt> coeffs;
    for (unsigned t = 0; t < m; ++t) coeffs[{t / (d + 1), t % (d + 1)}] = c[t];
    IntPolynomial2 q(coeffs);
    if (!q.is_zero() && q.evaluate(x, y).residue() == 0) return false;
    unsigned t = 0;
    while (t < m && c[t] == b) c[t++] = -b;
    if (t == m) return true;
    ++c[t];
  }
}

TEST(IndependenceCertificate, MatchesDirectEvaluationAtLowPrecision) {
  int fails = 0, passes = 0;
  for (std::uint64_t p : {3, 5, 7}) {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
      auto g1 = PAdicLazy::seeded_unit(p, seed), g2 = PAdicLazy::seeded_unit(p, seed + 50);
      for (unsigned n = 1; n <= 4; ++n) {
        auto c = independence_certificate(g1, g2, 1, 1, n);
        EXPECT_EQ(c.pass, brute_pass(g1, g2, 1, 1, n)) << p << " " << seed << " " << n;
        if (!c.pass) {
          EXPECT_EQ(c.violation->evaluate(g1.approx(n), g2.approx(n)).residue(), 0);
          EXPECT_LE(c.violation->height(), 1);
          ++fails;
        } else {
          ++passes;
        }
      }
    }
  }
  EXPECT_GT(fails, 0);
  EXPECT_GT(passes, 0);
}

TEST(IndependenceCertificate, Monotone) {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    auto g1 = PAdicLazy::seeded_unit(3, seed), g2 = PAdicLazy::seeded_unit(3, seed + 9);
    for (unsigned n = 2; n <= 6; n += 2) {
      bool pass_big = independence_certificate(g1, g2, 2, 1, n).pass;
      if (!pass_big) continue;
      for (unsigned d = 0; d <= 2; ++d)
        for (unsigned b = 0; b <= 1; ++b) EXPECT_TRUE(independence_certificate(g1, g2, d, b, n).pass);
    }
  }
}

TEST(IndependenceCertificate, MonotoneInHeightAtDegreeOne) {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    auto g1 = PAdicLazy::seeded_unit(3, seed), g2 = PAdicLazy::seeded_unit(3, seed + 9);
    for (unsigned n = 2; n <= 6; n += 2) {
      bool prev = true;
      for (unsigned b = 0; b <= 3; ++b) {
        const bool pass = independence_certificate(g1, g2, 1, b, n).pass;
        EXPECT_TRUE(prev || !pass);
        prev = pass;
      }
    }
  }
}

TEST(IndependenceCertificate, LargeModulusPath) {
  // p^N beyond 128 bits takes the arbitrary-precision path.
  auto g = PAdicLazy::seeded_unit(101, 3);
  EXPECT_EQ(independence_certificate(g, g, 1, 1, 30).violation->to_string(), "x - y");
  EXPECT_TRUE(independence_certificate(g, PAdicLazy::seeded_unit(101, 4), 1, 1, 30).pass);
}

}  // namespace
}  // namespace sbab
