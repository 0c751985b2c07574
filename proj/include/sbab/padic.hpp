#pragma once

// Truncated and lazily expanded p-adic integers, matrices over Z/p^N, and
// bounded algebraic-independence certificates.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "sbab/group_spec.hpp"
#include "sbab/number_theory.hpp"

namespace sbab {

using BigRational = boost::multiprecision::cpp_rational;

BigInt power(std::uint64_t p, unsigned n);

/// v_p of a nonzero integer.
unsigned valuation(const BigInt& n, std::uint64_t p);

/// Exact valuation, or a lower bound when the residue vanishes at the working precision.
struct Valuation {
  unsigned value = 0;
  bool exact = true;

  std::string to_string() const;  // "3" or ">=40"
  friend bool operator==(const Valuation&, const Valuation&) = default;
};

class PAdicApprox {
 public:
  /// residue is reduced into [0, p^N).
  PAdicApprox(std::uint64_t p, unsigned precision, const BigInt& residue);

  /// Image of a rational whose denominator is prime to p. Throws "NotInLocalization".
  static PAdicApprox from_rational(std::uint64_t p, unsigned precision, const BigRational& x);

  std::uint64_t p() const noexcept { return p_; }
  unsigned precision() const noexcept { return n_; }
  const BigInt& residue() const noexcept { return residue_; }
  BigInt modulus() const { return power(p_, n_); }

  bool is_unit() const { return residue_ % p_ != 0; }
  Valuation valuation() const;
  /// Throws "NonUnit".
  PAdicApprox inverse() const;
  PAdicApprox truncate(unsigned m) const;

  friend PAdicApprox operator+(const PAdicApprox& a, const PAdicApprox& b);
  friend PAdicApprox operator-(const PAdicApprox& a, const PAdicApprox& b);
  friend PAdicApprox operator*(const PAdicApprox& a, const PAdicApprox& b);
  PAdicApprox operator-() const;
  friend bool operator==(const PAdicApprox&, const PAdicApprox&) = default;

 private:
  std::uint64_t p_;
  unsigned n_;
  BigInt residue_;
};

/// A p-adic integer given by a digit generator. Copies share one digit cache;
/// the cache is guarded so concurrent readers see one consistent prefix.
class PAdicLazy {
 public:
  struct Node;

  /// Unit with pseudo-random digits (digit 0 nonzero) from a seeded mt19937_64.
  static PAdicLazy seeded_unit(std::uint64_t p, std::uint64_t seed);
  static PAdicLazy integer(std::uint64_t p, const BigInt& value);
  /// Denominator must be prime to p.
  static PAdicLazy rational(std::uint64_t p, const BigRational& value);

  friend PAdicLazy operator+(const PAdicLazy& a, const PAdicLazy& b);
  friend PAdicLazy operator*(const PAdicLazy& a, const PAdicLazy& b);
  PAdicLazy operator-() const;

  std::uint64_t p() const;
  /// Residue mod p^n in [0, p^n).
  BigInt truncate(unsigned n) const;
  PAdicApprox approx(unsigned n) const { return PAdicApprox(p(), n, truncate(n)); }
  unsigned digit(unsigned i) const;
  bool is_unit() const { return digit(0) != 0; }
  /// Provenance, e.g. "seeded(5,1)" or "(seeded(5,1)*seeded(5,1))".
  std::string describe() const;

 private:
  explicit PAdicLazy(std::shared_ptr<Node> node) : node_(std::move(node)) {}
  std::shared_ptr<Node> node_;
};

class MatrixModPk {
 public:
  MatrixModPk(std::uint64_t p, unsigned precision, std::size_t k);
  static MatrixModPk identity(std::uint64_t p, unsigned precision, std::size_t k);

  std::uint64_t p() const noexcept { return p_; }
  unsigned precision() const noexcept { return n_; }
  std::size_t size() const noexcept { return k_; }
  const BigInt& at(std::size_t i, std::size_t j) const { return data_[i * k_ + j]; }
  void set(std::size_t i, std::size_t j, const BigInt& value);

  BigInt determinant() const;
  MatrixModPk reduce(unsigned m) const;
  /// Gauss-Jordan over Z/p^N. Throws "SingularModP".
  MatrixModPk inverse() const;

  friend MatrixModPk operator*(const MatrixModPk& a, const MatrixModPk& b);
  friend bool operator==(const MatrixModPk&, const MatrixModPk&) = default;

  Json to_json() const;

 private:
  std::uint64_t p_;
  unsigned n_;
  std::size_t k_;
  BigInt modulus_;
  std::vector<BigInt> data_;
};

/// a_seq[n-1] is A_n mod p^n for n = 1..N; returns B_n with A_n B_n = B_n A_n = I.
std::vector<MatrixModPk> matrix_limit_inverse(const std::vector<MatrixModPk>& a_seq);

/// Sum of c_ij x^i y^j with integer coefficients.
class IntPolynomial2 {
 public:
  IntPolynomial2() = default;
  explicit IntPolynomial2(std::map<std::pair<unsigned, unsigned>, BigInt> coeffs);

  const std::map<std::pair<unsigned, unsigned>, BigInt>& coeffs() const noexcept { return coeffs_; }
  bool is_zero() const noexcept { return coeffs_.empty(); }
  /// max over the support of max(i, j)
  unsigned degree() const;
  BigInt height() const;
  PAdicApprox evaluate(const PAdicApprox& x, const PAdicApprox& y) const;

  std::string to_string() const;  // e.g. "x - y", "-x^2 + y"
  Json to_json() const;
  friend bool operator==(const IntPolynomial2&, const IntPolynomial2&) = default;

 private:
  std::map<std::pair<unsigned, unsigned>, BigInt> coeffs_;  // no zero coefficients
};

inline constexpr std::uint64_t kDefaultCandidateBudget = 50'000'000;

struct IndependenceCertificate {
  std::uint64_t p = 0;
  std::string g1, g2;  // provenance of the two p-adic integers
  unsigned degree = 0;
  unsigned height = 0;
  unsigned precision = 0;
  std::uint64_t candidates = 0;
  bool pass = false;
  std::optional<IntPolynomial2> violation;  // minimal height, first in enumeration order

  Json to_json() const;
};

using Monomial2 = std::pair<unsigned, unsigned>;  // x^i y^j

struct RelationSearch {
  std::uint64_t candidates = 0;
  std::optional<IntPolynomial2> relation;  // minimal height, then support, degree, text
};

/// Searches nonzero q with coefficients in [-B, B] supported on `monomials` for
/// v_p(q(g1, g2)) >= N. Throws "BudgetExceeded" past (2B+1)^|monomials| > budget.
RelationSearch find_relation(const PAdicLazy& g1, const PAdicLazy& g2, const std::vector<Monomial2>& monomials,
                             unsigned b, unsigned n, std::uint64_t budget = kDefaultCandidateBudget);

/// Searches all nonzero q with coefficients in [-B, B] on monomials x^i y^j,
/// i, j <= d, for v_p(q(g1, g2)) >= N. Throws "BudgetExceeded" when
/// (2B+1)^((d+1)^2) exceeds the budget.
IndependenceCertificate independence_certificate(const PAdicLazy& g1, const PAdicLazy& g2, unsigned d,
                                                 unsigned b, unsigned n,
                                                 std::uint64_t budget = kDefaultCandidateBudget);

}  // namespace sbab
