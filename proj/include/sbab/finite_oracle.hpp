#pragma once

// Brute-force ground truth on explicit finite abelian groups.
//
// Everything here enumerates elements exhaustively and refuses groups above
// the configured order bound instead of sampling.

#include <cstdint>
#include <vector>

#include "sbab/group_spec.hpp"
#include "sbab/number_theory.hpp"

namespace sbab {

inline constexpr std::uint64_t kDefaultOrderBound = std::uint64_t{1} << 16;

class IntMatrix {
 public:
  IntMatrix() = default;
  IntMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  static IntMatrix identity(std::size_t n);
  static IntMatrix diagonal(const std::vector<BigInt>& d);
  static IntMatrix from_rows(const std::vector<std::vector<BigInt>>& rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  BigInt& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const BigInt& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  IntMatrix operator*(const IntMatrix& rhs) const;
  bool is_diagonal() const;
  /// Bareiss fraction-free elimination; square matrices only.
  BigInt determinant() const;

  friend bool operator==(const IntMatrix&, const IntMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<BigInt> data_;
};

struct SmithForm {
  IntMatrix diagonal;                   // U * A * V
  IntMatrix u;                          // unimodular, rows x rows
  IntMatrix v;                          // unimodular, cols x cols
  std::vector<BigInt> invariant_factors;  // the d_i > 1, each dividing the next
  std::size_t free_rank = 0;            // rank of the free part of the cokernel
};

/// Smith normal form with transforms. The cokernel Z^rows / A Z^cols is
/// (sum of Z/d_i) + Z^free_rank.
SmithForm smith_normal_form(const IntMatrix& a);

class FiniteAbelianGroup {
 public:
  /// Elements are encoded as mixed-radix indices in [0, order).
  using Element = std::uint64_t;

  /// Z/f_1 + ... + Z/f_r; every factor must be >= 2 and the order within bound.
  explicit FiniteAbelianGroup(std::vector<std::uint64_t> factors,
                              std::uint64_t order_bound = kDefaultOrderBound);

  /// Realization of a finite spec (Cyclic singletons with finite multiplicity).
  static FiniteAbelianGroup realize(const GroupSpec& spec,
                                    std::uint64_t order_bound = kDefaultOrderBound);

  const std::vector<std::uint64_t>& factors() const noexcept { return factors_; }
  std::uint64_t order() const noexcept { return order_; }
  std::uint64_t exponent() const noexcept { return exponent_; }
  std::uint64_t order_bound() const noexcept { return bound_; }

  std::vector<std::uint64_t> coords(Element x) const;
  Element encode(const std::vector<std::uint64_t>& coords) const;
  Element add(Element a, Element b) const;
  Element neg(Element a) const;
  Element scale(std::uint64_t n, Element a) const;
  std::uint64_t element_order(Element a) const;

  /// True iff the order is a power of p (every element has p-power order).
  bool is_p_group(std::uint64_t p) const;

 private:
  std::vector<std::uint64_t> factors_;
  std::uint64_t order_ = 1;
  std::uint64_t exponent_ = 1;
  std::uint64_t bound_ = kDefaultOrderBound;
};

/// Membership bitmap over all elements of a group.
using ElementSet = std::vector<bool>;

ElementSet subgroup_closure(const FiniteAbelianGroup& g,
                            const std::vector<FiniteAbelianGroup::Element>& generators);

/// nG as a membership bitmap.
ElementSet multiple_subgroup(const FiniteAbelianGroup& g, std::uint64_t n);

/// Every subgroup of g, each exactly once.
std::vector<ElementSet> enumerate_subgroups(const FiniteAbelianGroup& g);

/// Isomorphism type of a subgroup, recovered from the sizes of its p^j-torsion.
FiniteAbelianGroup subgroup_type(const FiniteAbelianGroup& g, const ElementSet& h);

/// For every h in H = <generators> and 1 <= n <= exponent(G): nx = h solvable
/// in G implies solvable in H.
bool is_pure_subgroup_bruteforce(const FiniteAbelianGroup& g,
                                 const std::vector<FiniteAbelianGroup::Element>& generators);
bool is_pure_subgroup_bruteforce(const FiniteAbelianGroup& g, const ElementSet& h);

/// dim_{F_p} P(G,i)/P(G,i+1) with P(G,i) = {x in G[p] : ht_p(x) >= i}.
/// Counts the Z/p^{i+1} summands. Throws "NotAPGroup" otherwise.
std::uint64_t ulm_bruteforce(const FiniteAbelianGroup& g, std::uint64_t p, unsigned i);

std::vector<BigInt> invariant_factors(const FiniteAbelianGroup& g);

/// Compares the number of elements of each order, by enumeration.
bool iso_finite_bruteforce(const FiniteAbelianGroup& a, const FiniteAbelianGroup& b);

}  // namespace sbab
