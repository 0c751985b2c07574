#include "sbab/finite_oracle.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "sbab/error.hpp"
#include "sbab/number_theory.hpp"

namespace sbab {

// ---------------------------------------------------------------------------
// IntMatrix

IntMatrix IntMatrix::identity(std::size_t n) {
  IntMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

IntMatrix IntMatrix::diagonal(const std::vector<BigInt>& d) {
  IntMatrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

IntMatrix IntMatrix::from_rows(const std::vector<std::vector<BigInt>>& rows) {
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  IntMatrix m(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) throw std::invalid_argument("ragged matrix rows");
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

IntMatrix IntMatrix::operator*(const IntMatrix& rhs) const {
  if (cols_ != rhs.rows_) throw std::invalid_argument("matrix dimension mismatch");
  IntMatrix out(rows_, rhs.cols_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t k = 0; k < cols_; ++k) {
      const BigInt& a = (*this)(i, k);
      if (a == 0) continue;
      for (std::size_t j = 0; j < rhs.cols_; ++j) out(i, j) += a * rhs(k, j);
    }
  }
  return out;
}

bool IntMatrix::is_diagonal() const {
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) {
      if (i != j && (*this)(i, j) != 0) return false;
    }
  }
  return true;
}

BigInt IntMatrix::determinant() const {
  if (rows_ != cols_) throw std::invalid_argument("determinant of a non-square matrix");
  const std::size_t n = rows_;
  if (n == 0) return 1;
  IntMatrix m = *this;
  BigInt sign = 1;
  BigInt prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m(k, k) == 0) {
      std::size_t swap_row = k + 1;
      while (swap_row < n && m(swap_row, k) == 0) ++swap_row;
      if (swap_row == n) return 0;
      for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(swap_row, j));
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        m(i, j) = (m(i, j) * m(k, k) - m(i, k) * m(k, j)) / prev;
      }
    }
    prev = m(k, k);
  }
  return sign * m(n - 1, n - 1);
}

// ---------------------------------------------------------------------------
// Smith normal form

namespace {

void swap_rows(IntMatrix& m, std::size_t a, std::size_t b) {
  if (a == b) return;
  for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(a, j), m(b, j));
}

void swap_cols(IntMatrix& m, std::size_t a, std::size_t b) {
  if (a == b) return;
  for (std::size_t i = 0; i < m.rows(); ++i) std::swap(m(i, a), m(i, b));
}

// row_dst += factor * row_src
void add_row(IntMatrix& m, std::size_t dst, std::size_t src, const BigInt& factor) {
  for (std::size_t j = 0; j < m.cols(); ++j) m(dst, j) += factor * m(src, j);
}

void add_col(IntMatrix& m, std::size_t dst, std::size_t src, const BigInt& factor) {
  for (std::size_t i = 0; i < m.rows(); ++i) m(i, dst) += factor * m(i, src);
}

}  // namespace

SmithForm smith_normal_form(const IntMatrix& a) {
  if (a.rows() == 0 || a.cols() == 0) throw std::invalid_argument("smith_normal_form: empty matrix");
  IntMatrix d = a;
  IntMatrix u = IntMatrix::identity(a.rows());
  IntMatrix v = IntMatrix::identity(a.cols());
  const std::size_t limit = std::min(a.rows(), a.cols());

  std::size_t t = 0;
  for (; t < limit; ++t) {
    bool any = false;
    while (true) {
      // Pivot: smallest nonzero magnitude in the trailing block.
      std::size_t pi = 0, pj = 0;
      any = false;
      BigInt best;
      for (std::size_t i = t; i < d.rows(); ++i) {
        for (std::size_t j = t; j < d.cols(); ++j) {
          if (d(i, j) == 0) continue;
          BigInt mag = abs(d(i, j));
          if (!any || mag < best) {
            best = mag;
            pi = i;
            pj = j;
            any = true;
          }
        }
      }
      if (!any) break;
      swap_rows(d, t, pi);
      swap_rows(u, t, pi);
      swap_cols(d, t, pj);
      swap_cols(v, t, pj);

      bool residue = false;
      for (std::size_t i = t + 1; i < d.rows(); ++i) {
        BigInt q = d(i, t) / d(t, t);
        if (q != 0) {
          add_row(d, i, t, -q);
          add_row(u, i, t, -q);
        }
        if (d(i, t) != 0) residue = true;
      }
      for (std::size_t j = t + 1; j < d.cols(); ++j) {
        BigInt q = d(t, j) / d(t, t);
        if (q != 0) {
          add_col(d, j, t, -q);
          add_col(v, j, t, -q);
        }
        if (d(t, j) != 0) residue = true;
      }
      if (residue) continue;

      // Row and column are clear; the pivot must divide the remaining block.
      bool fixed = false;
      for (std::size_t i = t + 1; i < d.rows() && !fixed; ++i) {
        for (std::size_t j = t + 1; j < d.cols(); ++j) {
          if (d(i, j) % d(t, t) != 0) {
            add_row(d, t, i, 1);
            add_row(u, t, i, 1);
            fixed = true;
            break;
          }
        }
      }
      if (!fixed) break;
    }
    if (!any) break;
    if (d(t, t) < 0) {
      for (std::size_t j = 0; j < d.cols(); ++j) d(t, j) = -d(t, j);
      for (std::size_t j = 0; j < u.cols(); ++j) u(t, j) = -u(t, j);
    }
  }

  SmithForm out;
  for (std::size_t i = 0; i < limit; ++i) {
    if (d(i, i) > 1) out.invariant_factors.push_back(d(i, i));
  }
  out.free_rank = a.rows() - t;
  out.diagonal = std::move(d);
  out.u = std::move(u);
  out.v = std::move(v);
  return out;
}

// ---------------------------------------------------------------------------
// FiniteAbelianGroup

FiniteAbelianGroup::FiniteAbelianGroup(std::vector<std::uint64_t> factors,
                                       std::uint64_t order_bound)
    : factors_(std::move(factors)), bound_(order_bound) {
  for (auto f : factors_) {
    if (f < 2) throw precondition_error("BadFactor", "cyclic factor orders must be >= 2");
    if (order_ > bound_ / f) {
      throw precondition_error("OrderBoundExceeded",
                               "group order exceeds the oracle bound " + std::to_string(bound_));
    }
    order_ *= f;
    exponent_ = std::lcm(exponent_, f);
  }
}

FiniteAbelianGroup FiniteAbelianGroup::realize(const GroupSpec& spec, std::uint64_t order_bound) {
  return FiniteAbelianGroup(elementary_divisors(spec), order_bound);
}

std::vector<std::uint64_t> FiniteAbelianGroup::coords(Element x) const {
  std::vector<std::uint64_t> c(factors_.size());
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    c[i] = x % factors_[i];
    x /= factors_[i];
  }
  return c;
}

FiniteAbelianGroup::Element FiniteAbelianGroup::encode(const std::vector<std::uint64_t>& c) const {
  Element x = 0;
  for (std::size_t i = factors_.size(); i-- > 0;) x = x * factors_[i] + c[i] % factors_[i];
  return x;
}

FiniteAbelianGroup::Element FiniteAbelianGroup::add(Element a, Element b) const {
  Element out = 0, radix = 1;
  for (auto f : factors_) {
    out += ((a % f + b % f) % f) * radix;
    a /= f;
    b /= f;
    radix *= f;
  }
  return out;
}

FiniteAbelianGroup::Element FiniteAbelianGroup::neg(Element a) const {
  Element out = 0, radix = 1;
  for (auto f : factors_) {
    out += ((f - a % f) % f) * radix;
    a /= f;
    radix *= f;
  }
  return out;
}

FiniteAbelianGroup::Element FiniteAbelianGroup::scale(std::uint64_t n, Element a) const {
  Element out = 0, radix = 1;
  for (auto f : factors_) {
    out += mul_mod(n % f, a % f, f) * radix;
    a /= f;
    radix *= f;
  }
  return out;
}

std::uint64_t FiniteAbelianGroup::element_order(Element a) const {
  std::uint64_t ord = 1;
  for (auto f : factors_) {
    ord = std::lcm(ord, f / std::gcd(f, a % f));
    a /= f;
  }
  return ord;
}

bool FiniteAbelianGroup::is_p_group(std::uint64_t p) const {
  std::uint64_t n = order_;
  while (n % p == 0) n /= p;
  return n == 1;
}

// ---------------------------------------------------------------------------
// Subgroups

ElementSet subgroup_closure(const FiniteAbelianGroup& g,
                            const std::vector<FiniteAbelianGroup::Element>& generators) {
  ElementSet in(g.order(), false);
  std::vector<FiniteAbelianGroup::Element> members{0};
  in[0] = true;
  for (auto gen : generators) {
    if (gen >= g.order()) throw precondition_error("NotAnElement", "generator outside the group");
    // members is a subgroup; extend by the cyclic group <gen>.
    std::vector<FiniteAbelianGroup::Element> base = members;
    FiniteAbelianGroup::Element step = gen;
    while (!in[step]) {
      for (auto h : base) {
        auto x = g.add(h, step);
        if (!in[x]) {
          in[x] = true;
          members.push_back(x);
        }
      }
      step = g.add(step, gen);
    }
  }
  return in;
}

ElementSet multiple_subgroup(const FiniteAbelianGroup& g, std::uint64_t n) {
  ElementSet out(g.order(), false);
  for (FiniteAbelianGroup::Element x = 0; x < g.order(); ++x) out[g.scale(n, x)] = true;
  return out;
}

std::vector<ElementSet> enumerate_subgroups(const FiniteAbelianGroup& g) {
  std::set<ElementSet> seen;
  std::vector<ElementSet> frontier{ElementSet(g.order(), false)};
  frontier.front()[0] = true;
  seen.insert(frontier.front());
  while (!frontier.empty()) {
    std::vector<ElementSet> next;
    for (const auto& s : frontier) {
      std::vector<FiniteAbelianGroup::Element> members;
      for (FiniteAbelianGroup::Element x = 0; x < g.order(); ++x) {
        if (s[x]) members.push_back(x);
      }
      // One extension per coset of s.
      ElementSet done = s;
      for (FiniteAbelianGroup::Element x = 0; x < g.order(); ++x) {
        if (done[x]) continue;
        for (auto h : members) done[g.add(h, x)] = true;
        std::vector<FiniteAbelianGroup::Element> gens = members;
        gens.push_back(x);
        ElementSet ext = s;
        FiniteAbelianGroup::Element step = x;
        while (!ext[step]) {
          for (auto h : members) ext[g.add(h, step)] = true;
          step = g.add(step, x);
        }
        if (seen.insert(ext).second) next.push_back(std::move(ext));
      }
    }
    frontier = std::move(next);
  }
  return {seen.begin(), seen.end()};
}

FiniteAbelianGroup subgroup_type(const FiniteAbelianGroup& g, const ElementSet& h) {
  std::vector<FiniteAbelianGroup::Element> members;
  for (FiniteAbelianGroup::Element x = 0; x < g.order(); ++x) {
    if (h[x]) members.push_back(x);
  }
  std::vector<std::uint64_t> divisors;
  for (auto [p, a] : factorize(members.size())) {
    // c_j = log_p |H[p^j]|; the number of cyclic factors of order >= p^j is c_j - c_{j-1}.
    std::vector<unsigned> c{0};
    std::uint64_t pj = 1;
    for (unsigned j = 1; c.back() < a; ++j) {
      pj *= p;
      std::uint64_t count = 0;
      for (auto x : members) {
        if (g.scale(pj, x) == 0) ++count;
      }
      c.push_back(valuation(count, p));
    }
    const unsigned top = static_cast<unsigned>(c.size()) - 1;
    for (unsigned j = 1; j <= top; ++j) {
      const unsigned at_least_j = c[j] - c[j - 1];
      const unsigned at_least_next = j < top ? c[j + 1] - c[j] : 0;
      for (unsigned r = 0; r < at_least_j - at_least_next; ++r) {
        divisors.push_back(checked_pow(p, j));
      }
    }
  }
  std::sort(divisors.begin(), divisors.end());
  return FiniteAbelianGroup(divisors, g.order_bound());
}

bool is_pure_subgroup_bruteforce(const FiniteAbelianGroup& g, const ElementSet& h) {
  if (h.size() != g.order()) throw precondition_error("NotASubgroup", "subgroup bitmap size mismatch");
  // nG and nH depend only on gcd(n, exp G); cache by that divisor.
  std::map<std::uint64_t, std::pair<ElementSet, ElementSet>> cache;
  for (std::uint64_t n = 1; n <= g.exponent(); ++n) {
    const std::uint64_t d = std::gcd(n, g.exponent());
    auto it = cache.find(d);
    if (it == cache.end()) {
      ElementSet ng = multiple_subgroup(g, d);
      ElementSet nh(g.order(), false);
      for (FiniteAbelianGroup::Element x = 0; x < g.order(); ++x) {
        if (h[x]) nh[g.scale(d, x)] = true;
      }
      it = cache.emplace(d, std::make_pair(std::move(ng), std::move(nh))).first;
    }
    const auto& [ng, nh] = it->second;
    for (FiniteAbelianGroup::Element x = 0; x < g.order(); ++x) {
      if (h[x] && ng[x] && !nh[x]) return false;
    }
  }
  return true;
}

bool is_pure_subgroup_bruteforce(const FiniteAbelianGroup& g,
                                 const std::vector<FiniteAbelianGroup::Element>& generators) {
  return is_pure_subgroup_bruteforce(g, subgroup_closure(g, generators));
}

std::uint64_t ulm_bruteforce(const FiniteAbelianGroup& g, std::uint64_t p, unsigned i) {
  if (!is_prime(p)) throw precondition_error("NotPrime", std::to_string(p) + " is not prime");
  if (!g.is_p_group(p)) {
    throw precondition_error("NotAPGroup", "group is not a " + std::to_string(p) + "-group");
  }
  auto height_at_least = [&](unsigned n) {
    // p^n G, computed by scaling every element; empty-exponent overflow is moot
    // once p^n exceeds the exponent.
    std::uint64_t pn = 1;
    for (unsigned r = 0; r < n && pn <= g.exponent(); ++r) pn *= p;
    return multiple_subgroup(g, pn > g.exponent() ? g.exponent() : pn);
  };
  const ElementSet hi = height_at_least(i);
  const ElementSet hi1 = height_at_least(i + 1);
  std::uint64_t count_i = 0, count_i1 = 0;
  for (FiniteAbelianGroup::Element x = 0; x < g.order(); ++x) {
    if (g.scale(p, x) != 0) continue;
    if (hi[x]) ++count_i;
    if (hi1[x]) ++count_i1;
  }
  return valuation(count_i / count_i1, p);
}

std::vector<BigInt> invariant_factors(const FiniteAbelianGroup& g) {
  if (g.factors().empty()) return {};
  std::vector<BigInt> d(g.factors().begin(), g.factors().end());
  return smith_normal_form(IntMatrix::diagonal(d)).invariant_factors;
}

namespace {

// Number of elements of each order; determines a finite abelian group up to isomorphism.
std::map<std::uint64_t, std::uint64_t> order_profile(const FiniteAbelianGroup& g) {
  std::map<std::uint64_t, std::uint64_t> out;
  for (FiniteAbelianGroup::Element x = 0; x < g.order(); ++x) ++out[g.element_order(x)];
  return out;
}

}  // namespace

bool iso_finite_bruteforce(const FiniteAbelianGroup& a, const FiniteAbelianGroup& b) {
  if (a.order() != b.order()) return false;
  return order_profile(a) == order_profile(b);
}

}  // namespace sbab
