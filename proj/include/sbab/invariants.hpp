#pragma once

// Elementary-equivalence and isomorphism invariants of group specs.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "sbab/group_spec.hpp"
#include "sbab/number_theory.hpp"

namespace sbab {

/// A value attached to every prime outside a finite exclusion set.
struct CofiniteValue {
  unsigned k = 0;  // exponent for alpha families, unused for beta
  std::set<std::uint64_t> excluded;
  Cardinal value;
};

/// alpha(p,k) = dim (p^{k-1}G)[p] / (p^k G)[p]
/// beta(p)    = lim dim p^k G / p^{k+1} G
/// gamma(p)   = lim dim (p^k G)[p]
/// All values are capped at aleph_0.
struct SzInvariants {
  std::map<std::pair<std::uint64_t, unsigned>, Cardinal> alpha;
  std::vector<CofiniteValue> alpha_families;
  std::map<std::uint64_t, Cardinal> alpha_every_k;  // sumK(p; all) contributions
  std::map<std::uint64_t, Cardinal> beta;
  std::vector<CofiniteValue> beta_families;
  std::map<std::uint64_t, Cardinal> gamma;
  bool bounded = true;
  std::optional<BigInt> exponent;  // present iff bounded
  bool nontrivial = false;

  Cardinal alpha_at(std::uint64_t p, unsigned k) const;
  Cardinal beta_at(std::uint64_t p) const;
  Cardinal gamma_at(std::uint64_t p) const;

  /// Primes and exponents at which the tables can differ from their generic values.
  std::set<std::uint64_t> mentioned_primes() const;
  std::set<unsigned> mentioned_exponents() const;

  Json to_json() const;
};

struct DivisibleInvariants {
  std::map<std::uint64_t, Cardinal> prufer_count;
  Cardinal rational_rank;

  Json to_json() const;
  friend bool operator==(const DivisibleInvariants&, const DivisibleInvariants&) = default;
};

/// Ulm invariants of the cyclic part: entry (p, i) counts Z/p^{i+1}.
struct UlmTable {
  std::map<std::pair<std::uint64_t, unsigned>, Cardinal> entries;
  std::vector<CofiniteValue> families;       // i = k - 1 at every prime of the set
  std::map<std::uint64_t, Cardinal> every_i;  // exponent families

  Json to_json() const;
};

Cardinal ulm_symbolic(const GroupSpec& spec, std::uint64_t p, unsigned i);
UlmTable ulm_table(const GroupSpec& spec);
DivisibleInvariants divisible_invariants(const GroupSpec& spec);
SzInvariants sz_invariants(const GroupSpec& spec);

bool sz_equivalent(const SzInvariants& a, const SzInvariants& b);
bool elem_equivalent(const GroupSpec& a, const GroupSpec& b);
bool iso_standard(const GroupSpec& a, const GroupSpec& b);

}  // namespace sbab
