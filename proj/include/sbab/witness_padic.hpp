#pragma once

// Bi-embeddable, non-isomorphic envelopes H1, H2 inside (Zhat_p)^k, and
// direct sums of such pairs.
//
// Envelope elements are exact: p^{-t} times a Z_(p)-combination of grid
// monomials gamma1^i gamma2^j e_s. Truncated residues cannot be used because
// every envelope is dense modulo p^N.

#include <compare>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "sbab/group_spec.hpp"
#include "sbab/padic.hpp"

namespace sbab {

/// gamma1^i gamma2^j e_s, with s in 1..k.
struct GridMonomial {
  unsigned i = 0, j = 0, s = 1;
  friend auto operator<=>(const GridMonomial&, const GridMonomial&) = default;
};

enum class Envelope { H1, H2 };

/// K1 uses every (i, j); K2 drops (0, j) for j > 0.
bool in_grid(const GridMonomial& m, Envelope which);

class GridElement {
 public:
  /// Coefficients need denominators prime to p ("NotInLocalization").
  /// Canonical: no zero coefficients, and t is lowered while p divides every coefficient.
  GridElement(std::uint64_t p, unsigned t, std::map<GridMonomial, BigRational> coeffs);
  static GridElement basis(std::uint64_t p, unsigned s) { return GridElement(p, 0, {{{0, 0, s}, 1}}); }

  std::uint64_t p() const noexcept { return p_; }
  unsigned t() const noexcept { return t_; }
  const std::map<GridMonomial, BigRational>& coeffs() const noexcept { return coeffs_; }
  bool is_zero() const noexcept { return coeffs_.empty(); }
  unsigned max_degree() const;

  /// p^{-e} x
  GridElement divide_by_p_power(unsigned e) const;
  /// The same combination with t = 0, i.e. p^t x.
  GridElement numerator_part() const { return GridElement(p_, 0, coeffs_); }
  friend GridElement operator+(const GridElement& a, const GridElement& b);
  GridElement scaled(const BigRational& c) const;

  std::string to_string() const;  // e.g. "5^-1*(3*e1 + g1*e1)"
  Json to_json() const;
  friend bool operator==(const GridElement&, const GridElement&) = default;

 private:
  std::uint64_t p_;
  unsigned t_;
  std::map<GridMonomial, BigRational> coeffs_;
};

struct PAdicWitnessParams {
  unsigned degree = 2;      // d
  unsigned height = 2;      // B
  unsigned precision = 40;  // N
  unsigned max_attempts = 8;
  std::uint64_t budget = kDefaultCandidateBudget;
};

struct WitnessPairDescriptor {
  std::uint64_t p = 0;
  unsigned k = 0;
  std::uint64_t seed = 0;
  std::uint64_t gamma1_seed = 0, gamma2_seed = 0;
  unsigned attempts = 0;                   // certificate searches run, including the accepted one
  std::vector<std::string> rejected;        // relations that sank earlier seeds
  std::vector<PAdicLazy> gammas;           // {gamma1, gamma2}
  unsigned precision = 0;
  IndependenceCertificate certificate;

  const PAdicLazy& gamma1() const { return gammas.at(0); }
  const PAdicLazy& gamma2() const { return gammas.at(1); }
  Json to_json() const;
};

/// Draws seeded unit pairs until one passes the certificate. Throws
/// "CertificateFailed" after max_attempts, "BudgetExceeded" from the search.
WitnessPairDescriptor build_padic_witness(std::uint64_t p, unsigned k, std::uint64_t seed,
                                          const PAdicWitnessParams& params = {});

/// Coordinate s of p^t x, i.e. the integral combination before division, mod p^N.
std::vector<PAdicApprox> coordinate_numerators(const GridElement& x, const WitnessPairDescriptor& w);

/// Membership relative to the certificate: support on the grid and p^t dividing
/// every coordinate of the numerator. Throws "PrecisionInsufficient" when t >= N.
bool grid_membership(const GridElement& x, Envelope which, const WitnessPairDescriptor& w);

/// c * gamma1^a * gamma2^b with c a unit of Z_(p).
struct GridScalar {
  BigRational c = 1;
  unsigned a = 0, b = 0;
};

/// sigma_alpha(x) = alpha * x; shifts every monomial by (a, b). Throws "NonUnit".
GridElement apply_scalar_sigma(const GridScalar& alpha, const GridElement& x, const WitnessPairDescriptor& w);

/// Random member of the envelope: grid support of degree <= max_degree, t <= max_t.
GridElement sample_member(Envelope which, const WitnessPairDescriptor& w, std::mt19937_64& rng,
                          unsigned max_degree = 3, unsigned max_t = 5);

struct ProbeCount {
  std::size_t checked = 0, passed = 0;
  bool ok() const { return checked > 0 && checked == passed; }
  Json to_json() const;
};

struct ProperInclusionCheck {
  unsigned m = 0;
  bool pass = false;
  std::uint64_t candidates = 0;
  std::string relation;  // empty on pass
};

struct PAdicProbeReport {
  bool certificate_pass = false;
  ProbeCount inclusion;          // sigma_gamma1(H1) in H2
  ProbeCount reverse_inclusion;  // H2 in H1
  ProbeCount sigma_division;     // sigma(p^-t a) = p^-t sigma(a)
  ProbeCount purity;
  ProbeCount finite_height;      // nonzero members have finite p-height
  bool nonmembership = false;    // gamma2 e1 in H1 but not in H2
  bool matrix_limit = false;
  std::vector<ProperInclusionCheck> proper_inclusion;

  bool all_pass() const;
  Json to_json() const;
};

PAdicProbeReport run_padic_probes(const WitnessPairDescriptor& w, std::size_t samples = 100,
                                  std::uint64_t seed = 0, unsigned inclusion_max = 5);

/// Nonzero members drawn from H2 whose coordinates all have exact valuation < N.
ProbeCount finite_height_probe(const WitnessPairDescriptor& w, std::size_t samples, std::uint64_t seed);

/// gamma1 (I + e12) (gamma1 I when k = 1) mod p^n for n = 1..N, its limit
/// inverse, and a check against gamma1^{-1} (I - e12).
bool matrix_limit_probe(const WitnessPairDescriptor& w);

/// No relation of height <= B, precision N, among 1, gamma1, gamma1 gamma2, ...,
/// gamma1 gamma2^{m+1}: the top generator stays outside the lower envelope.
ProperInclusionCheck proper_inclusion_check(const WitnessPairDescriptor& w, unsigned m, unsigned b,
                              std::uint64_t budget = kDefaultCandidateBudget);

struct CompletionSumWitness {
  std::vector<WitnessPairDescriptor> components;
  std::vector<ProbeCount> finite_height;  // one per component
  std::string rationale;

  Json to_json() const;
};

/// Componentwise witnesses for the sum of Zhat(p_i)^{k_i}. Throws
/// "EmptyInput" and "DuplicatePrime".
CompletionSumWitness assemble_completion_sum(const std::vector<std::pair<std::uint64_t, unsigned>>& pairs, std::uint64_t seed,
                             const PAdicWitnessParams& params = {}, std::size_t samples = 100);

struct MixedSumWitness {
  GroupSpec k_part, c_part, d_part;
  std::vector<std::uint64_t> sampled_family_primes;  // from p-adic prime families, if any
  CompletionSumWitness k_witness;
  std::string g0, g1;
  std::string rationale;

  Json to_json() const;
};

/// Pair K0 + C + D, K1 + C + D built on the p-adic part of the spec. Throws
/// "NoKPart", and "InfiniteRank" for an infinite multiplicity of one completion.
MixedSumWitness assemble_mixed_sum(const GroupSpec& spec, std::uint64_t seed, const PAdicWitnessParams& params = {},
                             std::size_t family_sample = 3, std::size_t samples = 100);

}  // namespace sbab
