#pragma once

// Bi-embeddable, non-isomorphic pure subgroups of prod_{p in S} (Z/p)^{r_p}
// built from two per-prime unit scalars, and the reduction of unbounded
// torsion to that case.

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "sbab/group_spec.hpp"
#include "sbab/padic.hpp"

namespace sbab {

/// The first W primes of an infinite set S, with multiplicities r_p.
class PrimeWindow {
 public:
  /// S with constant multiplicity r. S must be infinite ("FinitePrimeSet").
  static PrimeWindow uniform(const PrimeSet& s, std::uint64_t r, std::size_t w);
  /// S and r_p read off a socle spec (sums of Z/p). Throws "NotASocle" on other summands.
  static PrimeWindow from_socle(const GroupSpec& socle, std::size_t w);

  const std::string& description() const noexcept { return description_; }
  const std::vector<std::uint64_t>& primes() const noexcept { return primes_; }
  std::size_t size() const noexcept { return primes_.size(); }
  bool contains(std::uint64_t p) const;  // membership in S, not just the window
  std::uint64_t r(std::uint64_t p) const;

  Json to_json() const;

 private:
  std::string description_;
  GroupSpec spec_;  // S and r_p as a sum of Z/p
  std::vector<std::uint64_t> primes_;
};

/// Per-prime unit scalars (sigma_p, tau_p). Window primes come from a table;
/// every other prime uses a seeded rule.
class SigmaPair {
 public:
  SigmaPair() = default;
  SigmaPair(std::uint64_t seed, std::map<std::uint64_t, std::pair<std::uint64_t, std::uint64_t>> table);

  std::uint64_t seed() const noexcept { return seed_; }
  const std::map<std::uint64_t, std::pair<std::uint64_t, std::uint64_t>>& table() const noexcept { return table_; }
  /// (sigma_p, tau_p) as residues mod p.
  std::pair<std::uint64_t, std::uint64_t> at(std::uint64_t p) const;
  /// Seeded unit pair for p. With diagonal, sigma_p = tau_p.
  static std::pair<std::uint64_t, std::uint64_t> draw(std::uint64_t p, std::uint64_t seed, bool diagonal);

  Json to_json() const;

 private:
  std::uint64_t seed_ = 0;
  std::map<std::uint64_t, std::pair<std::uint64_t, std::uint64_t>> table_;
};

/// Coefficient box for one monomial x^i y^j in an avoidance scan.
struct ScanTerm {
  Monomial2 monomial;
  int lo = 0, hi = 0;
};

/// For every nonzero coefficient vector in the box, the number of window
/// primes where q(sigma_p, tau_p) is nonzero mod p.
struct AvoidanceCertificate {
  unsigned degree = 0, height = 0;
  std::size_t threshold = 0;
  std::size_t window = 0;
  std::uint64_t polynomials = 0;
  std::size_t min_count = 0;
  std::string argmin;                          // a polynomial attaining min_count
  std::map<std::size_t, std::uint64_t> histogram;  // count -> number of polynomials
  unsigned restarts = 0;
  bool pass = false;

  Json to_json() const;
};

AvoidanceCertificate avoidance_scan(const PrimeWindow& pw, const SigmaPair& sigmas,
                                    const std::vector<ScanTerm>& terms, std::size_t threshold);

struct SocleParams {
  unsigned degree = 2;      // d
  unsigned height = 2;      // B
  std::size_t threshold = 5;
  unsigned max_restarts = 20;
  bool diagonal_only = false;  // restrict to sigma_p = tau_p
  std::uint64_t budget = kDefaultCandidateBudget;
};

struct ChosenSigmas {
  SigmaPair sigmas;
  AvoidanceCertificate certificate;
};

/// Redraws window scalars until every q of bidegree <= d and height <= B is
/// nonzero at >= threshold window primes. Throws "SearchFailed", "BudgetExceeded".
ChosenSigmas choose_sigmas(const PrimeWindow& pw, const SocleParams& params, std::uint64_t seed);

/// a: all ones except at finitely many primes.
struct BasePoint {
  std::map<std::uint64_t, std::vector<std::uint64_t>> overrides;

  std::vector<std::uint64_t> at(std::uint64_t p, std::uint64_t r) const;
};

/// Everything needed to evaluate product elements.
struct SocleContext {
  PrimeWindow window;
  SigmaPair sigmas;
  BasePoint base;
};

/// g + alpha_{1/n}[q(sigma1, sigma2)](a) with g of finite support. Canonical:
/// gcd(n, content(q)) = 1, no zero exception vectors, n = 1 when q = 0.
class ProductElement {
 public:
  ProductElement() = default;
  ProductElement(std::map<std::uint64_t, std::vector<std::uint64_t>> exceptions, std::uint64_t n,
                 std::map<Monomial2, BigInt> tail, const SocleContext& ctx);
  /// No canonicalization; for exercising the NonCanonical check.
  static ProductElement raw(std::map<std::uint64_t, std::vector<std::uint64_t>> exceptions, std::uint64_t n,
                            std::map<Monomial2, BigInt> tail);

  static ProductElement base_point(const SocleContext& ctx) { return ProductElement({}, 1, {{{0, 0}, 1}}, ctx); }

  const std::map<std::uint64_t, std::vector<std::uint64_t>>& exceptions() const noexcept { return exceptions_; }
  std::uint64_t n() const noexcept { return n_; }
  const std::map<Monomial2, BigInt>& tail() const noexcept { return tail_; }
  bool is_canonical() const;

  /// The (Z/p)^{r_p} component.
  std::vector<std::uint64_t> evaluate(std::uint64_t p, const SocleContext& ctx) const;

  std::string to_string() const;
  Json to_json() const;
  friend bool operator==(const ProductElement&, const ProductElement&) = default;

 private:
  std::map<std::uint64_t, std::vector<std::uint64_t>> exceptions_;
  std::uint64_t n_ = 1;
  std::map<Monomial2, BigInt> tail_;
};

ProductElement add(const ProductElement& x, const ProductElement& y, const SocleContext& ctx);
ProductElement alpha_inv(const ProductElement& x, std::uint64_t n, const SocleContext& ctx);
/// sigma1^a sigma2^b applied to x.
ProductElement apply_sigma(const ProductElement& x, unsigned a, unsigned b, const SocleContext& ctx);

enum class SocleEnvelope { H1, H2 };

/// Certificate-relative membership: the tail lies on the grid. Throws "NonCanonical".
bool product_membership(const ProductElement& x, SocleEnvelope which);

ProductElement sample_product_element(SocleEnvelope which, const SocleContext& ctx, std::mt19937_64& rng);

struct SocleWitness {
  SocleContext context;
  AvoidanceCertificate certificate;
  SocleParams params;

  Json to_json() const;
};

/// Throws "ZeroProjection" when the base point vanishes somewhere on the window.
SocleWitness socle_witness_build(const PrimeWindow& pw, std::uint64_t seed, const SocleParams& params = {},
                                 BasePoint base = {});

struct SocleProbeReport {
  bool certificate_pass = false;
  std::size_t alpha_checks = 0, alpha_passed = 0;          // alpha_{1/ab} = alpha_{1/a} alpha_{1/b}
  std::size_t torsion_checks = 0, torsion_passed = 0;      // n alpha_{1/n} x vs x
  std::size_t sigma_checks = 0, sigma_passed = 0;          // sigma_1(H1) in H2, sigma inverses
  std::size_t inclusion_checks = 0, inclusion_passed = 0;  // H2 in H1
  std::size_t division_checks = 0, division_passed = 0;    // alpha_{1/m} keeps members
  bool base_point_member = false;                          // a in H1 and H2
  bool sigma2_excluded = false;                            // sigma2(a) not in H2
  std::vector<AvoidanceCertificate> proper_inclusion;             // m = 0..max

  bool all_pass() const;
  Json to_json() const;
};

/// Scan of q - c x y^{m+1} with q on {1, x, x y, ..., x y^m}, |coefficients| <= B, 1 <= c <= B.
AvoidanceCertificate socle_proper_inclusion(const SocleWitness& w, unsigned m);

SocleProbeReport run_socle_probes(const SocleWitness& w, std::size_t alpha_samples = 1000,
                                  std::size_t samples = 100, std::uint64_t seed = 0, unsigned inclusion_max = 5);

struct ReductionStep {
  std::string name;
  std::string detail;
  Json data;
};

struct ReductionTranscript {
  std::string input;
  std::vector<ReductionStep> steps;
  SocleWitness witness;

  Json to_json() const;
};

/// Unbounded-exponent rejection, M-split, socle, witness build and the lift note. Throws
/// "NotSuperstable", "NotApplicable" (bounded, or a p-adic summand present).
ReductionTranscript reduce_unbounded(const GroupSpec& spec, std::size_t window, std::uint64_t seed,
                                     const SocleParams& params = {});

}  // namespace sbab
