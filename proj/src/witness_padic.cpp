#include "sbab/witness_padic.hpp"

#include <algorithm>
#include <set>

#include "sbab/error.hpp"

namespace sbab {

bool in_grid(const GridMonomial& m, Envelope which) {
  if (which == Envelope::H1) return true;
  return m.i >= 1 || m.j == 0;
}

namespace {

bool p_divides(const BigRational& c, std::uint64_t p) { return numerator(c) % p == 0; }

std::string monomial_text(const GridMonomial& m) {
  std::string s;
  auto var = [&](const char* v, unsigned e) {
    if (e == 0) return;
    s += v;
    if (e > 1) s += "^" + std::to_string(e);
    s += "*";
  };
  var("g1", m.i);
  var("g2", m.j);
  return s + "e" + std::to_string(m.s);
}

}  // namespace

GridElement::GridElement(std::uint64_t p, unsigned t, std::map<GridMonomial, BigRational> coeffs) : p_(p), t_(t) {
  for (auto& [m, c] : coeffs) {
    if (c == 0) continue;
    if (denominator(c) % p == 0) {
      throw precondition_error("NotInLocalization", "coefficient " + c.str() + " has p in its denominator");
    }
    coeffs_.emplace(m, std::move(c));
  }
  if (coeffs_.empty()) t_ = 0;
  while (t_ > 0 && std::all_of(coeffs_.begin(), coeffs_.end(), [&](const auto& kv) { return p_divides(kv.second, p); })) {
    for (auto& [m, c] : coeffs_) c /= p;
    --t_;
  }
}

unsigned GridElement::max_degree() const {
  unsigned d = 0;
  for (const auto& [m, c] : coeffs_) d = std::max({d, m.i, m.j});
  return d;
}

GridElement GridElement::divide_by_p_power(unsigned e) const { return GridElement(p_, t_ + e, coeffs_); }

GridElement GridElement::scaled(const BigRational& c) const {
  auto coeffs = coeffs_;
  for (auto& [m, v] : coeffs) v *= c;
  return GridElement(p_, t_, std::move(coeffs));  // p-powers in c lower t
}

GridElement operator+(const GridElement& a, const GridElement& b) {
  if (a.p_ != b.p_) throw precondition_error("PrimeMismatch", "grid elements at different primes");
  const unsigned t = std::max(a.t_, b.t_);
  std::map<GridMonomial, BigRational> coeffs;
  for (const auto& [m, c] : a.coeffs_) coeffs[m] += c * BigRational(power(a.p_, t - a.t_));
  for (const auto& [m, c] : b.coeffs_) coeffs[m] += c * BigRational(power(b.p_, t - b.t_));
  return GridElement(a.p_, t, std::move(coeffs));
}

std::string GridElement::to_string() const {
  if (coeffs_.empty()) return "0";
  std::string body;
  for (const auto& [m, c] : coeffs_) {
    const bool neg = c < 0;
    const BigRational a = neg ? BigRational(-c) : c;
    body += body.empty() ? (neg ? "-" : "") : (neg ? " - " : " + ");
    if (a != 1) body += a.str() + "*";
    body += monomial_text(m);
  }
  if (t_ == 0) return body;
  return std::to_string(p_) + "^-" + std::to_string(t_) + "*(" + body + ")";
}

Json GridElement::to_json() const {
  Json terms = Json::array();
  for (const auto& [m, c] : coeffs_) {
    Json t;
    t["i"] = m.i;
    t["j"] = m.j;
    t["s"] = m.s;
    t["c"] = c.str();
    terms.push_back(std::move(t));
  }
  Json j;
  j["t"] = t_;
  j["terms"] = std::move(terms);
  j["text"] = to_string();
  return j;
}

Json WitnessPairDescriptor::to_json() const {
  auto gamma = [&](const PAdicLazy& g, std::uint64_t s) {
    Json j;
    j["seed"] = s;
    j["source"] = g.describe();
    Json digits = Json::array();
    for (unsigned i = 0; i < 12; ++i) digits.push_back(g.digit(i));
    j["digits"] = std::move(digits);
    return j;
  };
  Json j;
  j["p"] = p;
  j["k"] = k;
  j["seed"] = seed;
  j["attempts"] = attempts;
  j["rejected"] = rejected;
  j["gamma1"] = gamma(gamma1(), gamma1_seed);
  j["gamma2"] = gamma(gamma2(), gamma2_seed);
  j["precision"] = precision;
  j["certificate"] = certificate.to_json();
  j["H1_grid"] = "{g1^i g2^j e_s : i, j >= 0}";
  j["H2_grid"] = "{g1^i g2^j e_s : i >= 1, j >= 0} + {e_s}";
  j["reduced"] = "subgroups of the torsion-free reduced group (Zhat_p)^k";
  return j;
}

WitnessPairDescriptor build_padic_witness(std::uint64_t p, unsigned k, std::uint64_t seed,
                                          const PAdicWitnessParams& params) {
  if (!is_prime(p)) throw precondition_error("NotPrime", std::to_string(p) + " is not prime");
  if (k == 0) throw precondition_error("PreconditionViolated", "the rank k must be at least 1");
  if (params.precision == 0) throw precondition_error("ZeroPrecision", "precision must be at least 1");
  WitnessPairDescriptor w;
  w.p = p;
  w.k = k;
  w.seed = seed;
  w.precision = params.precision;
  for (unsigned attempt = 0; attempt < std::max(1u, params.max_attempts); ++attempt) {
    const std::uint64_t s1 = 2 * (seed + attempt), s2 = s1 + 1;
    auto g1 = PAdicLazy::seeded_unit(p, s1), g2 = PAdicLazy::seeded_unit(p, s2);
    auto cert = independence_certificate(g1, g2, params.degree, params.height, params.precision, params.budget);
    ++w.attempts;
    if (!cert.pass) {
      w.rejected.push_back(g1.describe() + ", " + g2.describe() + ": " + cert.violation->to_string());
      continue;
    }
    w.gamma1_seed = s1;
    w.gamma2_seed = s2;
    w.gammas = {g1, g2};
    w.certificate = std::move(cert);
    return w;
  }
  throw precondition_error("CertificateFailed", "no certified pair after " + std::to_string(w.attempts) +
                                                    " seeds; raise N or lower d, B");
}

std::vector<PAdicApprox> coordinate_numerators(const GridElement& x, const WitnessPairDescriptor& w) {
  if (x.p() != w.p) throw precondition_error("PrimeMismatch", "element and witness at different primes");
  const unsigned n = w.precision;
  const auto g1 = w.gamma1().approx(n), g2 = w.gamma2().approx(n);
  std::vector<PAdicApprox> out(w.k, PAdicApprox(w.p, n, 0));
  std::map<std::pair<unsigned, unsigned>, PAdicApprox> powers;
  auto mono = [&](unsigned i, unsigned j) {
    auto it = powers.find({i, j});
    if (it != powers.end()) return it->second;
    PAdicApprox v(w.p, n, 1);
    for (unsigned a = 0; a < i; ++a) v = v * g1;
    for (unsigned b = 0; b < j; ++b) v = v * g2;
    powers.emplace(std::make_pair(i, j), v);
    return v;
  };
  for (const auto& [m, c] : x.coeffs()) {
    if (m.s < 1 || m.s > w.k) {
      throw precondition_error("CoordinateOutOfRange",
                               "e" + std::to_string(m.s) + " outside rank " + std::to_string(w.k));
    }
    out[m.s - 1] = out[m.s - 1] + PAdicApprox::from_rational(w.p, n, c) * mono(m.i, m.j);
  }
  return out;
}

bool grid_membership(const GridElement& x, Envelope which, const WitnessPairDescriptor& w) {
  if (x.t() >= w.precision) {
    throw precondition_error("PrecisionInsufficient", "denominator p^" + std::to_string(x.t()) +
                                                          " needs precision above " + std::to_string(w.precision));
  }
  for (const auto& [m, c] : x.coeffs()) {
    if (!in_grid(m, which)) return false;
  }
  for (const auto& v : coordinate_numerators(x, w)) {
    if (v.valuation().value < x.t()) return false;
  }
  return true;
}

GridElement apply_scalar_sigma(const GridScalar& alpha, const GridElement& x, const WitnessPairDescriptor& w) {
  if (alpha.c == 0 || numerator(alpha.c) % w.p == 0 || denominator(alpha.c) % w.p == 0) {
    throw precondition_error("NonUnit", alpha.c.str() + " is not a p-adic unit");
  }
  std::map<GridMonomial, BigRational> coeffs;
  for (const auto& [m, c] : x.coeffs()) coeffs[{m.i + alpha.a, m.j + alpha.b, m.s}] = c * alpha.c;
  return GridElement(x.p(), x.t(), std::move(coeffs));
}

GridElement sample_member(Envelope which, const WitnessPairDescriptor& w, std::mt19937_64& rng,
                          unsigned max_degree, unsigned max_t) {
  const unsigned t = static_cast<unsigned>(rng() % (std::min(max_t, w.precision - 1) + 1));
  std::map<GridMonomial, BigRational> coeffs;
  const int terms = 1 + static_cast<int>(rng() % 4);
  for (int n = 0; n < terms; ++n) {
    GridMonomial m{static_cast<unsigned>(rng() % (max_degree + 1)), static_cast<unsigned>(rng() % (max_degree + 1)),
                   1 + static_cast<unsigned>(rng() % w.k)};
    if (!in_grid(m, which)) m.i = 1;
    std::int64_t num = static_cast<std::int64_t>(rng() % 19) - 9;
    if (num == 0) num = 1;
    std::uint64_t den = 1;
    if (rng() % 4 == 0) {
      den = 2 + rng() % 6;
      while (den % w.p == 0) ++den;
    }
    coeffs[m] += BigRational(num, den);
  }
  // Clear the residues mod p^t through the e_s coefficients, which every grid contains.
  GridElement a(w.p, 0, coeffs);
  const auto nums = coordinate_numerators(a, w);
  const BigInt pt = power(w.p, t);
  for (unsigned s = 1; s <= w.k; ++s) coeffs[{0, 0, s}] -= BigRational(nums[s - 1].residue() % pt);
  return GridElement(w.p, t, std::move(coeffs));
}

Json ProbeCount::to_json() const {
  Json j;
  j["checked"] = checked;
  j["passed"] = passed;
  return j;
}

bool PAdicProbeReport::all_pass() const {
  return certificate_pass && inclusion.ok() && reverse_inclusion.ok() && sigma_division.ok() && purity.ok() &&
         finite_height.ok() && nonmembership && matrix_limit &&
         std::all_of(proper_inclusion.begin(), proper_inclusion.end(), [](const ProperInclusionCheck& c) { return c.pass; });
}

Json PAdicProbeReport::to_json() const {
  Json j;
  j["certificate_pass"] = certificate_pass;
  j["inclusion"] = inclusion.to_json();
  j["reverse_inclusion"] = reverse_inclusion.to_json();
  j["sigma_division"] = sigma_division.to_json();
  j["purity"] = purity.to_json();
  j["finite_height"] = finite_height.to_json();
  j["nonmembership"] = nonmembership;
  j["matrix_limit"] = matrix_limit;
  Json checks = Json::array();
  for (const auto& c : proper_inclusion) {
    Json e;
    e["m"] = c.m;
    e["pass"] = c.pass;
    e["candidates"] = c.candidates;
    e["relation"] = c.relation.empty() ? Json(nullptr) : Json(c.relation);
    checks.push_back(std::move(e));
  }
  j["proper_inclusion"] = std::move(checks);
  j["all_pass"] = all_pass();
  return j;
}

ProbeCount finite_height_probe(const WitnessPairDescriptor& w, std::size_t samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ProbeCount out;
  while (out.checked < samples) {
    auto x = sample_member(out.checked % 2 ? Envelope::H1 : Envelope::H2, w, rng);
    if (x.is_zero()) continue;
    ++out.checked;
    const auto nums = coordinate_numerators(x, w);
    out.passed += std::any_of(nums.begin(), nums.end(), [](const PAdicApprox& v) { return v.valuation().exact; });
  }
  return out;
}

bool matrix_limit_probe(const WitnessPairDescriptor& w) {
  const unsigned top = w.precision;
  std::vector<MatrixModPk> a_seq, expected;
  for (unsigned n = 1; n <= top; ++n) {
    const auto g = w.gamma1().approx(n);
    const auto gi = g.inverse();
    MatrixModPk a(w.p, n, w.k), b(w.p, n, w.k);
    for (std::size_t i = 0; i < w.k; ++i) {
      a.set(i, i, g.residue());
      b.set(i, i, gi.residue());
    }
    if (w.k >= 2) {
      a.set(0, 1, g.residue());
      b.set(0, 1, -gi.residue());
    }
    a_seq.push_back(a);
    expected.push_back(b);
  }
  const auto b_seq = matrix_limit_inverse(a_seq);
  for (unsigned n = 1; n <= top; ++n) {
    const auto id = MatrixModPk::identity(w.p, n, w.k);
    if (a_seq[n - 1] * b_seq[n - 1] != id || b_seq[n - 1] * a_seq[n - 1] != id) return false;
    if (b_seq[n - 1] != expected[n - 1]) return false;
    if (n > 1 && b_seq[n - 1].reduce(n - 1) != b_seq[n - 2]) return false;
  }
  return true;
}

ProperInclusionCheck proper_inclusion_check(const WitnessPairDescriptor& w, unsigned m, unsigned b, std::uint64_t budget) {
  std::vector<Monomial2> monomials{{0, 0}};
  for (unsigned j = 0; j <= m + 1; ++j) monomials.emplace_back(1, j);
  const auto search = find_relation(w.gamma1(), w.gamma2(), monomials, b, w.precision, budget);
  ProperInclusionCheck c;
  c.m = m;
  c.candidates = search.candidates;
  c.pass = !search.relation;
  if (search.relation) c.relation = search.relation->to_string();
  return c;
}

PAdicProbeReport run_padic_probes(const WitnessPairDescriptor& w, std::size_t samples, std::uint64_t seed,
                                  unsigned inclusion_max) {
  PAdicProbeReport r;
  r.certificate_pass = w.certificate.pass;
  std::mt19937_64 rng(seed);
  const GridScalar gamma1{1, 1, 0};
  for (std::size_t n = 0; n < samples; ++n) {
    auto x = sample_member(Envelope::H1, w, rng);
    ++r.inclusion.checked;
    r.inclusion.passed += grid_membership(x, Envelope::H1, w) &&
                          grid_membership(apply_scalar_sigma(gamma1, x, w), Envelope::H2, w);

    auto y = sample_member(Envelope::H2, w, rng);
    ++r.reverse_inclusion.checked;
    r.reverse_inclusion.passed += grid_membership(y, Envelope::H2, w) && grid_membership(y, Envelope::H1, w);

    ++r.sigma_division.checked;
    r.sigma_division.passed +=
        apply_scalar_sigma(gamma1, x, w) == apply_scalar_sigma(gamma1, x.numerator_part(), w).divide_by_p_power(x.t());

    // p^-e z is a member exactly when every coordinate of z is divisible by p^e.
    const Envelope which = n % 2 ? Envelope::H1 : Envelope::H2;
    auto z = sample_member(which, w, rng, 3, 3);
    const unsigned e = 1 + static_cast<unsigned>(rng() % 3);
    if (n % 3 == 0) z = z.scaled(BigRational(power(w.p, e)));
    const auto nums = coordinate_numerators(z, w);
    const bool divisible = std::all_of(nums.begin(), nums.end(), [&](const PAdicApprox& v) {
      return v.valuation().value >= z.t() + e;
    });
    ++r.purity.checked;
    r.purity.passed += grid_membership(z, which, w) && grid_membership(z.divide_by_p_power(e), which, w) == divisible &&
                       (n % 3 != 0 || divisible);
  }
  r.finite_height = finite_height_probe(w, samples, seed + 1);
  const GridElement g2e1(w.p, 0, {{{0, 1, 1}, 1}});
  r.nonmembership = grid_membership(g2e1, Envelope::H1, w) && !grid_membership(g2e1, Envelope::H2, w);
  r.matrix_limit = matrix_limit_probe(w);
  for (unsigned m = 0; m <= inclusion_max; ++m) r.proper_inclusion.push_back(proper_inclusion_check(w, m, w.certificate.height));
  return r;
}

Json CompletionSumWitness::to_json() const {
  Json comps = Json::array();
  for (std::size_t i = 0; i < components.size(); ++i) {
    Json c = components[i].to_json();
    c["finite_height"] = finite_height[i].to_json();
    comps.push_back(std::move(c));
  }
  Json j;
  j["components"] = std::move(comps);
  j["rationale"] = rationale;
  return j;
}

CompletionSumWitness assemble_completion_sum(const std::vector<std::pair<std::uint64_t, unsigned>>& pairs, std::uint64_t seed,
                             const PAdicWitnessParams& params, std::size_t samples) {
  if (pairs.empty()) throw precondition_error("EmptyInput", "no (p, k) pairs given");
  std::set<std::uint64_t> seen;
  for (const auto& [p, k] : pairs) {
    if (!seen.insert(p).second) throw precondition_error("DuplicatePrime", "prime " + std::to_string(p) + " repeats");
  }
  CompletionSumWitness out;
  for (const auto& [p, k] : pairs) {
    out.components.push_back(build_padic_witness(p, k, seed, params));
    out.finite_height.push_back(finite_height_probe(out.components.back(), samples, seed));
  }
  out.rationale =
      "a homomorphism between the sums sends each H_{i,1} into H_{i,2}: a nonzero projection onto another "
      "component would be an element of infinite p_j-height, and every component is reduced";
  return out;
}

Json MixedSumWitness::to_json() const {
  Json j;
  j["K"] = k_part.to_string();
  j["C"] = c_part.to_string();
  j["D"] = d_part.to_string();
  j["sampled_family_primes"] = sampled_family_primes;
  j["G0"] = g0;
  j["G1"] = g1;
  j["k_witness"] = k_witness.to_json();
  j["rationale"] = rationale;
  return j;
}

MixedSumWitness assemble_mixed_sum(const GroupSpec& spec, std::uint64_t seed, const PAdicWitnessParams& params,
                             std::size_t family_sample, std::size_t samples) {
  auto parts = split_reduced_divisible(spec);
  if (parts.k_part.is_trivial()) {
    throw precondition_error("NoKPart", spec.to_string() + " has no p-adic completion summand");
  }
  MixedSumWitness out;
  std::map<std::uint64_t, unsigned> ranks;
  for (const auto& e : parts.k_part.entries()) {
    if (e.mult.is_infinite()) {
      throw precondition_error("InfiniteRank", e.family.to_string() + " has infinite multiplicity");
    }
    const auto m = static_cast<unsigned>(e.mult.value());
    if (e.family.kind == FamilyKind::PAdicComplete) {
      ranks[e.family.p] += m;
    } else {
      for (auto p : e.family.primes.first(family_sample)) {
        ranks[p] += m;
        out.sampled_family_primes.push_back(p);
      }
    }
  }
  out.k_part = parts.k_part;
  out.c_part = parts.c_part;
  out.d_part = parts.d_part;
  out.k_witness = assemble_completion_sum({ranks.begin(), ranks.end()}, seed, params, samples);
  auto with = [&](const std::string& k) {
    std::string s = k;
    if (!out.c_part.is_trivial()) s += " + " + out.c_part.to_string();
    if (!out.d_part.is_trivial()) s += " + " + out.d_part.to_string();
    return s;
  };
  out.g0 = with("K0");
  out.g1 = with("K1");
  out.rationale =
      "G0 and G1 are purely bi-embeddable through the K witnesses; an isomorphism would map D onto D and, "
      "K0 and K1 being torsion-free, induce an isomorphism K0 -> K1";
  return out;
}

}  // namespace sbab
