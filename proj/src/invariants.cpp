#include "sbab/invariants.hpp"

#include <algorithm>

namespace sbab {

namespace {

Cardinal capped_sum(Cardinal a, Cardinal b) { return (a + b).capped(); }

Json prime_array(const std::set<std::uint64_t>& ps) {
  Json arr = Json::array();
  for (auto p : ps) arr.push_back(p);
  return arr;
}

Json cofinite_json(const CofiniteValue& v, const char* k_name) {
  Json j;
  if (k_name != nullptr) j[k_name] = v.k;
  j["excluded"] = prime_array(v.excluded);
  j["value"] = v.value.to_json();
  return j;
}

Json prime_map_json(const std::map<std::uint64_t, Cardinal>& m) {
  Json arr = Json::array();
  for (const auto& [p, v] : m) {
    Json j;
    j["p"] = p;
    j["value"] = v.to_json();
    arr.push_back(std::move(j));
  }
  return arr;
}

Json cell_map_json(const std::map<std::pair<std::uint64_t, unsigned>, Cardinal>& m, const char* k_name) {
  Json arr = Json::array();
  for (const auto& [cell, v] : m) {
    Json j;
    j["p"] = cell.first;
    j[k_name] = cell.second;
    j["value"] = v.to_json();
    arr.push_back(std::move(j));
  }
  return arr;
}

}  // namespace

Cardinal SzInvariants::alpha_at(std::uint64_t p, unsigned k) const {
  Cardinal v;
  if (auto it = alpha.find({p, k}); it != alpha.end()) v = capped_sum(v, it->second);
  for (const auto& f : alpha_families) {
    if (f.k == k && !f.excluded.contains(p)) v = capped_sum(v, f.value);
  }
  if (auto it = alpha_every_k.find(p); it != alpha_every_k.end()) v = capped_sum(v, it->second);
  return v;
}

Cardinal SzInvariants::beta_at(std::uint64_t p) const {
  Cardinal v;
  if (auto it = beta.find(p); it != beta.end()) v = capped_sum(v, it->second);
  for (const auto& f : beta_families) {
    if (!f.excluded.contains(p)) v = capped_sum(v, f.value);
  }
  return v;
}

Cardinal SzInvariants::gamma_at(std::uint64_t p) const {
  auto it = gamma.find(p);
  return it == gamma.end() ? Cardinal{} : it->second;
}

std::set<std::uint64_t> SzInvariants::mentioned_primes() const {
  std::set<std::uint64_t> out;
  for (const auto& [cell, v] : alpha) out.insert(cell.first);
  for (const auto& f : alpha_families) out.insert(f.excluded.begin(), f.excluded.end());
  for (const auto& [p, v] : alpha_every_k) out.insert(p);
  for (const auto& [p, v] : beta) out.insert(p);
  for (const auto& f : beta_families) out.insert(f.excluded.begin(), f.excluded.end());
  for (const auto& [p, v] : gamma) out.insert(p);
  return out;
}

std::set<unsigned> SzInvariants::mentioned_exponents() const {
  std::set<unsigned> out;
  for (const auto& [cell, v] : alpha) out.insert(cell.second);
  for (const auto& f : alpha_families) out.insert(f.k);
  return out;
}

Json SzInvariants::to_json() const {
  Json j;
  j["nontrivial"] = nontrivial;
  j["bounded"] = bounded;
  j["exponent"] = exponent ? Json(exponent->str()) : Json(nullptr);
  j["alpha"] = cell_map_json(alpha, "k");
  Json fams = Json::array();
  for (const auto& f : alpha_families) fams.push_back(cofinite_json(f, "k"));
  j["alpha_families"] = std::move(fams);
  j["alpha_every_k"] = prime_map_json(alpha_every_k);
  j["beta"] = prime_map_json(beta);
  Json bfams = Json::array();
  for (const auto& f : beta_families) bfams.push_back(cofinite_json(f, nullptr));
  j["beta_families"] = std::move(bfams);
  j["gamma"] = prime_map_json(gamma);
  return j;
}

Json DivisibleInvariants::to_json() const {
  Json j;
  j["prufer"] = prime_map_json(prufer_count);
  j["rational_rank"] = rational_rank.to_json();
  return j;
}

Json UlmTable::to_json() const {
  Json j;
  j["entries"] = cell_map_json(entries, "i");
  Json fams = Json::array();
  for (const auto& f : families) {
    Json e;
    e["i"] = f.k - 1;
    e["excluded"] = prime_array(f.excluded);
    e["value"] = f.value.to_json();
    fams.push_back(std::move(e));
  }
  j["families"] = std::move(fams);
  j["every_i"] = prime_map_json(every_i);
  return j;
}

Cardinal ulm_symbolic(const GroupSpec& spec, std::uint64_t p, unsigned i) {
  return cyclic_multiplicity(spec, p, i + 1);
}

UlmTable ulm_table(const GroupSpec& spec) {
  UlmTable t;
  for (const auto& e : spec.entries()) {
    const auto& f = e.family;
    switch (f.kind) {
      case FamilyKind::Cyclic: t.entries[{f.p, f.k - 1}] += e.mult; break;
      case FamilyKind::CyclicPrimeFamily:
        t.families.push_back({f.k, f.primes.listed_primes(), e.mult});
        break;
      case FamilyKind::CyclicExponentFamily: t.every_i[f.p] += e.mult; break;
      default: break;
    }
  }
  return t;
}

DivisibleInvariants divisible_invariants(const GroupSpec& spec) {
  DivisibleInvariants d;
  for (const auto& e : spec.entries()) {
    if (e.family.kind == FamilyKind::Prufer) d.prufer_count[e.family.p] += e.mult;
    if (e.family.kind == FamilyKind::Rationals) d.rational_rank += e.mult;
  }
  return d;
}

SzInvariants sz_invariants(const GroupSpec& spec) {
  SzInvariants sz;
  sz.nontrivial = !spec.is_trivial();
  std::map<std::uint64_t, unsigned> top_exponent;
  for (const auto& e : spec.entries()) {
    const auto& f = e.family;
    const Cardinal m = e.mult.capped();
    switch (f.kind) {
      case FamilyKind::Cyclic:
        sz.alpha[{f.p, f.k}] = capped_sum(sz.alpha[{f.p, f.k}], m);
        top_exponent[f.p] = std::max(top_exponent[f.p], f.k);
        break;
      case FamilyKind::CyclicPrimeFamily:
        sz.alpha_families.push_back({f.k, f.primes.listed_primes(), m});
        sz.bounded = false;
        break;
      case FamilyKind::CyclicExponentFamily:
        // Infinitely many summands of height >= n at every n.
        sz.alpha_every_k[f.p] = capped_sum(sz.alpha_every_k[f.p], m);
        sz.beta[f.p] = Cardinal::aleph0();
        sz.gamma[f.p] = Cardinal::aleph0();
        sz.bounded = false;
        break;
      case FamilyKind::Prufer:
        sz.gamma[f.p] = capped_sum(sz.gamma[f.p], m);
        sz.bounded = false;
        break;
      case FamilyKind::Rationals: sz.bounded = false; break;
      case FamilyKind::PAdicComplete:
        sz.beta[f.p] = capped_sum(sz.beta[f.p], m);
        sz.bounded = false;
        break;
      case FamilyKind::PAdicPrimeFamily:
        sz.beta_families.push_back({0, f.primes.listed_primes(), m});
        sz.bounded = false;
        break;
      case FamilyKind::CyclicModulus: throw std::logic_error("sz_invariants: spec is not normalized");
    }
  }
  if (sz.bounded) {
    BigInt exp = 1;
    for (auto [p, k] : top_exponent) exp *= boost::multiprecision::pow(BigInt(p), k);
    sz.exponent = exp;
  }
  return sz;
}

bool sz_equivalent(const SzInvariants& a, const SzInvariants& b) {
  if (a.nontrivial != b.nontrivial || a.bounded != b.bounded) return false;
  if (a.bounded && a.exponent != b.exponent) return false;

  // Off the mentioned primes and exponents every table takes its generic
  // value, so one unmentioned prime and one large exponent stand for the rest.
  std::set<std::uint64_t> primes = a.mentioned_primes();
  for (auto p : b.mentioned_primes()) primes.insert(p);
  std::uint64_t generic = 2;
  while (primes.contains(generic)) generic = next_prime(generic);
  primes.insert(generic);

  std::set<unsigned> exps = a.mentioned_exponents();
  for (auto k : b.mentioned_exponents()) exps.insert(k);
  exps.insert(exps.empty() ? 1 : *exps.rbegin() + 1);

  for (auto p : primes) {
    if (a.beta_at(p) != b.beta_at(p) || a.gamma_at(p) != b.gamma_at(p)) return false;
    for (auto k : exps) {
      if (a.alpha_at(p, k) != b.alpha_at(p, k)) return false;
    }
  }
  return true;
}

bool elem_equivalent(const GroupSpec& a, const GroupSpec& b) {
  return sz_equivalent(sz_invariants(a), sz_invariants(b));
}

bool iso_standard(const GroupSpec& a, const GroupSpec& b) { return a == b; }

}  // namespace sbab
