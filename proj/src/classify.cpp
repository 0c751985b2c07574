#include "sbab/classify.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "sbab/error.hpp"
#include "sbab/invariants.hpp"

namespace sbab {

std::string_view stability_name(StabilityClass c) {
  switch (c) {
    case StabilityClass::OmegaStable: return "OmegaStable";
    case StabilityClass::SuperstableNotOmegaStable: return "SuperstableNotOmegaStable";
    case StabilityClass::NotSuperstable: return "NotSuperstable";
  }
  return "?";
}

std::string_view route_name(SbRoute r) {
  switch (r) {
    case SbRoute::None: return "None";
    case SbRoute::ExternalNonSuperstable: return "ExternalNonSuperstable";
    case SbRoute::PAdicWitness: return "PAdicWitness";
    case SbRoute::SocleWitness: return "SocleWitness";
  }
  return "?";
}

Json BasicPredicates::to_json() const {
  Json j;
  j["divisible"] = divisible;
  j["reduced"] = reduced;
  j["bounded"] = bounded_exponent.has_value();
  j["exponent"] = bounded_exponent ? Json(bounded_exponent->str()) : Json(nullptr);
  return j;
}

Json SbVerdict::to_json() const {
  Json j;
  j["has_sb"] = has_sb;
  j["route"] = route_name(route);
  j["reason"] = reason;
  return j;
}

std::string GZeroIndex::to_string() const { return continuum ? "2^aleph(0)" : value.str(); }

Json GZeroIndex::to_json() const {
  Json j;
  j["kind"] = continuum ? "continuum" : "finite";
  j["value"] = to_string();
  return j;
}

Json NonUnipotentWitness::to_json() const {
  Json j;
  j["kind"] = kind == Kind::PAdicScalar ? "padic_scalar" : "prime_family_scalars";
  if (kind == Kind::PAdicScalar) {
    j["p"] = p;
  } else {
    j["family"] = family;
    Json arr = Json::array();
    for (const auto& s : sample) {
      Json e;
      e["p"] = s.p;
      e["k"] = s.k;
      e["unit"] = s.unit;
      e["order"] = s.order;
      arr.push_back(std::move(e));
    }
    j["sample"] = std::move(arr);
  }
  j["description"] = description;
  return j;
}

Json GZeroReport::to_json() const {
  Json j;
  j["index"] = index.to_json();
  j["unipotent_all"] = unipotent_all;
  j["witness"] = witness ? witness->to_json() : Json(nullptr);
  return j;
}

BasicPredicates basic_predicates(const GroupSpec& spec) {
  BasicPredicates b;
  const auto& es = spec.entries();
  b.divisible = std::all_of(es.begin(), es.end(), [](const Entry& e) { return e.family.is_divisible(); });
  b.reduced = std::none_of(es.begin(), es.end(), [](const Entry& e) { return e.family.is_divisible(); });
  auto sz = sz_invariants(spec);
  b.bounded_exponent = sz.exponent;
  return b;
}

StabilityClass stability_class(const GroupSpec& spec) {
  bool omega = true;
  for (const auto& e : spec.entries()) {
    const auto& f = e.family;
    // (A) unbounded exponents at one prime.
    if (f.kind == FamilyKind::CyclicExponentFamily) return StabilityClass::NotSuperstable;
    // (B) infinitely many primes with an infinite reduced multiplicity.
    if ((f.kind == FamilyKind::CyclicPrimeFamily || f.kind == FamilyKind::PAdicPrimeFamily) &&
        f.primes.is_cofinite() && e.mult.is_infinite()) {
      return StabilityClass::NotSuperstable;
    }
    // p^{k+1}G has infinite index in p^kG for every k.
    if (f.kind == FamilyKind::PAdicComplete && e.mult.is_infinite()) {
      return StabilityClass::NotSuperstable;
    }
    if (f.is_padic() || f.is_infinite_family()) omega = false;
  }
  return omega ? StabilityClass::OmegaStable : StabilityClass::SuperstableNotOmegaStable;
}

bool is_form_star(const GroupSpec& spec) {
  return std::all_of(spec.entries().begin(), spec.entries().end(), [](const Entry& e) {
    return e.family.kind == FamilyKind::Cyclic || e.family.kind == FamilyKind::Prufer ||
           e.family.kind == FamilyKind::Rationals;
  });
}

bool condition3(const GroupSpec& spec) {
  auto parts = split_reduced_divisible(spec);
  return parts.k_part.is_trivial() && sz_invariants(parts.c_part).bounded;
}

SbVerdict has_sb(const GroupSpec& spec) {
  SbVerdict v;
  const auto cls = stability_class(spec);
  const auto& es = spec.entries();
  const auto padic = std::find_if(es.begin(), es.end(), [](const Entry& e) { return e.family.is_padic(); });
  const auto family = std::find_if(es.begin(), es.end(), [](const Entry& e) {
    return e.family.kind == FamilyKind::CyclicPrimeFamily;
  });
  if (cls == StabilityClass::NotSuperstable) {
    v.route = SbRoute::ExternalNonSuperstable;
    v.reason = "the theory is not superstable, so it lacks the SB property (condition 4 fails)";
  } else if (padic != es.end()) {
    v.route = SbRoute::PAdicWitness;
    v.reason = "the model has a p-adic completion summand " + padic->family.to_string() +
               "; bi-embeddable non-isomorphic envelopes in a power of it give the counterexample";
  } else if (family != es.end()) {
    v.route = SbRoute::SocleWitness;
    v.reason = "the torsion part has summands at infinitely many primes (" + family->family.to_string() +
               "); the socle reduction gives the counterexample";
  } else {
    v.has_sb = true;
    v.reason = "direct sum of a divisible group and a torsion group of bounded exponent (condition 3)";
  }
  return v;
}

GZeroIndex g_zero_index(const GroupSpec& spec) {
  GZeroIndex out;
  if (stability_class(spec) != StabilityClass::OmegaStable) {
    out.continuum = true;
    return out;
  }
  // [G : nG] is finite iff n avoids every prime carrying an infinite cyclic
  // multiplicity; intersecting those nG kills the cyclic part at the other primes.
  std::map<std::uint64_t, BigInt> per_prime;
  std::set<std::uint64_t> infinite_primes;
  for (const auto& e : spec.entries()) {
    if (e.family.kind != FamilyKind::Cyclic) continue;
    const auto p = e.family.p;
    if (e.mult.is_infinite()) {
      infinite_primes.insert(p);
      continue;
    }
    auto& v = per_prime.try_emplace(p, 1).first->second;
    v *= boost::multiprecision::pow(BigInt(p), static_cast<unsigned>(e.family.k * e.mult.value()));
  }
  for (const auto& [p, v] : per_prime) {
    if (!infinite_primes.contains(p)) out.value *= v;
  }
  return out;
}

std::uint64_t order_p_minus_1_unit(std::uint64_t p, unsigned k) {
  const std::uint64_t modulus = checked_pow(p, k);
  if (p == 2) return 1;
  return pow_mod(primitive_root(p), checked_pow(p, k - 1), modulus);
}

GZeroReport unipotence_report(const GroupSpec& spec, std::size_t sample_size) {
  const auto cls = stability_class(spec);
  if (cls == StabilityClass::NotSuperstable) {
    throw precondition_error("NotApplicable",
                             "unipotence is only decided for superstable theories; " + spec.to_string() +
                                 " is not superstable");
  }
  GZeroReport r;
  r.index = g_zero_index(spec);
  if (cls == StabilityClass::OmegaStable) return r;

  r.unipotent_all = false;
  NonUnipotentWitness w;
  const auto& es = spec.entries();
  auto padic = std::find_if(es.begin(), es.end(), [](const Entry& e) { return e.family.is_padic(); });
  if (padic != es.end()) {
    w.kind = NonUnipotentWitness::Kind::PAdicScalar;
    w.p = padic->family.kind == FamilyKind::PAdicComplete ? padic->family.p
                                                          : padic->family.primes.first(1).front();
    w.description = "multiply one Zhat(" + std::to_string(w.p) +
                    ") coordinate by a unit that is not algebraic over the prime field";
  } else {
    auto fam = std::find_if(es.begin(), es.end(), [](const Entry& e) {
      return e.family.kind == FamilyKind::CyclicPrimeFamily;
    });
    w.kind = NonUnipotentWitness::Kind::PrimeFamilyScalars;
    w.family = fam->family.to_string();
    const unsigned k = fam->family.k;
    for (auto p : fam->family.primes.first(sample_size)) {
      const auto u = order_p_minus_1_unit(p, k);
      w.sample.push_back({p, k, u, multiplicative_order(u, checked_pow(p, k))});
    }
    w.description = "on each Z/p^" + std::to_string(k) +
                    " summand of the family multiply by a unit of order p-1; the orders are unbounded";
  }
  r.witness = std::move(w);
  return r;
}

Json Classification::to_json() const {
  Json j;
  j["basic"] = basic.to_json();
  j["stability"] = stability_name(stability);
  j["omega_stable"] = omega_stable;
  j["superstable"] = superstable;
  j["sb"] = sb.has_sb;
  j["condition3"] = condition3;
  j["condition4"] = condition4;
  j["agreement"] = agreement;
  j["route"] = route_name(sb.route);
  j["reason"] = sb.reason;
  j["g_zero_index"] = g_zero.to_json();
  j["unipotence"] = unipotence ? unipotence->to_json() : Json(nullptr);
  return j;
}

Classification classify(const GroupSpec& spec) {
  Classification c;
  c.basic = basic_predicates(spec);
  c.stability = stability_class(spec);
  c.sb = has_sb(spec);
  c.omega_stable = is_form_star(spec);
  c.superstable = c.stability != StabilityClass::NotSuperstable;
  c.condition3 = sbab::condition3(spec);
  c.g_zero = g_zero_index(spec);
  if (c.superstable) {
    c.unipotence = unipotence_report(spec);
    c.condition4 = c.unipotence->unipotent_all;
  }
  c.agreement = c.sb.has_sb == c.omega_stable && c.omega_stable == c.condition3 &&
                c.condition3 == c.condition4 &&
                c.omega_stable == (c.stability == StabilityClass::OmegaStable);
  return c;
}

}  // namespace sbab
