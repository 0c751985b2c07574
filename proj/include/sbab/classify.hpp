#pragma once

// Stability class, SB verdict, G-zero index and unipotence for group specs.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sbab/group_spec.hpp"
#include "sbab/number_theory.hpp"

namespace sbab {

enum class StabilityClass { OmegaStable, SuperstableNotOmegaStable, NotSuperstable };
std::string_view stability_name(StabilityClass c);

enum class SbRoute { None, ExternalNonSuperstable, PAdicWitness, SocleWitness };
std::string_view route_name(SbRoute r);

struct BasicPredicates {
  bool divisible = false;
  bool reduced = false;
  std::optional<BigInt> bounded_exponent;  // empty when unbounded

  Json to_json() const;
};

struct SbVerdict {
  bool has_sb = false;
  SbRoute route = SbRoute::None;
  std::string reason;

  Json to_json() const;
};

/// [G : G0] where G0 is the intersection of the finite-index subgroups nG.
struct GZeroIndex {
  bool continuum = false;
  BigInt value = 1;  // meaningful when !continuum

  std::string to_string() const;
  Json to_json() const;
};

/// A non-unipotent automorphism of G/G0.
struct NonUnipotentWitness {
  enum class Kind { PAdicScalar, PrimeFamilyScalars };
  struct PrimeScalar {
    std::uint64_t p;
    unsigned k;
    std::uint64_t unit;   // acts on Z/p^k
    std::uint64_t order;  // p - 1
  };

  Kind kind = Kind::PAdicScalar;
  std::uint64_t p = 0;              // PAdicScalar: the completion's prime
  std::string family;              // PrimeFamilyScalars: the family acted on
  std::vector<PrimeScalar> sample;  // PrimeFamilyScalars: first primes of the family
  std::string description;

  Json to_json() const;
};

struct GZeroReport {
  GZeroIndex index;
  bool unipotent_all = true;
  std::optional<NonUnipotentWitness> witness;

  Json to_json() const;
};

BasicPredicates basic_predicates(const GroupSpec& spec);
StabilityClass stability_class(const GroupSpec& spec);
SbVerdict has_sb(const GroupSpec& spec);

/// Only Cyclic singletons, Prufer and Q entries.
bool is_form_star(const GroupSpec& spec);
/// Divisible part plus a torsion part of bounded exponent.
bool condition3(const GroupSpec& spec);

GZeroIndex g_zero_index(const GroupSpec& spec);

/// Throws "NotApplicable" on non-superstable specs. The per-prime sample
/// covers the first `sample_size` primes of a cyclic prime family.
GZeroReport unipotence_report(const GroupSpec& spec, std::size_t sample_size = 8);

/// Unit of multiplicative order p - 1 in Z/p^k (Teichmuller lift of a primitive root).
std::uint64_t order_p_minus_1_unit(std::uint64_t p, unsigned k);

struct Classification {
  BasicPredicates basic;
  StabilityClass stability = StabilityClass::OmegaStable;
  SbVerdict sb;
  bool omega_stable = false;
  bool superstable = false;
  bool condition3 = false;
  bool condition4 = false;
  bool agreement = false;  // the four conditions coincide
  GZeroIndex g_zero;
  std::optional<GZeroReport> unipotence;

  Json to_json() const;
};

Classification classify(const GroupSpec& spec);

}  // namespace sbab
