#pragma once

// Generators shared by the unit, property and acceptance tests.

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "sbab/group_spec.hpp"
#include "sbab/number_theory.hpp"

namespace sbab::testing {

/// Partitions of n into non-increasing parts.
inline std::vector<std::vector<unsigned>> partitions(unsigned n, unsigned max_part = ~0u) {
  if (n == 0) return {{}};
  std::vector<std::vector<unsigned>> out;
  for (unsigned first = std::min(n, max_part); first >= 1; --first) {
    for (auto rest : partitions(n - first, first)) {
      rest.insert(rest.begin(), first);
      out.push_back(std::move(rest));
    }
  }
  return out;
}

/// Every finite abelian p-group of order p^n, as lists of exponents.
inline std::vector<std::vector<std::uint64_t>> p_groups(std::uint64_t p, unsigned n) {
  std::vector<std::vector<std::uint64_t>> out;
  for (const auto& part : partitions(n)) {
    std::vector<std::uint64_t> divisors;
    for (auto k : part) divisors.push_back(checked_pow(p, k));
    out.push_back(std::move(divisors));
  }
  return out;
}

/// Elementary divisor lists of every abelian group of the given order.
inline std::vector<std::vector<std::uint64_t>> groups_of_order(std::uint64_t order) {
  std::vector<std::vector<std::uint64_t>> acc{{}};
  for (auto [p, e] : factorize(order)) {
    std::vector<std::vector<std::uint64_t>> next;
    for (const auto& prefix : acc) {
      for (const auto& pg : p_groups(p, e)) {
        auto v = prefix;
        v.insert(v.end(), pg.begin(), pg.end());
        next.push_back(std::move(v));
      }
    }
    acc = std::move(next);
  }
  return acc;
}

inline std::vector<std::vector<std::uint64_t>> groups_up_to(std::uint64_t max_order) {
  std::vector<std::vector<std::uint64_t>> out;
  for (std::uint64_t n = 1; n <= max_order; ++n) {
    for (auto& g : groups_of_order(n)) out.push_back(std::move(g));
  }
  return out;
}

inline GroupSpec spec_from_divisors(const std::vector<std::uint64_t>& divisors) {
  std::vector<Entry> raw;
  for (auto d : divisors) {
    raw.push_back({SummandFamily::cyclic_modulus(d), Cardinal::finite(1)});
  }
  return normalize(raw);
}

/// Seeded generator of raw entry lists over a small menu of constructors.
class SpecGen {
 public:
  explicit SpecGen(std::uint64_t seed) : rng_(seed) {}

  std::uint64_t small_prime() {
    static constexpr std::uint64_t kPrimes[] = {2, 3, 5, 7};
    return kPrimes[pick(4)];
  }

  Cardinal mult() {
    switch (pick(6)) {
      case 0: return Cardinal::aleph0();
      case 1: return Cardinal::aleph(1);
      default: return Cardinal::finite(1 + pick(3));
    }
  }

  PrimeSet prime_set() {
    switch (pick(3)) {
      case 0: return PrimeSet::all_except({});
      case 1: return PrimeSet::all_except({small_prime()});
      default: return PrimeSet::listed({small_prime(), small_prime()});
    }
  }

  SummandFamily family(bool allow_families = true) {
    const unsigned choices = allow_families ? 8 : 5;
    switch (pick(choices)) {
      case 0:
      case 1: return SummandFamily::cyclic(Prime(small_prime()), 1 + static_cast<unsigned>(pick(3)));
      case 2: return SummandFamily::prufer(Prime(small_prime()));
      case 3: return SummandFamily::rationals();
      case 4: return SummandFamily::padic(Prime(small_prime()));
      case 5: return SummandFamily::cyclic_prime_family(prime_set(), 1 + static_cast<unsigned>(pick(2)));
      case 6: return SummandFamily::padic_prime_family(prime_set());
      default: {
        ExponentSet e;
        if (pick(2) == 0) {
          e.all = false;
          e.values = {1 + static_cast<unsigned>(pick(3)), 1 + static_cast<unsigned>(pick(3))};
        }
        return SummandFamily::cyclic_exponent_family(Prime(small_prime()), e);
      }
    }
  }

  std::vector<Entry> entries(unsigned max_entries = 4, bool allow_families = true) {
    std::vector<Entry> out;
    const auto n = pick(max_entries + 1);
    for (std::uint64_t i = 0; i < n; ++i) out.push_back({family(allow_families), mult()});
    return out;
  }

  GroupSpec spec(unsigned max_entries = 4, bool allow_families = true) {
    return normalize(entries(max_entries, allow_families));
  }

  std::uint64_t pick(std::uint64_t n) { return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(rng_); }
  std::mt19937_64& rng() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace sbab::testing
