#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace sbab {

using BigInt = boost::multiprecision::cpp_int;

/// Deterministic Miller-Rabin for the full 64-bit range.
bool is_prime(std::uint64_t n);

/// Prime factorization as ascending (prime, exponent) pairs. n must be >= 1.
std::vector<std::pair<std::uint64_t, unsigned>> factorize(std::uint64_t n);

/// Smallest prime strictly greater than n.
std::uint64_t next_prime(std::uint64_t n);

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m);
std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t m);

/// Inverse of a modulo m; a and m must be coprime.
std::uint64_t inv_mod(std::uint64_t a, std::uint64_t m);

/// Multiplicative order of a unit a modulo m.
std::uint64_t multiplicative_order(std::uint64_t a, std::uint64_t m);

/// Smallest generator of the unit group of Z/p for an odd prime p (1 for p = 2).
std::uint64_t primitive_root(std::uint64_t p);

/// p-adic valuation of a nonzero integer.
unsigned valuation(std::uint64_t n, std::uint64_t p);

/// Checked p^k; throws std::overflow_error past 64 bits.
std::uint64_t checked_pow(std::uint64_t p, unsigned k);

}  // namespace sbab
