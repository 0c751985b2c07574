// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <bit>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <string>

#include "sbab/classify.hpp"
#include "sbab/finite_oracle.hpp"
#include "sbab/invariants.hpp"
#include "sbab/padic.hpp"
#include "sbab/witness_padic.hpp"
#include "sbab/witness_socle.hpp"
#include "support.hpp"

namespace {

using namespace sbab;

struct Outcome {
  bool pass = false;
  std::string detail;
};

// Subgroups of a group of order <= 128 as bitmasks.
using Mask = std::pair<std::uint64_t, std::uint64_t>;

Mask to_mask(const ElementSet& h) {
  Mask m{0, 0};
  for (std::size_t x = 0; x < h.size(); ++x) {
    if (h[x]) (x < 64 ? m.first : m.second) |= std::uint64_t{1} << (x % 64);
  }
  return m;
}

unsigned size_of(const Mask& m) { return std::popcount(m.first) + std::popcount(m.second); }

// Complement search: H is a summand iff some subgroup K has |H||K| = |G| and H meet K = 0.
bool is_summand(const Mask& h, const std::vector<Mask>& subgroups, std::uint64_t order) {
  const auto hs = size_of(h);
  for (const auto& k : subgroups) {
    if (hs * size_of(k) != order) continue;
    if (((h.first & k.first) & ~std::uint64_t{1}) == 0 && (h.second & k.second) == 0) return true;
  }
  return false;
}

Outcome ulm_agreement() {
  std::uint64_t groups = 0, checks = 0, mismatches = 0;
  for (std::uint64_t p = 2; p <= 1024; p = next_prime(p)) {
    for (unsigned n = 1; checked_pow(p, n) <= 1024; ++n) {
      for (const auto& divisors : testing::p_groups(p, n)) {
        const auto spec = testing::spec_from_divisors(divisors);
        const FiniteAbelianGroup g(divisors);
        ++groups;
        for (unsigned i = 0; i <= n; ++i) {
          ++checks;
          if (ulm_symbolic(spec, p, i) != Cardinal::finite(ulm_bruteforce(g, p, i))) ++mismatches;
        }
      }
    }
  }
  return {mismatches == 0 && groups > 0, std::to_string(groups) + " p-groups, " + std::to_string(checks) +
                                              " Ulm entries, " + std::to_string(mismatches) + " mismatches"};
}

Outcome finite_collapse() {
  const auto all = testing::groups_up_to(512);
  std::vector<GroupSpec> specs;
  std::vector<FiniteAbelianGroup> groups;
  for (const auto& d : all) {
    specs.push_back(testing::spec_from_divisors(d));
    groups.push_back(FiniteAbelianGroup::realize(specs.back()));
  }
  std::uint64_t pairs = 0, mismatches = 0, iso = 0;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    for (std::size_t j = 0; j < specs.size(); ++j) {
      const bool brute = iso_finite_bruteforce(groups[i], groups[j]);
      ++pairs;
      iso += brute;
      if (elem_equivalent(specs[i], specs[j]) != brute) ++mismatches;
    }
  }
  return {mismatches == 0 && iso == specs.size(), std::to_string(specs.size()) + " groups, " + std::to_string(pairs) +
                                                      " pairs, " + std::to_string(mismatches) + " mismatches"};
}

Outcome predicate_consistency() {
  testing::SpecGen gen(2024);
  std::uint64_t disagreements = 0, sb = 0;
  const int n = 1000;
  for (int t = 0; t < n; ++t) {
    const auto g = gen.spec(5);
    const bool a = has_sb(g).has_sb, b = is_form_star(g), c = condition3(g);
    sb += a;
    if (a != b || b != c) ++disagreements;
  }
  return {disagreements == 0, std::to_string(n) + " random specs (" + std::to_string(sb) + " with SB), " +
                                  std::to_string(disagreements) + " disagreements"};
}

Outcome purity_oracle() {
  std::uint64_t groups = 0, subgroups = 0, summands = 0, failures = 0;
  for (const auto& d : testing::groups_up_to(128)) {
    if (d.empty()) continue;
    const FiniteAbelianGroup g(d);
    const auto subs = enumerate_subgroups(g);
    std::vector<Mask> masks;
    for (const auto& h : subs) masks.push_back(to_mask(h));
    ++groups;
    for (std::size_t i = 0; i < subs.size(); ++i) {
      const auto& h = subs[i];
      ++subgroups;
      if (is_summand(masks[i], masks, g.order())) {
        ++summands;
        if (!is_pure_subgroup_bruteforce(g, h)) ++failures;
      }
    }
    if (!is_pure_subgroup_bruteforce(g, ElementSet(g.order(), true))) ++failures;
    ElementSet zero(g.order(), false);
    zero[0] = true;
    if (!is_pure_subgroup_bruteforce(g, zero)) ++failures;
  }
  const FiniteAbelianGroup z4({4});
  const bool two_not_pure = !is_pure_subgroup_bruteforce(z4, std::vector<FiniteAbelianGroup::Element>{2});
  return {failures == 0 && two_not_pure, std::to_string(groups) + " groups, " + std::to_string(subgroups) +
                                             " subgroups, " + std::to_string(summands) + " summands, " +
                                             std::to_string(failures) + " failures, {0,2} in Z/4 " +
                                             (two_not_pure ? "not pure" : "pure")};
}

Outcome padic_probes() {
  const auto w = build_padic_witness(5, 2, 0);
  const auto r = run_padic_probes(w, 100, 0);
  const bool pass = r.certificate_pass && w.certificate.degree == 2 && w.certificate.height == 2 &&
                    w.certificate.precision == 40 && r.inclusion.ok() && r.inclusion.checked == 100 &&
                    r.nonmembership && r.purity.ok() && r.purity.checked == 100 && r.matrix_limit && r.all_pass();
  return {pass, "certificate " + std::to_string(w.certificate.candidates) + " candidates, inclusion " +
                    std::to_string(r.inclusion.passed) + "/" + std::to_string(r.inclusion.checked) + ", purity " +
                    std::to_string(r.purity.passed) + "/" + std::to_string(r.purity.checked) + ", gamma2 e1 " +
                    (r.nonmembership ? "outside" : "inside") + " H2, matrix limit " +
                    (r.matrix_limit ? "ok" : "failed")};
}

Outcome socle_probes() {
  const auto pw = PrimeWindow::uniform(PrimeSet::all_except({2}), 1, 50);
  const auto w = socle_witness_build(pw, 0);
  const auto r = run_socle_probes(w, 1000, 100, 0, 5);
  bool prop = r.proper_inclusion.size() == 6;
  for (const auto& c : r.proper_inclusion) prop = prop && c.pass;
  const bool pass = r.certificate_pass && w.certificate.degree == 2 && w.certificate.height == 2 &&
                    w.certificate.threshold == 5 && r.alpha_checks == 1000 && r.alpha_passed == 1000 &&
                    r.sigma2_excluded && r.base_point_member && prop && r.all_pass();
  return {pass, "certificate min count " + std::to_string(w.certificate.min_count) + "/50 over " +
                    std::to_string(w.certificate.polynomials) + " polynomials, alpha " +
                    std::to_string(r.alpha_passed) + "/" + std::to_string(r.alpha_checks) + ", sigma2(a) " +
                    (r.sigma2_excluded ? "outside" : "inside") + " H2, proper inclusion m<=5 " + (prop ? "ok" : "failed")};
}

Outcome completion_divisibility() {
  std::mt19937_64 rng(7);
  std::uint64_t checks = 0, mismatches = 0;
  for (std::uint64_t p : {2, 3, 5}) {
    for (int t = 0; t < 1000; ++t) {
      BigInt num = BigInt(rng() % 1000000 + 1) * boost::multiprecision::pow(BigInt(p), static_cast<unsigned>(rng() % 45));
      if (rng() % 2) num = -num;
      BigInt den = rng() % 100000 + 1;
      while (den % p == 0) den /= p;
      const BigRational x(num, den);
      const auto approx = PAdicApprox::from_rational(p, 40, x);
      for (unsigned k = 0; k <= 39; ++k) {
        // x = p^k y with y in Z_(p) iff p^k divides the numerator.
        const bool exact = numerator(x) % power(p, k) == 0;
        const bool embedded = approx.residue() % power(p, k) == 0;
        ++checks;
        if (exact != embedded) ++mismatches;
      }
    }
  }
  return {mismatches == 0, std::to_string(checks) + " verdicts, " + std::to_string(mismatches) + " mismatches"};
}

Outcome classifier_spot_checks() {
  std::string failed;
  auto expect = [&](const std::string& spec, bool ok) {
    if (!ok) failed += (failed.empty() ? "" : ", ") + spec;
  };
  for (const char* s : {"Zhat(2)", "Zhat(3)", "Zhat(5)", "Zhat(7)"}) expect(s, !has_sb(parse_spec(s)).has_sb);
  expect("sumP(all\\{2}; Z/p^1)", !has_sb(parse_spec("sumP(all\\{2}; Z/p^1)")).has_sb);
  expect("Z/2^w + Prufer(3)^w + Q", has_sb(parse_spec("Z/2^w + Prufer(3)^w + Q")).has_sb);
  const auto k = parse_spec("sumK(2; all)");
  expect("sumK(2; all)", stability_class(k) == StabilityClass::NotSuperstable && !has_sb(k).has_sb);
  return {failed.empty(), failed.empty() ? "7 statements match" : "mismatch on " + failed};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit;  // seconds
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {1, "Ulm agreement, p-groups of order <= 2^10", 60, ulm_agreement},
      {2, "finite equivalence = isomorphism, order <= 512", 120, finite_collapse},
      {3, "SB, omega-stable form and condition 3 agree", 10, predicate_consistency},
      {4, "purity oracle, order <= 128", 60, purity_oracle},
      {5, "p-adic witness probes, p=5 k=2 N=40 d=2 B=2", 60, padic_probes},
      {6, "socle witness probes, odd primes W=50 threshold 5", 120, socle_probes},
      {7, "completion divisibility, p in {2,3,5} N=40", 10, completion_divisibility},
      {8, "classifier spot checks", 1, classifier_spot_checks},
  };
  bool all = true;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs >= c.limit) {
      o.pass = false;
      o.detail += "; over the " + std::to_string(static_cast<int>(c.limit)) + "s limit";
    }
    all = all && o.pass;
    char time[32];
    std::snprintf(time, sizeof time, "%.2fs", secs);
    std::cout << "criterion " << c.id << ": " << (o.pass ? "PASS" : "FAIL") << "  " << c.name << "  [" << o.detail
              << "; " << time << "]" << std::endl;
  }
  return all ? 0 : 1;
}
