#include "sbab/witness_socle.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "sbab/error.hpp"

namespace sbab {

namespace {

std::uint64_t mod_big(const BigInt& c, std::uint64_t p) {
  BigInt r = c % p;
  if (r < 0) r += p;
  return static_cast<std::uint64_t>(r);
}

std::uint64_t mod_int(std::int64_t c, std::uint64_t p) {
  const auto pp = static_cast<std::int64_t>(p);
  return static_cast<std::uint64_t>(((c % pp) + pp) % pp);
}

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t out = 0;
  if (__builtin_mul_overflow(a, b, &out)) throw precondition_error("Overflow", "alpha denominator exceeds 64 bits");
  return out;
}

std::mt19937_64 seeded(std::uint64_t seed, std::uint64_t p) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(p), static_cast<std::uint32_t>(p >> 32)};
  return std::mt19937_64(seq);
}

std::string vector_text(const std::vector<std::uint64_t>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s + "]";
}

}  // namespace

// ---------------------------------------------------------------- PrimeWindow

PrimeWindow PrimeWindow::uniform(const PrimeSet& s, std::uint64_t r, std::size_t w) {
  if (r == 0) throw precondition_error("ZeroMultiplicity", "r must be >= 1");
  return from_socle(normalize({{SummandFamily::cyclic_prime_family(s, 1), Cardinal::finite(r)}}), w);
}

PrimeWindow PrimeWindow::from_socle(const GroupSpec& socle, std::size_t w) {
  if (w == 0) throw precondition_error("EmptyWindow", "window size must be >= 1");
  bool infinite = false;
  for (const auto& e : socle.entries()) {
    const auto& f = e.family;
    const bool elementary = (f.kind == FamilyKind::Cyclic || f.kind == FamilyKind::CyclicPrimeFamily) && f.k == 1;
    if (!elementary) throw precondition_error("NotASocle", f.to_string() + " is not a sum of Z/p");
    if (e.mult.is_infinite()) {
      throw precondition_error("NotASocle", f.to_string() + " has infinite multiplicity");
    }
    if (f.kind == FamilyKind::CyclicPrimeFamily && f.primes.is_cofinite()) infinite = true;
  }
  if (!infinite) throw precondition_error("FinitePrimeSet", socle.to_string() + " is supported on finitely many primes");
  PrimeWindow pw;
  pw.spec_ = socle;
  pw.description_ = socle.to_string();
  for (std::uint64_t p = 2; pw.primes_.size() < w; p = next_prime(p)) {
    if (pw.r(p) > 0) pw.primes_.push_back(p);
  }
  return pw;
}

bool PrimeWindow::contains(std::uint64_t p) const { return r(p) > 0; }

std::uint64_t PrimeWindow::r(std::uint64_t p) const {
  if (!is_prime(p)) return 0;
  return cyclic_multiplicity(spec_, p, 1).value();
}

Json PrimeWindow::to_json() const {
  Json rs = Json::array();
  for (auto p : primes_) rs.push_back(r(p));
  return Json{{"S", description_}, {"W", primes_.size()}, {"primes", primes_}, {"r", rs}};
}

// ------------------------------------------------------------------ SigmaPair

SigmaPair::SigmaPair(std::uint64_t seed, std::map<std::uint64_t, std::pair<std::uint64_t, std::uint64_t>> table)
    : seed_(seed), table_(std::move(table)) {
  for (const auto& [p, st] : table_) {
    if (st.first % p == 0 || st.second % p == 0) {
      throw precondition_error("NonUnit", "sigma or tau vanishes mod " + std::to_string(p));
    }
  }
}

std::pair<std::uint64_t, std::uint64_t> SigmaPair::at(std::uint64_t p) const {
  if (auto it = table_.find(p); it != table_.end()) return it->second;
  return draw(p, seed_, false);
}

std::pair<std::uint64_t, std::uint64_t> SigmaPair::draw(std::uint64_t p, std::uint64_t seed, bool diagonal) {
  if (p == 2) return {1, 1};
  auto rng = seeded(seed, p);
  const std::uint64_t s = 1 + rng() % (p - 1);
  const std::uint64_t t = diagonal ? s : 1 + rng() % (p - 1);
  return {s, t};
}

Json SigmaPair::to_json() const {
  Json rows = Json::array();
  for (const auto& [p, st] : table_) rows.push_back({{"p", p}, {"sigma", st.first}, {"tau", st.second}});
  return Json{{"table", rows}, {"tail_rule", {{"seed", seed_}, {"guarantee", "none"}}}};
}

// ------------------------------------------------------------- avoidance scan

Json AvoidanceCertificate::to_json() const {
  Json hist = Json::array();
  for (const auto& [count, n] : histogram) hist.push_back({count, n});
  return Json{{"d", degree},          {"B", height},        {"threshold", threshold}, {"W", window},
              {"polynomials", polynomials}, {"min_count", min_count}, {"argmin", argmin},
              {"histogram", hist},     {"restarts", restarts}, {"verdict", pass ? "pass" : "fail"}};
}

AvoidanceCertificate avoidance_scan(const PrimeWindow& pw, const SigmaPair& sigmas, const std::vector<ScanTerm>& terms,
                                    std::size_t threshold) {
  if (terms.empty()) throw precondition_error("EmptyScan", "no scan terms");
  const auto& primes = pw.primes();
  const std::size_t w = primes.size(), t = terms.size();
  std::vector<std::uint64_t> val(t * w), wrap(t * w), sum(w, 0);
  for (std::size_t k = 0; k < w; ++k) {
    const auto p = primes[k];
    const auto [s, u] = sigmas.at(p);
    for (std::size_t i = 0; i < t; ++i) {
      const auto [a, b] = terms[i].monomial;
      const auto v = mul_mod(pow_mod(s, a, p), pow_mod(u, b, p), p);
      val[i * w + k] = v;
      wrap[i * w + k] = mul_mod(mod_int(terms[i].hi - terms[i].lo, p), v, p);
      sum[k] = (sum[k] + mul_mod(mod_int(terms[i].lo, p), v, p)) % p;
    }
  }
  std::vector<int> c(t);
  std::size_t nonzero_coeffs = 0;
  for (std::size_t i = 0; i < t; ++i) {
    if (terms[i].lo > terms[i].hi) throw precondition_error("EmptyScan", "empty coefficient range");
    c[i] = terms[i].lo;
    if (c[i] != 0) ++nonzero_coeffs;
  }
  std::size_t count = 0;
  for (std::size_t k = 0; k < w; ++k) count += sum[k] != 0;

  std::vector<std::uint64_t> hist(w + 1, 0);
  std::size_t best = w + 1;
  std::vector<int> best_c;
  std::uint64_t polys = 0;
  for (;;) {
    if (nonzero_coeffs > 0) {
      ++hist[count];
      ++polys;
      if (count < best) {
        best = count;
        best_c = c;
      }
    }
    std::size_t i = 0;
    for (; i < t; ++i) {
      const std::uint64_t* v = &val[i * w];
      if (c[i] < terms[i].hi) {
        if (c[i] == 0) ++nonzero_coeffs;
        ++c[i];
        if (c[i] == 0) --nonzero_coeffs;
        for (std::size_t k = 0; k < w; ++k) {
          const bool was = sum[k] != 0;
          auto x = sum[k] + v[k];
          if (x >= primes[k]) x -= primes[k];
          sum[k] = x;
          count += (x != 0) - was;
        }
        break;
      }
      const std::uint64_t* r = &wrap[i * w];
      if (c[i] == 0) ++nonzero_coeffs;
      c[i] = terms[i].lo;
      if (c[i] == 0) --nonzero_coeffs;
      for (std::size_t k = 0; k < w; ++k) {
        const bool was = sum[k] != 0;
        auto x = sum[k] + primes[k] - r[k];
        if (x >= primes[k]) x -= primes[k];
        sum[k] = x;
        count += (x != 0) - was;
      }
    }
    if (i == t) break;
  }

  AvoidanceCertificate cert;
  cert.threshold = threshold;
  cert.window = w;
  cert.polynomials = polys;
  cert.min_count = polys ? best : 0;
  for (std::size_t k = 0; k <= w; ++k) {
    if (hist[k]) cert.histogram[k] = hist[k];
  }
  if (!best_c.empty()) {
    std::map<Monomial2, BigInt> q;
    for (std::size_t j = 0; j < t; ++j) q[terms[j].monomial] += best_c[j];
    cert.argmin = IntPolynomial2(q).to_string();
  }
  cert.pass = polys > 0 && cert.min_count >= threshold;
  return cert;
}

namespace {

std::uint64_t box_size(const std::vector<ScanTerm>& terms, std::uint64_t budget) {
  std::uint64_t n = 1;
  for (const auto& t : terms) {
    const auto width = static_cast<std::uint64_t>(t.hi - t.lo + 1);
    if (__builtin_mul_overflow(n, width, &n) || n > budget) {
      throw budget_error("avoidance scan exceeds the candidate budget of " + std::to_string(budget));
    }
  }
  return n;
}

}  // namespace

ChosenSigmas choose_sigmas(const PrimeWindow& pw, const SocleParams& params, std::uint64_t seed) {
  std::vector<ScanTerm> terms;
  const int b = static_cast<int>(params.height);
  for (unsigned i = 0; i <= params.degree; ++i) {
    for (unsigned j = 0; j <= params.degree; ++j) terms.push_back({{i, j}, -b, b});
  }
  box_size(terms, params.budget);
  for (unsigned attempt = 0; attempt <= params.max_restarts; ++attempt) {
    const std::uint64_t s = seed + attempt * 0x9E3779B97F4A7C15ULL;
    std::map<std::uint64_t, std::pair<std::uint64_t, std::uint64_t>> table;
    for (auto p : pw.primes()) table[p] = SigmaPair::draw(p, s, params.diagonal_only);
    SigmaPair sigmas(s, std::move(table));
    auto cert = avoidance_scan(pw, sigmas, terms, params.threshold);
    cert.degree = params.degree;
    cert.height = params.height;
    cert.restarts = attempt;
    if (cert.pass) return {std::move(sigmas), std::move(cert)};
  }
  throw precondition_error("SearchFailed", "no scalar pair in " + std::to_string(params.max_restarts + 1) +
                                               " draws keeps every bounded q nonzero at " +
                                               std::to_string(params.threshold) + " of " +
                                               std::to_string(pw.size()) + " window primes");
}

// ------------------------------------------------------------ ProductElement

std::vector<std::uint64_t> BasePoint::at(std::uint64_t p, std::uint64_t r) const {
  if (auto it = overrides.find(p); it != overrides.end()) return it->second;
  return std::vector<std::uint64_t>(r, 1);
}

namespace {

// Component of alpha_{1/n}[q](a) at p.
std::vector<std::uint64_t> tail_value(std::uint64_t n, const std::map<Monomial2, BigInt>& tail, std::uint64_t p,
                                      const SocleContext& ctx) {
  const auto r = ctx.window.r(p);
  std::vector<std::uint64_t> out(r, 0);
  if (tail.empty() || n % p == 0) return out;
  const auto [s, t] = ctx.sigmas.at(p);
  std::uint64_t q = 0;
  for (const auto& [m, c] : tail) {
    q = (q + mul_mod(mod_big(c, p), mul_mod(pow_mod(s, m.first, p), pow_mod(t, m.second, p), p), p)) % p;
  }
  q = mul_mod(q, inv_mod(n % p, p), p);
  const auto a = ctx.base.at(p, r);
  for (std::size_t i = 0; i < r; ++i) out[i] = mul_mod(q, a.at(i) % p, p);
  return out;
}

std::set<std::uint64_t> window_factors(std::uint64_t n, const SocleContext& ctx) {
  std::set<std::uint64_t> out;
  for (auto [q, e] : factorize(n)) {
    if (ctx.window.contains(q)) out.insert(q);
  }
  return out;
}

template <class Target>
ProductElement rebuild(const std::set<std::uint64_t>& affected, Target target, std::uint64_t n,
                       std::map<Monomial2, BigInt> tail, const SocleContext& ctx) {
  std::map<std::uint64_t, std::vector<std::uint64_t>> ex;
  for (auto p : affected) {
    auto want = target(p);
    const auto have = tail_value(n, tail, p, ctx);
    for (std::size_t i = 0; i < want.size(); ++i) want[i] = (want[i] + p - have[i]) % p;
    ex[p] = std::move(want);
  }
  return ProductElement(std::move(ex), n, std::move(tail), ctx);
}

}  // namespace

ProductElement::ProductElement(std::map<std::uint64_t, std::vector<std::uint64_t>> exceptions, std::uint64_t n,
                               std::map<Monomial2, BigInt> tail, const SocleContext& ctx)
    : n_(n) {
  if (n == 0) throw precondition_error("ZeroDenominator", "alpha_{1/0} is undefined");
  for (auto& [m, c] : tail) {
    if (c != 0) tail_.emplace(m, std::move(c));
  }
  for (auto& [p, v] : exceptions) {
    const auto r = ctx.window.r(p);
    if (r == 0) throw precondition_error("NotInS", std::to_string(p) + " is not in S");
    if (v.size() != r) throw precondition_error("ShapeMismatch", "component at " + std::to_string(p) + " has wrong length");
    for (auto& x : v) x %= p;
    exceptions_.emplace(p, std::move(v));
  }
  if (tail_.empty()) n_ = 1;
  BigInt g = n_;
  for (const auto& [m, c] : tail_) g = gcd(g, BigInt(abs(c)));
  const auto gg = static_cast<std::uint64_t>(g);
  if (gg > 1) {
    // Only primes dividing the old n change value; move the difference into the exceptions.
    std::map<Monomial2, BigInt> reduced;
    for (const auto& [m, c] : tail_) reduced.emplace(m, BigInt(c / gg));
    const auto m = n_ / gg;
    for (auto p : window_factors(n_, ctx)) {
      auto& e = exceptions_.try_emplace(p, ctx.window.r(p), 0).first->second;
      const auto now = tail_value(m, reduced, p, ctx);
      for (std::size_t i = 0; i < e.size(); ++i) e[i] = (e[i] + p - now[i]) % p;
    }
    tail_ = std::move(reduced);
    n_ = m;
  }
  std::erase_if(exceptions_, [](const auto& kv) {
    return std::all_of(kv.second.begin(), kv.second.end(), [](auto x) { return x == 0; });
  });
}

ProductElement ProductElement::raw(std::map<std::uint64_t, std::vector<std::uint64_t>> exceptions, std::uint64_t n,
                                   std::map<Monomial2, BigInt> tail) {
  ProductElement x;
  x.exceptions_ = std::move(exceptions);
  x.n_ = n;
  x.tail_ = std::move(tail);
  return x;
}

bool ProductElement::is_canonical() const {
  if (n_ == 0) return false;
  if (tail_.empty()) return n_ == 1 && std::all_of(exceptions_.begin(), exceptions_.end(), [](const auto& kv) {
                                 return std::any_of(kv.second.begin(), kv.second.end(), [](auto x) { return x != 0; });
                               });
  BigInt g = n_;
  for (const auto& [m, c] : tail_) {
    if (c == 0) return false;
    g = gcd(g, BigInt(abs(c)));
  }
  if (g != 1) return false;
  for (const auto& [p, v] : exceptions_) {
    if (std::all_of(v.begin(), v.end(), [](auto x) { return x == 0; })) return false;
    if (std::any_of(v.begin(), v.end(), [p](auto x) { return x >= p; })) return false;
  }
  return true;
}

std::vector<std::uint64_t> ProductElement::evaluate(std::uint64_t p, const SocleContext& ctx) const {
  if (!ctx.window.contains(p)) throw precondition_error("NotInS", std::to_string(p) + " is not in S");
  auto out = tail_value(n_, tail_, p, ctx);
  if (auto it = exceptions_.find(p); it != exceptions_.end()) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = (out[i] + it->second[i]) % p;
  }
  return out;
}

std::string ProductElement::to_string() const {
  std::string s;
  if (!tail_.empty()) {
    s = "[" + IntPolynomial2(tail_).to_string() + "](a)";
    if (n_ != 1) s = "alpha(1/" + std::to_string(n_) + ")" + s;
  }
  if (!exceptions_.empty()) {
    std::string g = "g{";
    bool first = true;
    for (const auto& [p, v] : exceptions_) {
      g += (first ? "" : ", ") + std::to_string(p) + ":" + vector_text(v);
      first = false;
    }
    s += (s.empty() ? "" : " + ") + g + "}";
  }
  return s.empty() ? "0" : s;
}

Json ProductElement::to_json() const {
  Json ex = Json::array();
  for (const auto& [p, v] : exceptions_) ex.push_back({{"p", p}, {"value", v}});
  return Json{{"exceptions", ex}, {"n", n_}, {"tail", IntPolynomial2(tail_).to_json()}, {"text", to_string()}};
}

ProductElement add(const ProductElement& x, const ProductElement& y, const SocleContext& ctx) {
  const auto n = std::lcm(x.n(), y.n());
  std::map<Monomial2, BigInt> tail;
  for (const auto& [m, c] : x.tail()) tail[m] += c * (n / x.n());
  for (const auto& [m, c] : y.tail()) tail[m] += c * (n / y.n());
  auto affected = window_factors(n, ctx);
  for (const auto& [p, v] : x.exceptions()) affected.insert(p);
  for (const auto& [p, v] : y.exceptions()) affected.insert(p);
  return rebuild(
      affected,
      [&](std::uint64_t p) {
        auto a = x.evaluate(p, ctx);
        const auto b = y.evaluate(p, ctx);
        for (std::size_t i = 0; i < a.size(); ++i) a[i] = (a[i] + b[i]) % p;
        return a;
      },
      n, std::move(tail), ctx);
}

ProductElement alpha_inv(const ProductElement& x, std::uint64_t n, const SocleContext& ctx) {
  if (n == 0) throw precondition_error("ZeroDenominator", "alpha_{1/0} is undefined");
  if (n == 1) return x;
  const auto nn = x.tail().empty() ? 1 : checked_mul(x.n(), n);
  auto affected = window_factors(checked_mul(x.n(), n), ctx);
  for (const auto& [p, v] : x.exceptions()) affected.insert(p);
  return rebuild(
      affected,
      [&](std::uint64_t p) {
        auto a = x.evaluate(p, ctx);
        if (n % p == 0) return std::vector<std::uint64_t>(a.size(), 0);
        const auto inv = inv_mod(n % p, p);
        for (auto& v : a) v = mul_mod(v, inv, p);
        return a;
      },
      nn, x.tail(), ctx);
}

ProductElement apply_sigma(const ProductElement& x, unsigned a, unsigned b, const SocleContext& ctx) {
  std::map<Monomial2, BigInt> tail;
  for (const auto& [m, c] : x.tail()) tail.emplace(Monomial2{m.first + a, m.second + b}, c);
  std::set<std::uint64_t> affected;
  for (const auto& [p, v] : x.exceptions()) affected.insert(p);
  return rebuild(
      affected,
      [&](std::uint64_t p) {
        auto v = x.evaluate(p, ctx);
        const auto [s, t] = ctx.sigmas.at(p);
        const auto f = mul_mod(pow_mod(s, a, p), pow_mod(t, b, p), p);
        for (auto& e : v) e = mul_mod(e, f, p);
        return v;
      },
      x.n(), std::move(tail), ctx);
}

bool product_membership(const ProductElement& x, SocleEnvelope which) {
  if (!x.is_canonical()) throw precondition_error("NonCanonical", x.to_string() + " is not in canonical form");
  if (which == SocleEnvelope::H1) return true;
  return std::all_of(x.tail().begin(), x.tail().end(),
                     [](const auto& kv) { return kv.first.first >= 1 || kv.first.second == 0; });
}

ProductElement sample_product_element(SocleEnvelope which, const SocleContext& ctx, std::mt19937_64& rng) {
  const auto& primes = ctx.window.primes();
  std::map<std::uint64_t, std::vector<std::uint64_t>> ex;
  const auto n_ex = rng() % 3;
  for (std::uint64_t i = 0; i < n_ex; ++i) {
    const auto p = primes[rng() % primes.size()];
    std::vector<std::uint64_t> v(ctx.window.r(p));
    for (auto& e : v) e = rng() % p;
    ex[p] = std::move(v);
  }
  std::map<Monomial2, BigInt> tail;
  const auto n_terms = 1 + rng() % 4;
  for (std::uint64_t i = 0; i < n_terms; ++i) {
    Monomial2 m{static_cast<unsigned>(rng() % 4), static_cast<unsigned>(rng() % 4)};
    if (which == SocleEnvelope::H2 && m.first == 0 && m.second > 0) m.first = 1;
    tail[m] += static_cast<std::int64_t>(rng() % 19) - 9;
  }
  return ProductElement(std::move(ex), 1 + rng() % 30, std::move(tail), ctx);
}

// ------------------------------------------------------------------- witness

Json SocleWitness::to_json() const {
  Json overrides = Json::array();
  for (const auto& [p, v] : context.base.overrides) overrides.push_back({{"p", p}, {"value", v}});
  return Json{{"window", context.window.to_json()},
              {"sigmas", context.sigmas.to_json()},
              {"base_point", {{"default", "all ones"}, {"overrides", overrides}}},
              {"certificate", certificate.to_json()},
              {"H1", {{"grid", "sigma1^i sigma2^j (a), i, j >= 0"}, {"reduced", true}}},
              {"H2", {{"grid", "sigma1^i sigma2^j (a), i >= 1 or (i, j) = (0, 0)"}, {"reduced", true}}}};
}

SocleWitness socle_witness_build(const PrimeWindow& pw, std::uint64_t seed, const SocleParams& params, BasePoint base) {
  for (auto p : pw.primes()) {
    const auto a = base.at(p, pw.r(p));
    if (a.size() != pw.r(p)) throw precondition_error("ShapeMismatch", "base point has wrong length at " + std::to_string(p));
    if (std::any_of(a.begin(), a.end(), [p](auto x) { return x % p == 0; })) {
      throw precondition_error("ZeroProjection", "base point has a zero projection at " + std::to_string(p));
    }
  }
  auto chosen = choose_sigmas(pw, params, seed);
  return SocleWitness{SocleContext{pw, std::move(chosen.sigmas), std::move(base)}, std::move(chosen.certificate), params};
}

// -------------------------------------------------------------------- probes

bool SocleProbeReport::all_pass() const {
  auto full = [](std::size_t c, std::size_t p) { return c > 0 && c == p; };
  return certificate_pass && full(alpha_checks, alpha_passed) && full(torsion_checks, torsion_passed) &&
         full(sigma_checks, sigma_passed) && full(inclusion_checks, inclusion_passed) &&
         full(division_checks, division_passed) && base_point_member && sigma2_excluded &&
         std::all_of(proper_inclusion.begin(), proper_inclusion.end(), [](const auto& c) { return c.pass; });
}

Json SocleProbeReport::to_json() const {
  auto count = [](std::size_t c, std::size_t p) { return Json{{"checked", c}, {"passed", p}}; };
  Json pi = Json::array();
  for (std::size_t m = 0; m < proper_inclusion.size(); ++m) {
    auto j = proper_inclusion[m].to_json();
    j["m"] = m;
    pi.push_back(j);
  }
  return Json{{"certificate_pass", certificate_pass},
              {"alpha_composition", count(alpha_checks, alpha_passed)},
              {"torsion_adjustment", count(torsion_checks, torsion_passed)},
              {"sigma", count(sigma_checks, sigma_passed)},
              {"inclusion", count(inclusion_checks, inclusion_passed)},
              {"division", count(division_checks, division_passed)},
              {"base_point_member", base_point_member},
              {"sigma2_excluded", sigma2_excluded},
              {"proper_inclusion", pi},
              {"all_pass", all_pass()}};
}

AvoidanceCertificate socle_proper_inclusion(const SocleWitness& w, unsigned m) {
  const int b = static_cast<int>(w.params.height);
  std::vector<ScanTerm> terms{{{0, 0}, -b, b}};
  for (unsigned j = 0; j <= m; ++j) terms.push_back({{1, j}, -b, b});
  terms.push_back({{1, m + 1}, -b, -1});
  box_size(terms, w.params.budget);
  auto cert = avoidance_scan(w.context.window, w.context.sigmas, terms, w.params.threshold);
  cert.degree = m + 1;
  cert.height = w.params.height;
  return cert;
}

SocleProbeReport run_socle_probes(const SocleWitness& w, std::size_t alpha_samples, std::size_t samples,
                                  std::uint64_t seed, unsigned inclusion_max) {
  const auto& ctx = w.context;
  const auto& primes = ctx.window.primes();
  SocleProbeReport rep;
  rep.certificate_pass = w.certificate.pass;
  std::mt19937_64 rng(seed);

  auto same_on_window = [&](const ProductElement& a, const ProductElement& b) {
    return std::all_of(primes.begin(), primes.end(), [&](auto p) { return a.evaluate(p, ctx) == b.evaluate(p, ctx); });
  };

  for (std::size_t i = 0; i < alpha_samples; ++i) {
    const auto x = sample_product_element(SocleEnvelope::H1, ctx, rng);
    const auto a = 1 + rng() % 20, b = 1 + rng() % 20;
    const auto lhs = alpha_inv(x, a * b, ctx);
    const auto rhs = alpha_inv(alpha_inv(x, b, ctx), a, ctx);
    ++rep.alpha_checks;
    if (lhs == rhs && same_on_window(lhs, rhs)) ++rep.alpha_passed;
  }

  for (std::size_t i = 0; i < samples; ++i) {
    const auto x = sample_product_element(SocleEnvelope::H1, ctx, rng);
    const auto n = 1 + rng() % 20;
    const auto y = alpha_inv(x, n, ctx);
    bool ok = true;
    for (auto p : primes) {
      auto ny = y.evaluate(p, ctx);
      for (auto& v : ny) v = mul_mod(v, n % p, p);
      const auto xp = x.evaluate(p, ctx);
      if (n % p == 0) {
        const auto yp = y.evaluate(p, ctx);
        ok &= std::all_of(yp.begin(), yp.end(), [](auto v) { return v == 0; });
      } else {
        ok &= ny == xp;
      }
    }
    ++rep.torsion_checks;
    rep.torsion_passed += ok;
  }

  for (std::size_t i = 0; i < samples; ++i) {
    const auto x = sample_product_element(SocleEnvelope::H1, ctx, rng);
    const auto s1 = apply_sigma(x, 1, 0, ctx);
    const auto s2 = apply_sigma(x, 0, 1, ctx);
    bool ok = product_membership(s1, SocleEnvelope::H2);
    for (auto p : primes) {
      const auto [s, t] = ctx.sigmas.at(p);
      const auto si = inv_mod(s, p), ti = inv_mod(t, p);
      auto u = s1.evaluate(p, ctx), v = s2.evaluate(p, ctx);
      for (auto& e : u) e = mul_mod(e, si, p);
      for (auto& e : v) e = mul_mod(e, ti, p);
      const auto xp = x.evaluate(p, ctx);
      ok &= u == xp && v == xp;
    }
    ++rep.sigma_checks;
    rep.sigma_passed += ok;
  }

  for (std::size_t i = 0; i < samples; ++i) {
    const auto x = sample_product_element(SocleEnvelope::H2, ctx, rng);
    ++rep.inclusion_checks;
    rep.inclusion_passed += product_membership(x, SocleEnvelope::H2) && product_membership(x, SocleEnvelope::H1);
  }

  for (std::size_t i = 0; i < samples; ++i) {
    const auto which = i % 2 ? SocleEnvelope::H2 : SocleEnvelope::H1;
    const auto x = sample_product_element(which, ctx, rng);
    std::uint64_t m = 1;
    for (std::uint64_t j = 0, f = 1 + rng() % 2; j < f; ++j) m *= primes[rng() % std::min<std::size_t>(primes.size(), 10)];
    ++rep.division_checks;
    rep.division_passed += product_membership(alpha_inv(x, m, ctx), which);
  }

  const auto a = ProductElement::base_point(ctx);
  std::map<std::uint64_t, std::vector<std::uint64_t>> g{{primes.front(), std::vector<std::uint64_t>(ctx.window.r(primes.front()), 1)}};
  const ProductElement finite(g, 1, {}, ctx);
  rep.base_point_member = product_membership(a, SocleEnvelope::H1) && product_membership(a, SocleEnvelope::H2) &&
                          product_membership(finite, SocleEnvelope::H2);
  const auto s2a = apply_sigma(a, 0, 1, ctx);
  rep.sigma2_excluded = product_membership(s2a, SocleEnvelope::H1) && !product_membership(s2a, SocleEnvelope::H2);

  for (unsigned m = 0; m <= inclusion_max; ++m) rep.proper_inclusion.push_back(socle_proper_inclusion(w, m));
  return rep;
}

// ----------------------------------------------------------------- reduction

Json ReductionTranscript::to_json() const {
  Json steps_json = Json::array();
  for (const auto& s : steps) steps_json.push_back({{"step", s.name}, {"detail", s.detail}, {"data", s.data}});
  return Json{{"input", input}, {"steps", steps_json}, {"witness", witness.to_json()}};
}

ReductionTranscript reduce_unbounded(const GroupSpec& spec, std::size_t window, std::uint64_t seed,
                                     const SocleParams& params) {
  ReductionTranscript tr;
  tr.input = spec.to_string();
  const auto parts = split_reduced_divisible(spec);
  if (!parts.k_part.is_trivial()) {
    throw precondition_error("NotApplicable", parts.k_part.to_string() + " is a p-adic summand; use the p-adic route");
  }
  {
    ReductionStep s{"split", "", Json{{"C", parts.c_part.to_string()}, {"D", parts.d_part.to_string()}}};
    if (parts.d_part.is_trivial()) {
      s.detail = "reduced input";
    } else {
      s.detail = "divisible part D split off and carried unchanged; the D-invariant sets C_l are read as "
                 "'for every n, for some torsion a_i' (flagged reading)";
      s.data["c_l_reading"] = "flagged";
    }
    tr.steps.push_back(std::move(s));
  }
  const auto& c = parts.c_part;

  bool unbounded = false;
  for (const auto& e : c.entries()) {
    const auto& f = e.family;
    if (f.kind == FamilyKind::CyclicExponentFamily && f.exponents.all) {
      throw precondition_error("NotSuperstable",
                               f.to_string() + " has unbounded exponents at p = " + std::to_string(f.p));
    }
    if (f.kind == FamilyKind::CyclicPrimeFamily && f.primes.is_cofinite()) {
      if (e.mult.is_infinite()) {
        throw precondition_error("NotSuperstable", f.to_string() + " has infinitely many primes of infinite multiplicity");
      }
      unbounded = true;
    }
  }
  if (!unbounded) throw precondition_error("NotApplicable", c.to_string() + " has bounded torsion");
  tr.steps.push_back({"bounded_exponents", "every prime carries bounded exponents", Json::object()});

  std::map<std::uint64_t, unsigned> kmax;
  std::set<std::uint64_t> infinite_primes;
  for (const auto& e : c.entries()) {
    const auto& f = e.family;
    if (f.kind == FamilyKind::Cyclic) {
      kmax[f.p] = std::max(kmax[f.p], f.k);
      if (e.mult.is_infinite()) infinite_primes.insert(f.p);
    } else if (f.kind == FamilyKind::CyclicExponentFamily) {
      for (auto k : f.exponents.values) kmax[f.p] = std::max(kmax[f.p], k);
      if (e.mult.is_infinite()) infinite_primes.insert(f.p);
    }
  }
  for (const auto& e : c.entries()) {
    const auto& f = e.family;
    if (f.kind != FamilyKind::CyclicPrimeFamily) continue;
    for (auto p : infinite_primes) {
      if (f.primes.contains(p)) kmax[p] = std::max(kmax[p], f.k);
    }
  }
  std::uint64_t m = 1;
  Json factors = Json::array();
  for (auto p : infinite_primes) {
    m = checked_mul(m, checked_pow(p, kmax[p]));
    factors.push_back({{"p", p}, {"k", kmax[p]}});
  }
  GroupSpec complement = c;
  if (m == 1) {
    tr.steps.push_back({"m_split", "no bounded type has infinite multiplicity; M = 1", Json{{"M", 1}}});
  } else {
    const auto split = m_split(c, m);
    complement = split.complement;
    tr.steps.push_back({"m_split", "G = G[M] + MG",
                        Json{{"M", m}, {"factors", factors}, {"G[M]", split.torsion.to_string()},
                             {"MG", split.complement.to_string()}}});
  }

  const auto soc = socle(complement);
  tr.steps.push_back({"socle", soc == complement ? "MG is already elementary" : "socle of MG",
                      Json{{"socle", soc.to_string()}}});

  const auto pw = PrimeWindow::from_socle(soc, window);
  tr.witness = socle_witness_build(pw, seed, params);
  tr.steps.push_back({"witness", "H1, H2 built inside the product over S of (Z/p)^{r_p}",
                      Json{{"certificate", tr.witness.certificate.to_json()}}});
  tr.steps.push_back({"lift",
                      "each H_l is the socle of a unique pure subgroup K_l of MG; the K_l are recorded symbolically",
                      Json{{"symbolic", true}}});
  return tr;
}

}  // namespace sbab
