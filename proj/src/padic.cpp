#include "sbab/padic.hpp"

#include <algorithm>
#include <mutex>
#include <random>
#include <tuple>
#include <utility>

#include "sbab/error.hpp"

namespace sbab {

BigInt power(std::uint64_t p, unsigned n) { return boost::multiprecision::pow(BigInt(p), n); }

unsigned valuation(const BigInt& n, std::uint64_t p) {
  if (n == 0) throw precondition_error("ZeroValuation", "valuation of zero");
  BigInt m = abs(n);
  unsigned v = 0;
  while (m % p == 0) {
    m /= p;
    ++v;
  }
  return v;
}

namespace {

BigInt reduce_mod(const BigInt& x, const BigInt& m) {
  BigInt r = x % m;
  if (r < 0) r += m;
  return r;
}

// Inverse of a modulo m, or nullopt when gcd(a, m) != 1.
std::optional<BigInt> inverse_mod(const BigInt& a, const BigInt& m) {
  BigInt r0 = m, r1 = reduce_mod(a, m), t0 = 0, t1 = 1;
  while (r1 != 0) {
    const BigInt q = r0 / r1;
    BigInt r2 = r0 - q * r1, t2 = t0 - q * t1;
    r0 = std::move(r1);
    r1 = std::move(r2);
    t0 = std::move(t1);
    t1 = std::move(t2);
  }
  if (r0 != 1) return std::nullopt;
  return reduce_mod(t0, m);
}

void require_same(const PAdicApprox& a, const PAdicApprox& b) {
  if (a.p() != b.p() || a.precision() != b.precision()) {
    throw precondition_error("PrecisionMismatch", "p-adic operands at (" + std::to_string(a.p()) + ", " +
                                                      std::to_string(a.precision()) + ") and (" +
                                                      std::to_string(b.p()) + ", " +
                                                      std::to_string(b.precision()) + ")");
  }
}

BigInt rational_residue(std::uint64_t p, const BigInt& modulus, const BigRational& x) {
  const BigInt num = numerator(x), den = denominator(x);
  auto inv = den % p == 0 ? std::nullopt : inverse_mod(den, modulus);
  if (!inv) {
    throw precondition_error("NotInLocalization",
                             "denominator " + den.str() + " is divisible by " + std::to_string(p));
  }
  return reduce_mod(num * *inv, modulus);
}

}  // namespace

std::string Valuation::to_string() const { return (exact ? "" : ">=") + std::to_string(value); }

PAdicApprox::PAdicApprox(std::uint64_t p, unsigned precision, const BigInt& residue) : p_(p), n_(precision) {
  if (!is_prime(p)) throw precondition_error("NotPrime", std::to_string(p) + " is not prime");
  if (precision == 0) throw precondition_error("ZeroPrecision", "precision must be at least 1");
  residue_ = reduce_mod(residue, modulus());
}

PAdicApprox PAdicApprox::from_rational(std::uint64_t p, unsigned precision, const BigRational& x) {
  return PAdicApprox(p, precision, rational_residue(p, power(p, precision), x));
}

Valuation PAdicApprox::valuation() const {
  if (residue_ == 0) return {n_, false};
  return {sbab::valuation(residue_, p_), true};
}

PAdicApprox PAdicApprox::inverse() const {
  if (!is_unit()) throw precondition_error("NonUnit", residue_.str() + " is not a unit mod " + std::to_string(p_));
  return PAdicApprox(p_, n_, *inverse_mod(residue_, modulus()));
}

PAdicApprox PAdicApprox::truncate(unsigned m) const {
  if (m > n_) throw precondition_error("PrecisionMismatch", "cannot raise precision by truncation");
  return PAdicApprox(p_, m, residue_);
}

PAdicApprox operator+(const PAdicApprox& a, const PAdicApprox& b) {
  require_same(a, b);
  return PAdicApprox(a.p_, a.n_, a.residue_ + b.residue_);
}

PAdicApprox operator-(const PAdicApprox& a, const PAdicApprox& b) {
  require_same(a, b);
  return PAdicApprox(a.p_, a.n_, a.residue_ - b.residue_);
}

PAdicApprox operator*(const PAdicApprox& a, const PAdicApprox& b) {
  require_same(a, b);
  return PAdicApprox(a.p_, a.n_, a.residue_ * b.residue_);
}

PAdicApprox PAdicApprox::operator-() const { return PAdicApprox(p_, n_, -residue_); }

// ---------------------------------------------------------------------------
// Lazy p-adic integers

struct PAdicLazy::Node {
  explicit Node(std::uint64_t prime) : p(prime) {}
  virtual ~Node() = default;

  std::uint64_t p;

  BigInt truncate(unsigned n) const {
    std::lock_guard lock(mutex_);
    if (n > cached_n_) {
      cached_ = compute(n);
      cached_n_ = n;
    }
    return cached_ % power(p, n);
  }

  virtual std::string describe() const = 0;

 protected:
  // Residue mod p^n; called with the node's lock held.
  virtual BigInt compute(unsigned n) const = 0;

 private:
  mutable std::mutex mutex_;
  mutable unsigned cached_n_ = 0;
  mutable BigInt cached_ = 0;
};

namespace {

std::mt19937_64 make_rng(std::uint64_t p, std::uint64_t seed) {
  std::seed_seq seq{seed & 0xffffffffu, seed >> 32, p & 0xffffffffu, p >> 32};
  return std::mt19937_64(seq);
}

class SeededNode final : public PAdicLazy::Node {
 public:
  SeededNode(std::uint64_t p, std::uint64_t seed)
      : Node(p), seed_(seed), rng_(make_rng(p, seed)) {}

  std::string describe() const override {
    return "seeded(" + std::to_string(p) + "," + std::to_string(seed_) + ")";
  }

 protected:
  BigInt compute(unsigned n) const override {
    while (digits_.size() < n) {
      const std::uint64_t r = rng_();
      digits_.push_back(digits_.empty() ? 1 + r % (p - 1) : r % p);
    }
    BigInt value = 0;
    for (unsigned i = n; i-- > 0;) value = value * p + digits_[i];
    return value;
  }

 private:
  std::uint64_t seed_;
  mutable std::mt19937_64 rng_;
  mutable std::vector<std::uint64_t> digits_;
};

class RationalNode final : public PAdicLazy::Node {
 public:
  RationalNode(std::uint64_t p, BigRational value) : Node(p), value_(std::move(value)) {
    rational_residue(p, p, value_);  // validates the denominator
  }

  std::string describe() const override { return value_.str(); }

 protected:
  BigInt compute(unsigned n) const override { return rational_residue(p, power(p, n), value_); }

 private:
  BigRational value_;
};

class BinaryNode final : public PAdicLazy::Node {
 public:
  BinaryNode(char op, std::shared_ptr<Node> a, std::shared_ptr<Node> b)
      : Node(a->p), op_(op), a_(std::move(a)), b_(std::move(b)) {}

  std::string describe() const override { return "(" + a_->describe() + op_ + b_->describe() + ")"; }

 protected:
  BigInt compute(unsigned n) const override {
    const BigInt x = a_->truncate(n), y = b_->truncate(n);
    return BigInt(op_ == '+' ? BigInt(x + y) : BigInt(x * y)) % power(p, n);
  }

 private:
  char op_;
  std::shared_ptr<Node> a_, b_;
};

class NegNode final : public PAdicLazy::Node {
 public:
  explicit NegNode(std::shared_ptr<Node> a) : Node(a->p), a_(std::move(a)) {}

  std::string describe() const override { return "-" + a_->describe(); }

 protected:
  BigInt compute(unsigned n) const override { return reduce_mod(-a_->truncate(n), power(p, n)); }

 private:
  std::shared_ptr<Node> a_;
};

void require_prime(std::uint64_t p) {
  if (!is_prime(p)) throw precondition_error("NotPrime", std::to_string(p) + " is not prime");
}

}  // namespace

PAdicLazy PAdicLazy::seeded_unit(std::uint64_t p, std::uint64_t seed) {
  require_prime(p);
  return PAdicLazy(std::make_shared<SeededNode>(p, seed));
}

PAdicLazy PAdicLazy::integer(std::uint64_t p, const BigInt& value) { return rational(p, BigRational(value)); }

PAdicLazy PAdicLazy::rational(std::uint64_t p, const BigRational& value) {
  require_prime(p);
  return PAdicLazy(std::make_shared<RationalNode>(p, value));
}

PAdicLazy operator+(const PAdicLazy& a, const PAdicLazy& b) {
  if (a.p() != b.p()) throw precondition_error("PrecisionMismatch", "p-adic operands at different primes");
  return PAdicLazy(std::make_shared<BinaryNode>('+', a.node_, b.node_));
}

PAdicLazy operator*(const PAdicLazy& a, const PAdicLazy& b) {
  if (a.p() != b.p()) throw precondition_error("PrecisionMismatch", "p-adic operands at different primes");
  return PAdicLazy(std::make_shared<BinaryNode>('*', a.node_, b.node_));
}

PAdicLazy PAdicLazy::operator-() const { return PAdicLazy(std::make_shared<NegNode>(node_)); }

std::uint64_t PAdicLazy::p() const { return node_->p; }

BigInt PAdicLazy::truncate(unsigned n) const {
  if (n == 0) return 0;
  return node_->truncate(n);
}

unsigned PAdicLazy::digit(unsigned i) const {
  const BigInt r = truncate(i + 1) / power(p(), i);
  return static_cast<unsigned>(r);
}

std::string PAdicLazy::describe() const { return node_->describe(); }

// ---------------------------------------------------------------------------
// Matrices over Z/p^N

MatrixModPk::MatrixModPk(std::uint64_t p, unsigned precision, std::size_t k)
    : p_(p), n_(precision), k_(k), modulus_(power(p, precision)), data_(k * k, BigInt(0)) {
  require_prime(p);
  if (precision == 0) throw precondition_error("ZeroPrecision", "precision must be at least 1");
}

MatrixModPk MatrixModPk::identity(std::uint64_t p, unsigned precision, std::size_t k) {
  MatrixModPk m(p, precision, k);
  for (std::size_t i = 0; i < k; ++i) m.set(i, i, 1);
  return m;
}

void MatrixModPk::set(std::size_t i, std::size_t j, const BigInt& value) {
  data_[i * k_ + j] = reduce_mod(value, modulus_);
}

BigInt MatrixModPk::determinant() const {
  // Fraction-free elimination over Z on the representatives.
  std::vector<BigInt> a = data_;
  BigInt prev = 1;
  int sign = 1;
  for (std::size_t c = 0; c < k_; ++c) {
    std::size_t r = c;
    while (r < k_ && a[r * k_ + c] == 0) ++r;
    if (r == k_) return 0;
    if (r != c) {
      for (std::size_t j = 0; j < k_; ++j) std::swap(a[r * k_ + j], a[c * k_ + j]);
      sign = -sign;
    }
    for (std::size_t i = c + 1; i < k_; ++i) {
      for (std::size_t j = c + 1; j < k_; ++j) {
        a[i * k_ + j] = (a[i * k_ + j] * a[c * k_ + c] - a[i * k_ + c] * a[c * k_ + j]) / prev;
      }
    }
    prev = a[c * k_ + c];
  }
  return reduce_mod(k_ == 0 ? BigInt(1) : sign * prev, modulus_);
}

MatrixModPk MatrixModPk::reduce(unsigned m) const {
  if (m > n_) throw precondition_error("PrecisionMismatch", "cannot raise matrix precision by reduction");
  MatrixModPk out(p_, m, k_);
  for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] = data_[i] % out.modulus_;
  return out;
}

MatrixModPk MatrixModPk::inverse() const {
  MatrixModPk a = *this, inv = identity(p_, n_, k_);
  auto row_op = [&](MatrixModPk& m, std::size_t dst, std::size_t src, const BigInt& factor) {
    for (std::size_t j = 0; j < k_; ++j) m.set(dst, j, m.at(dst, j) - factor * m.at(src, j));
  };
  for (std::size_t c = 0; c < k_; ++c) {
    std::size_t r = c;
    while (r < k_ && a.at(r, c) % p_ == 0) ++r;
    if (r == k_) throw precondition_error("SingularModP", "matrix is not invertible mod " + std::to_string(p_));
    if (r != c) {
      for (std::size_t j = 0; j < k_; ++j) {
        std::swap(a.data_[r * k_ + j], a.data_[c * k_ + j]);
        std::swap(inv.data_[r * k_ + j], inv.data_[c * k_ + j]);
      }
    }
    const BigInt s = *inverse_mod(a.at(c, c), modulus_);
    for (std::size_t j = 0; j < k_; ++j) {
      a.set(c, j, a.at(c, j) * s);
      inv.set(c, j, inv.at(c, j) * s);
    }
    for (std::size_t i = 0; i < k_; ++i) {
      if (i == c || a.at(i, c) == 0) continue;
      const BigInt f = a.at(i, c);
      row_op(a, i, c, f);
      row_op(inv, i, c, f);
    }
  }
  return inv;
}

MatrixModPk operator*(const MatrixModPk& a, const MatrixModPk& b) {
  if (a.p_ != b.p_ || a.n_ != b.n_ || a.k_ != b.k_) {
    throw precondition_error("PrecisionMismatch", "matrix shapes or precisions differ");
  }
  MatrixModPk out(a.p_, a.n_, a.k_);
  for (std::size_t i = 0; i < a.k_; ++i) {
    for (std::size_t j = 0; j < a.k_; ++j) {
      BigInt s = 0;
      for (std::size_t t = 0; t < a.k_; ++t) s += a.at(i, t) * b.at(t, j);
      out.set(i, j, s);
    }
  }
  return out;
}

Json MatrixModPk::to_json() const {
  Json rows = Json::array();
  for (std::size_t i = 0; i < k_; ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < k_; ++j) row.push_back(at(i, j).str());
    rows.push_back(std::move(row));
  }
  Json j;
  j["p"] = p_;
  j["precision"] = n_;
  j["rows"] = std::move(rows);
  return j;
}

std::vector<MatrixModPk> matrix_limit_inverse(const std::vector<MatrixModPk>& a_seq) {
  if (a_seq.empty()) throw precondition_error("EmptySequence", "no matrices given");
  std::vector<MatrixModPk> out;
  out.reserve(a_seq.size());
  for (std::size_t n = 1; n <= a_seq.size(); ++n) {
    const auto& a = a_seq[n - 1];
    if (a.precision() != n || a.p() != a_seq[0].p() || a.size() != a_seq[0].size()) {
      throw precondition_error("IncompatibleSequence", "A_" + std::to_string(n) + " has the wrong shape");
    }
    if (n > 1 && a.reduce(n - 1) != a_seq[n - 2]) {
      throw precondition_error("IncompatibleSequence",
                               "A_" + std::to_string(n) + " does not reduce to A_" + std::to_string(n - 1));
    }
    out.push_back(a.inverse());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Polynomials and certificates

IntPolynomial2::IntPolynomial2(std::map<std::pair<unsigned, unsigned>, BigInt> coeffs) {
  for (auto& [m, c] : coeffs) {
    if (c != 0) coeffs_.emplace(m, std::move(c));
  }
}

unsigned IntPolynomial2::degree() const {
  unsigned d = 0;
  for (const auto& [m, c] : coeffs_) d = std::max({d, m.first, m.second});
  return d;
}

BigInt IntPolynomial2::height() const {
  BigInt h = 0;
  for (const auto& [m, c] : coeffs_) h = std::max(h, BigInt(abs(c)));
  return h;
}

PAdicApprox IntPolynomial2::evaluate(const PAdicApprox& x, const PAdicApprox& y) const {
  require_same(x, y);
  PAdicApprox sum(x.p(), x.precision(), 0);
  for (const auto& [m, c] : coeffs_) {
    PAdicApprox term(x.p(), x.precision(), c);
    for (unsigned i = 0; i < m.first; ++i) term = term * x;
    for (unsigned j = 0; j < m.second; ++j) term = term * y;
    sum = sum + term;
  }
  return sum;
}

namespace {

// Display order: total degree ascending, then higher powers of x first.
std::vector<std::pair<std::pair<unsigned, unsigned>, BigInt>> display_terms(
    const std::map<std::pair<unsigned, unsigned>, BigInt>& coeffs) {
  std::vector<std::pair<std::pair<unsigned, unsigned>, BigInt>> terms(coeffs.begin(), coeffs.end());
  std::sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) {
    const auto da = a.first.first + a.first.second, db = b.first.first + b.first.second;
    if (da != db) return da < db;
    return a.first.first > b.first.first;
  });
  return terms;
}

std::string monomial(unsigned i, unsigned j) {
  std::string s;
  auto var = [&](const char* v, unsigned e) {
    if (e == 0) return;
    if (!s.empty()) s += "*";
    s += v;
    if (e > 1) s += "^" + std::to_string(e);
  };
  var("x", i);
  var("y", j);
  return s;
}

}  // namespace

std::string IntPolynomial2::to_string() const {
  if (coeffs_.empty()) return "0";
  std::string out;
  for (const auto& [m, c] : display_terms(coeffs_)) {
    const bool neg = c < 0;
    const BigInt a = abs(c);
    if (out.empty()) {
      if (neg) out += "-";
    } else {
      out += neg ? " - " : " + ";
    }
    const std::string mono = monomial(m.first, m.second);
    if (mono.empty()) {
      out += a.str();
    } else {
      if (a != 1) out += a.str() + "*";
      out += mono;
    }
  }
  return out;
}

Json IntPolynomial2::to_json() const {
  Json terms = Json::array();
  for (const auto& [m, c] : display_terms(coeffs_)) {
    Json t;
    t["i"] = m.first;
    t["j"] = m.second;
    t["c"] = c.str();
    terms.push_back(std::move(t));
  }
  Json j;
  j["text"] = to_string();
  j["terms"] = std::move(terms);
  return j;
}

Json IndependenceCertificate::to_json() const {
  Json j;
  j["p"] = p;
  j["g1"] = g1;
  j["g2"] = g2;
  j["d"] = degree;
  j["B"] = height;
  j["N"] = precision;
  j["candidates"] = candidates;
  j["verdict"] = pass ? "pass" : "fail";
  j["violation"] = violation ? violation->to_json() : Json(nullptr);
  return j;
}

namespace {

// Odometer over coefficient vectors in [-b, b]^m keeping sum c_t * v_t mod P.
// Calls on_zero(coeffs) for each nonzero vector whose sum vanishes.
template <typename Int, typename OnZero>
std::uint64_t enumerate_relations(const std::vector<Int>& values, const Int& modulus, int b, OnZero on_zero) {
  const std::size_t m = values.size();
  std::vector<Int> wrap(m);  // 2b * v_t mod P
  std::vector<int> c(m, -b);
  Int sum = 0;
  auto add = [&](const Int& x) {
    sum += x;
    if (sum >= modulus) sum -= modulus;
  };
  auto sub = [&](const Int& x) {
    if (sum >= x) {
      sum -= x;
    } else {
      sum += modulus - x;
    }
  };
  for (std::size_t t = 0; t < m; ++t) {
    Int w = 0;
    for (int r = 0; r < 2 * b; ++r) {
      w += values[t];
      if (w >= modulus) w -= modulus;
    }
    wrap[t] = w;
    for (int r = 0; r < b; ++r) sub(values[t]);
  }
  std::uint64_t count = 0;
  while (true) {
    if (sum == 0 && std::any_of(c.begin(), c.end(), [](int x) { return x != 0; })) on_zero(c);
    if (std::any_of(c.begin(), c.end(), [](int x) { return x != 0; })) ++count;
    std::size_t t = 0;
    while (t < m && c[t] == b) {
      c[t] = -b;
      sub(wrap[t]);
      ++t;
    }
    if (t == m) break;
    ++c[t];
    add(values[t]);
  }
  return count;
}

}  // namespace

RelationSearch find_relation(const PAdicLazy& g1, const PAdicLazy& g2, const std::vector<Monomial2>& monomials,
                             unsigned b, unsigned n, std::uint64_t budget) {
  if (g1.p() != g2.p()) throw precondition_error("PrecisionMismatch", "g1 and g2 live at different primes");
  if (n == 0) throw precondition_error("ZeroPrecision", "precision must be at least 1");
  const BigInt space = boost::multiprecision::pow(BigInt(2 * b + 1), static_cast<unsigned>(monomials.size()));
  if (space > budget) {
    throw budget_error(std::to_string(2 * b + 1) + "^" + std::to_string(monomials.size()) + " = " + space.str() +
                       " candidates exceed the budget of " + std::to_string(budget));
  }
  const std::uint64_t p = g1.p();
  const auto x = g1.approx(n), y = g2.approx(n);
  std::vector<BigInt> values;
  for (const auto& [i, j] : monomials) values.push_back(IntPolynomial2({{{i, j}, 1}}).evaluate(x, y).residue());

  RelationSearch out;
  // Keep the smallest relation by (height, support, degree, display order).
  using Key = std::tuple<int, std::size_t, unsigned, std::string>;
  std::optional<Key> best_key;
  auto on_zero = [&](const std::vector<int>& c) {
    std::map<Monomial2, BigInt> coeffs;
    int h = 0;
    for (std::size_t t = 0; t < c.size(); ++t) {
      if (c[t] != 0) coeffs[monomials[t]] += c[t];
      h = std::max(h, std::abs(c[t]));
    }
    IntPolynomial2 q(coeffs);
    if (q.is_zero()) return;  // repeated monomials cancelling
    if (display_terms(q.coeffs()).front().second < 0) {
      for (auto& [mono, v] : coeffs) v = -v;
      q = IntPolynomial2(coeffs);
    }
    Key key{h, q.coeffs().size(), q.degree(), q.to_string()};
    if (!best_key || key < *best_key) {
      best_key = key;
      out.relation = q;
    }
  };

  const BigInt modulus = power(p, n);
  if (modulus < (BigInt(1) << 126)) {
    using U = unsigned __int128;
    std::vector<U> small;
    for (const auto& v : values) small.push_back(static_cast<U>(v));
    out.candidates = enumerate_relations<U>(small, static_cast<U>(modulus), static_cast<int>(b), on_zero);
  } else {
    out.candidates = enumerate_relations<BigInt>(values, modulus, static_cast<int>(b), on_zero);
  }
  return out;
}

IndependenceCertificate independence_certificate(const PAdicLazy& g1, const PAdicLazy& g2, unsigned d, unsigned b,
                                                 unsigned n, std::uint64_t budget) {
  if (g1.p() != g2.p()) throw precondition_error("PrecisionMismatch", "g1 and g2 live at different primes");
  if (!g1.is_unit() || !g2.is_unit()) throw precondition_error("NotAUnit", "g1 and g2 must be p-adic units");
  std::vector<Monomial2> monomials;
  for (unsigned i = 0; i <= d; ++i)
    for (unsigned j = 0; j <= d; ++j) monomials.emplace_back(i, j);
  auto search = find_relation(g1, g2, monomials, b, n, budget);

  IndependenceCertificate cert;
  cert.p = g1.p();
  cert.g1 = g1.describe();
  cert.g2 = g2.describe();
  cert.degree = d;
  cert.height = b;
  cert.precision = n;
  cert.candidates = search.candidates;
  cert.violation = std::move(search.relation);
  cert.pass = !cert.violation.has_value();
  return cert;
}

}  // namespace sbab
