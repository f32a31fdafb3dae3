#pragma once

// Exact entropies of the form  sum_i q_i log(p_i),  q_i rational, p_i prime.
//
// Logarithms of distinct primes are linearly independent over Q, so two
// values are equal iff their coefficient maps agree, and the sign of a
// nonzero value is decided by comparing two integers  prod p^{e} .

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <compare>
#include <limits>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "flab/error.hpp"

namespace flab {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline std::string rational_to_string(const Rational& q) {
  std::ostringstream os;
  os << boost::multiprecision::numerator(q);
  if (boost::multiprecision::denominator(q) != 1) os << "/" << boost::multiprecision::denominator(q);
  return os.str();
}

inline Rational parse_rational(const std::string& s) {
  const auto slash = s.find('/');
  if (slash == std::string::npos) return Rational(BigInt(s));
  return Rational(BigInt(s.substr(0, slash)), BigInt(s.substr(slash + 1)));
}

/// Prime factorization by trial division.
inline std::vector<std::pair<std::uint64_t, int>> factorize(std::uint64_t n) {
  if (n == 0) throw Error("factorize(0)");
  std::vector<std::pair<std::uint64_t, int>> out;
  for (std::uint64_t p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
    int e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    if (e) out.emplace_back(p, e);
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

class EntropyValue {
 public:
  using Terms = std::map<std::uint64_t, Rational>;

  EntropyValue() = default;

  /// log n for a positive integer n.
  static EntropyValue log_of(std::uint64_t n) {
    EntropyValue v;
    for (auto [p, e] : factorize(n)) v.terms_[p] += e;
    return v;
  }

  /// log(a/b) for a positive rational.
  static EntropyValue log_of(const Rational& q) {
    if (q <= 0) throw Error("log of a nonpositive rational");
    EntropyValue v;
    v.add_log_bigint(boost::multiprecision::numerator(q), 1);
    v.add_log_bigint(boost::multiprecision::denominator(q), -1);
    return v;
  }

  /// Builds a value from prime -> coefficient pairs; rejects non-primes.
  static EntropyValue from_terms(const Terms& terms) {
    EntropyValue v;
    for (const auto& [p, q] : terms) {
      auto f = factorize(p);
      if (f.size() != 1 || f[0].second != 1) throw Error("entropy term base is not prime");
      v.terms_[p] += q;
    }
    v.canonicalize();
    return v;
  }

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  EntropyValue& operator+=(const EntropyValue& o) {
    for (const auto& [p, q] : o.terms_) terms_[p] += q;
    canonicalize();
    return *this;
  }
  EntropyValue& operator-=(const EntropyValue& o) {
    for (const auto& [p, q] : o.terms_) terms_[p] -= q;
    canonicalize();
    return *this;
  }
  EntropyValue& operator*=(const Rational& s) {
    for (auto& [p, q] : terms_) q *= s;
    canonicalize();
    return *this;
  }
  EntropyValue operator-() const {
    EntropyValue v(*this);
    for (auto& [p, q] : v.terms_) q = -q;
    return v;
  }
  friend EntropyValue operator+(EntropyValue a, const EntropyValue& b) { return a += b; }
  friend EntropyValue operator-(EntropyValue a, const EntropyValue& b) { return a -= b; }
  friend EntropyValue operator*(EntropyValue a, const Rational& s) { return a *= s; }
  friend EntropyValue operator*(const Rational& s, EntropyValue a) { return a *= s; }
  friend EntropyValue operator*(long long s, EntropyValue a) { return a *= Rational(s); }

  long double to_long_double() const {
    long double sum = 0;
    for (const auto& [p, q] : terms_) sum += q.convert_to<long double>() * std::log(static_cast<long double>(p));
    return sum;
  }
  double to_double() const { return static_cast<double>(to_long_double()); }

  /// Exact sign: -1, 0 or +1.
  int sign() const {
    if (terms_.empty()) return 0;
    long double approx = 0, scale = 0;
    for (const auto& [p, q] : terms_) {
      const long double lp = std::log(static_cast<long double>(p));
      const long double c = q.convert_to<long double>();
      approx += c * lp;
      scale += std::fabs(c) * lp;
    }
    if (std::fabs(approx) > 1e-12L * (scale + 1.0L)) return approx > 0 ? 1 : -1;
    return exact_sign();
  }

  friend bool operator==(const EntropyValue& a, const EntropyValue& b) { return a.terms_ == b.terms_; }
  friend std::strong_ordering operator<=>(const EntropyValue& a, const EntropyValue& b) {
    const int s = (a - b).sign();
    return s < 0 ? std::strong_ordering::less : s > 0 ? std::strong_ordering::greater : std::strong_ordering::equal;
  }

  /// "3/2 log 2 - 3/4 log 3"; "0" for zero.
  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [p, q] : terms_) {
      Rational c = q;
      if (first) {
        if (c < 0) out += "-";
      } else {
        out += c < 0 ? " - " : " + ";
      }
      if (c < 0) c = -c;
      if (c != 1) out += rational_to_string(c) + " ";
      out += "log " + std::to_string(p);
      first = false;
    }
    return out;
  }

 private:
  void canonicalize() {
    for (auto it = terms_.begin(); it != terms_.end();) {
      it = it->second == 0 ? terms_.erase(it) : std::next(it);
    }
  }

  void add_log_bigint(BigInt n, int sign) {
    if (n > std::numeric_limits<std::uint64_t>::max()) throw SizeGuard("integer too large to factor");
    for (auto [p, e] : factorize(n.convert_to<std::uint64_t>())) terms_[p] += sign * e;
    canonicalize();
  }

  int exact_sign() const {
    BigInt lcm = 1;
    for (const auto& [p, q] : terms_) {
      const BigInt d = boost::multiprecision::denominator(q);
      lcm = lcm / boost::multiprecision::gcd(lcm, d) * d;
    }
    BigInt pos = 1, neg = 1;
    for (const auto& [p, q] : terms_) {
      const BigInt e = boost::multiprecision::numerator(q) * (lcm / boost::multiprecision::denominator(q));
      const BigInt mag = e < 0 ? BigInt(-e) : e;
      if (mag > 1'000'000) throw SizeGuard("exponent too large for exact comparison");
      const BigInt power = boost::multiprecision::pow(BigInt(p), mag.convert_to<unsigned>());
      (e > 0 ? pos : neg) *= power;
    }
    return pos > neg ? 1 : pos < neg ? -1 : 0;
  }

  Terms terms_;
};

inline EntropyValue min(const EntropyValue& a, const EntropyValue& b) { return b < a ? b : a; }

}  // namespace flab
