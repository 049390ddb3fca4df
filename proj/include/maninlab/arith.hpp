#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace maninlab {

using BigInt = mpz_class;
using BigRational = mpq_class;

// Thrown when an operation's documented precondition is violated.
class MathError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Thrown when a desk-scale cap would be exceeded.
class CapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline BigRational make_rational(const BigInt& num, const BigInt& den) {
  if (den == 0) throw MathError("zero denominator");
  BigRational r(num, den);
  r.canonicalize();
  return r;
}

inline BigRational make_rational(long num, long den = 1) {
  return make_rational(BigInt(num), BigInt(den));
}

// gmpxx has no long long overloads; long is 64-bit on the supported platforms.
inline BigInt big(long long x) { return BigInt(static_cast<long>(x)); }
inline BigRational qrat(long long x) { return BigRational(big(x)); }

BigInt ipow(const BigInt& base, unsigned long e);
BigRational rpow(const BigRational& base, long e);  // negative e allowed
std::string to_string(const BigInt& x);
std::string to_string(const BigRational& x);

// Degree of a polynomial; the zero polynomial has the explicit sentinel
// NegInf rather than an integer stand-in.
class Degree {
 public:
  static Degree neg_inf() { return Degree(); }
  static Degree of(long d) {
    if (d < 0) throw MathError("finite degree must be nonnegative");
    Degree r;
    r.finite_ = true;
    r.value_ = d;
    return r;
  }

  bool is_neg_inf() const { return !finite_; }
  long value() const {
    if (!finite_) throw MathError("degree of the zero polynomial has no value");
    return value_;
  }

  friend bool operator==(const Degree& a, const Degree& b) {
    return a.finite_ == b.finite_ && (!a.finite_ || a.value_ == b.value_);
  }
  friend std::strong_ordering operator<=>(const Degree& a, const Degree& b) {
    if (!a.finite_ || !b.finite_) return a.finite_ <=> b.finite_;
    return a.value_ <=> b.value_;
  }
  // deg(a) <= bound, with -inf below everything
  bool at_most(long bound) const { return !finite_ || value_ <= bound; }

  std::string str() const { return finite_ ? std::to_string(value_) : "-inf"; }

 private:
  Degree() = default;
  bool finite_ = false;
  long value_ = 0;
};

// Small integer helpers shared by several modules.
bool is_prime(std::uint64_t n);
// Returns (p, f) if n = p^f with p prime and f >= 1, otherwise (0, 0).
std::pair<std::uint64_t, unsigned> prime_power_decompose(std::uint64_t n);
bool is_prime_power(std::uint64_t n);
int mobius(std::uint64_t n);
std::int64_t checked_pow(std::int64_t base, unsigned e);  // throws on overflow

}  // namespace maninlab
