#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "maninlab/arith.hpp"

namespace maninlab {

// Integer polynomial in the formal mark rho; trailing zeros trimmed.
class RhoPolynomial {
 public:
  RhoPolynomial() = default;
  explicit RhoPolynomial(std::vector<std::int64_t> coeffs) : c_(std::move(coeffs)) { trim(); }
  static RhoPolynomial monomial(long k, std::int64_t c = 1) {
    if (k < 0) throw MathError("negative rho exponent");
    std::vector<std::int64_t> v(static_cast<std::size_t>(k) + 1, 0);
    v[static_cast<std::size_t>(k)] = c;
    return RhoPolynomial(std::move(v));
  }

  const std::vector<std::int64_t>& coeffs() const { return c_; }
  std::int64_t coeff(std::size_t k) const { return k < c_.size() ? c_[k] : 0; }
  bool is_zero() const { return c_.empty(); }
  Degree degree() const { return c_.empty() ? Degree::neg_inf() : Degree::of(static_cast<long>(c_.size()) - 1); }

  RhoPolynomial& operator+=(const RhoPolynomial& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), 0);
    for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
    trim();
    return *this;
  }
  RhoPolynomial& operator-=(const RhoPolynomial& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), 0);
    for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] -= o.c_[i];
    trim();
    return *this;
  }
  friend RhoPolynomial operator+(RhoPolynomial a, const RhoPolynomial& b) { return a += b; }
  friend RhoPolynomial operator-(RhoPolynomial a, const RhoPolynomial& b) { return a -= b; }
  friend RhoPolynomial operator*(const RhoPolynomial& a, const RhoPolynomial& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<std::int64_t> r(a.c_.size() + b.c_.size() - 1, 0);
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
    return RhoPolynomial(std::move(r));
  }
  bool operator==(const RhoPolynomial& o) const { return c_ == o.c_; }

  // Exact value at rho = q.
  BigRational eval(const BigRational& q) const {
    BigRational r = 0;
    for (std::size_t i = c_.size(); i-- > 0;) r = r * q + BigRational(BigInt(static_cast<long>(c_[i])));
    return r;
  }

  std::string str() const {
    if (c_.empty()) return "0";
    std::string s;
    for (std::size_t i = c_.size(); i-- > 0;) {
      if (c_[i] == 0) continue;
      std::int64_t v = c_[i];
      if (!s.empty()) s += v < 0 ? " - " : " + ";
      else if (v < 0) s += "-";
      std::int64_t a = v < 0 ? -v : v;
      if (a != 1 || i == 0) s += std::to_string(a);
      if (i >= 1) s += "rho";
      if (i >= 2) s += "^" + std::to_string(i);
    }
    return s;
  }

 private:
  void trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
  }
  std::vector<std::int64_t> c_;
};

inline BigRational rho_eval(const RhoPolynomial& p, long q) { return p.eval(BigRational(q)); }

}  // namespace maninlab
