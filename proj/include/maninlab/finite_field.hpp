#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "maninlab/arith.hpp"

namespace maninlab {

struct DefiningPolynomial {
  std::uint32_t p;
  unsigned f;
  std::vector<std::uint32_t> low_coeffs;  // x^0 .. x^{f-1}; monic
};

const std::vector<DefiningPolynomial>& defining_polynomial_table();

// F_{p^f}. Elements are the integers 0..q-1; the base-p digits of an element
// are its coordinates in the power basis 1, x, ..., x^{f-1} modulo the
// defining polynomial. For every field built here the class of x (or the
// least primitive root when f = 1) generates the multiplicative group, which
// gives log/antilog multiplication.
class FiniteField {
 public:
  using Elem = std::uint32_t;
  static constexpr std::uint64_t kMaxSize = 1u << 20;

  std::uint32_t p() const { return p_; }
  unsigned f() const { return f_; }
  std::uint32_t size() const { return q_; }
  const std::vector<std::uint32_t>& defining_polynomial() const { return modulus_; }
  Elem generator() const { return exp_[1]; }

  Elem zero() const { return 0; }
  Elem one() const { return 1; }
  Elem from_int(long long v) const;

  Elem add(Elem a, Elem b) const;
  Elem neg(Elem a) const;
  Elem sub(Elem a, Elem b) const { return add(a, neg(b)); }
  Elem mul(Elem a, Elem b) const {
    if (a == 0 || b == 0) return 0;
    return exp_[log_[a] + log_[b]];
  }
  Elem inv(Elem a) const;
  Elem div(Elem a, Elem b) const { return mul(a, inv(b)); }
  Elem pow(Elem a, std::uint64_t e) const;
  Elem frobenius(Elem a) const { return pow(a, p_); }

  std::string describe() const;
  std::string elem_str(Elem a) const;

 private:
  friend std::shared_ptr<const FiniteField> build_field(std::uint32_t p, unsigned f);
  FiniteField(std::uint32_t p, unsigned f);

  std::uint32_t p_ = 0;
  unsigned f_ = 0;
  std::uint32_t q_ = 0;
  std::vector<std::uint32_t> modulus_;  // low coefficients of the monic modulus
  std::vector<std::uint32_t> exp_;      // exp_[k] = g^k for k < 2(q-1)
  std::vector<std::uint32_t> log_;      // log_[a] for a != 0
  std::vector<std::uint32_t> add_table_;
  std::vector<std::uint32_t> neg_table_;
  std::vector<std::uint32_t> digit_pow_;
};

using FieldPtr = std::shared_ptr<const FiniteField>;

// Returns the shared instance of F_{p^f}; instances are built once and are
// immutable afterwards.
FieldPtr field_make(std::uint32_t p, unsigned f);
// Same, from the field size q = p^f.
FieldPtr field_of_size(std::uint64_t q);

}  // namespace maninlab
