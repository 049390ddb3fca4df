#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "maninlab/finite_field.hpp"

namespace maninlab {

// Univariate polynomial over a finite field, coefficients low to high.
// Leading coefficient is nonzero unless the polynomial is zero (empty).
class FqPoly {
 public:
  using Elem = FiniteField::Elem;

  explicit FqPoly(FieldPtr field) : field_(std::move(field)) {}
  FqPoly(FieldPtr field, std::vector<Elem> coeffs);

  static FqPoly constant(const FieldPtr& field, Elem c);
  static FqPoly monomial(const FieldPtr& field, Elem c, std::size_t k);
  static FqPoly x(const FieldPtr& field) { return monomial(field, 1, 1); }
  // The polynomial whose coefficient vector (length len) is the base-q
  // expansion of index; enumerates all polynomials of degree < len.
  static FqPoly from_index(const FieldPtr& field, std::uint64_t index, std::size_t len);

  const FieldPtr& field() const { return field_; }
  const std::vector<Elem>& coeffs() const { return c_; }
  Elem coeff(std::size_t i) const { return i < c_.size() ? c_[i] : 0; }
  Degree degree() const { return c_.empty() ? Degree::neg_inf() : Degree::of(static_cast<long>(c_.size()) - 1); }
  bool is_zero() const { return c_.empty(); }
  bool is_one() const { return c_.size() == 1 && c_[0] == 1; }
  Elem leading() const { return c_.empty() ? 0 : c_.back(); }

  FqPoly operator+(const FqPoly& o) const;
  FqPoly operator-(const FqPoly& o) const;
  FqPoly operator*(const FqPoly& o) const;
  FqPoly operator-() const;
  FqPoly scale(Elem c) const;
  FqPoly shift(std::size_t k) const;  // multiply by x^k
  bool operator==(const FqPoly& o) const { return field_ == o.field_ && c_ == o.c_; }
  bool operator!=(const FqPoly& o) const { return !(*this == o); }

  // Euclidean division; throws on division by zero.
  void divmod(const FqPoly& d, FqPoly& quot, FqPoly& rem) const;
  FqPoly operator/(const FqPoly& d) const;
  FqPoly operator%(const FqPoly& d) const;
  bool divisible_by(const FqPoly& d) const { return (*this % d).is_zero(); }

  FqPoly monic() const;
  Elem eval(Elem a) const;
  FqPoly derivative() const;
  FqPoly pow_mod(const BigInt& e, const FqPoly& m) const;

  // Lexicographic order on (degree, coefficients from the top), used only to
  // sort factor lists deterministically.
  bool canonical_less(const FqPoly& o) const;

  std::string str() const;

 private:
  void trim();
  void require_same_field(const FqPoly& o) const;

  FieldPtr field_;
  std::vector<Elem> c_;
};

FqPoly gcd(const FqPoly& a, const FqPoly& b);  // monic (or zero)

struct PolyFactor {
  FqPoly poly;  // monic irreducible
  unsigned multiplicity;
};

struct Factorization {
  FiniteField::Elem unit = 0;
  std::vector<PolyFactor> factors;  // sorted by canonical_less
};

// Irreducible factorization of a nonzero polynomial: square-free split,
// distinct-degree split, then equal-degree splitting with a fixed-seed
// Cantor-Zassenhaus search (deterministic output after sorting).
Factorization factor(const FqPoly& a);
FqPoly assemble(const Factorization& fac, const FieldPtr& field);

bool is_irreducible(const FqPoly& a);
std::vector<FqPoly> monic_irreducibles(const FieldPtr& field, unsigned degree);
// Number of monic irreducibles of the given degree, by the necklace formula.
BigInt count_monic_irreducibles(std::uint64_t q, unsigned degree);

}  // namespace maninlab
