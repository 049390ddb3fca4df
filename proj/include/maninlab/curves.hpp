#pragma once

#include <optional>
#include <string>
#include <vector>

#include "maninlab/fq_poly.hpp"
#include "maninlab/variety.hpp"

namespace maninlab {

// Closed point of P¹ over F_q: a monic irreducible polynomial or ∞.
struct Place {
  bool infinity = false;
  std::optional<FqPoly> poly;
  unsigned degree() const;
  bool operator<(const Place& o) const;
  bool operator==(const Place& o) const;
  std::string str() const;
  static Place at_infinity() { return Place{true, std::nullopt}; }
  static Place finite(FqPoly p) { return Place{false, std::move(p)}; }
};

// Global section of O(degree) on P¹: a polynomial of degree ≤ degree, the
// difference being the vanishing order at ∞.
struct Section {
  FqPoly poly;
  long degree = 0;
};

class EffDivisor {
 public:
  explicit EffDivisor(FieldPtr field) : field_(std::move(field)) {}
  EffDivisor(FieldPtr field, std::vector<std::pair<Place, unsigned>> parts);

  const FieldPtr& field() const { return field_; }
  const std::vector<std::pair<Place, unsigned>>& parts() const { return parts_; }
  unsigned degree() const;
  unsigned multiplicity(const Place& p) const;
  bool is_zero() const { return parts_.empty(); }
  // Canonical section: the monic product of the finite part, as a section of
  // O(deg), scaled by the given constant.
  Section canonical_section(FiniteField::Elem scale = 1) const;
  // Zero divisor of a nonzero section.
  static EffDivisor of_section(const Section& s);
  EffDivisor operator+(const EffDivisor& o) const;
  bool operator<=(const EffDivisor& o) const;
  bool operator==(const EffDivisor& o) const { return parts_ == o.parts_; }
  std::string str() const;

 private:
  void normalize();
  FieldPtr field_;
  std::vector<std::pair<Place, unsigned>> parts_;
};

// Placewise minimum.
EffDivisor inf(const EffDivisor& a, const EffDivisor& b);

// All effective divisors of degree d on P¹ over F_q; requires q^{d+1} ≤ 2^24.
std::vector<EffDivisor> enumerate_divisors(const FieldPtr& field, unsigned d);
// Places of degree ≤ d, ∞ first then by degree and canonical order.
std::vector<Place> places_up_to(const FieldPtr& field, unsigned d);

// ℓ(D) on P¹.
long ell(long d);

struct KernelResult {
  BigInt count;             // number of solutions
  std::optional<long> dim;  // log_q count when the count is a power of q
};

// Solutions (t_j), deg t_j ≤ H'_j, of Σ t_j s_j = 0 (LINEAR) or
// t_1² s_1 + Σ_{k≥2} t_k s_k = 0 (QUASI_LINEAR), in sections of O(H).
KernelResult kernel_dim(const std::vector<Section>& s, const std::vector<long>& hprime, long H, RelationShape shape);

struct CountingLemmaCheck {
  BigInt count;
  BigRational bound1;                 // (1)
  BigRational bound2a, bound2b;       // (2): one of the two holds
  bool pass1 = false, pass2 = false;
  bool exact_applies = false;         // hypothesis of (3)
  std::optional<BigRational> exact;   // value predicted by (3)
  bool exact_pass = true;
  bool image_pass = true;             // image = multiples of Inf(div s), LINEAR only
};

// Bounds and exact case of the counting lemma for LINEAR instances (g = 0).
CountingLemmaCheck check_counting_lemma(const std::vector<Section>& s, const std::vector<long>& hprime, long H);
// Same for t_1² s_1 + t_2 s_2 (+ t_3 s_3); bound (1) needs two sections, the
// rest three.
CountingLemmaCheck check_counting_lemma_quasi(const std::vector<Section>& s, const std::vector<long>& hprime, long H);

// Divisor tuples are indexed by generators (s first, then t).
using DivisorTuple = std::vector<EffDivisor>;

long long mu_div(const Variety& v, const DivisorTuple& e);
// Σ_{0 ≤ E' ≤ E} μ_X(E'), by enumerating every sub-tuple.
long long mu_div_summatory(const Variety& v, const DivisorTuple& e);
// At every place, the generators whose divisor contains it meet.
bool divisor_incidence(const Variety& v, const DivisorTuple& e);

// Multidegree data of y: ⟨y, E_k⟩ for every generator.
std::vector<long long> generator_degrees(const Variety& v, const IVec& y);

// N_K(D, E): tuples (t_j) with t_j = 0 for j ∉ K (K a mask over J) and the
// relation satisfied by (σ_{D_i}σ_{F_i}, t_j σ_{G_j}). D is a list of
// sections over I, e the divisor tuple over I ∪ J.
BigInt count_NK(const Variety& v, const IVec& y, const std::vector<Section>& d, const DivisorTuple& e, Mask k);
// N(D, E): all t_j nonzero, by inclusion–exclusion over K.
BigInt count_NDE(const Variety& v, const IVec& y, const std::vector<Section>& d, const DivisorTuple& e);
// N(D, E) by enumerating every candidate (t_j) directly.
BigInt count_NDE_enumerated(const Variety& v, const IVec& y, const std::vector<Section>& d, const DivisorTuple& e);

struct CurveCount {
  BigInt value;
  bool complete = true;
  std::size_t multidegrees = 0;
  std::vector<IVec> skipped;
};

// Morphisms P¹ → X of anticanonical degree m meeting X_0, by enumerating
// Cox tuples and checking admissibility at every closed point.
CurveCount brute_force_N(const Variety& v, std::uint64_t q, long long m);
// Coefficient of t^m on the torsor side of the lifting formula. The scale
// multiplies every canonical section; counts do not depend on it.
CurveCount lifting_rhs(const Variety& v, std::uint64_t q, long long m, std::uint32_t section_scale = 1);

struct ZetaRow {
  long long m = 0;
  BigInt n;
  BigRational main_term;
  std::optional<BigRational> ratio;
  bool complete = true;
};

struct ZetaReport {
  std::string variety;
  std::uint64_t q = 0;
  unsigned euler_bound = 0;
  BigRational gamma;
  std::vector<ZetaRow> rows;
};

ZetaReport zeta_report(const Variety& v, std::uint64_t q, long long m_max, unsigned euler_bound);

}  // namespace maninlab
