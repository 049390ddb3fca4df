#pragma once

#include <optional>
#include <string>
#include <vector>

#include "maninlab/rho_poly.hpp"
#include "maninlab/variety.hpp"

namespace maninlab {

// Pattern e = (f, g) over the generators, s first then t.
using Pattern = std::vector<long long>;

// Exponent of ρ in F_{ρ,e} at t^d, d indexed by the s-generators.
long long series_exponent(const Variety& v, const Pattern& e, const std::vector<long long>& d);

// F̃_{ρ,e} = ∏(1 − t_i) F_{ρ,e} inside the box |d|_∞ ≤ B. Only the active
// s-variables (those appearing in the relation) are stored: every other
// variable factors out of F̃ with coefficient 1 at exponent 0 and 0 elsewhere.
class TruncatedSeries {
 public:
  TruncatedSeries(std::vector<std::size_t> variables, unsigned box);

  const std::vector<std::size_t>& variables() const { return vars_; }
  unsigned box() const { return box_; }
  std::size_t size() const { return data_.size(); }
  std::vector<long long> point(std::size_t index) const;  // d over the active variables
  std::size_t index(const std::vector<long long>& d) const;
  const RhoPolynomial& at(std::size_t index) const { return data_[index]; }
  RhoPolynomial& at(std::size_t index) { return data_[index]; }
  // Coefficient at d over the active variables; zero outside the box.
  RhoPolynomial coeff(const std::vector<long long>& d) const;

 private:
  std::vector<std::size_t> vars_;
  unsigned box_;
  std::vector<RhoPolynomial> data_;
};

std::vector<std::size_t> active_s_variables(const Variety& v);
TruncatedSeries series_truncate(const Variety& v, const Pattern& e, unsigned box);

struct DegreeBoundReport {
  bool hypothesis_pass = true;  // 16 deg ≤ 15|d| − 17 for d ≠ 0 (η = 1/16)
  bool lemma_pass = true;       // deg ≤ |d| + exponent at d = 0
  std::optional<long long> max_excess;  // max over d ≠ 0 of deg − |d|
  std::vector<std::vector<long long>> violations;
};

DegreeBoundReport check_degree_bounds(const TruncatedSeries& s, const RhoPolynomial& constant_term);

// Coefficient a_{ν,d} of (1 − ρ t₂²t₃²)(1 − ρ t₁t₂t₃) ∏(1 − t_i) G_{ρ,ν},
// as the signed sum over (γ, μ) ∈ {0,1}² × {0,1}³.
RhoPolynomial dp6a2_coeff(const std::vector<long long>& nu, const std::vector<long long>& d);
// ν attached to a dP6-A₂ pattern: (f₁ + 2g₁, f₂ + g₂, f₃ + g₃).
std::vector<long long> dp6a2_nu(const Pattern& e);

struct DP6A2BoundReport {
  bool majdeg_pass = true;     // deg a_{ν,d} ≤ |d| + min(ν₂, ν₃)
  bool majdegbis_pass = true;  // deg a_{(0,1,1),d} ≤ |d| + 1/2
  bool vanishing_pass = true;  // a_{ν,d} = 0 on the three half-spaces
  std::size_t checked = 0;
};
DP6A2BoundReport check_dp6a2_bounds(const std::vector<long long>& nu, unsigned box);

struct FtildeValue {
  BigRational value;           // exact F̃_{q,e}(q⁻¹, …, q⁻¹)
  BigRational truncated;       // same sum restricted to the box
  BigRational tail_bound;      // certified bound on value − truncated
  unsigned box = 0;
  bool consistent = false;     // 0 ≤ value − truncated ≤ tail_bound
};

// Exact evaluation for relations in which every monomial has a single
// s-variable of its own (unit exponents for the quasi-linear shape).
FtildeValue exact_ftilde(const Variety& v, const Pattern& e, std::uint64_t q, unsigned box = 16);
BigRational exact_ftilde_at(const Variety& v, const Pattern& e, std::uint64_t q);

// q^{−Σe} F̃_{q,e}(q⁻¹).
BigRational local_factor(const Variety& v, const Pattern& e, std::uint64_t q);
// Points of the coordinate subspace {x_k = 0 : e_k = 1} of F_q^{I∪J} on
// the relation, divided by q^{|I∪J| − 1}.
BigRational local_density(const Variety& v, const Pattern& e, std::uint64_t q);

struct LocalIdentityReport {
  std::uint64_t q = 0;
  BigRational l1, l2, r;
  bool pass = false;
};

LocalIdentityReport check_local_identity(const Variety& v, std::uint64_t q);

struct ConvergenceCase {
  Mask pattern = 0;
  long long mu0 = 0;
  BigRational constant;  // C_e used
  long long weight = 0;  // Σe
  bool pass = false;
};

// For every e ∈ {0,1}^{I∪J} ∖ {0} with μ⁰(e) ≠ 0: C_e − Σe < −1, with C_e the
// exponent at d = 0 (lemma constant), refined to 1/2 for the quasi-linear
// patterns with ν = (0,1,1).
std::vector<ConvergenceCase> convergence_certificate(const Variety& v);

}  // namespace maninlab
