#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "maninlab/fan.hpp"

namespace maninlab {

enum class RelationShape { Linear, QuasiLinearT1Squared };

struct Generator {
  std::string id;
  IVec degree;
};

// Cox data of a variety whose Cox ring has the single relation
// Σ_j t_j^{ε_j} ∏_i s_i^{b_{i,j}}, with ε_1 = 2 for the quasi-linear shape
// and ε_j = 1 otherwise.
struct VarietyDescriptor {
  std::string name;
  std::vector<std::string> pic_basis;
  std::vector<Generator> s_generators;  // index set I
  std::vector<Generator> t_generators;  // index set J
  RelationShape shape = RelationShape::Linear;
  std::vector<std::vector<long long>> b;  // b[i][j], |I| rows and |J| columns
  std::vector<IVec> effective_cone;
  // Incidence sources, in order of preference: a fan whose rays correspond to
  // the generators, an ample class in the grading group, or an explicit list
  // of minimal relevant supports (generator indices) supplied externally.
  std::optional<Fan> fan;
  std::vector<std::size_t> generator_ray;  // generator index -> ray index
  std::optional<IVec> ample_class;
  std::optional<std::vector<std::vector<std::size_t>>> external_relevant;
};

using Mask = std::uint32_t;  // subset of generator indices (s first, then t)

struct Monomial {
  std::size_t j;                                       // t-generator position in J
  std::vector<std::pair<std::size_t, long long>> vars;  // (generator index, exponent)
  Mask support = 0;
};

struct PositivityCondition {
  std::string name;
  bool pass = false;
  QVec witness;
  std::optional<QVec> coefficients;  // on the effective-cone generators
  std::string note;
};

struct PositivityReport {
  std::vector<PositivityCondition> conditions;
  bool all_pass = false;
};

// Validated variety model with all derived combinatorics precomputed.
class Variety {
 public:
  explicit Variety(VarietyDescriptor d);

  const VarietyDescriptor& descriptor() const { return d_; }
  const std::string& name() const { return d_.name; }
  RelationShape shape() const { return d_.shape; }
  std::size_t num_s() const { return d_.s_generators.size(); }
  std::size_t num_t() const { return d_.t_generators.size(); }
  std::size_t num_generators() const { return num_s() + num_t(); }
  std::size_t pic_rank() const { return d_.pic_basis.size(); }
  long dimension() const { return static_cast<long>(num_generators()) - 1 - static_cast<long>(pic_rank()); }
  std::size_t t_index(std::size_t j) const { return num_s() + j; }
  long long t_exponent(std::size_t j) const;
  const std::string& generator_id(std::size_t k) const;
  const IVec& degree(std::size_t k) const;

  const std::vector<Monomial>& monomials() const { return monomials_; }
  const IVec& d_tot() const { return d_tot_; }
  const IVec& anticanonical() const { return anti_k_; }
  const Cone& effective_cone() const { return eff_; }
  const std::string& incidence_source() const { return incidence_source_; }

  // Number of relation monomials whose variables all lie in the support.
  std::size_t surviving_monomials(Mask support) const;
  bool is_f_face(Mask support) const { return surviving_monomials(support) != 1; }
  bool relevant(Mask support) const { return relevant_[support]; }
  // Minimal relevant supports.
  const std::vector<Mask>& relevant_minimal() const { return relevant_minimal_; }
  // Supports attached to maximal cones (fan source) or minimal supports whose
  // degree cone contains the ample class; empty for external incidence.
  const std::vector<Mask>& covering() const { return cov_; }
  // ∩_{k ∈ vanishing} E_k ≠ ∅.
  bool incidence(Mask vanishing) const { return incidence_[vanishing]; }
  // μ⁰ on {0,1}^{I∪J}, indexed by the support mask.
  long long mu0(Mask alpha) const { return mu0_[alpha]; }
  // Pointwise extension to N^{I∪J}.
  long long mu0(const std::vector<long long>& alpha) const;
  const std::vector<long long>& mu0_table() const { return mu0_; }

  PositivityReport check_positivity() const;

 private:
  void validate();
  void derive_incidence();

  VarietyDescriptor d_;
  std::vector<Monomial> monomials_;
  IVec d_tot_, anti_k_;
  Cone eff_;
  std::string incidence_source_;
  std::vector<bool> relevant_, incidence_;
  std::vector<Mask> relevant_minimal_, cov_;
  std::vector<long long> mu0_;
};

VarietyDescriptor builtin_xn(int n);
VarietyDescriptor builtin_dp6a2();

// Ample class stored with the dP6-A₂ descriptor: a lattice point of the
// moving cone lying on no wall spanned by generator degrees.
IVec dp6a2_ample_class();

// Parses the JSON descriptor format; throws MathError on malformed input or
// when the descriptor fails validation.
VarietyDescriptor parse_descriptor(const std::string& json_text);
std::string descriptor_to_json(const VarietyDescriptor& d);

// "xn:<n>", "dp6a2", or a path to a descriptor file.
VarietyDescriptor resolve_variety(const std::string& selector);

// Every reading of "∩_{1≤i≤n} F_i ∩ G_i" for X_n, evaluated from Rlv.
std::vector<std::pair<std::string, bool>> xn_intersection_readings(const Variety& v);

}  // namespace maninlab
