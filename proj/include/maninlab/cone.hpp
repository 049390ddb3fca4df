#pragma once

#include <utility>
#include <vector>

#include "maninlab/linalg.hpp"

namespace maninlab {

// A codimension-one face of a cone inside the linear span of its generators.
struct ConeFacet {
  QVec normal;                       // lies in the span; nonnegative on the cone
  std::vector<std::size_t> members;  // generator indices on the facet
};

// Rational polyhedral cone given by integer generators in Z^dim.
class Cone {
 public:
  Cone(std::size_t ambient_dim, std::vector<IVec> generators);

  std::size_t ambient_dim() const { return dim_; }
  const std::vector<IVec>& generators() const { return gens_; }
  std::size_t dimension() const { return rank_; }
  bool full_dimensional() const { return rank_ == dim_; }
  bool simplicial() const { return rank_ == gens_.size(); }
  const std::vector<ConeFacet>& facets() const { return facets_; }
  bool pointed() const;

  bool contains(const QVec& v) const;
  bool contains(const IVec& v) const { return contains(to_q(v)); }
  // Topological interior (requires a full-dimensional cone, otherwise false).
  bool interior(const QVec& v) const;
  bool interior(const IVec& v) const { return interior(to_q(v)); }
  // Relative interior inside the span of the generators.
  bool relative_interior(const QVec& v) const;
  // Coefficients λ ≥ 0 with v = Σ λ_a gen_a, found on a simplicial subcone.
  std::optional<QVec> certificate(const QVec& v) const;

  // Dual cone of a full-dimensional pointed cone, generated by the primitive
  // inward facet normals.
  Cone dual() const;

 private:
  void check_dim(const QVec& v) const;
  bool in_span(const QVec& v) const;

  std::size_t dim_;
  std::vector<IVec> gens_;
  std::size_t rank_ = 0;
  std::vector<ConeFacet> facets_;
  bool has_line_ = false;
};

// Triangulation of a pointed cone into simplicial cones on its generators
// (pulling order: lowest generator index first). Each entry lists generator
// indices.
std::vector<std::vector<std::size_t>> triangulate(const Cone& cone);

// Iterated stellar subdivision of a full-dimensional simplicial cone until
// every piece is unimodular.
std::vector<std::vector<IVec>> unimodular_refinement(const std::vector<IVec>& rays);

struct AlphaResult {
  BigRational value;
  std::size_t simplicial_cones = 0;
  std::size_t unimodular_cones = 0;
};

// lim_{t→1} (1−t)^r Σ_{y ∈ C_eff^∨ ∩ Z^r} t^{⟨y, antiK⟩}.
AlphaResult alpha(const Cone& eff_cone, const IVec& anti_k);

// Lattice points y of the dual cone with ⟨y, antiK⟩ = m and ⟨y, D⟩ ≥ c for
// each extra (D, c); sorted lexicographically.
std::vector<IVec> enumerate_dual_points(const Cone& eff_cone, const IVec& anti_k, long long m,
                                        const std::vector<std::pair<IVec, long long>>& extra = {});

long long delta(const IVec& anti_k);

}  // namespace maninlab
