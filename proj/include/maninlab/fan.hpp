#pragma once

#include <string>
#include <vector>

#include "maninlab/cone.hpp"

namespace maninlab {

struct Fan {
  std::size_t rank = 0;
  std::vector<IVec> rays;
  std::vector<std::string> ray_labels;
  std::vector<std::vector<std::size_t>> cones;  // maximal cones as ray indices
  std::vector<std::string> cone_labels;
  // n when the fan is Σ_n as built by build_sigma_n; enables the symbolic
  // completeness replay and the projectivity witness.
  int family_n = 0;
};

// Σ_n: rays h = −Σe_i, f_i = h + e_i, g_i = e_i (stored in that order) and
// maximal cones C = cone{g}, C_i = cone{h, f_j : j ≠ i}, and for each i the
// subdivision of cone{f_j, g_j : j ≠ i} into the cones
// cone{f_k : k ≥ m, k ≠ i} ∪ {g_k : k ≤ m, k ≠ i}, m ≠ i.
Fan build_sigma_n(int n);

struct FanCertificate {
  bool simplicial = false;
  bool smooth = false;
  bool complete = false;
  bool separated = false;
  bool projective = false;
  std::size_t samples = 0;
  std::size_t samples_covered = 0;
  bool case_split_replayed = false;
  std::size_t pairs_checked = 0;
  std::size_t pairs_by_search = 0;  // pairs not settled by a listed hyperplane
  std::vector<std::string> failures;
};

FanCertificate check_fan(const Fan& fan, std::uint64_t seed = 20240611, std::size_t samples = 10000);

// For Σ_n: index of the maximal cone selected by the min-coordinate case
// split (first minimiser i; x_i ≥ 0 gives C; otherwise the sign of
// Σ_{j≠i} x_j − (n−2) x_i selects C_i or the subdivided C_{I∖{i}}).
std::size_t sigma_n_classify(const Fan& fan, const QVec& x);

// Pic-degree, in the basis F_0..F_n, of the Cox generator attached to a ray
// of Σ_n: h ↦ F_0, f_i ↦ F_i, g_i ↦ G_i.
IVec sigma_n_ray_degree(int n, std::size_t ray);

struct GaleCone {
  std::string label;
  std::vector<IVec> generators;  // degrees of the rays outside the maximal cone
  QMat inequalities;             // relative interior: row·y > 0 for every row
};

std::vector<GaleCone> gale_dual_cones(int n);
std::vector<GaleCone> gale_dual_cones(const Fan& fan);
bool gale_relint(const GaleCone& cone, const IVec& y);
// Integer multiple of (n, (n−1) + (n−i)ε) with ε = 1/(4n²).
IVec gale_witness(int n);

}  // namespace maninlab
