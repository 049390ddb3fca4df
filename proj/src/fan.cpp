#include "maninlab/fan.hpp"

#include <algorithm>
#include <random>
#include <set>

namespace maninlab {

namespace {

using i128 = __int128;

std::string sigma_cone_label_sub(int i, int m) {
  return "C_{I\\" + std::to_string(i) + "}^" + std::to_string(m);
}

// Integer data for fast membership in a full-dimensional simplicial cone:
// |det|·λ = |det|·M^{-1}x is an integer vector with the signs of λ.
struct SimplicialTest {
  std::vector<std::vector<long long>> adj;  // rows
};

SimplicialTest make_test(const std::vector<IVec>& rays) {
  const std::size_t r = rays.size();
  QMat m(r, QVec(r));
  for (std::size_t c = 0; c < r; ++c)
    for (std::size_t k = 0; k < r; ++k) m[c][k] = qrat(rays[k][c]);
  BigRational d = det(m);
  auto inv = inverse(m);
  if (!inv) throw MathError("degenerate cone");
  SimplicialTest t;
  BigRational ad = abs(d);
  for (std::size_t k = 0; k < r; ++k) {
    std::vector<long long> row;
    for (std::size_t c = 0; c < r; ++c) {
      BigRational v = (*inv)[k][c] * ad;
      row.push_back(v.get_num().get_si());
    }
    t.adj.push_back(row);
  }
  return t;
}

bool simplicial_contains(const SimplicialTest& t, const std::vector<long long>& x) {
  for (const auto& row : t.adj) {
    i128 s = 0;
    for (std::size_t c = 0; c < x.size(); ++c) s += static_cast<i128>(row[c]) * x[c];
    if (s < 0) return false;
  }
  return true;
}

std::vector<IVec> rays_of(const Fan& fan, std::size_t cone) {
  std::vector<IVec> r;
  for (auto i : fan.cones[cone]) r.push_back(fan.rays[i]);
  return r;
}

IVec negate(IVec w) {
  for (auto& x : w) x = -x;
  return w;
}

// w ≥ 0 on cone a, w ≤ 0 on cone b, and the rays of both on {w = 0} are
// exactly the common rays; then a ∩ b is the common face they span.
bool separates(const Fan& fan, const IVec& w, std::size_t a, std::size_t b, const std::set<std::size_t>& common) {
  if (std::all_of(w.begin(), w.end(), [](long long x) { return x == 0; })) return false;
  for (auto i : fan.cones[a]) {
    long long v = dot(w, fan.rays[i]);
    if (v < 0 || (v == 0) != (common.count(i) > 0)) return false;
  }
  for (auto i : fan.cones[b]) {
    long long v = dot(w, fan.rays[i]);
    if (v > 0 || (v == 0) != (common.count(i) > 0)) return false;
  }
  return true;
}

// Exact search for w with w·x = 0 on common rays, w·x ≥ 1 on the other rays
// of a and w·x ≤ −1 on the other rays of b, by enumerating the vertices of
// that pointed polyhedron.
bool separator_by_vertices(const Fan& fan, std::size_t a, std::size_t b, const std::set<std::size_t>& common) {
  const std::size_t r = fan.rank;
  QMat eq;
  for (auto i : common) eq.push_back(to_q(fan.rays[i]));
  std::vector<QVec> ineq;  // row·w ≥ 1
  for (auto i : fan.cones[a])
    if (!common.count(i)) ineq.push_back(to_q(fan.rays[i]));
  for (auto i : fan.cones[b])
    if (!common.count(i)) ineq.push_back(to_q(negate(fan.rays[i])));
  const std::size_t k = eq.empty() ? 0 : rank(eq);
  const std::size_t need = r - k;
  if (need > ineq.size()) return false;
  std::vector<std::size_t> idx(need);
  for (std::size_t j = 0; j < need; ++j) idx[j] = j;
  while (true) {
    QMat sys = eq;
    QVec rhs(eq.size(), BigRational(0));
    for (auto j : idx) {
      sys.push_back(ineq[j]);
      rhs.push_back(1);
    }
    if (rank(sys) == r) {
      auto w = solve(sys, rhs);
      if (w && std::all_of(ineq.begin(), ineq.end(), [&](const QVec& row) { return dot(row, *w) >= 1; })) return true;
    }
    std::size_t j = need;
    while (j > 0 && idx[j - 1] == ineq.size() - need + j - 1) --j;
    if (j == 0) return false;
    ++idx[j - 1];
    for (std::size_t t = j; t < need; ++t) idx[t] = idx[t - 1] + 1;
  }
}

// True when the cone generated by rays equals {x : w·x ≥ 0 for w in ineqs}.
bool vrep_matches_hrep(const std::vector<IVec>& rays, const std::vector<IVec>& ineqs) {
  for (const auto& w : ineqs)
    for (const auto& r : rays)
      if (dot(w, r) < 0) return false;
  Cone c(rays[0].size(), rays);
  std::set<IVec> h;
  for (const auto& w : ineqs) h.insert(primitive(w));
  for (const auto& f : c.facets())
    if (!h.count(primitive(f.normal))) return false;
  return true;
}

// Pseudo-manifold certificate that the pieces triangulate cone(big):
// pieces lie in the big cone, every interior facet is shared by exactly one
// other piece lying on the opposite side, and an interior point of the first
// piece is covered exactly once.
bool triangulation_certificate(const std::vector<IVec>& big, const std::vector<std::vector<IVec>>& pieces) {
  Cone bc(big[0].size(), big);
  for (const auto& p : pieces)
    for (const auto& r : p)
      if (!bc.contains(r)) return false;
  for (std::size_t a = 0; a < pieces.size(); ++a) {
    const auto& p = pieces[a];
    for (std::size_t drop = 0; drop < p.size(); ++drop) {
      std::vector<IVec> face;
      for (std::size_t k = 0; k < p.size(); ++k)
        if (k != drop) face.push_back(p[k]);
      auto ns = nullspace(to_q(face), p[0].size());
      if (ns.size() != 1) return false;
      IVec w = primitive(ns[0]);
      if (dot(w, p[drop]) < 0)
        for (auto& x : w) x = -x;
      bool boundary = std::all_of(big.begin(), big.end(), [&](const IVec& b) { return dot(w, b) >= 0; });
      if (boundary) continue;
      std::set<IVec> fs(face.begin(), face.end());
      int partners = 0;
      for (std::size_t b = 0; b < pieces.size(); ++b) {
        if (b == a) continue;
        std::vector<IVec> rest;
        std::size_t shared = 0;
        for (const auto& r : pieces[b]) {
          if (fs.count(r)) ++shared;
          else rest.push_back(r);
        }
        if (shared != face.size()) continue;
        if (rest.size() != 1 || dot(w, rest[0]) >= 0) return false;
        ++partners;
      }
      if (partners != 1) return false;
    }
  }
  QVec inner(big[0].size(), BigRational(0));
  for (const auto& r : pieces[0])
    for (std::size_t c = 0; c < r.size(); ++c) inner[c] += qrat(r[c]);
  for (std::size_t b = 1; b < pieces.size(); ++b)
    if (Cone(big[0].size(), pieces[b]).contains(inner)) return false;
  return true;
}

bool replay_sigma_n(const Fan& fan, std::vector<std::string>& failures) {
  const int n = fan.family_n;
  auto f = [](int i) { return static_cast<std::size_t>(i); };
  auto g = [n](int i) { return static_cast<std::size_t>(n + i); };
  auto find_label = [&](const std::string& lab) -> long {
    for (std::size_t c = 0; c < fan.cone_labels.size(); ++c)
      if (fan.cone_labels[c] == lab) return static_cast<long>(c);
    return -1;
  };
  auto unit = [n](int i, long long s) {
    IVec w(n, 0);
    w[i - 1] = s;
    return w;
  };
  bool ok = true;

  long c0 = find_label("C");
  std::vector<IVec> orth;
  for (int i = 1; i <= n; ++i) orth.push_back(unit(i, 1));
  if (c0 < 0 || !vrep_matches_hrep(rays_of(fan, c0), orth)) {
    failures.push_back("case split: C is not the orthant {x >= 0}");
    ok = false;
  }
  for (int i = 1; i <= n; ++i) {
    // C_i = {x_j ≥ x_i, Σ_{j≠i} x_j ≤ (n−2) x_i}
    std::vector<IVec> hi;
    IVec sum_ineq(n, -1);
    sum_ineq[i - 1] = n - 2;
    hi.push_back(sum_ineq);
    for (int j = 1; j <= n; ++j)
      if (j != i) {
        IVec w(n, 0);
        w[j - 1] = 1;
        w[i - 1] = -1;
        hi.push_back(w);
      }
    long ci = find_label("C_" + std::to_string(i));
    if (ci < 0 || !vrep_matches_hrep(rays_of(fan, ci), hi)) {
      failures.push_back("case split: C_" + std::to_string(i) + " does not match its inequalities");
      ok = false;
    }
    // C_{I∖{i}} = {x_i ≤ 0, x_j ≥ x_i, Σ_{j≠i} x_j ≥ (n−2) x_i}
    std::vector<IVec> hs;
    hs.push_back(unit(i, -1));
    IVec neg_sum(n, 1);
    neg_sum[i - 1] = -(n - 2);
    hs.push_back(neg_sum);
    for (std::size_t k = 1; k < hi.size(); ++k) hs.push_back(hi[k]);
    std::vector<IVec> big;
    for (int j = 1; j <= n; ++j)
      if (j != i) {
        big.push_back(fan.rays[f(j)]);
        big.push_back(fan.rays[g(j)]);
      }
    if (!vrep_matches_hrep(big, hs)) {
      failures.push_back("case split: cone{f_j, g_j : j != " + std::to_string(i) + "} does not match its inequalities");
      ok = false;
    }
    std::vector<std::vector<IVec>> pieces;
    for (int m = 1; m <= n; ++m) {
      if (m == i) continue;
      long c = find_label(sigma_cone_label_sub(i, m));
      if (c < 0) {
        ok = false;
        continue;
      }
      pieces.push_back(rays_of(fan, c));
    }
    if (pieces.size() != static_cast<std::size_t>(n - 1) || !triangulation_certificate(big, pieces)) {
      failures.push_back("case split: subdivision of C_{I\\" + std::to_string(i) + "} is not a triangulation");
      ok = false;
    }
  }
  return ok;
}

}  // namespace

Fan build_sigma_n(int n) {
  if (n < 3) throw MathError("build_sigma_n needs n >= 3");
  Fan fan;
  fan.rank = static_cast<std::size_t>(n);
  fan.family_n = n;
  IVec hv(n, -1);
  fan.rays.push_back(hv);
  fan.ray_labels.push_back("h");
  for (int i = 1; i <= n; ++i) {
    IVec v = hv;
    v[i - 1] += 1;
    fan.rays.push_back(v);
    fan.ray_labels.push_back("f" + std::to_string(i));
  }
  for (int i = 1; i <= n; ++i) {
    IVec v(n, 0);
    v[i - 1] = 1;
    fan.rays.push_back(v);
    fan.ray_labels.push_back("g" + std::to_string(i));
  }
  auto f = [](int i) { return static_cast<std::size_t>(i); };
  auto g = [n](int i) { return static_cast<std::size_t>(n + i); };

  std::vector<std::size_t> c;
  for (int i = 1; i <= n; ++i) c.push_back(g(i));
  fan.cones.push_back(c);
  fan.cone_labels.push_back("C");
  for (int i = 1; i <= n; ++i) {
    std::vector<std::size_t> ci{0};
    for (int j = 1; j <= n; ++j)
      if (j != i) ci.push_back(f(j));
    fan.cones.push_back(ci);
    fan.cone_labels.push_back("C_" + std::to_string(i));
  }
  for (int i = 1; i <= n; ++i) {
    for (int m = 1; m <= n; ++m) {
      if (m == i) continue;
      std::vector<std::size_t> cone;
      for (int k = m; k <= n; ++k)
        if (k != i) cone.push_back(f(k));
      for (int k = 1; k <= m; ++k)
        if (k != i) cone.push_back(g(k));
      std::sort(cone.begin(), cone.end());
      fan.cones.push_back(cone);
      fan.cone_labels.push_back(sigma_cone_label_sub(i, m));
    }
  }
  return fan;
}

namespace {

struct Region {
  int kind;  // 0: C, 1: C_i, 2: subdivided C_{I∖{i}}
  int i;
};

Region classify_region(int n, const QVec& x) {
  int i = 1;
  for (int k = 2; k <= n; ++k)
    if (x[k - 1] < x[i - 1]) i = k;
  if (x[i - 1] >= 0) return {0, i};
  BigRational s = 0;
  for (int j = 1; j <= n; ++j)
    if (j != i) s += x[j - 1];
  if (s <= (n - 2) * x[i - 1]) return {1, i};
  return {2, i};
}

std::vector<std::size_t> region_cones(const Fan& fan, const Region& reg) {
  auto find_label = [&](const std::string& lab) {
    for (std::size_t c = 0; c < fan.cone_labels.size(); ++c)
      if (fan.cone_labels[c] == lab) return c;
    throw MathError("cone label missing: " + lab);
  };
  if (reg.kind == 0) return {find_label("C")};
  if (reg.kind == 1) return {find_label("C_" + std::to_string(reg.i))};
  std::vector<std::size_t> out;
  for (int m = 1; m <= fan.family_n; ++m)
    if (m != reg.i) out.push_back(find_label(sigma_cone_label_sub(reg.i, m)));
  return out;
}

}  // namespace

std::size_t sigma_n_classify(const Fan& fan, const QVec& x) {
  if (fan.family_n < 3) throw MathError("classification needs a built-in fan");
  for (auto c : region_cones(fan, classify_region(fan.family_n, x)))
    if (Cone(fan.rank, rays_of(fan, c)).contains(x)) return c;
  throw MathError("case split left a point uncovered");
}

FanCertificate check_fan(const Fan& fan, std::uint64_t seed, std::size_t samples) {
  FanCertificate cert;
  const std::size_t r = fan.rank;
  std::vector<Cone> cones;
  for (std::size_t c = 0; c < fan.cones.size(); ++c) {
    cones.emplace_back(r, rays_of(fan, c));
    if (!cones.back().full_dimensional())
      throw MathError("maximal cone " + fan.cone_labels[c] + " is not full-dimensional");
  }
  {
    std::set<IVec> distinct(fan.rays.begin(), fan.rays.end());
    if (distinct.size() != fan.rays.size()) cert.failures.push_back("rays are not deduplicated");
  }

  cert.simplicial = true;
  cert.smooth = true;
  for (std::size_t c = 0; c < cones.size(); ++c) {
    if (!cones[c].simplicial()) {
      cert.simplicial = false;
      cert.smooth = false;
      cert.failures.push_back("cone " + fan.cone_labels[c] + " is not simplicial");
      continue;
    }
    if (abs(det(rays_of(fan, c))) != 1) {
      cert.smooth = false;
      cert.failures.push_back("cone " + fan.cone_labels[c] + " is not unimodular");
    }
  }

  // Completeness by sampling.
  std::vector<SimplicialTest> tests;
  if (cert.simplicial)
    for (std::size_t c = 0; c < cones.size(); ++c) tests.push_back(make_test(rays_of(fan, c)));
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<long long> num(-1000, 1000), den(1, 97);
  cert.samples = samples;
  bool classify_ok = true;
  for (std::size_t s = 0; s < samples; ++s) {
    // A rational vector a_c / b_c; membership is invariant under the positive
    // rescaling by the product of denominators.
    std::vector<long long> a(r), b(r);
    for (std::size_t c = 0; c < r; ++c) {
      a[c] = num(rng);
      b[c] = den(rng);
    }
    std::vector<long long> x(r);
    QVec xq(r);
    for (std::size_t c = 0; c < r; ++c) xq[c] = make_rational(a[c], b[c]);
    BigInt l = 1;
    for (std::size_t c = 0; c < r; ++c) l = lcm(l, BigInt(xq[c].get_den()));
    for (std::size_t c = 0; c < r; ++c) x[c] = BigRational(xq[c] * BigRational(l)).get_num().get_si();
    bool covered = false;
    for (std::size_t c = 0; c < cones.size() && !covered; ++c)
      covered = cert.simplicial ? simplicial_contains(tests[c], x) : cones[c].contains(xq);
    if (covered) ++cert.samples_covered;
    if (fan.family_n > 0 && cert.simplicial && classify_ok) {
      try {
        bool hit = false;
        for (auto c : region_cones(fan, classify_region(fan.family_n, xq))) hit = hit || simplicial_contains(tests[c], x);
        if (!hit) classify_ok = false;
      } catch (const MathError&) {
        classify_ok = false;
      }
    }
  }
  cert.complete = cert.samples_covered == cert.samples;
  if (!cert.complete) cert.failures.push_back("sampled vector not covered by any maximal cone");
  if (fan.family_n > 0) {
    cert.case_split_replayed = replay_sigma_n(fan, cert.failures) && classify_ok;
    if (!classify_ok) cert.failures.push_back("case split classification disagrees with cone membership");
    cert.complete = cert.complete && cert.case_split_replayed;
  }

  // Separation: every pair meets in a common face cut out by a hyperplane.
  std::vector<IVec> candidates;
  if (fan.family_n > 0) {
    const int n = fan.family_n;
    for (int i = 1; i <= n; ++i) {
      IVec w(n, 0);
      w[i - 1] = 1;
      candidates.push_back(w);
      for (int k = i + 1; k <= n; ++k) {
        IVec d(n, 0);
        d[i - 1] = 1;
        d[k - 1] = -1;
        candidates.push_back(d);
      }
      IVec s(n, 1);
      s[i - 1] = -(n - 2);
      candidates.push_back(s);
    }
  }
  cert.separated = true;
  for (std::size_t a = 0; a < cones.size(); ++a) {
    for (std::size_t b = a + 1; b < cones.size(); ++b) {
      ++cert.pairs_checked;
      std::set<std::size_t> common;
      for (auto i : fan.cones[a])
        if (std::find(fan.cones[b].begin(), fan.cones[b].end(), i) != fan.cones[b].end()) common.insert(i);
      std::vector<IVec> cand = candidates;
      IVec wa(r, 0), wb(r, 0), all(r, 1);
      for (const auto& fct : cones[a].facets()) {
        IVec w = primitive(fct.normal);
        cand.push_back(w);
        bool has_face = std::all_of(common.begin(), common.end(), [&](std::size_t i) { return dot(w, fan.rays[i]) == 0; });
        if (has_face)
          for (std::size_t c = 0; c < r; ++c) wa[c] += w[c];
      }
      for (const auto& fct : cones[b].facets()) {
        IVec w = primitive(fct.normal);
        cand.push_back(w);
        bool has_face = std::all_of(common.begin(), common.end(), [&](std::size_t i) { return dot(w, fan.rays[i]) == 0; });
        if (has_face)
          for (std::size_t c = 0; c < r; ++c) wb[c] += w[c];
      }
      IVec diff(r);
      for (std::size_t c = 0; c < r; ++c) diff[c] = wa[c] - wb[c];
      cand.insert(cand.end(), {wa, wb, diff, all});
      bool found = false;
      for (const auto& w : cand) {
        if (separates(fan, w, a, b, common) || separates(fan, negate(w), a, b, common)) {
          found = true;
          break;
        }
      }
      if (!found && separator_by_vertices(fan, a, b, common)) {
        found = true;
        ++cert.pairs_by_search;
      }
      if (!found) {
        cert.separated = false;
        cert.failures.push_back("no separating hyperplane for " + fan.cone_labels[a] + " and " + fan.cone_labels[b]);
      }
    }
  }

  // Projectivity via the Gale-dual witness.
  if (fan.family_n > 0 && cert.smooth) {
    const int n = fan.family_n;
    // The degree map must kill the image of the dual lattice.
    bool exact = true;
    for (int k = 0; k < n; ++k) {
      IVec total(n + 1, 0);
      for (std::size_t ray = 0; ray < fan.rays.size(); ++ray) {
        auto deg = sigma_n_ray_degree(n, ray);
        for (int c = 0; c <= n; ++c) total[c] += fan.rays[ray][k] * deg[c];
      }
      if (std::any_of(total.begin(), total.end(), [](long long v) { return v != 0; })) exact = false;
    }
    if (!exact) cert.failures.push_back("degree map is not a Gale dual of the rays");
    IVec y = gale_witness(n);
    bool all_in = exact;
    for (const auto& gc : gale_dual_cones(fan)) {
      if (!gale_relint(gc, y)) {
        all_in = false;
        cert.failures.push_back("witness outside the Gale dual of " + gc.label);
      }
    }
    cert.projective = all_in;
  } else {
    cert.failures.push_back("projectivity not certified: no Gale witness for this fan");
  }
  return cert;
}

IVec sigma_n_ray_degree(int n, std::size_t ray) {
  IVec d(n + 1, 0);
  if (ray == 0) {
    d[0] = 1;
  } else if (ray <= static_cast<std::size_t>(n)) {
    d[ray] = 1;
  } else {
    std::size_t i = ray - n;
    d[0] = 1;
    for (int j = 1; j <= n; ++j)
      if (static_cast<std::size_t>(j) != i) d[j] = 1;
  }
  return d;
}

std::vector<GaleCone> gale_dual_cones(const Fan& fan) {
  const int n = fan.family_n;
  if (n < 3) throw MathError("Gale dual cones need a built-in fan");
  std::vector<GaleCone> out;
  for (std::size_t c = 0; c < fan.cones.size(); ++c) {
    GaleCone gc;
    gc.label = fan.cone_labels[c];
    std::set<std::size_t> in(fan.cones[c].begin(), fan.cones[c].end());
    for (std::size_t ray = 0; ray < fan.rays.size(); ++ray)
      if (!in.count(ray)) gc.generators.push_back(sigma_n_ray_degree(n, ray));
    const std::size_t r = n + 1;
    if (gc.generators.size() != r) throw MathError("Gale dual of a non-simplicial cone");
    QMat m(r, QVec(r));
    for (std::size_t row = 0; row < r; ++row)
      for (std::size_t k = 0; k < r; ++k) m[row][k] = qrat(gc.generators[k][row]);
    auto inv = inverse(m);
    if (!inv) throw MathError("Gale dual generators are dependent");
    gc.inequalities = *inv;
    out.push_back(std::move(gc));
  }
  return out;
}

std::vector<GaleCone> gale_dual_cones(int n) { return gale_dual_cones(build_sigma_n(n)); }

bool gale_relint(const GaleCone& cone, const IVec& y) {
  QVec yq = to_q(y);
  for (const auto& row : cone.inequalities)
    if (dot(row, yq) <= 0) return false;
  return true;
}

IVec gale_witness(int n) {
  const long long s = 4LL * n * n;
  IVec y(n + 1);
  y[0] = static_cast<long long>(n) * s;
  for (int i = 1; i <= n; ++i) y[i] = static_cast<long long>(n - 1) * s + (n - i);
  return y;
}

}  // namespace maninlab
