#include "maninlab/cone.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>

namespace maninlab {

namespace {

// Calls f on every k-subset of {0..m-1} in lexicographic order.
void for_each_combination(std::size_t m, std::size_t k, const std::function<void(const std::vector<std::size_t>&)>& f) {
  if (k > m) return;
  std::vector<std::size_t> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    f(idx);
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == m - k + i - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

std::vector<IVec> pick(const std::vector<IVec>& all, const std::vector<std::size_t>& idx) {
  std::vector<IVec> r;
  r.reserve(idx.size());
  for (auto i : idx) r.push_back(all[i]);
  return r;
}

QVec primitive_q(const QVec& w) { return to_q(primitive(w)); }

}  // namespace

Cone::Cone(std::size_t ambient_dim, std::vector<IVec> generators) : dim_(ambient_dim), gens_(std::move(generators)) {
  if (dim_ == 0) throw MathError("lattice rank must be positive");
  for (const auto& g : gens_) {
    if (g.size() != dim_) throw MathError("generator dimension mismatch");
    if (std::all_of(g.begin(), g.end(), [](long long x) { return x == 0; }))
      throw MathError("cone generators must be nonzero");
  }
  if (gens_.empty()) return;
  QMat qg = to_q(gens_);
  rank_ = rank(qg);

  // Basis of the span taken among the generators themselves.
  std::vector<QVec> basis;
  for (const auto& g : qg) {
    auto trial = basis;
    trial.push_back(g);
    if (rank(trial) == trial.size()) basis = std::move(trial);
  }

  std::set<std::vector<std::size_t>> seen;
  for_each_combination(gens_.size(), rank_ - 1, [&](const std::vector<std::size_t>& t) {
    QMat sys;
    for (auto i : t) {
      QVec row;
      for (const auto& b : basis) row.push_back(dot(b, qg[i]));
      sys.push_back(row);
    }
    if (rank(sys) != rank_ - 1) return;
    auto ns = nullspace(sys, rank_);
    if (ns.size() != 1) return;
    QVec w(dim_, BigRational(0));
    for (std::size_t k = 0; k < rank_; ++k)
      for (std::size_t c = 0; c < dim_; ++c) w[c] += ns[0][k] * basis[k][c];
    int sign = 0;
    bool mixed = false;
    std::vector<std::size_t> members;
    for (std::size_t a = 0; a < qg.size(); ++a) {
      int s = sgn(dot(w, qg[a]));
      if (s == 0) {
        members.push_back(a);
        continue;
      }
      if (sign == 0) sign = s;
      else if (s != sign) mixed = true;
    }
    if (mixed || sign == 0) return;
    if (!seen.insert(members).second) return;
    if (sign < 0)
      for (auto& x : w) x = -x;
    facets_.push_back({primitive_q(w), members});
  });
}

bool Cone::pointed() const {
  if (gens_.empty()) return true;
  QMat normals;
  for (const auto& f : facets_) normals.push_back(f.normal);
  // The facet normals must separate the span: their restriction to it has full rank.
  QMat gram;
  for (const auto& nrm : normals) {
    QVec row;
    for (const auto& g : gens_) row.push_back(dot(nrm, to_q(g)));
    gram.push_back(row);
  }
  return !normals.empty() && rank(gram) == rank_;
}

void Cone::check_dim(const QVec& v) const {
  if (v.size() != dim_) throw MathError("dimension mismatch in cone membership");
}

bool Cone::in_span(const QVec& v) const {
  if (gens_.empty()) return std::all_of(v.begin(), v.end(), [](const BigRational& x) { return x == 0; });
  QMat m = to_q(gens_);
  m.push_back(v);
  return rank(m) == rank_;
}

bool Cone::contains(const QVec& v) const {
  check_dim(v);
  if (!in_span(v)) return false;
  for (const auto& f : facets_)
    if (dot(f.normal, v) < 0) return false;
  return true;
}

bool Cone::interior(const QVec& v) const {
  check_dim(v);
  if (!full_dimensional()) return false;
  for (const auto& f : facets_)
    if (dot(f.normal, v) <= 0) return false;
  return true;
}

bool Cone::relative_interior(const QVec& v) const {
  check_dim(v);
  if (!in_span(v)) return false;
  for (const auto& f : facets_)
    if (dot(f.normal, v) <= 0) return false;
  return true;
}

std::optional<QVec> Cone::certificate(const QVec& v) const {
  check_dim(v);
  if (gens_.empty()) {
    if (contains(v)) return QVec{};
    return std::nullopt;
  }
  std::optional<QVec> found;
  for_each_combination(gens_.size(), rank_, [&](const std::vector<std::size_t>& idx) {
    if (found) return;
    QMat a(dim_, QVec(idx.size()));
    for (std::size_t c = 0; c < dim_; ++c)
      for (std::size_t k = 0; k < idx.size(); ++k) a[c][k] = qrat(gens_[idx[k]][c]);
    if (rank(a) != idx.size()) return;
    auto sol = solve(a, v);
    if (!sol) return;
    for (const auto& x : *sol)
      if (x < 0) return;
    QVec lam(gens_.size(), BigRational(0));
    for (std::size_t k = 0; k < idx.size(); ++k) lam[idx[k]] = (*sol)[k];
    found = lam;
  });
  return found;
}

Cone Cone::dual() const {
  if (!full_dimensional()) throw MathError("dual cone needs a full-dimensional cone");
  if (!pointed()) throw MathError("dual cone needs a pointed cone");
  std::vector<IVec> rays;
  for (const auto& f : facets_) rays.push_back(primitive(f.normal));
  std::sort(rays.begin(), rays.end());
  return Cone(dim_, rays);
}

std::vector<std::vector<std::size_t>> triangulate(const Cone& cone) {
  if (!cone.pointed()) throw MathError("triangulation failure: cone is not pointed");
  const auto& gens = cone.generators();
  std::function<std::vector<std::vector<std::size_t>>(const std::vector<std::size_t>&)> tri =
      [&](const std::vector<std::size_t>& idx) -> std::vector<std::vector<std::size_t>> {
    auto sub = pick(gens, idx);
    if (sub.empty() || rank(sub) == sub.size()) return {idx};
    Cone c(cone.ambient_dim(), sub);
    std::vector<std::vector<std::size_t>> out;
    for (const auto& f : c.facets()) {
      if (std::find(f.members.begin(), f.members.end(), 0) != f.members.end()) continue;
      std::vector<std::size_t> face;
      for (auto m : f.members) face.push_back(idx[m]);
      for (auto& s : tri(face)) {
        std::vector<std::size_t> piece{idx[0]};
        piece.insert(piece.end(), s.begin(), s.end());
        out.push_back(piece);
      }
    }
    return out;
  };
  std::vector<std::size_t> all(gens.size());
  std::iota(all.begin(), all.end(), 0);
  auto pieces = tri(all);
  for (auto& p : pieces) std::sort(p.begin(), p.end());
  std::sort(pieces.begin(), pieces.end());
  return pieces;
}

std::vector<std::vector<IVec>> unimodular_refinement(const std::vector<IVec>& rays) {
  const std::size_t r = rays.size();
  std::vector<std::vector<IVec>> done, todo{rays};
  while (!todo.empty()) {
    auto cur = std::move(todo.back());
    todo.pop_back();
    if (cur.size() != r || cur[0].size() != r) throw MathError("stellar refinement needs a full simplicial cone");
    BigInt d = abs(det(cur));
    if (d == 0) throw MathError("degenerate simplicial cone");
    if (d == 1) {
      done.push_back(std::move(cur));
      continue;
    }
    // Columns of the matrix are the rays; λ = M^{-1} e_k for the first e_k
    // outside the sublattice gives a nonzero point of the parallelepiped.
    QMat m(r, QVec(r));
    for (std::size_t c = 0; c < r; ++c)
      for (std::size_t k = 0; k < r; ++k) m[c][k] = qrat(cur[k][c]);
    QMat inv = *inverse(m);
    for (std::size_t e = 0; e < r; ++e) {
      QVec frac(r);
      bool nonzero = false;
      for (std::size_t k = 0; k < r; ++k) {
        BigRational lam = inv[k][e];
        BigInt fl;
        mpz_fdiv_q(fl.get_mpz_t(), lam.get_num_mpz_t(), lam.get_den_mpz_t());
        frac[k] = lam - BigRational(fl);
        if (frac[k] != 0) nonzero = true;
      }
      if (!nonzero) continue;
      QVec v(r, BigRational(0));
      for (std::size_t k = 0; k < r; ++k)
        for (std::size_t c = 0; c < r; ++c) v[c] += frac[k] * qrat(cur[k][c]);
      IVec iv;
      for (const auto& x : v) iv.push_back(x.get_num().get_si());
      for (std::size_t k = 0; k < r; ++k) {
        if (frac[k] == 0) continue;
        auto piece = cur;
        piece[k] = iv;
        todo.push_back(std::move(piece));
      }
      break;
    }
  }
  return done;
}

AlphaResult alpha(const Cone& eff_cone, const IVec& anti_k) {
  if (!eff_cone.interior(anti_k)) throw MathError("anticanonical class is not interior to the effective cone");
  Cone dual = eff_cone.dual();
  auto pieces = triangulate(dual);
  AlphaResult res;
  BigRational coarse = 0;
  for (const auto& piece : pieces) {
    auto rays = pick(dual.generators(), piece);
    BigRational prod = 1;
    for (const auto& l : rays) prod *= qrat(dot(l, anti_k));
    coarse += BigRational(abs(det(rays))) / prod;
    ++res.simplicial_cones;
    for (const auto& uni : unimodular_refinement(rays)) {
      BigRational p = 1;
      for (const auto& l : uni) p *= qrat(dot(l, anti_k));
      res.value += 1 / p;
      ++res.unimodular_cones;
    }
  }
  if (coarse != res.value) throw MathError("triangulation failure: refinement changed the volume");
  return res;
}

std::vector<IVec> enumerate_dual_points(const Cone& eff_cone, const IVec& anti_k, long long m,
                                        const std::vector<std::pair<IVec, long long>>& extra) {
  if (!eff_cone.interior(anti_k))
    throw MathError("anticanonical class is not interior to the effective cone; the point set would be infinite");
  std::vector<IVec> out;
  if (m < 0) return out;
  const std::size_t r = anti_k.size();
  Cone dual = eff_cone.dual();
  std::vector<long long> bound(r, 0);
  for (const auto& rho : dual.generators()) {
    long long a = dot(rho, anti_k);
    for (std::size_t c = 0; c < r; ++c) bound[c] += (std::llabs(rho[c]) * m) / a + 1;
  }
  std::size_t pivot = r;
  for (std::size_t c = r; c-- > 0;)
    if (anti_k[c] != 0) {
      pivot = c;
      break;
    }
  IVec y(r, 0);
  std::function<void(std::size_t)> rec = [&](std::size_t c) {
    if (c == r) {
      long long rest = m;
      for (std::size_t k = 0; k < r; ++k)
        if (k != pivot) rest -= y[k] * anti_k[k];
      if (rest % anti_k[pivot] != 0) return;
      y[pivot] = rest / anti_k[pivot];
      if (std::llabs(y[pivot]) > bound[pivot]) return;
      for (const auto& g : eff_cone.generators())
        if (dot(y, g) < 0) return;
      for (const auto& [d, lo] : extra)
        if (dot(y, d) < lo) return;
      out.push_back(y);
      return;
    }
    if (c == pivot) {
      rec(c + 1);
      return;
    }
    for (long long v = -bound[c]; v <= bound[c]; ++v) {
      y[c] = v;
      rec(c + 1);
    }
    y[c] = 0;
  };
  rec(0);
  std::sort(out.begin(), out.end());
  return out;
}

long long delta(const IVec& anti_k) {
  long long g = 0;
  for (auto x : anti_k) g = std::gcd(g, std::llabs(x));
  if (g == 0) throw MathError("delta of the zero class");
  return g;
}

}  // namespace maninlab
