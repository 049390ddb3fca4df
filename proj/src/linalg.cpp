#include "maninlab/linalg.hpp"

#include <numeric>

namespace maninlab {

QVec to_q(const IVec& v) {
  QVec r;
  r.reserve(v.size());
  for (auto x : v) r.emplace_back(BigInt(static_cast<long>(x)));
  return r;
}

QMat to_q(const std::vector<IVec>& rows) {
  QMat r;
  r.reserve(rows.size());
  for (const auto& v : rows) r.push_back(to_q(v));
  return r;
}

BigRational dot(const QVec& a, const QVec& b) {
  if (a.size() != b.size()) throw MathError("dimension mismatch");
  BigRational s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

long long dot(const IVec& a, const IVec& b) {
  if (a.size() != b.size()) throw MathError("dimension mismatch");
  long long s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

std::vector<std::size_t> rref(QMat& a) {
  std::vector<std::size_t> pivots;
  if (a.empty()) return pivots;
  const std::size_t m = a.size(), n = a[0].size();
  std::size_t row = 0;
  for (std::size_t col = 0; col < n && row < m; ++col) {
    std::size_t piv = row;
    while (piv < m && a[piv][col] == 0) ++piv;
    if (piv == m) continue;
    std::swap(a[piv], a[row]);
    BigRational inv = 1 / a[row][col];
    for (auto& x : a[row]) x *= inv;
    for (std::size_t r = 0; r < m; ++r) {
      if (r == row || a[r][col] == 0) continue;
      BigRational c = a[r][col];
      for (std::size_t k = col; k < n; ++k) a[r][k] -= c * a[row][k];
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

std::size_t rank(const QMat& a) {
  QMat c = a;
  return rref(c).size();
}

std::size_t rank(const std::vector<IVec>& rows) { return rank(to_q(rows)); }

BigRational det(const QMat& a) {
  const std::size_t n = a.size();
  for (const auto& r : a)
    if (r.size() != n) throw MathError("determinant of a non-square matrix");
  QMat m = a;
  BigRational d = 1;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && m[piv][col] == 0) ++piv;
    if (piv == n) return 0;
    if (piv != col) {
      std::swap(m[piv], m[col]);
      d = -d;
    }
    d *= m[col][col];
    for (std::size_t r = col + 1; r < n; ++r) {
      if (m[r][col] == 0) continue;
      BigRational c = m[r][col] / m[col][col];
      for (std::size_t k = col; k < n; ++k) m[r][k] -= c * m[col][k];
    }
  }
  return d;
}

BigInt det(const std::vector<IVec>& rows) {
  BigRational d = det(to_q(rows));
  return d.get_num();
}

std::optional<QMat> inverse(const QMat& a) {
  const std::size_t n = a.size();
  QMat aug(n, QVec(2 * n, BigRational(0)));
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i].size() != n) throw MathError("inverse of a non-square matrix");
    for (std::size_t j = 0; j < n; ++j) aug[i][j] = a[i][j];
    aug[i][n + i] = 1;
  }
  auto piv = rref(aug);
  if (piv.size() < n || piv[n - 1] != n - 1) return std::nullopt;
  QMat inv(n, QVec(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) inv[i][j] = aug[i][n + j];
  return inv;
}

std::optional<QVec> solve(const QMat& a, const QVec& b) {
  if (a.size() != b.size()) throw MathError("dimension mismatch");
  if (a.empty()) return QVec{};
  const std::size_t n = a[0].size();
  QMat aug = a;
  for (std::size_t i = 0; i < aug.size(); ++i) aug[i].push_back(b[i]);
  auto piv = rref(aug);
  if (!piv.empty() && piv.back() == n) return std::nullopt;
  QVec x(n, BigRational(0));
  for (std::size_t r = 0; r < piv.size(); ++r) x[piv[r]] = aug[r][n];
  return x;
}

std::vector<QVec> nullspace(const QMat& a, std::size_t ncols) {
  QMat m = a;
  for (const auto& r : m)
    if (r.size() != ncols) throw MathError("dimension mismatch");
  auto piv = rref(m);
  std::vector<bool> is_piv(ncols, false);
  for (auto p : piv) is_piv[p] = true;
  std::vector<QVec> basis;
  for (std::size_t free = 0; free < ncols; ++free) {
    if (is_piv[free]) continue;
    QVec v(ncols, BigRational(0));
    v[free] = 1;
    for (std::size_t r = 0; r < piv.size(); ++r) v[piv[r]] = -m[r][free];
    basis.push_back(std::move(v));
  }
  return basis;
}

IVec primitive(const QVec& v) {
  BigInt l = 1;
  for (const auto& x : v) l = lcm(l, BigInt(x.get_den()));
  std::vector<BigInt> iv;
  BigInt g = 0;
  for (const auto& x : v) {
    BigInt y = BigInt(x.get_num()) * (l / BigInt(x.get_den()));
    g = gcd(g, y);
    iv.push_back(y);
  }
  if (g == 0) throw MathError("primitive vector of zero");
  IVec r;
  for (auto& y : iv) {
    BigInt z = y / g;
    if (!z.fits_slong_p()) throw MathError("coordinate overflow");
    r.push_back(z.get_si());
  }
  return r;
}

IVec primitive(const IVec& v) { return primitive(to_q(v)); }

std::size_t fq_rref(const FiniteField& k, std::vector<FqRow>& a, std::vector<std::size_t>* pivots) {
  if (a.empty()) return 0;
  const std::size_t m = a.size(), n = a[0].size();
  std::size_t row = 0;
  for (std::size_t col = 0; col < n && row < m; ++col) {
    std::size_t piv = row;
    while (piv < m && a[piv][col] == 0) ++piv;
    if (piv == m) continue;
    std::swap(a[piv], a[row]);
    auto inv = k.inv(a[row][col]);
    for (auto& x : a[row]) x = k.mul(x, inv);
    for (std::size_t r = 0; r < m; ++r) {
      if (r == row || a[r][col] == 0) continue;
      auto c = k.neg(a[r][col]);
      for (std::size_t j = col; j < n; ++j)
        if (a[row][j] != 0) a[r][j] = k.add(a[r][j], k.mul(c, a[row][j]));
    }
    if (pivots) pivots->push_back(col);
    ++row;
  }
  return row;
}

std::size_t fq_rank(const FiniteField& k, std::vector<FqRow> rows) { return fq_rref(k, rows); }

std::vector<FqRow> fq_nullspace(const FiniteField& k, std::vector<FqRow> rows, std::size_t ncols) {
  for (const auto& r : rows)
    if (r.size() != ncols) throw MathError("dimension mismatch");
  std::vector<std::size_t> piv;
  fq_rref(k, rows, &piv);
  std::vector<bool> is_piv(ncols, false);
  for (auto p : piv) is_piv[p] = true;
  std::vector<FqRow> basis;
  for (std::size_t free = 0; free < ncols; ++free) {
    if (is_piv[free]) continue;
    FqRow v(ncols, 0);
    v[free] = 1;
    for (std::size_t r = 0; r < piv.size(); ++r) v[piv[r]] = k.neg(rows[r][free]);
    basis.push_back(std::move(v));
  }
  return basis;
}

std::optional<std::size_t> fq_affine_dim(const FiniteField& k, std::vector<FqRow> rows, const FqRow& rhs,
                                         std::size_t ncols) {
  if (rows.size() != rhs.size()) throw MathError("dimension mismatch");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != ncols) throw MathError("dimension mismatch");
    rows[i].push_back(rhs[i]);
  }
  std::vector<std::size_t> piv;
  fq_rref(k, rows, &piv);
  if (!piv.empty() && piv.back() == ncols) return std::nullopt;
  return ncols - piv.size();
}

}  // namespace maninlab
