#include "maninlab/series.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "maninlab/finite_field.hpp"
#include "maninlab/points.hpp"

namespace maninlab {

namespace {

long long ceil_div(long long a, long long b) {
  long long q = a / b;
  if ((a % b != 0) && ((a > 0) == (b > 0))) ++q;
  return q;
}

BigRational qpow(std::uint64_t q, long long e) { return rpow(BigRational(BigInt(std::to_string(q))), e); }

void require_pattern(const Variety& v, const Pattern& e) {
  if (e.size() != v.num_generators()) throw MathError("pattern length must equal the number of generators");
  for (auto x : e)
    if (x < 0) throw MathError("pattern entries must be nonnegative");
}

}  // namespace

long long series_exponent(const Variety& v, const Pattern& e, const std::vector<long long>& d) {
  const std::size_t ns = v.num_s();
  long long a = 0, b = 0;
  bool have_a = false, have_b = false;
  for (const auto& m : v.monomials()) {
    long long s = 0;
    for (const auto& [idx, exp] : m.vars)
      if (idx < ns) s += exp * (d[idx] + e[idx]);
    long long g = e[v.t_index(m.j)];
    long long eps = v.t_exponent(m.j);
    if (eps == 1) {
      long long val = g + s;
      if (!have_a || val < a) a = val;
      have_a = true;
    }
    long long inner = eps * g + s;
    if (!have_b || inner < b) b = inner;
    have_b = true;
  }
  if (v.shape() == RelationShape::Linear) return a;
  return a - ceil_div(a - b, 2);
}

TruncatedSeries::TruncatedSeries(std::vector<std::size_t> variables, unsigned box)
    : vars_(std::move(variables)), box_(box) {
  std::size_t n = 1;
  for (std::size_t i = 0; i < vars_.size(); ++i) n *= box_ + 1;
  data_.resize(n);
}

std::vector<long long> TruncatedSeries::point(std::size_t index) const {
  std::vector<long long> d(vars_.size());
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    d[i] = static_cast<long long>(index % (box_ + 1));
    index /= box_ + 1;
  }
  return d;
}

std::size_t TruncatedSeries::index(const std::vector<long long>& d) const {
  std::size_t idx = 0;
  for (std::size_t i = vars_.size(); i-- > 0;) idx = idx * (box_ + 1) + static_cast<std::size_t>(d[i]);
  return idx;
}

RhoPolynomial TruncatedSeries::coeff(const std::vector<long long>& d) const {
  if (d.size() != vars_.size()) throw MathError("exponent vector length mismatch");
  for (auto x : d)
    if (x < 0 || x > static_cast<long long>(box_)) return {};
  return data_[index(d)];
}

std::vector<std::size_t> active_s_variables(const Variety& v) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < v.num_s(); ++i) {
    bool used = false;
    for (const auto& m : v.monomials())
      for (const auto& [idx, exp] : m.vars)
        if (idx == i && exp > 0) used = true;
    if (used) out.push_back(i);
  }
  return out;
}

TruncatedSeries series_truncate(const Variety& v, const Pattern& e, unsigned box) {
  require_pattern(v, e);
  auto vars = active_s_variables(v);
  if (v.num_s() > 6) throw CapExceeded("series truncation supports at most 6 s-generators");
  if (box > 32) throw CapExceeded("box bound exceeds 32");
  double cells = std::pow(static_cast<double>(box) + 1, static_cast<double>(vars.size()));
  if (cells > static_cast<double>(1u << 22)) throw CapExceeded("box has more than 2^22 cells");
  TruncatedSeries s(vars, box);
  const std::size_t k = vars.size();
  std::vector<long long> full(v.num_s(), 0);
  for (std::size_t idx = 0; idx < s.size(); ++idx) {
    auto d = s.point(idx);
    std::vector<std::int64_t> acc;
    for (std::uint32_t mu = 0; mu < (1u << k); ++mu) {
      bool ok = true;
      for (std::size_t i = 0; i < k; ++i) {
        long long di = d[i] - ((mu >> i) & 1);
        if (di < 0) ok = false;
        full[vars[i]] = di;
      }
      if (!ok) continue;
      long long ex = series_exponent(v, e, full);
      if (ex < 0) throw MathError("negative ρ exponent");
      if (acc.size() <= static_cast<std::size_t>(ex)) acc.resize(static_cast<std::size_t>(ex) + 1, 0);
      acc[static_cast<std::size_t>(ex)] += (__builtin_popcount(mu) % 2 == 0) ? 1 : -1;
    }
    s.at(idx) = RhoPolynomial(std::move(acc));
  }
  return s;
}

DegreeBoundReport check_degree_bounds(const TruncatedSeries& s, const RhoPolynomial& constant_term) {
  DegreeBoundReport r;
  long long base = constant_term.is_zero() ? 0 : constant_term.degree().value();
  for (std::size_t idx = 0; idx < s.size(); ++idx) {
    auto d = s.point(idx);
    long long norm = std::accumulate(d.begin(), d.end(), 0LL);
    if (norm == 0) continue;
    const auto& p = s.at(idx);
    if (p.is_zero()) continue;
    long long deg = p.degree().value();
    if (!r.max_excess || deg - norm > *r.max_excess) r.max_excess = deg - norm;
    bool hyp = 16 * deg <= 15 * norm - 17;
    bool lem = deg <= norm + base;
    if (!hyp) r.hypothesis_pass = false;
    if (!lem) r.lemma_pass = false;
    if (!hyp || !lem) r.violations.push_back(d);
  }
  return r;
}

RhoPolynomial dp6a2_coeff(const std::vector<long long>& nu, const std::vector<long long>& d) {
  if (nu.size() != 3 || d.size() != 3) throw MathError("dp6a2_coeff takes ν, d ∈ N³");
  std::vector<std::int64_t> acc;
  for (int g1 = 0; g1 <= 1; ++g1)
    for (int g2 = 0; g2 <= 1; ++g2)
      for (int m1 = 0; m1 <= 1; ++m1)
        for (int m2 = 0; m2 <= 1; ++m2)
          for (int m3 = 0; m3 <= 1; ++m3) {
            if (m1 + g1 > d[0] || m2 + g1 + 2 * g2 > d[1] || m3 + g1 + 2 * g2 > d[2]) continue;
            long long x2 = d[1] + nu[1] - m2, x3 = d[2] + nu[2] - m3;
            long long top = std::min(x2, x3);
            long long low = std::min({d[0] + nu[0] - m1, x2 - 2 * g2, x3 - 2 * g2});
            long long phi = top - ceil_div(top - low, 2);
            if (phi < 0) throw MathError("negative ρ exponent");
            if (acc.size() <= static_cast<std::size_t>(phi)) acc.resize(static_cast<std::size_t>(phi) + 1, 0);
            acc[static_cast<std::size_t>(phi)] += ((g1 + g2 + m1 + m2 + m3) % 2 == 0) ? 1 : -1;
          }
  return RhoPolynomial(std::move(acc));
}

std::vector<long long> dp6a2_nu(const Pattern& e) {
  if (e.size() != 7) throw MathError("dP6-A2 patterns have 7 entries");
  return {e[1] + 2 * e[4], e[2] + e[5], e[3] + e[6]};
}

DP6A2BoundReport check_dp6a2_bounds(const std::vector<long long>& nu, unsigned box) {
  DP6A2BoundReport r;
  auto absdiff = [](long long a, long long b) { return a > b ? a - b : b - a; };
  bool bis = nu == std::vector<long long>{0, 1, 1};
  for (long long d1 = 0; d1 <= box; ++d1)
    for (long long d2 = 0; d2 <= box; ++d2)
      for (long long d3 = 0; d3 <= box; ++d3) {
        auto a = dp6a2_coeff(nu, {d1, d2, d3});
        ++r.checked;
        bool vanish_region = d1 >= 5 + absdiff(nu[1], nu[0]) + absdiff(nu[2], nu[0]) ||
                             d2 >= 7 + absdiff(nu[0], nu[1]) + absdiff(nu[2], nu[1]) ||
                             d3 >= 7 + absdiff(nu[0], nu[2]) + absdiff(nu[1], nu[2]);
        if (vanish_region && !a.is_zero()) r.vanishing_pass = false;
        if (a.is_zero()) continue;
        long long deg = a.degree().value();
        if (deg > d1 + d2 + d3 + std::min(nu[1], nu[2])) r.majdeg_pass = false;
        if (bis && 2 * deg > 2 * (d1 + d2 + d3) + 1) r.majdegbis_pass = false;
      }
  return r;
}

namespace {

// Σ_{n ≥ n0} term(n), given term(n + period) = ratio · term(n) for n ≥ start.
// The recurrence is re-checked on two periods before it is used.
BigRational eventual_geometric_sum(long long n0, long long start, long long period, const BigRational& ratio,
                                   const std::function<BigRational(long long)>& term) {
  if (ratio >= 1 || ratio < 0) throw MathError("divergent geometric tail");
  start = std::max(start, n0);
  BigRational sum = 0;
  for (long long n = n0; n < start; ++n) sum += term(n);
  for (long long r = 0; r < period; ++r) {
    BigRational t0 = term(start + r);
    BigRational t1 = term(start + r + period);
    BigRational t2 = term(start + r + 2 * period);
    if (t1 != ratio * t0 || t2 != ratio * t1)
      throw MathError("tail is not geometric from the claimed start: " + to_string(t0) + " " + to_string(t1) + " " + to_string(t2) + " ratio " + to_string(ratio));
    sum += t0 / (1 - ratio);
  }
  return sum;
}

struct SeparatedShape {
  std::vector<long long> c, b;  // per monomial: constant and exponent of its s-variable
  std::vector<bool> squared;
  std::vector<std::size_t> var;  // s-variable of each monomial
};

SeparatedShape separated_shape(const Variety& v, const Pattern& e) {
  SeparatedShape sh;
  const std::size_t ns = v.num_s();
  std::vector<bool> seen(ns, false);
  for (const auto& m : v.monomials()) {
    std::size_t var = ns;
    long long b = 0;
    for (const auto& [idx, exp] : m.vars) {
      if (idx >= ns || exp == 0) continue;
      if (var != ns) throw MathError("exact evaluation needs one s-variable per monomial");
      var = idx;
      b = exp;
    }
    if (var == ns) throw MathError("exact evaluation needs one s-variable per monomial");
    if (seen[var]) throw MathError("exact evaluation needs distinct s-variables across monomials");
    seen[var] = true;
    long long eps = v.t_exponent(m.j);
    sh.c.push_back(eps * e[v.t_index(m.j)] + b * e[var]);
    sh.b.push_back(b);
    sh.squared.push_back(eps == 2);
    sh.var.push_back(var);
  }
  return sh;
}

// Σ_d q^{φ(d) − |d|} over the active variables.
BigRational exact_sum(const Variety& v, const SeparatedShape& sh, std::uint64_t q) {
  const BigRational Q(BigInt(std::to_string(q)));
  const BigRational geo = 1 / (1 - 1 / Q);
  const std::size_t k = sh.c.size();
  // Mass of {x_j ≥ m} for x_j = c_j + b_j d_j weighted by q^{−d_j}.
  auto tail = [&](std::size_t j, long long m) -> BigRational {
    long long steps = std::max(0LL, ceil_div(m - sh.c[j], sh.b[j]));
    return qpow(q, -steps) * geo;
  };
  if (v.shape() == RelationShape::Linear) {
    long long lo = *std::min_element(sh.c.begin(), sh.c.end());
    long long hi = *std::max_element(sh.c.begin(), sh.c.end());
    long long L = 1;
    BigRational inv_sum = 0;
    for (auto b : sh.b) {
      L = std::lcm(L, b);
      inv_sum += BigRational(1, static_cast<long>(b));
    }
    auto mass = [&](long long m) -> BigRational {
      BigRational p = 1;
      for (std::size_t j = 0; j < k; ++j) p *= tail(j, m);
      return p;
    };
    auto term = [&](long long m) -> BigRational { return qpow(q, m) * (mass(m) - mass(m + 1)); };
    BigRational exponent = BigRational(static_cast<long>(L)) * (1 - inv_sum);
    if (exponent.get_den() != 1) throw MathError("non-integral tail ratio");
    BigRational ratio = qpow(q, exponent.get_num().get_si());
    return eventual_geometric_sum(lo, hi, L, ratio, term);
  }

  // Quasi-linear: with a = min over unit-exponent monomials and x the value of
  // the squared monomial, the exponent is min(a, ⌊(a + x)/2⌋).
  std::vector<std::size_t> unit;
  std::size_t sq = k;
  for (std::size_t j = 0; j < k; ++j) {
    if (sh.b[j] != 1) throw MathError("exact quasi-linear evaluation needs unit s-exponents");
    if (sh.squared[j]) {
      if (sq != k) throw MathError("more than one squared monomial");
      sq = j;
    } else {
      unit.push_back(j);
    }
  }
  if (sq == k || unit.size() < 2) throw MathError("unsupported quasi-linear shape");
  const long long c1 = sh.c[sq];
  long long lo = sh.c[unit[0]], hi = sh.c[unit[0]];
  for (auto j : unit) {
    lo = std::min(lo, sh.c[j]);
    hi = std::max(hi, sh.c[j]);
  }
  auto mass = [&](long long a) -> BigRational {
    BigRational p = 1;
    for (auto j : unit) p *= tail(j, a);
    return p;
  };
  auto weight = [&](long long a) -> BigRational { return mass(a) - mass(a + 1); };
  // Σ_{u=1}^{n} q^{⌊u/2⌋} = γ₀ + β_{n mod 2} q^{⌊n/2⌋}.
  const BigRational gamma0 = -(Q + 1) / (Q - 1);
  const BigRational beta[2] = {(Q + 1) / (Q - 1), 2 * Q / (Q - 1)};
  auto inner = [&](long long a) -> BigRational {
    if (a <= c1) return qpow(q, a) * geo;
    long long n = a - c1;
    return qpow(q, c1) * (geo + gamma0 + beta[n % 2] * qpow(q, n / 2));
  };
  long long start = std::max(hi, c1 + 1);
  BigRational head = 0;
  for (long long a = lo; a < start; ++a) head += weight(a) * inner(a);
  const long long u = static_cast<long long>(unit.size());
  auto flat = [&](long long a) -> BigRational { return weight(a) * qpow(q, c1) * (geo + gamma0); };
  auto growing = [&](long long a) -> BigRational {
    long long n = a - c1;
    return weight(a) * qpow(q, c1) * beta[n % 2] * qpow(q, n / 2);
  };
  BigRational t1 = eventual_geometric_sum(start, start, 2, qpow(q, -2 * u), flat);
  BigRational t2 = eventual_geometric_sum(start, start, 2, qpow(q, 1 - 2 * u), growing);
  return head + t1 + t2;
}

}  // namespace

FtildeValue exact_ftilde(const Variety& v, const Pattern& e, std::uint64_t q, unsigned box) {
  require_pattern(v, e);
  if (!is_prime_power(q)) throw MathError("q must be a prime power");
  SeparatedShape sh = separated_shape(v, e);
  const std::size_t k = sh.c.size();
  const BigRational Q(BigInt(std::to_string(q)));
  const BigRational prefactor = rpow(1 - 1 / Q, static_cast<long>(k));

  FtildeValue out;
  out.value = prefactor * exact_sum(v, sh, q);
  if (out.value <= 0) throw MathError("invariant violation: non-positive F̃ value");

  // Box cross-check, with the box shrunk so that it has at most 2^12 cells.
  unsigned b = box;
  while (b > 1 && std::pow(static_cast<double>(b) + 1, static_cast<double>(k)) > static_cast<double>(1u << 12)) --b;
  out.box = b;
  std::vector<long long> full(v.num_s(), 0), d(k, 0);
  BigRational trunc = 0;
  while (true) {
    for (std::size_t j = 0; j < k; ++j) full[sh.var[j]] = d[j];
    long long norm = std::accumulate(d.begin(), d.end(), 0LL);
    trunc += qpow(q, series_exponent(v, e, full) - norm);
    std::size_t j = 0;
    while (j < k && ++d[j] > static_cast<long long>(b)) d[j++] = 0;
    if (j == k) break;
  }
  out.truncated = prefactor * trunc;

  // φ − |d| ≤ C₀ − |d|/2 from min ≤ weighted mean over the unit-exponent
  // monomials, which needs Σ 1/b_j ≥ 2 over them.
  BigRational sigma = 0, weighted = 0;
  for (std::size_t j = 0; j < k; ++j) {
    if (sh.squared[j]) continue;
    sigma += BigRational(1, static_cast<long>(sh.b[j]));
    weighted += make_rational(static_cast<long>(sh.c[j]), static_cast<long>(sh.b[j]));
  }
  if (sigma < 2) throw MathError("no certified tail bound for this shape");
  BigRational c0 = weighted / sigma;
  BigInt c0_floor;
  mpz_fdiv_q(c0_floor.get_mpz_t(), c0.get_num_mpz_t(), c0.get_den_mpz_t());
  out.tail_bound = BigRational(static_cast<long>(k)) * rpow(BigRational(2), static_cast<long>(k)) *
                   qpow(q, c0_floor.get_si() - static_cast<long long>((b + 1) / 2));
  BigRational gap = out.value - out.truncated;
  out.consistent = gap >= 0 && gap <= out.tail_bound;
  return out;
}

BigRational exact_ftilde_at(const Variety& v, const Pattern& e, std::uint64_t q) {
  FtildeValue r = exact_ftilde(v, e, q);
  if (!r.consistent) throw MathError("invariant violation: exact F̃ value disagrees with its truncation");
  return r.value;
}

BigRational local_factor(const Variety& v, const Pattern& e, std::uint64_t q) {
  long long w = std::accumulate(e.begin(), e.end(), 0LL);
  return qpow(q, -w) * exact_ftilde_at(v, e, q);
}

namespace {

// Points of F_q^{I∪J} with the masked coordinates zero on which the relation
// vanishes, by enumeration. Monomials with disjoint variables are enumerated
// one at a time and their value distributions convolved.
BigInt relation_zeros(const Variety& v, Mask zero, std::uint64_t q) {
  FieldPtr F = field_of_size(q);
  const std::size_t N = v.num_generators();
  Mask used = 0;
  bool disjoint = true;
  for (const auto& m : v.monomials()) {
    if (used & m.support) disjoint = false;
    used |= m.support;
  }
  unsigned free_vars = 0;
  for (std::size_t k = 0; k < N; ++k)
    if (!((used >> k) & 1) && !((zero >> k) & 1)) ++free_vars;
  BigInt factor = ipow(BigInt(std::to_string(q)), free_vars);

  auto enumerate = [&](const std::vector<std::size_t>& vars, auto&& visit) {
    std::vector<FiniteField::Elem> x(N, 0);
    std::vector<std::size_t> live;
    for (auto k : vars)
      if (!((zero >> k) & 1)) live.push_back(k);
    while (true) {
      visit(x);
      std::size_t i = 0;
      while (i < live.size() && ++x[live[i]] == q) x[live[i++]] = 0;
      if (i == live.size()) break;
    }
  };
  auto monomial_value = [&](const Monomial& m, const std::vector<FiniteField::Elem>& x) {
    FiniteField::Elem t = 1;
    for (const auto& [idx, e] : m.vars) t = F->mul(t, F->pow(x[idx], static_cast<std::uint64_t>(e)));
    return t;
  };

  if (disjoint) {
    std::vector<BigInt> dist(q, 0);
    dist[0] = 1;
    for (const auto& m : v.monomials()) {
      std::vector<std::size_t> vars;
      for (const auto& [idx, e] : m.vars) vars.push_back(idx);
      std::vector<std::uint64_t> local(q, 0);
      enumerate(vars, [&](const std::vector<FiniteField::Elem>& x) { ++local[monomial_value(m, x)]; });
      std::vector<BigInt> next(q, 0);
      for (std::uint32_t a = 0; a < q; ++a) {
        if (dist[a] == 0) continue;
        for (std::uint32_t b = 0; b < q; ++b)
          if (local[b]) next[F->add(a, b)] += dist[a] * BigInt(std::to_string(local[b]));
      }
      dist = std::move(next);
    }
    return factor * dist[0];
  }
  std::vector<std::size_t> vars;
  for (std::size_t k = 0; k < N; ++k)
    if ((used >> k) & 1) vars.push_back(k);
  std::uint64_t count = 0;
  enumerate(vars, [&](const std::vector<FiniteField::Elem>& x) {
    FiniteField::Elem s = 0;
    for (const auto& m : v.monomials()) s = F->add(s, monomial_value(m, x));
    if (s == 0) ++count;
  });
  return factor * BigInt(std::to_string(count));
}

Pattern pattern_of(const Variety& v, Mask m) {
  Pattern e(v.num_generators(), 0);
  for (std::size_t k = 0; k < e.size(); ++k) e[k] = (m >> k) & 1;
  return e;
}

}  // namespace

BigRational local_density(const Variety& v, const Pattern& e, std::uint64_t q) {
  require_pattern(v, e);
  if (!is_prime_power(q)) throw MathError("q must be a prime power");
  if (q > 1024) throw CapExceeded("density enumeration needs q ≤ 2^10");
  Mask zero = 0;
  for (std::size_t k = 0; k < e.size(); ++k) {
    if (e[k] > 1) throw MathError("density patterns are 0/1");
    if (e[k] == 1) zero |= Mask{1} << k;
  }
  BigRational count(relation_zeros(v, zero, q));
  return count * qpow(q, -(static_cast<long long>(v.num_generators()) - 1));
}

LocalIdentityReport check_local_identity(const Variety& v, std::uint64_t q) {
  LocalIdentityReport r;
  r.q = q;
  r.l1 = 0;
  r.l2 = 0;
  const Mask full = (Mask{1} << v.num_generators()) - 1;
  for (Mask m = 0; m <= full; ++m) {
    long long mu = v.mu0(m);
    if (mu == 0) continue;
    Pattern e = pattern_of(v, m);
    r.l1 += BigRational(static_cast<long>(mu)) * local_factor(v, e, q);
    r.l2 += BigRational(static_cast<long>(mu)) * local_density(v, e, q);
  }
  auto pc = count_points(v, q, CountMethod::Strata);
  const BigRational Q(BigInt(std::to_string(q)));
  r.r = rpow(1 - 1 / Q, static_cast<long>(v.pic_rank())) * BigRational(pc.total) / rpow(Q, v.dimension());
  r.pass = r.l1 == r.l2 && r.l2 == r.r;
  return r;
}

std::vector<ConvergenceCase> convergence_certificate(const Variety& v) {
  std::vector<ConvergenceCase> out;
  const Mask full = (Mask{1} << v.num_generators()) - 1;
  std::vector<long long> zero_d(v.num_s(), 0);
  for (Mask m = 1; m <= full; ++m) {
    long long mu = v.mu0(m);
    if (mu == 0) continue;
    Pattern e = pattern_of(v, m);
    ConvergenceCase c;
    c.pattern = m;
    c.mu0 = mu;
    c.weight = std::accumulate(e.begin(), e.end(), 0LL);
    if (v.shape() == RelationShape::Linear) {
      c.constant = BigRational(static_cast<long>(series_exponent(v, e, zero_d)));
    } else {
      // Lemma constant: the minimum over the unit-exponent monomials at d = 0.
      SeparatedShape sh = separated_shape(v, e);
      long long a = -1, sq = -1;
      std::vector<long long> unit_c;
      for (std::size_t j = 0; j < sh.c.size(); ++j) {
        if (sh.squared[j]) sq = sh.c[j];
        else unit_c.push_back(sh.c[j]);
      }
      a = *std::min_element(unit_c.begin(), unit_c.end());
      c.constant = BigRational(static_cast<long>(a));
      bool refined = sq == 0 && unit_c.size() == 2 && unit_c[0] == 1 && unit_c[1] == 1;
      if (refined) c.constant = BigRational(1, 2);
    }
    c.pass = c.constant - qrat(c.weight) < -1;
    out.push_back(c);
  }
  return out;
}

}  // namespace maninlab
