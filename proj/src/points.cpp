#include "maninlab/points.hpp"

#include <algorithm>

#include "maninlab/finite_field.hpp"
#include "maninlab/fq_poly.hpp"
#include "maninlab/parallel.hpp"

namespace maninlab {

namespace {

BigInt upow(std::uint64_t base, unsigned long e) { return ipow(BigInt(std::to_string(base)), e); }

// #{w ∈ (F_q^×)^k : Σ w = 0} and the same count for a fixed nonzero target.
BigInt sum_zero(unsigned k, std::uint64_t q) {
  BigInt qm1 = BigInt(std::to_string(q)) - 1;
  BigInt sign_term = (k % 2 == 0) ? qm1 : BigInt(-qm1);
  BigInt r = ipow(qm1, k) + sign_term;
  return r / BigInt(std::to_string(q));
}

BigInt sum_nonzero(unsigned k, std::uint64_t q) {
  BigInt qm1 = BigInt(std::to_string(q)) - 1;
  BigInt sign_term = (k % 2 == 0) ? BigInt(-1) : BigInt(1);
  BigInt r = ipow(qm1, k) + sign_term;
  return r / BigInt(std::to_string(q));
}

unsigned popcount(Mask m) { return static_cast<unsigned>(__builtin_popcount(m)); }

std::vector<std::uint64_t> prime_powers_from(std::size_t count, const std::vector<std::uint64_t>& skip) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t q = 2; out.size() < count; ++q)
    if (is_prime_power(q) && std::find(skip.begin(), skip.end(), q) == skip.end()) out.push_back(q);
  return out;
}

}  // namespace

BigInt count_bilinear(int n, std::uint64_t q) {
  if (n < 1) throw MathError("count_bilinear needs n ≥ 1");
  BigInt bq(std::to_string(q));
  BigInt value = 2 * bq - 1;
  for (int k = 2; k <= n; ++k) value = bq * value + (bq - 1) * ipow(bq, 2 * k - 2);
  return value;
}

BigInt count_bilinear_brute(int n, std::uint64_t q) {
  if (n < 1) throw MathError("count_bilinear_brute needs n ≥ 1");
  BigInt total_size = upow(q, 2 * n);
  if (total_size > BigInt(1) << 24) throw CapExceeded("q^{2n} exceeds 2^24");
  FieldPtr F = field_of_size(q);
  std::size_t len = static_cast<std::size_t>(2 * n);
  std::vector<FiniteField::Elem> x(len, 0);
  std::uint64_t count = 0;
  while (true) {
    FiniteField::Elem s = 0;
    for (int i = 0; i < n; ++i) s = F->add(s, F->mul(x[i], x[n + i]));
    if (s == 0) ++count;
    std::size_t k = 0;
    while (k < len && ++x[k] == q) x[k++] = 0;
    if (k == len) break;
  }
  return BigInt(std::to_string(count));
}

std::string to_string(CountMethod m) {
  switch (m) {
    case CountMethod::Brute: return "brute";
    case CountMethod::Strata: return "strata";
    case CountMethod::Polynomial: return "polynomial";
  }
  return "?";
}

BigInt stratum_count(const Variety& v, Mask support, std::uint64_t q) {
  BigInt qm1 = BigInt(std::to_string(q)) - 1;
  unsigned k = 0, squared = 0;
  for (const auto& m : v.monomials()) {
    if ((m.support & ~support) != 0) continue;
    ++k;
    if (v.t_exponent(m.j) == 2) ++squared;
    else if (v.t_exponent(m.j) != 1) throw MathError("unsupported t exponent");
  }
  unsigned size = popcount(support);
  if (k == 0) return ipow(qm1, size);
  if (k == 1) return 0;
  if (squared > 1) throw MathError("strata count supports at most one squared monomial");
  // Each surviving monomial carries its own t_j, so after fixing the other
  // coordinates the monomial values are independent: uniform on F^× for
  // exponent 1, and c·t² ≠ 0 for the squared one.
  BigInt t_count = squared == 0 ? sum_zero(k, q) : qm1 * sum_nonzero(k - 1, q);
  return ipow(qm1, size - k) * t_count;
}

bool brute_force_feasible(const Variety& v, std::uint64_t q) {
  if (v.num_generators() > 9) return false;
  return upow(q, v.num_generators()) <= BigInt(1) << 28;
}

namespace {

struct BruteTally {
  BigInt raw = 0, open = 0;
};

BruteTally brute_tally(const Variety& v, std::uint64_t q) {
  FieldPtr F = field_of_size(q);
  const std::size_t N = v.num_generators();
  std::vector<std::pair<std::size_t, std::vector<std::pair<std::size_t, long long>>>> terms;
  for (const auto& m : v.monomials()) terms.push_back({m.j, m.vars});
  const Mask full = (Mask{1} << N) - 1;
  // Split on the first coordinate so workers own disjoint slices.
  auto slices = parallel_map<std::pair<std::uint64_t, std::uint64_t>>(q, [&](std::size_t first) {
    std::vector<FiniteField::Elem> x(N, 0);
    x[0] = static_cast<FiniteField::Elem>(first);
    std::uint64_t raw = 0, open = 0;
    while (true) {
      Mask support = 0;
      for (std::size_t k = 0; k < N; ++k)
        if (x[k] != 0) support |= Mask{1} << k;
      if (v.relevant(support)) {
        FiniteField::Elem s = 0;
        for (const auto& [j, vars] : terms) {
          FiniteField::Elem term = 1;
          for (const auto& [idx, e] : vars) term = F->mul(term, F->pow(x[idx], static_cast<std::uint64_t>(e)));
          s = F->add(s, term);
        }
        if (s == 0) {
          ++raw;
          if (support == full) ++open;
        }
      }
      std::size_t k = 1;
      while (k < N && ++x[k] == q) x[k++] = 0;
      if (k == N) break;
    }
    return std::make_pair(raw, open);
  });
  BruteTally t;
  for (const auto& [raw, open] : slices) {
    t.raw += BigInt(std::to_string(raw));
    t.open += BigInt(std::to_string(open));
  }
  return t;
}

BigInt strata_raw(const Variety& v, std::uint64_t q) {
  const Mask full = (Mask{1} << v.num_generators()) - 1;
  BigInt raw = 0;
  for (Mask s = 0; s <= full; ++s)
    if (v.relevant(s)) raw += stratum_count(v, s, q);
  return raw;
}

BigInt quotient(const Variety& v, const BigInt& raw, std::uint64_t q) {
  BigInt torus = ipow(BigInt(std::to_string(q)) - 1, v.pic_rank());
  if (raw % torus != 0)
    throw MathError("invariant violation: torsor count " + to_string(raw) + " not divisible by (q-1)^r");
  return raw / torus;
}

}  // namespace

PointCountReport count_points(const Variety& v, std::uint64_t q, CountMethod method) {
  if (!is_prime_power(q)) throw MathError("q must be a prime power");
  PointCountReport rep;
  rep.q = q;
  const Mask full = (Mask{1} << v.num_generators()) - 1;
  if (method == CountMethod::Brute && brute_force_feasible(v, q)) {
    BruteTally t = brute_tally(v, q);
    rep.raw = t.raw;
    rep.total = quotient(v, t.raw, q);
    rep.open = quotient(v, t.open, q);
    rep.method = CountMethod::Brute;
    return rep;
  }
  if (method == CountMethod::Polynomial) {
    CountingPolynomial p = counting_polynomial(v);
    if (p.validated) {
      BigRational val = p.eval(BigRational(BigInt(std::to_string(q))));
      rep.total = val.get_num();
      rep.raw = rep.total * ipow(BigInt(std::to_string(q)) - 1, v.pic_rank());
      rep.open = quotient(v, v.relevant(full) ? stratum_count(v, full, q) : BigInt(0), q);
      rep.method = CountMethod::Polynomial;
      return rep;
    }
  }
  rep.raw = strata_raw(v, q);
  rep.total = quotient(v, rep.raw, q);
  rep.open = quotient(v, v.relevant(full) ? stratum_count(v, full, q) : BigInt(0), q);
  rep.method = CountMethod::Strata;
  return rep;
}

BigInt count_open(const Variety& v, std::uint64_t q, CountMethod method) {
  return count_points(v, q, method).open;
}

BigRational CountingPolynomial::eval(const BigRational& q) const {
  BigRational r = 0;
  for (std::size_t i = coeffs.size(); i-- > 0;) r = r * q + coeffs[i];
  return r;
}

long CountingPolynomial::degree() const {
  for (std::size_t i = coeffs.size(); i-- > 0;)
    if (coeffs[i] != 0) return static_cast<long>(i);
  return -1;
}

CountingPolynomial counting_polynomial(const Variety& v) {
  CountingPolynomial p;
  p.holdouts = {7, 8};
  long d = static_cast<long>(v.num_generators()) - static_cast<long>(v.pic_rank());
  p.nodes = prime_powers_from(static_cast<std::size_t>(2 * d + 2), p.holdouts);
  const std::size_t n = p.nodes.size();
  std::vector<BigRational> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = BigRational(BigInt(std::to_string(p.nodes[i])));
    ys[i] = BigRational(quotient(v, strata_raw(v, p.nodes[i]), p.nodes[i]));
  }
  // Lagrange interpolation expanded into the monomial basis.
  p.coeffs.assign(n, BigRational(0));
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<BigRational> basis{BigRational(1)};
    BigRational denom = 1;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      std::vector<BigRational> next(basis.size() + 1, BigRational(0));
      for (std::size_t k = 0; k < basis.size(); ++k) {
        next[k + 1] += basis[k];
        next[k] -= basis[k] * xs[j];
      }
      basis = std::move(next);
      denom *= xs[i] - xs[j];
    }
    BigRational scale = ys[i] / denom;
    for (std::size_t k = 0; k < basis.size(); ++k) p.coeffs[k] += basis[k] * scale;
  }
  while (!p.coeffs.empty() && p.coeffs.back() == 0) p.coeffs.pop_back();
  p.integral = std::all_of(p.coeffs.begin(), p.coeffs.end(), [](const BigRational& c) { return c.get_den() == 1; });
  bool holdouts_ok = true;
  for (auto h : p.holdouts) {
    BigRational expect(quotient(v, strata_raw(v, h), h));
    if (p.eval(BigRational(BigInt(std::to_string(h)))) != expect) holdouts_ok = false;
  }
  bool degree_ok = p.degree() <= static_cast<long>(v.num_generators()) - 1;
  p.validated = holdouts_ok && degree_ok && p.integral;
  if (!holdouts_ok) p.note = "held-out validation failed";
  else if (!degree_ok) p.note = "degree exceeds the torsor dimension";
  else if (!p.integral) p.note = "non-integral coefficients";
  else p.note = "validated at q = 7, 8";
  return p;
}

GammaReport gamma_truncated(const Variety& v, std::uint64_t q, unsigned bound) {
  if (!is_prime_power(q)) throw MathError("q must be a prime power");
  if (bound == 0) throw MathError("place-degree bound must be positive");
  GammaReport g;
  g.q = q;
  g.bound = bound;
  const unsigned r = static_cast<unsigned>(v.pic_rank());
  const long dim = v.dimension();
  BigRational bq(BigInt(std::to_string(q)));
  g.prefactor = rpow(bq / (bq - 1), r) * rpow(bq, dim);

  CountingPolynomial poly = counting_polynomial(v);
  g.count_source = poly.validated ? "polynomial" : "strata";
  BigRational running = g.prefactor;
  for (unsigned f = 1; f <= bound; ++f) {
    BigInt places = count_monic_irreducibles(q, f) + (f == 1 ? 1 : 0);
    BigRational qf = rpow(bq, f);
    BigRational card;
    if (poly.validated) {
      card = poly.eval(qf);
    } else {
      BigInt qf_int = qf.get_num();
      if (!qf_int.fits_ulong_p()) throw CapExceeded("field size too large for point counts");
      std::uint64_t Q = qf_int.get_ui();
      card = BigRational(quotient(v, strata_raw(v, Q), Q));
    }
    BigRational factor = rpow(1 - 1 / qf, r) * card / rpow(qf, dim);
    if (factor <= 0) throw MathError("invariant violation: non-positive local factor");
    g.places.push_back(places);
    g.local_factor.push_back(factor);
    running *= rpow(factor, static_cast<long>(places.get_ui()));
    g.partial.push_back(running);
  }
  if (poly.validated && poly.degree() <= dim) {
    // (1 − u)^r u^{dim} P(1/u) = 1 + Σ_{k ≥ k0} c_k u^k.
    std::vector<BigRational> expansion(static_cast<std::size_t>(dim) + 1, BigRational(0));
    for (std::size_t k = 0; k < poly.coeffs.size(); ++k) expansion[static_cast<std::size_t>(dim) - k] = poly.coeffs[k];
    for (unsigned i = 0; i < r; ++i) {
      std::vector<BigRational> next(expansion.size() + 1, BigRational(0));
      for (std::size_t k = 0; k < expansion.size(); ++k) {
        next[k] += expansion[k];
        next[k + 1] -= expansion[k];
      }
      expansion = std::move(next);
    }
    if (expansion[0] == 1) {
      std::size_t k0 = 0;
      BigRational c = 0;
      for (std::size_t k = 1; k < expansion.size(); ++k) {
        if (expansion[k] == 0) continue;
        if (k0 == 0) k0 = k;
        c += abs(expansion[k]);
      }
      if (k0 == 0) {
        g.tail_log_bound = BigRational(0);
      } else if (k0 >= 2) {
        // Degree-f places number at most q^f and |factor − 1| ≤ c q^{−f k0};
        // |log(1 + x)| ≤ 2|x| once |x| ≤ 1/2.
        BigRational ratio = rpow(bq, -static_cast<long>(k0 - 1));
        BigRational first_x = c * rpow(bq, -static_cast<long>((bound + 1) * k0));
        if (first_x <= BigRational(1, 2))
          g.tail_log_bound = 2 * c * rpow(ratio, static_cast<long>(bound + 1)) / (1 - ratio);
      }
    }
  }
  return g;
}

}  // namespace maninlab
