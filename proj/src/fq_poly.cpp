#include "maninlab/fq_poly.hpp"

#include <algorithm>
#include <random>
#include <sstream>

namespace maninlab {

FqPoly::FqPoly(FieldPtr field, std::vector<Elem> coeffs) : field_(std::move(field)), c_(std::move(coeffs)) {
  for (auto v : c_)
    if (v >= field_->size()) throw MathError("coefficient outside the field");
  trim();
}

FqPoly FqPoly::constant(const FieldPtr& field, Elem c) { return FqPoly(field, {c}); }

FqPoly FqPoly::monomial(const FieldPtr& field, Elem c, std::size_t k) {
  std::vector<Elem> v(k + 1, 0);
  v[k] = c;
  return FqPoly(field, std::move(v));
}

FqPoly FqPoly::from_index(const FieldPtr& field, std::uint64_t index, std::size_t len) {
  std::vector<Elem> v(len, 0);
  const std::uint64_t q = field->size();
  for (std::size_t i = 0; i < len; ++i) {
    v[i] = static_cast<Elem>(index % q);
    index /= q;
  }
  return FqPoly(field, std::move(v));
}

void FqPoly::trim() {
  while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

void FqPoly::require_same_field(const FqPoly& o) const {
  if (field_ != o.field_) throw MathError("polynomials over different fields");
}

FqPoly FqPoly::operator+(const FqPoly& o) const {
  require_same_field(o);
  const auto& F = *field_;
  std::vector<Elem> r(std::max(c_.size(), o.c_.size()), 0);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = F.add(coeff(i), o.coeff(i));
  FqPoly out(field_);
  out.c_ = std::move(r);
  out.trim();
  return out;
}

FqPoly FqPoly::operator-() const {
  FqPoly out(field_);
  out.c_.resize(c_.size());
  for (std::size_t i = 0; i < c_.size(); ++i) out.c_[i] = field_->neg(c_[i]);
  return out;
}

FqPoly FqPoly::operator-(const FqPoly& o) const { return *this + (-o); }

FqPoly FqPoly::operator*(const FqPoly& o) const {
  require_same_field(o);
  FqPoly out(field_);
  if (c_.empty() || o.c_.empty()) return out;
  const auto& F = *field_;
  out.c_.assign(c_.size() + o.c_.size() - 1, 0);
  for (std::size_t i = 0; i < c_.size(); ++i) {
    if (c_[i] == 0) continue;
    for (std::size_t j = 0; j < o.c_.size(); ++j)
      out.c_[i + j] = F.add(out.c_[i + j], F.mul(c_[i], o.c_[j]));
  }
  out.trim();
  return out;
}

FqPoly FqPoly::scale(Elem c) const {
  FqPoly out(field_);
  if (c == 0) return out;
  out.c_.resize(c_.size());
  for (std::size_t i = 0; i < c_.size(); ++i) out.c_[i] = field_->mul(c_[i], c);
  return out;
}

FqPoly FqPoly::shift(std::size_t k) const {
  FqPoly out(field_);
  if (c_.empty()) return out;
  out.c_.assign(k, 0);
  out.c_.insert(out.c_.end(), c_.begin(), c_.end());
  return out;
}

void FqPoly::divmod(const FqPoly& d, FqPoly& quot, FqPoly& rem) const {
  require_same_field(d);
  if (d.is_zero()) throw MathError("polynomial division by zero");
  const auto& F = *field_;
  std::vector<Elem> r = c_;
  const std::size_t dn = d.c_.size();
  std::vector<Elem> qv(r.size() >= dn ? r.size() - dn + 1 : 0, 0);
  const Elem lead_inv = F.inv(d.leading());
  for (std::size_t i = r.size(); i-- >= dn;) {
    if (r[i] == 0) continue;
    Elem c = F.mul(r[i], lead_inv);
    qv[i - dn + 1] = c;
    for (std::size_t j = 0; j < dn; ++j) r[i - dn + 1 + j] = F.sub(r[i - dn + 1 + j], F.mul(c, d.c_[j]));
  }
  quot = FqPoly(field_);
  quot.c_ = std::move(qv);
  quot.trim();
  rem = FqPoly(field_);
  rem.c_ = std::move(r);
  rem.trim();
}

FqPoly FqPoly::operator/(const FqPoly& d) const {
  FqPoly q(field_), r(field_);
  divmod(d, q, r);
  return q;
}

FqPoly FqPoly::operator%(const FqPoly& d) const {
  FqPoly q(field_), r(field_);
  divmod(d, q, r);
  return r;
}

FqPoly FqPoly::monic() const {
  if (is_zero()) return *this;
  return scale(field_->inv(leading()));
}

FqPoly::Elem FqPoly::eval(Elem a) const {
  const auto& F = *field_;
  Elem r = 0;
  for (std::size_t i = c_.size(); i-- > 0;) r = F.add(F.mul(r, a), c_[i]);
  return r;
}

FqPoly FqPoly::derivative() const {
  FqPoly out(field_);
  if (c_.size() <= 1) return out;
  out.c_.resize(c_.size() - 1);
  for (std::size_t i = 1; i < c_.size(); ++i) {
    Elem k = field_->from_int(static_cast<long long>(i % field_->p()));
    out.c_[i - 1] = field_->mul(c_[i], k);
  }
  out.trim();
  return out;
}

FqPoly FqPoly::pow_mod(const BigInt& e, const FqPoly& m) const {
  if (e < 0) throw MathError("negative exponent");
  FqPoly result = constant(field_, 1) % m;
  FqPoly base = *this % m;
  const std::size_t bits = mpz_sizeinbase(e.get_mpz_t(), 2);
  for (std::size_t i = bits; i-- > 0;) {
    result = (result * result) % m;
    if (mpz_tstbit(e.get_mpz_t(), i)) result = (result * base) % m;
  }
  return result;
}

bool FqPoly::canonical_less(const FqPoly& o) const {
  if (c_.size() != o.c_.size()) return c_.size() < o.c_.size();
  for (std::size_t i = c_.size(); i-- > 0;)
    if (c_[i] != o.c_[i]) return c_[i] < o.c_[i];
  return false;
}

std::string FqPoly::str() const {
  if (c_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (std::size_t i = c_.size(); i-- > 0;) {
    if (c_[i] == 0) continue;
    if (!first) os << " + ";
    first = false;
    if (i == 0 || c_[i] != 1) os << c_[i];
    if (i >= 1) os << "x";
    if (i >= 2) os << "^" << i;
  }
  return os.str();
}

FqPoly gcd(const FqPoly& a, const FqPoly& b) {
  FqPoly x = a, y = b;
  while (!y.is_zero()) {
    FqPoly r = x % y;
    x = std::move(y);
    y = std::move(r);
  }
  return x.monic();
}

namespace {

// p-th root of a polynomial all of whose exponents are multiples of p.
FqPoly pth_root(const FqPoly& a) {
  const auto& F = *a.field();
  const std::uint32_t p = F.p();
  // a^(q/p) is the inverse of Frobenius on F_q
  const std::uint64_t root_exp = F.size() / p;
  std::vector<FiniteField::Elem> r;
  for (std::size_t i = 0; i < a.coeffs().size(); i += p) r.push_back(F.pow(a.coeffs()[i], root_exp));
  return FqPoly(a.field(), std::move(r));
}

void squarefree_split(const FqPoly& f, unsigned mult, std::vector<std::pair<FqPoly, unsigned>>& out) {
  if (f.degree().at_most(0)) return;
  FqPoly c = gcd(f, f.derivative());
  FqPoly w = f / c;
  unsigned i = 1;
  while (!w.degree().at_most(0)) {
    FqPoly y = gcd(w, c);
    FqPoly z = w / y;
    if (!z.degree().at_most(0)) out.emplace_back(z.monic(), i * mult);
    ++i;
    w = y;
    c = c / y;
  }
  if (!c.degree().at_most(0)) squarefree_split(pth_root(c.monic()), mult * f.field()->p(), out);
}

void equal_degree_split(const FqPoly& g, unsigned k, std::mt19937_64& rng, std::vector<FqPoly>& out) {
  const long n = g.degree().value();
  if (n == static_cast<long>(k)) {
    out.push_back(g.monic());
    return;
  }
  const auto& field = g.field();
  const auto& F = *field;
  const std::uint64_t q = F.size();
  BigInt qk = ipow(BigInt(static_cast<unsigned long>(q)), k);
  std::uniform_int_distribution<std::uint32_t> coin(0, F.size() - 1);
  for (;;) {
    std::vector<FiniteField::Elem> rc(static_cast<std::size_t>(n));
    for (auto& v : rc) v = coin(rng);
    FqPoly a(field, rc);
    if (a.degree().at_most(0)) continue;
    FqPoly d = gcd(a, g);
    if (!d.degree().at_most(0) && d.degree() != g.degree()) {
      equal_degree_split(d, k, rng, out);
      equal_degree_split(g / d, k, rng, out);
      return;
    }
    FqPoly b(field);
    if (F.p() == 2) {
      // trace map a + a^2 + ... + a^(2^(f k - 1))
      FqPoly t = a % g;
      b = t;
      for (unsigned i = 1; i < F.f() * k; ++i) {
        t = (t * t) % g;
        b = b + t;
      }
    } else {
      b = a.pow_mod((qk - 1) / 2, g) - FqPoly::constant(field, 1);
    }
    d = gcd(b, g);
    if (!d.degree().at_most(0) && d.degree() != g.degree()) {
      equal_degree_split(d, k, rng, out);
      equal_degree_split(g / d, k, rng, out);
      return;
    }
  }
}

}  // namespace

Factorization factor(const FqPoly& a) {
  if (a.is_zero()) throw MathError("cannot factor the zero polynomial");
  Factorization result;
  result.unit = a.leading();
  FqPoly f = a.monic();
  std::vector<std::pair<FqPoly, unsigned>> sqf;
  squarefree_split(f, 1, sqf);
  std::mt19937_64 rng(0x5eedf00dULL);
  const auto& field = a.field();
  const BigInt q(static_cast<unsigned long>(field->size()));
  for (auto& [part, mult] : sqf) {
    FqPoly rest = part;
    FqPoly h = FqPoly::x(field) % rest;
    const FqPoly x = FqPoly::x(field);
    for (unsigned k = 1; !rest.degree().at_most(0); ++k) {
      if (2 * static_cast<long>(k) > rest.degree().value()) {
        std::vector<FqPoly> pieces;
        equal_degree_split(rest, static_cast<unsigned>(rest.degree().value()), rng, pieces);
        for (auto& pc : pieces) result.factors.push_back({pc, mult});
        break;
      }
      h = h.pow_mod(q, rest);
      FqPoly g = gcd(h - x, rest);
      if (!g.degree().at_most(0)) {
        std::vector<FqPoly> pieces;
        equal_degree_split(g, k, rng, pieces);
        for (auto& pc : pieces) result.factors.push_back({pc, mult});
        rest = rest / g;
        h = h % rest;
      }
    }
  }
  // merge equal factors (can arise across square-free parts only for safety)
  std::sort(result.factors.begin(), result.factors.end(),
            [](const PolyFactor& l, const PolyFactor& r) { return l.poly.canonical_less(r.poly); });
  std::vector<PolyFactor> merged;
  for (auto& pf : result.factors) {
    if (!merged.empty() && merged.back().poly == pf.poly)
      merged.back().multiplicity += pf.multiplicity;
    else
      merged.push_back(pf);
  }
  result.factors = std::move(merged);
  return result;
}

FqPoly assemble(const Factorization& fac, const FieldPtr& field) {
  FqPoly r = FqPoly::constant(field, fac.unit);
  for (const auto& pf : fac.factors)
    for (unsigned i = 0; i < pf.multiplicity; ++i) r = r * pf.poly;
  return r;
}

bool is_irreducible(const FqPoly& a) {
  if (a.degree().at_most(0)) return false;
  const long n = a.degree().value();
  const auto& field = a.field();
  const FqPoly f = a.monic();
  const FqPoly x = FqPoly::x(field);
  const BigInt q(static_cast<unsigned long>(field->size()));
  // Rabin: x^(q^n) = x mod f and gcd(x^(q^(n/r)) - x, f) = 1 for prime r | n
  std::vector<long> primes;
  long m = n;
  for (long d = 2; d * d <= m; ++d)
    if (m % d == 0) {
      primes.push_back(d);
      while (m % d == 0) m /= d;
    }
  if (m > 1) primes.push_back(m);
  for (long r : primes) {
    FqPoly h = x % f;
    for (long i = 0; i < n / r; ++i) h = h.pow_mod(q, f);
    if (!gcd(h - x, f).is_one()) return false;
  }
  FqPoly h = x % f;
  for (long i = 0; i < n; ++i) h = h.pow_mod(q, f);
  return (h - x % f).is_zero();
}

std::vector<FqPoly> monic_irreducibles(const FieldPtr& field, unsigned degree) {
  if (degree == 0) return {};
  const std::uint64_t q = field->size();
  std::uint64_t count = 1;
  for (unsigned i = 0; i < degree; ++i) {
    count *= q;
    if (count > (1ull << 24)) throw CapExceeded("too many candidate polynomials");
  }
  std::vector<FqPoly> out;
  for (std::uint64_t idx = 0; idx < count; ++idx) {
    FqPoly low = FqPoly::from_index(field, idx, degree);
    FqPoly cand = low + FqPoly::monomial(field, 1, degree);
    if (is_irreducible(cand)) out.push_back(cand);
  }
  return out;
}

BigInt count_monic_irreducibles(std::uint64_t q, unsigned degree) {
  if (degree == 0) return 0;
  BigInt total = 0;
  for (unsigned e = 1; e <= degree; ++e) {
    if (degree % e) continue;
    int mu = mobius(e);
    if (mu == 0) continue;
    BigInt term = ipow(BigInt(static_cast<unsigned long>(q)), degree / e);
    total += mu * term;
  }
  return total / degree;
}

}  // namespace maninlab
