#include "maninlab/curves.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <map>
#include <sstream>

#include "maninlab/linalg.hpp"
#include "maninlab/parallel.hpp"
#include "maninlab/points.hpp"

namespace maninlab {

namespace {

constexpr std::uint64_t kTupleCap = std::uint64_t{1} << 24;
constexpr std::uint64_t kKernelCap = std::uint64_t{1} << 20;
constexpr std::uint64_t kDivisorTupleCap = std::uint64_t{1} << 22;

std::uint64_t upow(std::uint64_t b, long e) {
  std::uint64_t r = 1;
  for (long i = 0; i < e; ++i) {
    if (r > (std::uint64_t{1} << 62) / b) return std::uint64_t{1} << 62;
    r *= b;
  }
  return r;
}

FqPoly poly_pow(const FqPoly& a, long long e) {
  FqPoly r = FqPoly::constant(a.field(), 1);
  for (long long i = 0; i < e; ++i) r = r * a;
  return r;
}

long poly_deg(const FqPoly& p) { return p.is_zero() ? -1 : p.degree().value(); }

// Every polynomial of degree ≤ d (d ≥ 0); nonzero ones only when asked.
std::vector<FqPoly> polys_up_to(const FieldPtr& field, long d, bool nonzero) {
  std::vector<FqPoly> out;
  if (d < 0) {
    if (!nonzero) out.emplace_back(field);
    return out;
  }
  std::uint64_t n = upow(field->size(), d + 1);
  if (n > kTupleCap) throw CapExceeded("polynomial space exceeds 2^24");
  out.reserve(n);
  for (std::uint64_t i = nonzero ? 1 : 0; i < n; ++i)
    out.push_back(FqPoly::from_index(field, i, static_cast<std::size_t>(d + 1)));
  return out;
}

std::vector<FqPoly> monic_of_degree(const FieldPtr& field, long d) {
  std::vector<FqPoly> out;
  std::uint64_t n = upow(field->size(), d);
  if (n > kTupleCap) throw CapExceeded("polynomial space exceeds 2^24");
  FqPoly lead = FqPoly::monomial(field, 1, static_cast<std::size_t>(d));
  for (std::uint64_t i = 0; i < n; ++i)
    out.push_back(FqPoly::from_index(field, i, static_cast<std::size_t>(d)) + lead);
  return out;
}

// Nonzero sections of O(d) up to scalar: monic polynomials of degree ≤ d.
std::vector<FqPoly> monic_up_to(const FieldPtr& field, long d) {
  std::vector<FqPoly> out;
  for (long k = 0; k <= d; ++k) {
    auto part = monic_of_degree(field, k);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

// The linear map (t_j) ↦ Σ t_j c_j into polynomials of degree ≤ h, as a
// coefficient matrix; column blocks follow the order of `cols`.
std::vector<FqRow> relation_matrix(const std::vector<FqPoly>& c, const std::vector<long>& tdeg,
                                   const std::vector<std::size_t>& cols, long h, std::size_t& ncols) {
  ncols = 0;
  for (auto j : cols) ncols += static_cast<std::size_t>(tdeg[j] + 1);
  std::size_t nrows = h < 0 ? 0 : static_cast<std::size_t>(h + 1);
  std::vector<FqRow> rows(nrows, FqRow(ncols, 0));
  std::size_t col = 0;
  for (auto j : cols) {
    for (long a = 0; a <= tdeg[j]; ++a, ++col) {
      const auto& coeffs = c[j].coeffs();
      for (std::size_t k = 0; k < coeffs.size(); ++k) {
        std::size_t r = k + static_cast<std::size_t>(a);
        if (r >= nrows) throw MathError("relation term exceeds the target degree");
        rows[r][col] = coeffs[k];
      }
    }
  }
  return rows;
}

FqRow poly_vector(const FqPoly& p, long h) {
  FqRow v(h < 0 ? 0 : static_cast<std::size_t>(h + 1), 0);
  for (std::size_t k = 0; k < p.coeffs().size(); ++k) {
    if (k >= v.size()) throw MathError("relation term exceeds the target degree");
    v[k] = p.coeffs()[k];
  }
  return v;
}

struct AffineSolution {
  FqRow particular;
  std::vector<FqRow> basis;
};

std::optional<AffineSolution> affine_solve(const FiniteField& k, std::vector<FqRow> rows, const FqRow& rhs,
                                           std::size_t ncols) {
  auto basis = fq_nullspace(k, rows, ncols);
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i].push_back(rhs[i]);
  std::vector<std::size_t> piv;
  fq_rref(k, rows, &piv);
  if (!piv.empty() && piv.back() == ncols) return std::nullopt;
  FqRow x(ncols, 0);
  for (std::size_t r = 0; r < piv.size(); ++r) x[piv[r]] = rows[r][ncols];
  return AffineSolution{std::move(x), std::move(basis)};
}

// Visits every element of x0 + span(basis).
void for_each_in_span(const FiniteField& k, const FqRow& x0, const std::vector<FqRow>& basis,
                      const std::function<void(const FqRow&)>& visit) {
  const std::uint32_t q = k.size();
  std::vector<std::uint32_t> digits(basis.size(), 0);
  FqRow x = x0;
  while (true) {
    visit(x);
    std::size_t pos = 0;
    while (pos < digits.size()) {
      // step digit pos from d to d+1 (or wrap to 0)
      std::uint32_t d = digits[pos];
      std::uint32_t nd = d + 1 == q ? 0 : d + 1;
      auto delta = k.sub(nd, d);
      for (std::size_t c = 0; c < x.size(); ++c)
        if (basis[pos][c] != 0) x[c] = k.add(x[c], k.mul(delta, basis[pos][c]));
      digits[pos] = nd;
      if (nd != 0) break;
      ++pos;
    }
    if (pos == digits.size()) return;
  }
}

std::vector<FqPoly> split_columns(const FieldPtr& field, const FqRow& x, const std::vector<long>& tdeg,
                                  const std::vector<std::size_t>& cols, std::size_t nj) {
  std::vector<FqPoly> t(nj, FqPoly(field));
  std::size_t col = 0;
  for (auto j : cols) {
    std::vector<FiniteField::Elem> c(x.begin() + static_cast<long>(col),
                                     x.begin() + static_cast<long>(col + static_cast<std::size_t>(tdeg[j] + 1)));
    t[j] = FqPoly(field, std::move(c));
    col += static_cast<std::size_t>(tdeg[j] + 1);
  }
  return t;
}

// Σ_j t_j^{ε_j} c_j = 0 with deg t_j ≤ tdeg_j, in polynomials of degree ≤ h.
struct RelationSystem {
  FieldPtr field;
  std::vector<FqPoly> c;
  std::vector<long> tdeg;
  long h = 0;
  std::optional<std::size_t> squared;
};

// Number of solutions with t_j = 0 outside the mask.
BigInt count_solutions(const RelationSystem& sys, Mask k) {
  std::vector<std::size_t> cols;
  for (std::size_t j = 0; j < sys.c.size(); ++j)
    if ((k >> j & 1) && sys.tdeg[j] >= 0 && !(sys.squared && *sys.squared == j)) cols.push_back(j);
  std::size_t ncols = 0;
  auto rows = relation_matrix(sys.c, sys.tdeg, cols, sys.h, ncols);
  const auto& F = *sys.field;
  bool sq_active = sys.squared && (k >> *sys.squared & 1) && sys.tdeg[*sys.squared] >= 0;
  if (!sq_active) return ipow(big(F.size()), static_cast<unsigned long>(ncols - fq_rank(F, rows)));
  const std::size_t j0 = *sys.squared;
  BigInt total = 0;
  for (const auto& t : polys_up_to(sys.field, sys.tdeg[j0], false)) {
    auto rhs = poly_vector(-(t * t * sys.c[j0]), sys.h);
    auto dim = fq_affine_dim(F, rows, rhs, ncols);
    if (dim) total += ipow(big(F.size()), static_cast<unsigned long>(*dim));
  }
  return total;
}

// Visits every solution with all t_j nonzero; returns false when the
// kernel is too large to enumerate.
bool for_each_nonzero_solution(const RelationSystem& sys, const std::function<void(const std::vector<FqPoly>&)>& visit) {
  const std::size_t nj = sys.c.size();
  for (auto d : sys.tdeg)
    if (d < 0) return true;
  const auto& F = *sys.field;
  std::vector<std::size_t> cols;
  for (std::size_t j = 0; j < nj; ++j)
    if (!(sys.squared && *sys.squared == j)) cols.push_back(j);
  std::size_t ncols = 0;
  auto rows = relation_matrix(sys.c, sys.tdeg, cols, sys.h, ncols);
  auto emit = [&](const FqRow& x, const FqPoly* t0) {
    auto t = split_columns(sys.field, x, sys.tdeg, cols, nj);
    if (t0) t[*sys.squared] = *t0;
    for (const auto& p : t)
      if (p.is_zero()) return;
    visit(t);
  };
  if (!sys.squared) {
    auto basis = fq_nullspace(F, rows, ncols);
    if (upow(F.size(), static_cast<long>(basis.size())) > kKernelCap) return false;
    for_each_in_span(F, FqRow(ncols, 0), basis, [&](const FqRow& x) { emit(x, nullptr); });
    return true;
  }
  const std::size_t j0 = *sys.squared;
  for (const auto& t : polys_up_to(sys.field, sys.tdeg[j0], true)) {
    auto rhs = poly_vector(-(t * t * sys.c[j0]), sys.h);
    auto sol = affine_solve(F, rows, rhs, ncols);
    if (!sol) continue;
    if (upow(F.size(), static_cast<long>(sol->basis.size())) > kKernelCap) return false;
    for_each_in_span(F, sol->particular, sol->basis, [&](const FqRow& x) { emit(x, &t); });
  }
  return true;
}

std::optional<std::size_t> squared_index(const Variety& v) {
  for (std::size_t j = 0; j < v.num_t(); ++j)
    if (v.t_exponent(j) == 2) return j;
  return std::nullopt;
}

Mask full_mask(const Variety& v) { return static_cast<Mask>((std::uint64_t{1} << v.num_generators()) - 1); }

bool pattern_ok(const Variety& v, Mask vanishing) {
  return v.relevant(full_mask(v) & ~vanishing) && v.incidence(vanishing);
}

// Admissibility of a Cox tuple of polynomials with declared degrees at ∞
// and at every finite closed point where two coordinates vanish; points
// where at most one coordinate vanishes are handled by the caller.
bool admissible(const Variety& v, const std::vector<FqPoly>& u, const std::vector<long long>& deg) {
  Mask at_inf = 0;
  for (std::size_t k = 0; k < u.size(); ++k)
    if (poly_deg(u[k]) < deg[k]) at_inf |= Mask{1} << k;
  if (!pattern_ok(v, at_inf)) return false;
  std::vector<FqPoly> seen;
  for (std::size_t a = 0; a < u.size(); ++a) {
    if (poly_deg(u[a]) < 1) continue;
    for (std::size_t b = a + 1; b < u.size(); ++b) {
      if (poly_deg(u[b]) < 1) continue;
      FqPoly g = gcd(u[a], u[b]);
      if (poly_deg(g) < 1) continue;
      for (const auto& f : factor(g).factors) {
        if (std::find(seen.begin(), seen.end(), f.poly) != seen.end()) continue;
        seen.push_back(f.poly);
        Mask vanish = 0;
        for (std::size_t k = 0; k < u.size(); ++k)
          if (u[k].divisible_by(f.poly)) vanish |= Mask{1} << k;
        if (!pattern_ok(v, vanish)) return false;
      }
    }
  }
  return true;
}

BigRational ceil_half_difference_degree(const EffDivisor& a, const EffDivisor& b) {
  long total = 0;
  for (const auto& [place, m] : a.parts()) {
    long diff = static_cast<long>(m) - static_cast<long>(b.multiplicity(place));
    long c = diff <= 0 ? 0 : (diff + 1) / 2;
    total += c * static_cast<long>(place.degree());
  }
  return qrat(total);
}

EffDivisor inf_all(const std::vector<Section>& s, std::size_t from, std::size_t to) {
  EffDivisor r = EffDivisor::of_section(s[from]);
  for (std::size_t j = from + 1; j < to; ++j) r = inf(r, EffDivisor::of_section(s[j]));
  return r;
}

// count ≤ q^bound, exactly.
bool count_within(const BigInt& count, std::uint64_t q, const BigRational& bound) {
  BigInt num = bound.get_num(), den = bound.get_den();
  if (num < 0) return count == 0;
  return ipow(count, den.get_ui()) <= ipow(big(static_cast<long long>(q)), num.get_ui());
}

}  // namespace

// ---------------------------------------------------------------- places

unsigned Place::degree() const {
  if (infinity) return 1;
  return static_cast<unsigned>(poly->degree().value());
}

bool Place::operator<(const Place& o) const {
  if (infinity != o.infinity) return infinity;
  if (infinity) return false;
  return poly->canonical_less(*o.poly);
}

bool Place::operator==(const Place& o) const {
  if (infinity != o.infinity) return false;
  return infinity || *poly == *o.poly;
}

std::string Place::str() const { return infinity ? "inf" : poly->str(); }

// ---------------------------------------------------------------- divisors

EffDivisor::EffDivisor(FieldPtr field, std::vector<std::pair<Place, unsigned>> parts)
    : field_(std::move(field)), parts_(std::move(parts)) {
  normalize();
}

void EffDivisor::normalize() {
  for (auto& [p, m] : parts_) {
    if (!p.infinity) {
      if (!p.poly || p.poly->is_zero() || p.poly->degree().value() < 1) throw MathError("invalid place");
      p.poly = p.poly->monic();
    }
  }
  std::sort(parts_.begin(), parts_.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::pair<Place, unsigned>> merged;
  for (auto& pm : parts_) {
    if (pm.second == 0) continue;
    if (!merged.empty() && merged.back().first == pm.first) merged.back().second += pm.second;
    else merged.push_back(std::move(pm));
  }
  parts_ = std::move(merged);
}

unsigned EffDivisor::degree() const {
  unsigned d = 0;
  for (const auto& [p, m] : parts_) d += m * p.degree();
  return d;
}

unsigned EffDivisor::multiplicity(const Place& p) const {
  for (const auto& [q, m] : parts_)
    if (q == p) return m;
  return 0;
}

Section EffDivisor::canonical_section(FiniteField::Elem scale) const {
  FqPoly poly = FqPoly::constant(field_, scale);
  for (const auto& [p, m] : parts_)
    if (!p.infinity) poly = poly * poly_pow(*p.poly, m);
  return Section{poly, static_cast<long>(degree())};
}

EffDivisor EffDivisor::of_section(const Section& s) {
  if (s.poly.is_zero()) throw MathError("zero section has no divisor");
  long d = s.poly.degree().value();
  if (d > s.degree) throw MathError("section degree exceeds its line bundle");
  std::vector<std::pair<Place, unsigned>> parts;
  if (s.degree > d) parts.emplace_back(Place::at_infinity(), static_cast<unsigned>(s.degree - d));
  if (d > 0)
    for (const auto& f : factor(s.poly).factors) parts.emplace_back(Place::finite(f.poly), f.multiplicity);
  return EffDivisor(s.poly.field(), std::move(parts));
}

EffDivisor EffDivisor::operator+(const EffDivisor& o) const {
  auto parts = parts_;
  parts.insert(parts.end(), o.parts_.begin(), o.parts_.end());
  return EffDivisor(field_, std::move(parts));
}

bool EffDivisor::operator<=(const EffDivisor& o) const {
  for (const auto& [p, m] : parts_)
    if (o.multiplicity(p) < m) return false;
  return true;
}

std::string EffDivisor::str() const {
  if (parts_.empty()) return "0";
  std::ostringstream os;
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    if (i) os << " + ";
    if (parts_[i].second != 1) os << parts_[i].second << "*";
    os << "[" << parts_[i].first.str() << "]";
  }
  return os.str();
}

EffDivisor inf(const EffDivisor& a, const EffDivisor& b) {
  std::vector<std::pair<Place, unsigned>> parts;
  for (const auto& [p, m] : a.parts()) {
    unsigned mb = b.multiplicity(p);
    if (mb > 0) parts.emplace_back(p, std::min(m, mb));
  }
  return EffDivisor(a.field(), std::move(parts));
}

std::vector<EffDivisor> enumerate_divisors(const FieldPtr& field, unsigned d) {
  if (upow(field->size(), static_cast<long>(d) + 1) > kTupleCap) throw CapExceeded("q^{d+1} exceeds 2^24");
  std::vector<EffDivisor> out;
  for (const auto& p : monic_up_to(field, d)) out.push_back(EffDivisor::of_section(Section{p, static_cast<long>(d)}));
  return out;
}

std::vector<Place> places_up_to(const FieldPtr& field, unsigned d) {
  std::vector<Place> out;
  if (d == 0) return out;
  out.push_back(Place::at_infinity());
  for (unsigned f = 1; f <= d; ++f)
    for (auto& p : monic_irreducibles(field, f)) out.push_back(Place::finite(std::move(p)));
  return out;
}

long ell(long d) { return d < 0 ? 0 : d + 1; }

// ---------------------------------------------------------------- kernels

KernelResult kernel_dim(const std::vector<Section>& s, const std::vector<long>& hprime, long H, RelationShape shape) {
  if (s.empty() || s.size() != hprime.size()) throw MathError("kernel data length mismatch");
  RelationSystem sys{s[0].poly.field(), {}, hprime, H, std::nullopt};
  for (std::size_t j = 0; j < s.size(); ++j) {
    if (s[j].poly.is_zero()) throw MathError("sections must be nonzero");
    if (poly_deg(s[j].poly) > s[j].degree) throw MathError("section degree exceeds its line bundle");
    long factor = (shape == RelationShape::QuasiLinearT1Squared && j == 0) ? 2 : 1;
    if (s[j].degree + factor * hprime[j] != H) throw MathError("inconsistent degrees");
    sys.c.push_back(s[j].poly);
  }
  if (shape == RelationShape::QuasiLinearT1Squared) sys.squared = 0;
  KernelResult r;
  r.count = count_solutions(sys, static_cast<Mask>((std::uint64_t{1} << s.size()) - 1));
  const BigInt q = big(sys.field->size());
  BigInt c = r.count;
  long e = 0;
  while (c > 1 && c % q == 0) {
    c /= q;
    ++e;
  }
  if (c == 1) r.dim = e;
  return r;
}

CountingLemmaCheck check_counting_lemma(const std::vector<Section>& s, const std::vector<long>& hprime, long H) {
  const std::size_t n = s.size();
  if (n < 2) throw MathError("the counting lemma checks need at least two sections");
  auto k = kernel_dim(s, hprime, H, RelationShape::Linear);
  CountingLemmaCheck c;
  c.count = k.count;
  if (!k.dim) throw MathError("invariant violation: linear kernel size is not a power of q");
  const BigRational delta = qrat(*k.dim);
  long sum_h = 0;
  for (auto h : hprime) sum_h += h;
  const EffDivisor infd = inf_all(s, 0, n);
  const long dinf = static_cast<long>(infd.degree());
  c.bound1 = qrat(static_cast<long long>(n) - 1) + (1 - make_rational(1, static_cast<long>(n))) * qrat(sum_h);
  c.bound2a = qrat(static_cast<long long>(n) - 1 + dinf - H + sum_h);
  c.bound2b = qrat(static_cast<long long>(n) - 2) + (1 - make_rational(1, static_cast<long>(n) - 1)) * qrat(sum_h);
  c.pass1 = delta <= c.bound1;
  c.pass2 = delta <= c.bound2a || delta <= c.bound2b;
  c.exact_applies = true;
  for (std::size_t j = 0; j + 1 < n; ++j)
    if (hprime[j] + hprime[j + 1] < H - dinf - 1) c.exact_applies = false;
  if (c.exact_applies) {
    c.exact = qrat(static_cast<long long>(n) - 1 + dinf - H + sum_h);
    c.exact_pass = delta == *c.exact;
    // Every image element is divisible by Inf(div s_j); equality of the
    // image with that subspace is a dimension count.
    std::vector<std::size_t> cols;
    RelationSystem sys{s[0].poly.field(), {}, hprime, H, std::nullopt};
    for (std::size_t j = 0; j < n; ++j) {
      sys.c.push_back(s[j].poly);
      if (hprime[j] >= 0) cols.push_back(j);
    }
    std::size_t ncols = 0;
    auto rows = relation_matrix(sys.c, sys.tdeg, cols, H, ncols);
    const auto rank_image = static_cast<long>(fq_rank(*sys.field, rows));
    c.image_pass = rank_image == ell(H - dinf);
  }
  return c;
}

CountingLemmaCheck check_counting_lemma_quasi(const std::vector<Section>& s, const std::vector<long>& hprime, long H) {
  if (s.size() != 2 && s.size() != 3) throw MathError("quasi-linear checks take two or three sections");
  const std::uint64_t q = s[0].poly.field()->size();
  CountingLemmaCheck c;
  auto full = kernel_dim(s, hprime, H, RelationShape::QuasiLinearT1Squared);
  c.count = full.count;
  BigInt pair_count = full.count;
  if (s.size() == 3) {
    pair_count = kernel_dim({s[0], s[1]}, {hprime[0], hprime[1]}, H, RelationShape::QuasiLinearT1Squared).count;
  }
  c.bound1 = 1 + make_rational(hprime[0], 2) + make_rational(hprime[1], 2);
  c.pass1 = count_within(pair_count, q, c.bound1);
  if (s.size() == 2) {
    c.pass2 = true;
    return c;
  }
  const long sum_h = hprime[0] + hprime[1] + hprime[2];
  const EffDivisor inf23 = inf_all(s, 1, 3);
  const EffDivisor inf123 = inf_all(s, 0, 3);
  const BigRational ceil_deg = ceil_half_difference_degree(inf23, inf123);
  const long d23 = static_cast<long>(inf23.degree());
  c.bound2a = qrat(1 + hprime[0]);
  c.bound2b = qrat(2 + sum_h - H + d23) - ceil_deg;
  c.pass2 = count_within(c.count, q, c.bound2a) || count_within(c.count, q, c.bound2b);
  c.exact_applies = hprime[1] + hprime[2] >= H - d23 - 1 && qrat(hprime[0]) >= ceil_deg - 1;
  if (c.exact_applies) {
    c.exact = c.bound2b;
    c.exact_pass = c.exact->get_den() == 1 && c.exact->get_num() >= 0 &&
                   c.count == ipow(big(static_cast<long long>(q)), c.exact->get_num().get_ui());
  }
  return c;
}

// ---------------------------------------------------------------- Möbius

long long mu_div(const Variety& v, const DivisorTuple& e) {
  if (e.size() != v.num_generators()) throw MathError("divisor tuple length mismatch");
  std::vector<Place> places;
  for (const auto& d : e)
    for (const auto& [p, m] : d.parts()) places.push_back(p);
  std::sort(places.begin(), places.end());
  places.erase(std::unique(places.begin(), places.end()), places.end());
  long long r = 1;
  for (const auto& p : places) {
    std::vector<long long> alpha(e.size());
    for (std::size_t k = 0; k < e.size(); ++k) alpha[k] = e[k].multiplicity(p);
    r *= v.mu0(alpha);
    if (r == 0) return 0;
  }
  return r;
}

long long mu_div_summatory(const Variety& v, const DivisorTuple& e) {
  // Sub-tuples as a mixed-radix counter over every (generator, place) slot.
  struct Slot {
    std::size_t k;
    Place place;
    unsigned max;
  };
  std::vector<Slot> slots;
  for (std::size_t k = 0; k < e.size(); ++k)
    for (const auto& [p, m] : e[k].parts()) slots.push_back({k, p, m});
  std::vector<unsigned> cur(slots.size(), 0);
  long long total = 0;
  while (true) {
    DivisorTuple sub;
    for (std::size_t k = 0; k < e.size(); ++k) {
      std::vector<std::pair<Place, unsigned>> parts;
      for (std::size_t s = 0; s < slots.size(); ++s)
        if (slots[s].k == k && cur[s] > 0) parts.emplace_back(slots[s].place, cur[s]);
      sub.emplace_back(e[k].field(), std::move(parts));
    }
    total += mu_div(v, sub);
    std::size_t pos = 0;
    while (pos < slots.size() && cur[pos] == slots[pos].max) cur[pos++] = 0;
    if (pos == slots.size()) break;
    ++cur[pos];
  }
  return total;
}

bool divisor_incidence(const Variety& v, const DivisorTuple& e) {
  std::map<std::string, Mask> at;
  for (std::size_t k = 0; k < e.size(); ++k)
    for (const auto& [p, m] : e[k].parts()) at[p.str()] |= Mask{1} << k;
  for (const auto& [name, vanish] : at)
    if (!v.incidence(vanish)) return false;
  return true;
}

// ---------------------------------------------------------------- N(D, E)

std::vector<long long> generator_degrees(const Variety& v, const IVec& y) {
  std::vector<long long> out(v.num_generators());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = dot(y, v.degree(k));
  return out;
}

namespace {

RelationSystem torsor_system(const Variety& v, const IVec& y, const std::vector<FqPoly>& s,
                             const std::vector<FqPoly>& g, const std::vector<long>& tdeg) {
  RelationSystem sys{s[0].field(), {}, tdeg, static_cast<long>(dot(y, v.d_tot())), squared_index(v)};
  sys.c.assign(v.num_t(), FqPoly::constant(sys.field, 1));
  for (const auto& mono : v.monomials()) {
    FqPoly c = poly_pow(g[mono.j], v.t_exponent(mono.j));
    for (const auto& [idx, exp] : mono.vars)
      if (idx < v.num_s()) c = c * poly_pow(s[idx], exp);
    sys.c[mono.j] = c;
  }
  return sys;
}

RelationSystem nde_system(const Variety& v, const IVec& y, const std::vector<Section>& d, const DivisorTuple& e,
                          FiniteField::Elem scale = 1) {
  if (d.size() != v.num_s() || e.size() != v.num_generators()) throw MathError("N(D,E) data length mismatch");
  auto gd = generator_degrees(v, y);
  std::vector<FqPoly> s, g;
  std::vector<long> tdeg;
  for (std::size_t i = 0; i < v.num_s(); ++i) {
    auto f = e[i].canonical_section(scale);
    if (d[i].degree + f.degree != gd[i]) throw MathError("deg D_i + deg F_i must equal <y, F_i>");
    s.push_back(d[i].poly * f.poly);
  }
  for (std::size_t j = 0; j < v.num_t(); ++j) {
    auto sec = e[v.t_index(j)].canonical_section(scale);
    g.push_back(sec.poly);
    tdeg.push_back(static_cast<long>(gd[v.t_index(j)]) - sec.degree);
  }
  return torsor_system(v, y, s, g, tdeg);
}

BigInt nde_inclusion_exclusion(const RelationSystem& sys, std::size_t nt) {
  BigInt total = 0;
  const Mask full = static_cast<Mask>((std::uint64_t{1} << nt) - 1);
  for (Mask k = 0; k <= full; ++k) {
    auto c = count_solutions(sys, k);
    if ((std::popcount(full & ~k)) % 2) total -= c;
    else total += c;
  }
  return total;
}

}  // namespace

BigInt count_NK(const Variety& v, const IVec& y, const std::vector<Section>& d, const DivisorTuple& e, Mask k) {
  return count_solutions(nde_system(v, y, d, e), k);
}

BigInt count_NDE(const Variety& v, const IVec& y, const std::vector<Section>& d, const DivisorTuple& e) {
  return nde_inclusion_exclusion(nde_system(v, y, d, e), v.num_t());
}

BigInt count_NDE_enumerated(const Variety& v, const IVec& y, const std::vector<Section>& d, const DivisorTuple& e) {
  auto sys = nde_system(v, y, d, e);
  std::vector<std::vector<FqPoly>> choices;
  std::uint64_t total = 1;
  for (auto td : sys.tdeg) {
    if (td < 0) return 0;
    choices.push_back(polys_up_to(sys.field, td, true));
    total *= choices.back().size();
    if (total > kTupleCap) throw CapExceeded("candidate tuples exceed 2^24");
  }
  BigInt count = 0;
  std::vector<std::size_t> idx(choices.size(), 0);
  while (true) {
    FqPoly sum(sys.field);
    for (std::size_t j = 0; j < choices.size(); ++j) {
      const auto& t = choices[j][idx[j]];
      sum = sum + (sys.squared && *sys.squared == j ? t * t : t) * sys.c[j];
    }
    if (sum.is_zero()) ++count;
    std::size_t pos = 0;
    while (pos < idx.size() && idx[pos] + 1 == choices[pos].size()) idx[pos++] = 0;
    if (pos == idx.size()) break;
    ++idx[pos];
  }
  return count;
}

// ---------------------------------------------------------------- morphisms

namespace {

struct YCount {
  BigInt value;
  bool complete = true;
};

YCount brute_force_y(const Variety& v, const FieldPtr& field, const IVec& y) {
  const auto gd = generator_degrees(v, y);
  const std::size_t ns = v.num_s(), n = v.num_generators();
  const std::uint64_t q = field->size();
  const Mask full = full_mask(v);
  std::vector<bool> single_bad(n);
  for (std::size_t k = 0; k < n; ++k) {
    single_bad[k] = !v.relevant(full & ~(Mask{1} << k));
    if (single_bad[k] && gd[k] > 0) return {};  // that coordinate would vanish somewhere
  }
  std::vector<std::vector<FqPoly>> choices;
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < ns; ++i) {
    long d = single_bad[i] ? 0 : static_cast<long>(gd[i]);
    if (upow(q, d + 1) > kTupleCap) return {0, false};
    choices.push_back(polys_up_to(field, d, true));
    total *= choices.back().size();
    if (total > kTupleCap) return {0, false};
  }
  std::vector<long> tdeg;
  for (std::size_t j = 0; j < v.num_t(); ++j) tdeg.push_back(static_cast<long>(gd[v.t_index(j)]));
  const std::vector<FqPoly> ones(v.num_t(), FqPoly::constant(field, 1));

  BigInt raw = 0;
  bool complete = true;
  std::vector<std::size_t> idx(ns, 0);
  std::vector<FqPoly> s(ns, FqPoly(field));
  while (true) {
    for (std::size_t i = 0; i < ns; ++i) s[i] = choices[i][idx[i]];
    auto sys = torsor_system(v, y, s, ones, tdeg);
    std::uint64_t hits = 0;
    bool ok = for_each_nonzero_solution(sys, [&](const std::vector<FqPoly>& t) {
      std::vector<FqPoly> u = s;
      u.insert(u.end(), t.begin(), t.end());
      for (std::size_t k = ns; k < n; ++k)
        if (single_bad[k] && poly_deg(u[k]) > 0) return;
      if (admissible(v, u, gd)) ++hits;
    });
    if (!ok) {
      complete = false;
      break;
    }
    raw += big(static_cast<long long>(hits));
    std::size_t pos = 0;
    while (pos < idx.size() && idx[pos] + 1 == choices[pos].size()) idx[pos++] = 0;
    if (pos == idx.size()) break;
    ++idx[pos];
  }
  if (!complete) return {0, false};
  const BigInt torus = ipow(big(static_cast<long long>(q) - 1), static_cast<unsigned long>(v.pic_rank()));
  if (raw % torus != 0) throw MathError("invariant violation: admissible tuples not divisible by (q-1)^r");
  return {raw / torus, true};
}

// Tuples E with μ_X(E) ≠ 0 and deg E_k ≤ budget_k, as per-place patterns.
void enumerate_mu_support(const Variety& v, const std::vector<Place>& places, const std::vector<Mask>& patterns,
                          std::vector<long long>& budget, std::size_t from,
                          std::vector<std::pair<std::size_t, Mask>>& chosen, std::uint64_t& visited,
                          const std::function<void(const std::vector<std::pair<std::size_t, Mask>>&)>& visit) {
  if (++visited > kDivisorTupleCap) throw CapExceeded("divisor tuples exceed 2^22");
  visit(chosen);
  for (std::size_t p = from; p < places.size(); ++p) {
    const long long f = places[p].degree();
    for (Mask a : patterns) {
      bool fits = true;
      for (std::size_t k = 0; k < budget.size(); ++k)
        if ((a >> k & 1) && budget[k] < f) fits = false;
      if (!fits) continue;
      for (std::size_t k = 0; k < budget.size(); ++k)
        if (a >> k & 1) budget[k] -= f;
      chosen.emplace_back(p, a);
      enumerate_mu_support(v, places, patterns, budget, p + 1, chosen, visited, visit);
      chosen.pop_back();
      for (std::size_t k = 0; k < budget.size(); ++k)
        if (a >> k & 1) budget[k] += f;
    }
  }
}

YCount lifting_y(const Variety& v, const FieldPtr& field, const IVec& y, FiniteField::Elem scale) {
  const auto gd = generator_degrees(v, y);
  const std::size_t n = v.num_generators(), ns = v.num_s();
  long long maxd = 0;
  for (auto d : gd) maxd = std::max(maxd, d);
  const auto places = places_up_to(field, static_cast<unsigned>(maxd));
  std::vector<Mask> patterns;
  for (Mask a = 1; a <= full_mask(v); ++a)
    if (v.mu0(a) != 0) patterns.push_back(a);
  std::vector<long long> budget = gd;
  std::vector<std::pair<std::size_t, Mask>> chosen;
  std::uint64_t visited = 0;
  BigInt total = 0;
  try {
    enumerate_mu_support(v, places, patterns, budget, 0, chosen, visited,
                         [&](const std::vector<std::pair<std::size_t, Mask>>& sel) {
      std::vector<std::vector<std::pair<Place, unsigned>>> parts(n);
      long long mu = 1;
      for (const auto& [p, a] : sel) {
        mu *= v.mu0(a);
        for (std::size_t k = 0; k < n; ++k)
          if (a >> k & 1) parts[k].emplace_back(places[p], 1u);
      }
      DivisorTuple e;
      for (std::size_t k = 0; k < n; ++k) e.emplace_back(field, std::move(parts[k]));
      std::vector<std::vector<FqPoly>> dchoices;
      std::vector<long> ddeg;
      std::uint64_t count = 1;
      for (std::size_t i = 0; i < ns; ++i) {
        long dd = static_cast<long>(gd[i]) - static_cast<long>(e[i].degree());
        dchoices.push_back(monic_up_to(field, dd));
        ddeg.push_back(dd);
        count *= dchoices.back().size();
        if (count > kDivisorTupleCap) throw CapExceeded("divisor tuples exceed 2^22");
      }
      std::vector<std::size_t> idx(ns, 0);
      std::vector<Section> d(ns, Section{FqPoly(field), 0});
      while (true) {
        for (std::size_t i = 0; i < ns; ++i) d[i] = Section{dchoices[i][idx[i]].scale(scale), ddeg[i]};
        total += big(mu) * nde_inclusion_exclusion(nde_system(v, y, d, e, scale), v.num_t());
        std::size_t pos = 0;
        while (pos < idx.size() && idx[pos] + 1 == dchoices[pos].size()) idx[pos++] = 0;
        if (pos == idx.size()) break;
        ++idx[pos];
      }
    });
  } catch (const CapExceeded&) {
    return {0, false};
  }
  return {total, true};
}

template <class F>
CurveCount sum_over_multidegrees(const Variety& v, long long m, F per_y) {
  auto ys = enumerate_dual_points(v.effective_cone(), v.anticanonical(), m);
  auto parts = parallel_map<YCount>(ys.size(), [&](std::size_t i) { return per_y(ys[i]); });
  CurveCount c;
  c.value = 0;
  c.multidegrees = ys.size();
  for (std::size_t i = 0; i < ys.size(); ++i) {
    if (parts[i].complete) c.value += parts[i].value;
    else {
      c.complete = false;
      c.skipped.push_back(ys[i]);
    }
  }
  return c;
}

}  // namespace

CurveCount brute_force_N(const Variety& v, std::uint64_t q, long long m) {
  auto field = field_of_size(q);
  return sum_over_multidegrees(v, m, [&](const IVec& y) { return brute_force_y(v, field, y); });
}

CurveCount lifting_rhs(const Variety& v, std::uint64_t q, long long m, std::uint32_t section_scale) {
  auto field = field_of_size(q);
  if (section_scale == 0 || section_scale >= q) throw MathError("section scale must be a nonzero field element");
  return sum_over_multidegrees(v, m, [&](const IVec& y) { return lifting_y(v, field, y, section_scale); });
}

ZetaReport zeta_report(const Variety& v, std::uint64_t q, long long m_max, unsigned euler_bound) {
  ZetaReport r;
  r.variety = v.name();
  r.q = q;
  r.euler_bound = euler_bound;
  auto g = gamma_truncated(v, q, euler_bound);
  r.gamma = g.partial.back();
  for (long long m = 0; m <= m_max; ++m) {
    ZetaRow row;
    row.m = m;
    auto c = brute_force_N(v, q, m);
    row.n = c.value;
    row.complete = c.complete;
    auto ys = enumerate_dual_points(v.effective_cone(), v.anticanonical(), m);
    row.main_term = r.gamma * qrat(static_cast<long long>(ys.size())) *
                    BigRational(ipow(big(static_cast<long long>(q)), static_cast<unsigned long>(m)));
    if (row.main_term != 0) row.ratio = BigRational(row.n) / row.main_term;
    r.rows.push_back(std::move(row));
  }
  return r;
}

}  // namespace maninlab
