#include <doctest.h>

#include <random>
#include <set>

#include "maninlab/cone.hpp"
#include "maninlab/curves.hpp"
#include "maninlab/points.hpp"
#include "random_instances.hpp"

using namespace maninlab;
using namespace maninlab::testing;

namespace {

FqPoly poly(const FieldPtr& f, std::vector<FiniteField::Elem> c) { return FqPoly(f, std::move(c)); }

std::uint64_t candidate_space(const KernelInstance& k) {
  std::uint64_t n = 1;
  for (auto h : k.hprime)
    for (long i = 0; i <= h; ++i) n *= k.s[0].poly.field()->size();
  return n;
}

// Kernel size of Σ t_j^{ε_j} s_j by enumerating every candidate tuple.
BigInt kernel_by_enumeration(const KernelInstance& k, bool quasi) {
  auto field = k.s[0].poly.field();
  std::vector<std::vector<FqPoly>> choices;
  for (auto h : k.hprime) {
    std::vector<FqPoly> c;
    if (h < 0) c.emplace_back(field);
    else {
      std::uint64_t n = 1;
      for (long i = 0; i <= h; ++i) n *= field->size();
      for (std::uint64_t i = 0; i < n; ++i) c.push_back(FqPoly::from_index(field, i, static_cast<std::size_t>(h + 1)));
    }
    choices.push_back(std::move(c));
  }
  BigInt count = 0;
  std::vector<std::size_t> idx(choices.size(), 0);
  while (true) {
    FqPoly sum(field);
    for (std::size_t j = 0; j < idx.size(); ++j) {
      const auto& t = choices[j][idx[j]];
      sum = sum + (quasi && j == 0 ? t * t : t) * k.s[j].poly;
    }
    if (sum.is_zero()) ++count;
    std::size_t pos = 0;
    while (pos < idx.size() && idx[pos] + 1 == choices[pos].size()) idx[pos++] = 0;
    if (pos == idx.size()) break;
    ++idx[pos];
  }
  return count;
}

EffDivisor at(const FieldPtr& f, const Place& p, unsigned m = 1) { return EffDivisor(f, {{p, m}}); }

DivisorTuple zero_tuple(const Variety& v, const FieldPtr& f) { return DivisorTuple(v.num_generators(), EffDivisor(f)); }

}  // namespace

TEST_CASE("effective divisors on P1") {
  auto f2 = field_of_size(2), f3 = field_of_size(3);
  auto d22 = enumerate_divisors(f2, 2);
  CHECK(d22.size() == 7);
  CHECK(BigRational(static_cast<long>(d22.size())) <= BigRational(8));
  CHECK(enumerate_divisors(f3, 1).size() == 4);
  for (std::uint64_t q : {2, 3, 4}) {
    auto field = field_of_size(q);
    for (unsigned d = 0; d <= 3; ++d) {
      auto divs = enumerate_divisors(field, d);
      std::uint64_t expect = 0, pw = 1;
      for (unsigned i = 0; i <= d; ++i, pw *= q) expect += pw;
      CHECK(divs.size() == expect);
      std::set<std::string> names;
      for (const auto& e : divs) {
        CHECK(e.degree() == d);
        names.insert(e.str());
      }
      CHECK(names.size() == divs.size());
    }
  }
  CHECK_THROWS_AS(enumerate_divisors(f2, 30), CapExceeded);

  // Round trip between divisors and canonical sections.
  auto sec = Section{poly(f3, {2, 0, 1}), 4};  // x² + 2 = (x+1)(x+2), ∞ twice
  auto e = EffDivisor::of_section(sec);
  CHECK(e.degree() == 4);
  CHECK(e.multiplicity(Place::at_infinity()) == 2);
  CHECK(e.canonical_section().poly == sec.poly);
  CHECK(EffDivisor::of_section(e.canonical_section(2)) == e);
  CHECK(inf(e, EffDivisor::of_section(Section{poly(f3, {1, 1}), 1})).degree() == 1);
}

TEST_CASE("dimension of section spaces") {
  CHECK(ell(3) == 4);
  CHECK(ell(-1) == 0);
  CHECK(ell(0) == 1);
  CHECK(ell(-7) == 0);
}

TEST_CASE("kernel dimensions") {
  auto f2 = field_of_size(2);
  std::vector<Section> s{{poly(f2, {0, 1}), 1}, {poly(f2, {1, 1}), 1}};
  auto k = kernel_dim(s, {2, 2}, 3, RelationShape::Linear);
  REQUIRE(k.dim);
  CHECK(*k.dim == 2);
  CHECK(k.count == 4);

  std::vector<Section> high{{poly(f2, {1, 1}), 3}, {poly(f2, {0, 1}), 3}};
  auto z = kernel_dim(high, {-1, -1}, 2, RelationShape::Linear);
  CHECK(z.dim == 0L);
  CHECK_THROWS_AS(kernel_dim(s, {2, 1}, 3, RelationShape::Linear), MathError);

  std::mt19937_64 rng(11);
  int linear = 0, quasi = 0;
  while (linear < 60 || quasi < 60) {
    auto inst = random_linear_instance(rng);
    if (linear < 60 && candidate_space(inst) <= 65536) {
      CHECK(kernel_dim(inst.s, inst.hprime, inst.H, RelationShape::Linear).count ==
            kernel_by_enumeration(inst, false));
      ++linear;
    }
    auto qi = random_quasi_instance(rng, 3);
    if (quasi < 60 && candidate_space(qi) <= 65536) {
      CHECK(kernel_dim(qi.s, qi.hprime, qi.H, RelationShape::QuasiLinearT1Squared).count ==
            kernel_by_enumeration(qi, true));
      ++quasi;
    }
  }
}

TEST_CASE("counting lemma, linear relations") {
  std::mt19937_64 rng(20240501);
  int exact_cases = 0;
  for (int i = 0; i < 500; ++i) {
    auto inst = random_linear_instance(rng);
    auto c = check_counting_lemma(inst.s, inst.hprime, inst.H);
    CHECK(c.pass1);
    CHECK(c.pass2);
    CHECK(c.exact_pass);
    CHECK(c.image_pass);
    if (c.exact_applies) ++exact_cases;
  }
  CHECK(exact_cases >= 50);
}

TEST_CASE("counting lemma, quasi-linear relations") {
  std::mt19937_64 rng(20240502);
  int exact_cases = 0;
  for (int i = 0; i < 200; ++i) {
    auto two = random_quasi_instance(rng, 2);
    CHECK(check_counting_lemma_quasi(two.s, two.hprime, two.H).pass1);
    auto inst = random_quasi_instance(rng, 3);
    auto c = check_counting_lemma_quasi(inst.s, inst.hprime, inst.H);
    CHECK(c.pass1);
    CHECK(c.pass2);
    CHECK(c.exact_pass);
    if (c.exact_applies) ++exact_cases;
  }
  CHECK(exact_cases >= 20);
}

TEST_CASE("divisor Moebius function") {
  auto f3 = field_of_size(3);
  Variety v(builtin_xn(3));
  auto places = places_up_to(f3, 2);
  CHECK(mu_div(v, zero_tuple(v, f3)) == 1);

  auto doubled = zero_tuple(v, f3);
  doubled[0] = at(f3, places[1], 2);
  CHECK(mu_div(v, doubled) == 0);

  // Two generators whose divisors do not meet, at two different places.
  std::size_t a = 0, b = 0;
  for (std::size_t i = 0; i < v.num_generators() && !b; ++i)
    for (std::size_t j = i + 1; j < v.num_generators(); ++j)
      if (!v.incidence(Mask{1} << i | Mask{1} << j)) {
        a = i;
        b = j;
        break;
      }
  REQUIRE(b != 0);
  const Mask pair = Mask{1} << a | Mask{1} << b;
  auto two_places = zero_tuple(v, f3);
  two_places[a] = at(f3, places[1]) + at(f3, places[2]);
  two_places[b] = at(f3, places[1]) + at(f3, places[5]);
  CHECK(mu_div(v, two_places) == v.mu0(pair) * v.mu0(Mask{1} << a) * v.mu0(Mask{1} << b));
  auto single = zero_tuple(v, f3);
  single[a] = at(f3, places[1]);
  single[b] = at(f3, places[1]);
  CHECK(mu_div(v, single) == v.mu0(pair));
  CHECK(v.mu0(pair) == -1);

  // Componentwise disjointness alone does not give multiplicativity: the
  // same place carrying a in E and b in E' merges into one pattern.
  auto ea = zero_tuple(v, f3), eb = zero_tuple(v, f3);
  ea[a] = at(f3, places[1]);
  eb[b] = at(f3, places[1]);
  CHECK(mu_div(v, ea) * mu_div(v, eb) == 0);

  std::mt19937_64 rng(7);
  int checked = 0, nonzero = 0;
  for (int i = 0; checked < 200 && i < 5000; ++i) {
    auto e1 = i % 2 ? random_divisor_tuple(v, f3, 3, rng) : random_mu_support_tuple(v, f3, rng);
    auto e2 = i % 2 ? random_divisor_tuple(v, f3, 3, rng) : random_mu_support_tuple(v, f3, rng);
    std::set<std::string> p1;
    for (const auto& d : e1)
      for (const auto& [p, m] : d.parts()) p1.insert(p.str());
    bool disjoint = true;
    for (const auto& d : e2)
      for (const auto& [p, m] : d.parts())
        if (p1.count(p.str())) disjoint = false;
    if (!disjoint) continue;
    DivisorTuple sum;
    for (std::size_t k = 0; k < e1.size(); ++k) sum.push_back(e1[k] + e2[k]);
    CHECK(mu_div(v, sum) == mu_div(v, e1) * mu_div(v, e2));
    if (mu_div(v, sum) != 0) ++nonzero;
    ++checked;
  }
  CHECK(checked == 200);
  CHECK(nonzero >= 20);
}

TEST_CASE("divisor Moebius summation") {
  std::mt19937_64 rng(99);
  for (auto desc : {builtin_xn(3), builtin_xn(4), builtin_dp6a2()}) {
    Variety v(desc);
    auto f2 = field_of_size(2);
    for (int i = 0; i < 200; ++i) {
      auto e = random_divisor_tuple(v, f2, 4, rng);
      long long s = mu_div_summatory(v, e);
      CHECK((s == 0 || s == 1));
      CHECK((s == 1) == divisor_incidence(v, e));
    }
  }
}

TEST_CASE("N(D,E) inclusion-exclusion") {
  std::mt19937_64 rng(31);
  int compared = 0;
  for (auto desc : {builtin_xn(3), builtin_dp6a2()}) {
    Variety v(desc);
    for (std::uint64_t q : {2, 3}) {
      auto field = field_of_size(q);
      for (long long m = 0; m <= 4; ++m) {
        for (const auto& y : enumerate_dual_points(v.effective_cone(), v.anticanonical(), m)) {
          auto gd = generator_degrees(v, y);
          for (int rep = 0; rep < 4; ++rep) {
            // E: one place per generator at most, within the degree budgets.
            DivisorTuple e;
            for (std::size_t k = 0; k < v.num_generators(); ++k) {
              if (gd[k] >= 1 && uniform(rng, 0, 2) == 0) {
                auto pl = places_up_to(field, 1);
                e.push_back(at(field, pl[static_cast<std::size_t>(uniform(rng, 0, static_cast<long>(pl.size()) - 1))]));
              } else {
                e.emplace_back(field);
              }
            }
            std::vector<Section> d;
            for (std::size_t i = 0; i < v.num_s(); ++i) {
              long dd = static_cast<long>(gd[i]) - static_cast<long>(e[i].degree());
              d.push_back(Section{random_poly(field, dd, rng).monic(), dd});
            }
            CHECK(count_NDE(v, y, d, e) == count_NDE_enumerated(v, y, d, e));
            BigInt alternating = 0;
            const Mask full = static_cast<Mask>((1u << v.num_t()) - 1);
            for (Mask k = 0; k <= full; ++k) {
              auto c = count_NK(v, y, d, e, k);
              if (std::popcount(full & ~k) % 2) alternating -= c;
              else alternating += c;
            }
            CHECK(alternating == count_NDE_enumerated(v, y, d, e));
            ++compared;
          }
        }
      }
    }
  }
  CHECK(compared >= 100);

  // y = 0, D = E = 0: constant tuples, the open-subset count.
  Variety x3(builtin_xn(3));
  for (std::uint64_t q : {2, 3, 4, 5}) {
    auto field = field_of_size(q);
    IVec y(x3.pic_rank(), 0);
    std::vector<Section> d(x3.num_s(), Section{FqPoly::constant(field, 1), 0});
    CHECK(count_NDE(x3, y, d, zero_tuple(x3, field)) == count_open(x3, q));
  }
}

TEST_CASE("lifting formula against brute force") {
  Variety x3(builtin_xn(3));
  for (long long m = 0; m <= 5; ++m) {
    auto b = brute_force_N(x3, 2, m);
    auto l = lifting_rhs(x3, 2, m);
    REQUIRE(b.complete);
    REQUIRE(l.complete);
    CHECK(b.value == l.value);
  }
  for (long long m = 0; m <= 4; ++m) {
    auto b = brute_force_N(x3, 3, m);
    auto l = lifting_rhs(x3, 3, m);
    REQUIRE(b.complete);
    REQUIRE(l.complete);
    CHECK(b.value == l.value);
    CHECK(lifting_rhs(x3, 3, m, 2).value == l.value);
  }
  CHECK(brute_force_N(x3, 2, 0).value == 0);
  CHECK(brute_force_N(x3, 3, 0).value == count_open(x3, 3));
  // m = 1 has no multidegree.
  CHECK(brute_force_N(x3, 3, 1).multidegrees == 0);
  CHECK(lifting_rhs(x3, 3, 1).value == 0);

  Variety x4(builtin_xn(4));
  for (long long m = 0; m <= 3; ++m) CHECK(brute_force_N(x4, 2, m).value == lifting_rhs(x4, 2, m).value);
  CHECK(brute_force_N(x4, 2, 0).value == count_open(x4, 2));

  Variety dp(builtin_dp6a2());
  for (std::uint64_t q : {2, 3}) {
    for (long long m = 0; m <= 4; ++m) CHECK(brute_force_N(dp, q, m).value == lifting_rhs(dp, q, m).value);
    CHECK(brute_force_N(dp, q, 0).value == count_open(dp, q));
  }
}

TEST_CASE("zeta report") {
  Variety x3(builtin_xn(3));
  auto r = zeta_report(x3, 3, 4, 4);
  REQUIRE(r.rows.size() == 5);
  CHECK(r.gamma > 0);
  for (const auto& row : r.rows) {
    CHECK(row.complete);
    auto ys = enumerate_dual_points(x3.effective_cone(), x3.anticanonical(), row.m);
    CHECK(row.main_term == r.gamma * BigRational(static_cast<long>(ys.size())) *
                               BigRational(ipow(BigInt(3), static_cast<unsigned long>(row.m))));
    if (row.n > 0) {
      REQUIRE(row.ratio);
      CHECK(*row.ratio > 0);
    }
  }
  // Along steps of 2 the main term does not decrease.
  for (std::size_t i = 0; i + 2 < r.rows.size(); ++i) CHECK(r.rows[i].main_term <= r.rows[i + 2].main_term);
}
