#include <random>

#include "doctest.h"
#include "maninlab/fq_poly.hpp"
#include "maninlab/rho_poly.hpp"

using namespace maninlab;

namespace {

FqPoly random_poly(const FieldPtr& k, std::mt19937_64& rng, unsigned max_deg) {
  std::uniform_int_distribution<unsigned> deg(0, max_deg);
  std::uniform_int_distribution<std::uint32_t> el(0, k->size() - 1);
  std::vector<FiniteField::Elem> c(deg(rng) + 1);
  for (auto& x : c) x = el(rng);
  return FqPoly(k, c);
}

}  // namespace

TEST_CASE("field_make sizes and basic laws") {
  CHECK(field_make(2, 1)->size() == 2);
  auto f4 = field_make(2, 2);
  CHECK(f4->size() == 4);
  for (std::uint32_t a = 1; a < 4; ++a) CHECK(f4->mul(a, f4->mul(a, a)) == 1);
  auto f9 = field_make(3, 2);
  int fixed = 0;
  for (std::uint32_t a = 0; a < 9; ++a)
    if (f9->frobenius(a) == a) ++fixed;
  CHECK(fixed == 3);
  CHECK_THROWS_AS(field_make(4, 1), MathError);
  CHECK_THROWS_AS(field_make(2, 21), CapExceeded);
}

TEST_CASE("every bundled field has invertible nonzero elements") {
  for (auto [p, f] : std::vector<std::pair<std::uint32_t, unsigned>>{{2, 3}, {3, 3}, {5, 2}, {7, 2}, {2, 8}, {3, 5}}) {
    auto k = field_make(p, f);
    for (std::uint32_t a = 1; a < k->size(); ++a) CHECK(k->mul(a, k->inv(a)) == 1);
  }
}

TEST_CASE("ring axioms on random triples") {
  std::mt19937_64 rng(7);
  for (std::uint64_t q : {2u, 3u, 4u, 5u, 8u, 9u, 25u, 27u, 49u, 256u, 625u}) {
    auto k = field_of_size(q);
    std::uniform_int_distribution<std::uint32_t> el(0, k->size() - 1);
    for (int it = 0; it < 300; ++it) {
      auto a = el(rng), b = el(rng), c = el(rng);
      CHECK(k->add(k->add(a, b), c) == k->add(a, k->add(b, c)));
      CHECK(k->mul(k->mul(a, b), c) == k->mul(a, k->mul(b, c)));
      CHECK(k->mul(a, k->add(b, c)) == k->add(k->mul(a, b), k->mul(a, c)));
      CHECK(k->add(a, k->neg(a)) == 0);
    }
  }
}

TEST_CASE("poly_ops examples over F_2") {
  auto k = field_make(2, 1);
  FqPoly x = FqPoly::x(k);
  FqPoly one = FqPoly::constant(k, 1);
  CHECK(gcd(x * x + x, x) == x);
  CHECK(is_irreducible(x * x + x + one));
  auto fac = factor(x * x + x + one);
  REQUIRE(fac.factors.size() == 1);
  CHECK(fac.factors[0].multiplicity == 1);
  CHECK((x * x + one).eval(1) == 0);
  CHECK(FqPoly(k).degree().is_neg_inf());
}

TEST_CASE("mixed fields are rejected") {
  auto a = FqPoly::x(field_make(2, 1));
  auto b = FqPoly::x(field_make(3, 1));
  CHECK_THROWS_AS(a + b, MathError);
}

TEST_CASE("factorization round trip on random polynomials") {
  std::mt19937_64 rng(11);
  for (std::uint64_t q : {2u, 3u, 4u}) {
    auto k = field_of_size(q);
    for (int it = 0; it < 200; ++it) {
      FqPoly a = random_poly(k, rng, 8);
      if (a.is_zero()) continue;
      auto fac = factor(a);
      CHECK(assemble(fac, k) == a);
      for (const auto& pf : fac.factors) {
        CHECK(pf.poly.leading() == 1);
        CHECK(is_irreducible(pf.poly));
      }
    }
  }
}

TEST_CASE("gcd divides and is maximal") {
  std::mt19937_64 rng(13);
  for (std::uint64_t q : {2u, 3u, 4u, 5u}) {
    auto k = field_of_size(q);
    for (int it = 0; it < 200; ++it) {
      FqPoly c = random_poly(k, rng, 3);
      FqPoly a = random_poly(k, rng, 5) * c, b = random_poly(k, rng, 5) * c;
      FqPoly g = gcd(a, b);
      if (a.is_zero() && b.is_zero()) {
        CHECK(g.is_zero());
        continue;
      }
      CHECK(g.leading() == 1);
      CHECK(a.divisible_by(g));
      CHECK(b.divisible_by(g));
      if (!c.is_zero()) CHECK(g.divisible_by(c));
    }
  }
}

TEST_CASE("irreducible counts match necklace formula") {
  for (std::uint64_t q : {2u, 3u, 4u}) {
    auto k = field_of_size(q);
    for (unsigned d = 1; d <= 4; ++d) {
      CHECK(BigInt(static_cast<unsigned long>(monic_irreducibles(k, d).size())) == count_monic_irreducibles(q, d));
    }
  }
  CHECK(count_monic_irreducibles(2, 2) == 1);
}

TEST_CASE("rho_eval") {
  CHECK(rho_eval(RhoPolynomial({-1, 1}), 2) == 1);
  CHECK(rho_eval(RhoPolynomial({0, 1, 1}), 3) == 12);
  CHECK(rho_eval(RhoPolynomial(), 5) == 0);
  CHECK(RhoPolynomial({0, 0}).degree().is_neg_inf());
  CHECK((RhoPolynomial({-1, 1}) * RhoPolynomial({1, 1})) == RhoPolynomial({-1, 0, 1}));
}
