#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "maninlab/points.hpp"
#include "maninlab/series.hpp"

using namespace maninlab;

namespace {

BigRational Qr(std::uint64_t q) { return BigRational(BigInt(static_cast<unsigned long>(q))); }

// Test-side oracle for X_n: S(h) = Σ_{d ≥ h} q^{min d − Σd}. Raising a
// minimal coordinate h_i by one removes the slice d_i = h_i, on which the
// minimum is h_i, so S(h) = S(h + e_i) + ∏_{j≠i} q^{−h_j} (1 − 1/q)^{1−n}.
// At h = M·1 the sum is q^{M(1−n)} S(0), and S(0) comes from the closed form
// (1 − ∏t)/(1 − ρ∏t) of F̃ at ρ = q, t = 1/q divided by (1 − 1/q)^n.
BigRational xn_min_sum(std::vector<long long> h, std::uint64_t q) {
  const long n = static_cast<long>(h.size());
  const BigRational Q = Qr(q);
  const BigRational geo = 1 / (1 - 1 / Q);
  BigRational s0 = (1 - rpow(Q, -n)) / (1 - rpow(Q, 1 - n)) * rpow(geo, n);
  BigRational acc = 0;
  long long M = *std::max_element(h.begin(), h.end());
  while (true) {
    auto it = std::min_element(h.begin(), h.end());
    if (*it == M) break;
    std::size_t i = static_cast<std::size_t>(it - h.begin());
    long long others = 0;
    for (std::size_t j = 0; j < h.size(); ++j)
      if (j != i) others += h[j];
    acc += rpow(Q, -others) * rpow(geo, n - 1);
    ++h[i];
  }
  return acc + rpow(Q, M * (1 - n)) * s0;
}

// F̃ for X_n at pattern e, from the oracle above.
BigRational xn_ftilde_oracle(int n, const Pattern& e, std::uint64_t q) {
  std::vector<long long> h(n);
  for (int i = 0; i < n; ++i) h[i] = e[1 + i] + e[n + 1 + i];
  const BigRational Q = Qr(q);
  // F̃ = (1 − 1/q)^n Σ_{d ≥ 0} q^{min(d + h) − Σd} = (1 − 1/q)^n q^{Σh} S(h).
  long long sh = std::accumulate(h.begin(), h.end(), 0LL);
  return rpow(1 - 1 / Q, n) * rpow(Q, sh) * xn_min_sum(h, q);
}

// F̃ for dP6-A₂ from the finitely supported a_{ν,d}.
BigRational dp6a2_ftilde_oracle(const Pattern& e, std::uint64_t q) {
  auto nu = dp6a2_nu(e);
  const BigRational Q = Qr(q);
  BigRational s = 0;
  for (long long d1 = 0; d1 <= 14; ++d1)
    for (long long d2 = 0; d2 <= 14; ++d2)
      for (long long d3 = 0; d3 <= 14; ++d3) {
        auto a = dp6a2_coeff(nu, {d1, d2, d3});
        if (!a.is_zero()) s += a.eval(Q) * rpow(Q, -(d1 + d2 + d3));
      }
  return s / ((1 - rpow(Q, -3)) * (1 - rpow(Q, -2)));
}

Pattern mask_pattern(std::size_t n, unsigned m) {
  Pattern e(n, 0);
  for (std::size_t k = 0; k < n; ++k) e[k] = (m >> k) & 1;
  return e;
}

}  // namespace

TEST_CASE("X_3 series coefficients follow the closed form") {
  Variety v(builtin_xn(3));
  Pattern e0(7, 0);
  auto s = series_truncate(v, e0, 8);
  CHECK(s.variables() == std::vector<std::size_t>{1, 2, 3});
  CHECK(s.coeff({0, 0, 0}) == RhoPolynomial::monomial(0));
  CHECK(s.coeff({1, 1, 1}) == RhoPolynomial(std::vector<std::int64_t>{-1, 1}));
  for (std::size_t idx = 0; idx < s.size(); ++idx) {
    auto d = s.point(idx);
    bool diagonal = d[0] == d[1] && d[1] == d[2];
    if (!diagonal) {
      CHECK(s.at(idx).is_zero());
    } else if (d[0] > 0) {
      CHECK(s.at(idx) == RhoPolynomial::monomial(d[0] - 1) * RhoPolynomial(std::vector<std::int64_t>{-1, 1}));
    }
  }
  // Constant term ρ^{min_j(g_j + f_j)}.
  Pattern e{0, 1, 1, 0, 1, 0, 1};
  auto se = series_truncate(v, e, 4);
  CHECK(se.coeff({0, 0, 0}) == RhoPolynomial::monomial(1));
  CHECK_THROWS_AS(series_truncate(v, e0, 33), CapExceeded);
}

TEST_CASE("degree bounds") {
  Variety v(builtin_xn(3));
  Pattern e0(7, 0);
  auto s = series_truncate(v, e0, 8);
  auto r = check_degree_bounds(s, s.coeff({0, 0, 0}));
  CHECK(r.hypothesis_pass);
  CHECK(r.lemma_pass);
  REQUIRE(r.max_excess.has_value());
  CHECK(*r.max_excess == -2);  // at d = (1,1,1): deg 1, |d| = 3
  // Lemma spot check with ν = (0,3), d = (5,0).
  CHECK(std::min(5 + 0, 0 + 3) <= 5 + 0 + std::min(0, 3));

  auto b = check_dp6a2_bounds({0, 1, 1}, 8);
  CHECK(b.majdeg_pass);
  CHECK(b.majdegbis_pass);
  CHECK(b.vanishing_pass);
}

TEST_CASE("dP6-A2 coefficients") {
  std::vector<long long> zero{0, 0, 0};
  CHECK(dp6a2_coeff(zero, {0, 0, 0}) == RhoPolynomial::monomial(0));
  for (auto d : std::vector<std::vector<long long>>{{0, 0, 1}, {0, 1, 0}, {0, 1, 1}, {1, 0, 0}})
    CHECK(dp6a2_coeff(zero, d).is_zero());

  Variety v(builtin_dp6a2());
  for (long long n1 = 0; n1 <= 2; ++n1)
    for (long long n2 = 0; n2 <= 2; ++n2)
      for (long long n3 = 0; n3 <= 2; ++n3) {
        Pattern e{0, n1, n2, n3, 0, 0, 0};
        std::vector<long long> nu{n1, n2, n3};
        auto s = series_truncate(v, e, 10);
        REQUIRE(s.variables() == std::vector<std::size_t>{1, 2, 3});
        // Multiply F̃ by (1 − ρ t₂²t₃²)(1 − ρ t₁t₂t₃) inside the box.
        RhoPolynomial rho = RhoPolynomial::monomial(1);
        for (std::size_t idx = 0; idx < s.size(); ++idx) {
          auto d = s.point(idx);
          auto shifted = [&](long long a, long long b, long long c) { return s.coeff({d[0] - a, d[1] - b, d[2] - c}); };
          RhoPolynomial g = shifted(0, 0, 0) - rho * shifted(0, 2, 2) - rho * shifted(1, 1, 1) +
                            rho * rho * shifted(1, 3, 3);
          INFO("nu=", n1, n2, n3, " d=", d[0], d[1], d[2]);
          CHECK(g == dp6a2_coeff(nu, d));
        }
      }
}

TEST_CASE("exact F̃ values") {
  Variety x3(builtin_xn(3));
  Pattern e0(7, 0);
  CHECK(exact_ftilde_at(x3, e0, 2) == BigRational(7, 6));
  Pattern f0{1, 0, 0, 0, 0, 0, 0};
  CHECK(exact_ftilde_at(x3, f0, 2) == BigRational(7, 6));

  for (int n = 3; n <= 4; ++n) {
    Variety v(builtin_xn(n));
    const unsigned N = static_cast<unsigned>(v.num_generators());
    for (std::uint64_t q : {2, 3, 4, 5})
      for (unsigned m = 0; m < (1u << N); m += (n == 3 ? 1 : 7)) {
        Pattern e = mask_pattern(N, m);
        auto r = exact_ftilde(v, e, q);
        INFO("n=", n, " q=", q, " mask=", m);
        CHECK(r.consistent);
        CHECK(r.value > 0);
        CHECK(r.value == xn_ftilde_oracle(n, e, q));
      }
  }
  Variety d(builtin_dp6a2());
  for (std::uint64_t q : {2, 3, 4, 5})
    for (unsigned m = 0; m < 128; m += (q == 2 ? 1 : 5)) {
      Pattern e = mask_pattern(7, m);
      auto r = exact_ftilde(d, e, q);
      INFO("q=", q, " mask=", m);
      CHECK(r.consistent);
      CHECK(r.value == dp6a2_ftilde_oracle(e, q));
    }
}

TEST_CASE("local densities") {
  Variety x3(builtin_xn(3));
  Pattern e0(7, 0);
  // x₀ is free, so the count is q · N_3(q) over q^{2n}.
  CHECK(local_density(x3, e0, 2) == make_rational(2 * 36, 64));
  for (std::uint64_t q : {2, 3, 4, 5}) {
    BigRational expect = Qr(q) * BigRational(count_bilinear_brute(3, q)) / rpow(Qr(q), 6);
    CHECK(local_density(x3, e0, q) == expect);
  }
  // Forcing x₁ = 0 leaves y₁ free: q · q · N_2(q) / q^6.
  Pattern e1{0, 1, 0, 0, 0, 0, 0};
  CHECK(local_density(x3, e1, 3) == BigRational(9) * BigRational(count_bilinear(2, 3)) / rpow(Qr(3), 6));
}

TEST_CASE("local identity") {
  Variety x3(builtin_xn(3));
  auto r = check_local_identity(x3, 2);
  CHECK(r.r == BigRational(13, 64));
  CHECK(r.l1 == BigRational(13, 64));
  CHECK(r.l2 == BigRational(13, 64));
  CHECK(r.pass);
  CHECK(check_local_identity(Variety(builtin_xn(4)), 3).pass);
  CHECK(check_local_identity(Variety(builtin_dp6a2()), 2).pass);
}

TEST_CASE("convergence certificate") {
  for (int n = 3; n <= 5; ++n) {
    Variety v(builtin_xn(n));
    auto cases = convergence_certificate(v);
    CHECK_FALSE(cases.empty());
    for (const auto& c : cases) {
      Pattern e = mask_pattern(v.num_generators(), c.pattern);
      long long mn = 2;
      long long total = e[0];
      for (int i = 1; i <= n; ++i) {
        mn = std::min(mn, e[i] + e[n + i]);
        total += e[i] + e[n + i];
      }
      CHECK(mn - total <= -2);
      CHECK(c.pass);
    }
  }
  for (const auto& c : convergence_certificate(Variety(builtin_dp6a2()))) CHECK(c.pass);
}
