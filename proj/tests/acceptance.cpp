// Acceptance run: one line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "maninlab/cone.hpp"
#include "maninlab/curves.hpp"
#include "maninlab/fan.hpp"
#include "maninlab/points.hpp"
#include "maninlab/series.hpp"
#include "maninlab/variety.hpp"
#include "random_instances.hpp"

using namespace maninlab;
using namespace maninlab::testing;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

// (1−t)^r Σ_{y ∈ N^r} t^{⟨y,a⟩}, each factor summed term by term.
long double orthant_limit_oracle(const IVec& a, long double t) {
  long double total = 1;
  for (auto c : a) {
    long double x = std::pow(t, static_cast<long double>(c)), term = 1, s = 0;
    while (term > 1e-24L) {
      s += term;
      term *= x;
    }
    total *= (1 - t) * s;
  }
  return total;
}

Verdict fan_certificates() {
  Verdict v;
  for (int n = 3; n <= 6; ++n) {
    auto c = check_fan(build_sigma_n(n));
    bool ok = c.simplicial && c.smooth && c.complete && c.separated && c.projective && c.case_split_replayed &&
              c.samples == 10000 && c.samples_covered == c.samples;
    v.require(ok, "Sigma_" + std::to_string(n));
  }
  return v;
}

Verdict local_identity() {
  Verdict v;
  auto run = [&](const VarietyDescriptor& d, std::initializer_list<std::uint64_t> qs) {
    Variety x(d);
    for (auto q : qs) {
      auto r = check_local_identity(x, q);
      v.require(r.pass && r.l1 == r.l2 && r.l2 == r.r, x.name() + " q=" + std::to_string(q));
    }
  };
  run(builtin_xn(3), {2, 3, 4, 5});
  run(builtin_xn(4), {2, 3, 4, 5});
  run(builtin_dp6a2(), {2, 3});
  return v;
}

Verdict bilinear_counts() {
  Verdict v;
  for (int n = 1; n <= 3; ++n)
    for (std::uint64_t q = 2; q <= 5; ++q) {
      BigInt Q = big(static_cast<long long>(q));
      BigInt closed = ipow(Q, 2 * n - 1) + ipow(Q, n) - ipow(Q, n - 1);
      bool ok = count_bilinear(n, q) == closed && count_bilinear_brute(n, q) == closed;
      v.require(ok, "n=" + std::to_string(n) + " q=" + std::to_string(q));
    }
  v.require(count_bilinear(3, 2) == 36, "N_3(2) = 36");
  return v;
}

Verdict lifting_formula() {
  Verdict v;
  Variety x3(builtin_xn(3));
  auto run = [&](std::uint64_t q, long long m_max) {
    for (long long m = 0; m <= m_max; ++m) {
      auto b = brute_force_N(x3, q, m);
      auto l = lifting_rhs(x3, q, m);
      std::string tag = "q=" + std::to_string(q) + " m=" + std::to_string(m);
      v.require(b.complete && l.complete, tag + " incomplete");
      v.require(b.value == l.value, tag + " brute " + b.value.get_str() + " lifting " + l.value.get_str());
      if (m == 0) v.require(b.value == count_open(x3, q), tag + " open count");
    }
  };
  run(2, 5);
  run(3, 4);
  return v;
}

Verdict alpha_delta() {
  Verdict v;
  const long double t = 1.0L - std::ldexp(1.0L, -20);
  for (int n = 3; n <= 5; ++n) {
    Variety x(builtin_xn(n));
    auto a = alpha(x.effective_cone(), x.anticanonical());
    long expect_den = n;
    for (int i = 0; i < n; ++i) expect_den *= n - 1;
    v.require(a.value == make_rational(1, expect_den), "alpha(X_" + std::to_string(n) + ")");
    // The oracle sums over the dual cone, which is the orthant when the
    // effective cone is spanned by the basis vectors.
    bool orthant = x.effective_cone().generators().size() == x.pic_rank();
    for (std::size_t i = 0; i < x.effective_cone().generators().size() && orthant; ++i) {
      IVec e(x.pic_rank(), 0);
      e[i] = 1;
      orthant = x.effective_cone().generators()[i] == e;
    }
    v.require(orthant, "X_" + std::to_string(n) + " effective cone is not the orthant");
    if (orthant) {
      long double diff = static_cast<long double>(a.value.get_d()) - orthant_limit_oracle(x.anticanonical(), t);
      v.require(std::fabs(static_cast<double>(diff)) < 1e-6, "numeric limit X_" + std::to_string(n));
    }
    v.require(delta(x.anticanonical()) == 1, "delta(X_" + std::to_string(n) + ")");
  }
  Variety dp(builtin_dp6a2());
  v.require(delta(dp.anticanonical()) == 1, "delta(dP6-A2)");
  return v;
}

Verdict dp6a2_series() {
  Verdict v;
  Variety dp(builtin_dp6a2());
  const RhoPolynomial rho = RhoPolynomial::monomial(1);
  std::size_t scanned = 0, compared = 0;
  for (long long n1 = 0; n1 <= 2; ++n1)
    for (long long n2 = 0; n2 <= 2; ++n2)
      for (long long n3 = 0; n3 <= 2; ++n3) {
        std::vector<long long> nu{n1, n2, n3};
        std::string tag = "nu=(" + std::to_string(n1) + "," + std::to_string(n2) + "," + std::to_string(n3) + ")";
        auto b = check_dp6a2_bounds(nu, 12);
        v.require(b.vanishing_pass, tag + " vanishing");
        v.require(b.majdeg_pass, tag + " majdeg");
        v.require(b.majdegbis_pass, tag + " majdegbis");
        scanned += b.checked;
        // ν = (f₁ + 2g₁, f₂ + g₂, f₃ + g₃) with g = 0 and f = ν.
        Pattern e{0, n1, n2, n3, 0, 0, 0};
        auto s = series_truncate(dp, e, 10);
        bool agree = true;
        for (std::size_t idx = 0; idx < s.size() && agree; ++idx) {
          auto d = s.point(idx);
          auto shifted = [&](long long a, long long bb, long long c) {
            return s.coeff({d[0] - a, d[1] - bb, d[2] - c});
          };
          RhoPolynomial g = shifted(0, 0, 0) - rho * shifted(0, 2, 2) - rho * shifted(1, 1, 1) +
                            rho * rho * shifted(1, 3, 3);
          agree = g == dp6a2_coeff(nu, d);
          ++compared;
        }
        v.require(agree, tag + " series_truncate agreement");
      }
  v.detail += (v.detail.empty() ? "" : "; ") + std::to_string(scanned) + " coefficients scanned, " +
              std::to_string(compared) + " compared";
  return v;
}

Verdict positivity() {
  Verdict v;
  for (int n = 3; n <= 6; ++n) {
    auto rep = Variety(builtin_xn(n)).check_positivity();
    v.require(rep.all_pass, "X_" + std::to_string(n));
    QVec expect(n + 1, BigRational(0));
    expect[0] = make_rational(1, n - 1);
    v.require(rep.conditions.back().witness == expect, "X_" + std::to_string(n) + " F_0/(n-1) witness");
  }
  v.require(Variety(builtin_dp6a2()).check_positivity().all_pass, "dP6-A2");
  return v;
}

Verdict counting_lemma() {
  Verdict v;
  std::mt19937_64 rng(20240501);
  int violations = 0, exact = 0;
  for (int i = 0; i < 500; ++i) {
    auto k = random_linear_instance(rng);
    auto c = check_counting_lemma(k.s, k.hprime, k.H);
    if (!(c.pass1 && c.pass2 && c.exact_pass && c.image_pass)) ++violations;
    if (c.exact_applies) ++exact;
  }
  int qviolations = 0, qexact = 0;
  std::mt19937_64 qrng(20240502);
  for (int i = 0; i < 200; ++i) {
    auto two = random_quasi_instance(qrng, 2);
    if (!check_counting_lemma_quasi(two.s, two.hprime, two.H).pass1) ++qviolations;
    auto k = random_quasi_instance(qrng, 3);
    auto c = check_counting_lemma_quasi(k.s, k.hprime, k.H);
    if (!(c.pass1 && c.pass2 && c.exact_pass)) ++qviolations;
    if (c.exact_applies) ++qexact;
  }
  v.require(violations == 0, std::to_string(violations) + " linear violations");
  v.require(qviolations == 0, std::to_string(qviolations) + " quasi-linear violations");
  v.detail += (v.detail.empty() ? "" : "; ") + std::string("exact case exercised ") + std::to_string(exact) +
              "/500 linear, " + std::to_string(qexact) + "/200 quasi-linear";
  return v;
}

Verdict moebius() {
  Verdict v;
  for (auto d : {builtin_xn(3), builtin_xn(4), builtin_dp6a2()}) {
    Variety x(d);
    const Mask full = static_cast<Mask>((std::uint64_t{1} << x.num_generators()) - 1);
    for (Mask a = 0; a <= full; ++a) {
      long long sum = 0;
      for (Mask b = a;; b = (b - 1) & a) {
        sum += x.mu0(b);
        if (b == 0) break;
      }
      if (sum != (x.incidence(a) ? 1 : 0)) {
        v.require(false, x.name() + " summation at mask " + std::to_string(a));
        break;
      }
    }
  }
  Variety x3(builtin_xn(3));
  auto f3 = field_of_size(3);
  std::mt19937_64 rng(7);
  int checked = 0, failures = 0;
  for (int i = 0; checked < 200 && i < 5000; ++i) {
    auto e1 = i % 2 ? random_divisor_tuple(x3, f3, 3, rng) : random_mu_support_tuple(x3, f3, rng);
    auto e2 = i % 2 ? random_divisor_tuple(x3, f3, 3, rng) : random_mu_support_tuple(x3, f3, rng);
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
    if (mu_div(x3, sum) != mu_div(x3, e1) * mu_div(x3, e2)) ++failures;
    ++checked;
  }
  v.require(checked == 200, "only " + std::to_string(checked) + " disjoint pairs drawn");
  v.require(failures == 0, std::to_string(failures) + " multiplicativity failures");
  return v;
}

Verdict point_counts() {
  Verdict v;
  for (auto d : {builtin_xn(3), builtin_xn(4), builtin_dp6a2()}) {
    Variety x(d);
    for (std::uint64_t q : {2, 3}) {
      std::string tag = x.name() + " q=" + std::to_string(q);
      v.require(brute_force_feasible(x, q), tag + " brute force infeasible");
      auto b = count_points(x, q, CountMethod::Brute);
      auto s = count_points(x, q, CountMethod::Strata);
      v.require(b.method == CountMethod::Brute, tag + " fell back to strata");
      v.require(b.raw == s.raw && b.total == s.total && b.open == s.open, tag + " brute != strata");
      BigInt torus = ipow(big(static_cast<long long>(q) - 1), static_cast<unsigned long>(x.pic_rank()));
      v.require(b.raw % torus == 0 && s.raw % torus == 0, tag + " divisibility");
    }
  }
  auto p = counting_polynomial(Variety(builtin_xn(3)));
  v.require(p.validated, "X_3 polynomial not validated");
  v.require(p.holdouts == std::vector<std::uint64_t>{7, 8}, "holdouts");
  v.require(p.coeffs == std::vector<BigRational>{1, 4, 1}, "X_3 polynomial is not q^2 + 4q + 1");
  return v;
}

struct Criterion {
  int id;
  std::string title;
  double budget_seconds;
  std::function<Verdict()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "fan certificates for Sigma_3..Sigma_6", 5, fan_certificates},
      {2, "local identity L1 = L2 = R", 30, local_identity},
      {3, "bilinear counts: recurrence = closed form = brute force", 5, bilinear_counts},
      {4, "lifting formula = brute force on X_3", 600, lifting_formula},
      {5, "alpha(X_n) = 1/(n(n-1)^n) and delta = 1", 5, alpha_delta},
      {6, "dP6-A2 coefficient vanishing, agreement and degree bounds", 60, dp6a2_series},
      {7, "positivity hypotheses", 1, positivity},
      {8, "counting-lemma property suite", 60, counting_lemma},
      {9, "Moebius summation and multiplicativity", 10, moebius},
      {10, "point-count consistency and counting polynomial", 60, point_counts},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > c.budget_seconds) v.require(false, "over the time budget");
    if (!v.pass) ++failed;
    std::printf("criterion %2d %s  %-58s %8.3f s / %g s%s%s\n", c.id, v.pass ? "PASS" : "FAIL", c.title.c_str(), secs,
                c.budget_seconds, v.detail.empty() ? "" : "  ", v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
