#pragma once

#include <optional>
#include <string>
#include <vector>

#include "maninlab/variety.hpp"

namespace maninlab {

// N_n(q) = #{(x, y) ∈ F_q^n × F_q^n : Σ x_i y_i = 0}, by the recurrence
// N_1 = 2q − 1, N_n = q N_{n−1} + (q − 1) q^{2n−2}.
BigInt count_bilinear(int n, std::uint64_t q);
// Same count by enumerating F_q^{2n}; requires q^{2n} ≤ 2^24.
BigInt count_bilinear_brute(int n, std::uint64_t q);

enum class CountMethod { Brute, Strata, Polynomial };
std::string to_string(CountMethod m);

struct PointCountReport {
  std::uint64_t q = 0;
  BigInt raw;    // points of the universal torsor over F_q
  BigInt total;  // #X(F_q) = raw / (q − 1)^r
  BigInt open;   // #X_0(F_q)
  CountMethod method = CountMethod::Strata;
};

// Torsor points with exactly the given support (all listed coordinates
// nonzero, all others zero) on which the relation vanishes, from the
// closed form over the surviving monomials.
BigInt stratum_count(const Variety& v, Mask support, std::uint64_t q);

// Brute force needs |I ∪ J| ≤ 9 and q^{|I ∪ J|} ≤ 2^28.
bool brute_force_feasible(const Variety& v, std::uint64_t q);
PointCountReport count_points(const Variety& v, std::uint64_t q, CountMethod method);
BigInt count_open(const Variety& v, std::uint64_t q, CountMethod method = CountMethod::Strata);

struct CountingPolynomial {
  std::vector<BigRational> coeffs;  // low to high
  std::vector<std::uint64_t> nodes, holdouts;
  bool validated = false;
  bool integral = false;
  std::string note;
  BigRational eval(const BigRational& q) const;
  long degree() const;
};

// Interpolates #X(F_q) at the 2d + 2 smallest prime powers other than the
// holdouts 7 and 8 (d = |I ∪ J| − r), then checks the holdouts.
CountingPolynomial counting_polynomial(const Variety& v);

struct GammaReport {
  std::uint64_t q = 0;
  unsigned bound = 0;
  BigRational prefactor;                 // (q/(q−1))^r q^{dim}
  std::vector<BigInt> places;            // places of degree f = 1..B (∞ included at f = 1)
  std::vector<BigRational> local_factor; // (1 − q^{−f})^r #X(F_{q^f}) / q^{f dim}
  std::vector<BigRational> partial;      // prefactor × product over degrees ≤ f
  std::string count_source;
  // Bound on |log| of the product over places of degree > B, from the
  // expansion of the local factor in u = q_v^{−1}; absent when that
  // expansion gives no convergent bound.
  std::optional<BigRational> tail_log_bound;
};

GammaReport gamma_truncated(const Variety& v, std::uint64_t q, unsigned bound);

}  // namespace maninlab
