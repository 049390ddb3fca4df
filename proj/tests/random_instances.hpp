#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "maninlab/curves.hpp"

namespace maninlab::testing {

struct KernelInstance {
  std::vector<Section> s;
  std::vector<long> hprime;
  long H = 0;
};

inline FqPoly random_poly(const FieldPtr& field, long max_degree, std::mt19937_64& rng, bool nonzero = true) {
  std::uniform_int_distribution<std::uint32_t> coeff(0, field->size() - 1);
  while (true) {
    std::vector<FiniteField::Elem> c(static_cast<std::size_t>(max_degree + 1));
    for (auto& x : c) x = coeff(rng);
    FqPoly p(field, std::move(c));
    if (!nonzero || !p.is_zero()) return p;
  }
}

inline long uniform(std::mt19937_64& rng, long lo, long hi) {
  return std::uniform_int_distribution<long>(lo, hi)(rng);
}

// A section of O(h) that is a multiple of `common` and sometimes vanishes at ∞.
inline Section random_section(const FieldPtr& field, long h, const FqPoly& common, std::mt19937_64& rng) {
  long room = h - common.degree().value();
  long top = room <= 0 ? 0 : uniform(rng, room > 1 ? room - 1 : 0, room);
  return Section{common * random_poly(field, top, rng), h};
}

inline FqPoly random_common_factor(const FieldPtr& field, long max_degree, std::mt19937_64& rng) {
  long d = uniform(rng, 0, std::max(0L, max_degree));
  return random_poly(field, d, rng).monic();
}

// Σ t_j s_j with n ∈ {2,3,4}, q ∈ {2,3}.
inline KernelInstance random_linear_instance(std::mt19937_64& rng) {
  const std::uint64_t q = uniform(rng, 2, 3);
  auto field = field_of_size(q);
  KernelInstance k;
  const long n = uniform(rng, 2, 4);
  k.H = uniform(rng, 0, 6);
  long min_h = k.H;
  for (long j = 0; j < n; ++j) {
    k.hprime.push_back(uniform(rng, 0, k.H));
    min_h = std::min(min_h, k.H - k.hprime.back());
  }
  auto common = random_common_factor(field, std::min(min_h, 2L), rng);
  for (long j = 0; j < n; ++j) k.s.push_back(random_section(field, k.H - k.hprime[j], common, rng));
  return k;
}

// t_1² s_1 + t_2 s_2 + t_3 s_3 (three sections) or the first two terms only.
inline KernelInstance random_quasi_instance(std::mt19937_64& rng, std::size_t sections) {
  const std::uint64_t q = uniform(rng, 2, 3);
  auto field = field_of_size(q);
  KernelInstance k;
  k.H = uniform(rng, 0, 6);
  k.hprime.push_back(uniform(rng, 0, k.H / 2));
  for (std::size_t j = 1; j < sections; ++j) k.hprime.push_back(uniform(rng, 0, k.H));
  long min_h = k.H - 2 * k.hprime[0];
  for (std::size_t j = 1; j < sections; ++j) min_h = std::min(min_h, k.H - k.hprime[j]);
  auto common = random_common_factor(field, std::min(min_h, 2L), rng);
  k.s.push_back(random_section(field, k.H - 2 * k.hprime[0], common, rng));
  for (std::size_t j = 1; j < sections; ++j) k.s.push_back(random_section(field, k.H - k.hprime[j], common, rng));
  return k;
}

// A divisor tuple over the generators with total degree ≤ max_total,
// drawing places of degree ≤ 2 and multiplicities ≤ 2.
inline DivisorTuple random_divisor_tuple(const Variety& v, const FieldPtr& field, long max_total,
                                         std::mt19937_64& rng) {
  auto places = places_up_to(field, 2);
  std::vector<std::vector<std::pair<Place, unsigned>>> parts(v.num_generators());
  long budget = uniform(rng, 0, max_total);
  while (budget > 0) {
    const auto& p = places[static_cast<std::size_t>(uniform(rng, 0, static_cast<long>(places.size()) - 1))];
    long f = p.degree();
    if (f > budget) {
      if (budget < 1) break;
      continue;
    }
    unsigned mult = (f * 2 <= budget && uniform(rng, 0, 3) == 0) ? 2 : 1;
    parts[static_cast<std::size_t>(uniform(rng, 0, static_cast<long>(v.num_generators()) - 1))].emplace_back(p, mult);
    budget -= f * mult;
  }
  DivisorTuple e;
  for (auto& pt : parts) e.emplace_back(field, std::move(pt));
  return e;
}

// Up to two places of degree ≤ 2, each carrying a pattern with μ⁰ ≠ 0.
inline DivisorTuple random_mu_support_tuple(const Variety& v, const FieldPtr& f, std::mt19937_64& rng) {
  std::vector<Mask> patterns;
  for (Mask a = 1; a < (Mask{1} << v.num_generators()); ++a)
    if (v.mu0(a) != 0) patterns.push_back(a);
  auto places = places_up_to(f, 2);
  DivisorTuple e(v.num_generators(), EffDivisor(f));
  long count = uniform(rng, 1, 2);
  for (long c = 0; c < count; ++c) {
    const auto& p = places[static_cast<std::size_t>(uniform(rng, 0, static_cast<long>(places.size()) - 1))];
    Mask a = patterns[static_cast<std::size_t>(uniform(rng, 0, static_cast<long>(patterns.size()) - 1))];
    for (std::size_t k = 0; k < e.size(); ++k)
      if (a >> k & 1) e[k] = e[k] + EffDivisor(f, {{p, 1u}});
  }
  return e;
}

}  // namespace maninlab::testing
