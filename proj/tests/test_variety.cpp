#include <algorithm>
#include <set>

#include "doctest.h"
#include "maninlab/variety.hpp"

using namespace maninlab;

namespace {

Mask mask_of(const Variety& v, std::initializer_list<const char*> ids) {
  Mask m = 0;
  for (const char* id : ids) {
    bool found = false;
    for (std::size_t k = 0; k < v.num_generators(); ++k)
      if (v.generator_id(k) == id) {
        m |= Mask{1} << k;
        found = true;
      }
    REQUIRE(found);
  }
  return m;
}

}  // namespace

TEST_CASE("X_n descriptor data") {
  Variety x3(builtin_xn(3));
  CHECK(x3.d_tot() == IVec{1, 1, 1, 1});
  CHECK(x3.anticanonical() == IVec{3, 2, 2, 2});
  CHECK(x3.dimension() == 2);
  Variety x4(builtin_xn(4));
  CHECK(x4.dimension() == 3);
  CHECK(static_cast<long>(x4.num_t()) - 1 == 3);
  for (int n = 3; n <= 6; ++n) {
    Variety x(builtin_xn(n));
    IVec expect(n + 1, n - 1);
    expect[0] = n;
    CHECK(x.anticanonical() == expect);
    CHECK(x.incidence_source() == "fan");
  }
  CHECK_THROWS_AS(builtin_xn(2), MathError);
}

TEST_CASE("dP6-A2 descriptor data") {
  Variety v(builtin_dp6a2());
  CHECK(v.d_tot() == IVec{2, 1, 2, 2});
  CHECK(v.anticanonical() == IVec{4, 2, 3, 3});
  CHECK(v.dimension() == 2);
  // F_1 + 2G_1 = F_2 + G_2 = F_3 + G_3
  IVec a{0, 1, 0, 0}, b{0, 0, 1, 0}, c{0, 0, 0, 1};
  for (int k = 0; k < 4; ++k) {
    a[k] += 2 * v.degree(v.t_index(0))[k];
    b[k] += v.degree(v.t_index(1))[k];
    c[k] += v.degree(v.t_index(2))[k];
  }
  CHECK(a == b);
  CHECK(b == c);
  CHECK(v.incidence_source() == "ample_class");
}

TEST_CASE("F-face rule") {
  Variety x3(builtin_xn(3));
  const Mask full = (Mask{1} << 7) - 1;
  CHECK(x3.surviving_monomials(full) == 3);
  CHECK(x3.is_f_face(full));
  CHECK_FALSE(x3.is_f_face(mask_of(x3, {"s1", "t1"})));
  CHECK(x3.is_f_face(mask_of(x3, {"s0"})));
  CHECK(x3.surviving_monomials(mask_of(x3, {"s0"})) == 0);
}

TEST_CASE("incidence for X_3") {
  Variety x3(builtin_xn(3));
  CHECK(x3.incidence(mask_of(x3, {"t1", "t2", "t3"})));
  for (std::size_t k = 0; k < 7; ++k) CHECK(x3.incidence(Mask{1} << k));
  CHECK_FALSE(x3.incidence((Mask{1} << 7) - 1));
  auto readings = xn_intersection_readings(x3);
  REQUIRE(readings.size() == 5);
  CHECK(readings[0].second);
  CHECK_FALSE(readings[1].second);
  CHECK(readings[2].second);
}

TEST_CASE("the incidence class is admissible") {
  for (int n = 3; n <= 5; ++n) {
    Variety x(builtin_xn(n));
    const Mask full = (Mask{1} << x.num_generators()) - 1;
    // Relevant supports are exactly the F-faces containing a member of
    // {J : the divisors outside J meet}.
    for (Mask s = 0; s <= full; ++s) {
      if (!x.is_f_face(s)) continue;
      bool contains_member = false;
      for (Mask j = s;; j = (j - 1) & s) {
        if (x.incidence(full & ~j)) contains_member = true;
        if (j == 0 || contains_member) break;
      }
      CHECK(x.relevant(s) == contains_member);
    }
    for (Mask c : x.relevant_minimal()) CHECK(x.incidence(full & ~c));
    // Covering supports attached to C and to the subdivision cones are
    // F-faces; the ones attached to C_i are not, and there F_0 and the F_j
    // with j != i have empty common intersection.
    for (Mask c : x.covering()) CHECK(x.incidence(full & ~c) == x.is_f_face(c));
  }
}

TEST_CASE("mu0 summation identity and vanishing rules") {
  for (auto d : {builtin_xn(3), builtin_xn(4), builtin_dp6a2()}) {
    Variety v(d);
    const std::size_t n = v.num_generators();
    const Mask full = (Mask{1} << n) - 1;
    CHECK(v.mu0(Mask{0}) == 1);
    for (std::size_t k = 0; k < n; ++k) CHECK(v.mu0(Mask{1} << k) == 0);
    for (Mask a = 0; a <= full; ++a) {
      long long s = 0;
      for (Mask b = a;; b = (b - 1) & a) {
        s += v.mu0(b);
        if (b == 0) break;
      }
      CHECK(s == (v.incidence(a) ? 1 : 0));
    }
    std::vector<long long> alpha(n, 0);
    alpha[0] = 2;
    CHECK(v.mu0(alpha) == 0);
  }
}

TEST_CASE("dP6-A2 relevant supports") {
  Variety v(builtin_dp6a2());
  // Minimal relevant supports found independently by chamber exploration of
  // the moving cone (every chamber gives the same list).
  std::set<Mask> expect{
      mask_of(v, {"s0", "s1", "s2", "s3"}),       mask_of(v, {"s0", "s1", "s2", "t1", "t2"}),
      mask_of(v, {"s0", "s1", "s3", "t1", "t3"}), mask_of(v, {"s0", "s2", "s3", "t2", "t3"}),
      mask_of(v, {"s1", "s2", "t1", "t2", "t3"}), mask_of(v, {"s1", "s3", "t1", "t2", "t3"}),
      mask_of(v, {"s2", "s3", "t1", "t2", "t3"})};
  auto got = v.relevant_minimal();
  CHECK(std::set<Mask>(got.begin(), got.end()) == expect);
  CHECK(v.incidence(mask_of(v, {"t1", "t2", "t3"})));
}

TEST_CASE("ample-class incidence agrees with the fan for X_n") {
  for (int n = 3; n <= 4; ++n) {
    auto d = builtin_xn(n);
    Variety from_fan(d);
    d.fan.reset();
    d.generator_ray.clear();
    d.ample_class = gale_witness(n);
    Variety from_ample(d);
    const Mask full = (Mask{1} << from_fan.num_generators()) - 1;
    for (Mask m = 0; m <= full; ++m) CHECK(from_fan.relevant(m) == from_ample.relevant(m));
  }
}

TEST_CASE("positivity hypotheses") {
  for (int n = 3; n <= 6; ++n) {
    auto rep = Variety(builtin_xn(n)).check_positivity();
    CHECK(rep.all_pass);
    const auto& avg = rep.conditions.back();
    QVec expect(n + 1, BigRational(0));
    expect[0] = make_rational(1, n - 1);
    CHECK(avg.witness == expect);
  }
  auto rep3 = Variety(builtin_xn(3)).check_positivity();
  CHECK(rep3.conditions[1].witness == QVec{1, 0, 0, 1});
  auto rep = Variety(builtin_dp6a2()).check_positivity();
  CHECK(rep.all_pass);
  CHECK(rep.conditions[1].witness == QVec{2, 1, 1, 1});
}

TEST_CASE("descriptor JSON round trip and validation") {
  for (auto d : {builtin_xn(3), builtin_dp6a2()}) {
    auto text = descriptor_to_json(d);
    auto back = parse_descriptor(text);
    CHECK(descriptor_to_json(back) == text);
    Variety a(d), b(back);
    CHECK(a.relevant_minimal() == b.relevant_minimal());
  }
  CHECK_THROWS_AS(parse_descriptor("{not json"), MathError);
  auto bad = builtin_xn(3);
  bad.t_generators[0].degree[1] = 1;  // breaks homogeneity
  CHECK_THROWS_AS(parse_descriptor(descriptor_to_json(bad)), MathError);
  const std::string ext = R"({"name":"ext","pic_basis":["F0","F1","F2","F3"],
    "s_generators":[{"id":"s0","degree":[1,0,0,0]},{"id":"s1","degree":[0,1,0,0]},
                    {"id":"s2","degree":[0,0,1,0]},{"id":"s3","degree":[0,0,0,1]}],
    "t_generators":[{"id":"t1","degree":[1,0,1,1]},{"id":"t2","degree":[2,1,1,2]},{"id":"t3","degree":[2,1,2,1]}],
    "relation":{"shape":"quasi_linear_t1_squared","b":[[0,0,0],[1,0,0],[0,1,0],[0,0,1]]},
    "effective_cone":[[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]],
    "incidence":{"provenance":"PROV","relevant_minimal":[["s0","s1","s2","s3"],["s0","s1","s2","t1","t2"],
      ["s0","s1","s3","t1","t3"],["s0","s2","s3","t2","t3"],["s1","s2","t1","t2","t3"],
      ["s1","s3","t1","t2","t3"],["s2","s3","t1","t2","t3"]]}})";
  auto with = [&](const std::string& prov) {
    std::string s = ext;
    s.replace(s.find("PROV"), 4, prov);
    return s;
  };
  Variety v(parse_descriptor(with("external")));
  CHECK(v.incidence_source() == "external");
  Variety ref(builtin_dp6a2());
  const Mask full = (Mask{1} << 7) - 1;
  for (Mask m = 0; m <= full; ++m) CHECK(v.incidence(m) == ref.incidence(m));
  CHECK_THROWS_AS(parse_descriptor(with("paper")), MathError);
  CHECK(resolve_variety("xn:4").name == "xn:4");
  CHECK_THROWS_AS(resolve_variety("nonexistent.json"), MathError);
}
