#include "maninlab/variety.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "json.hpp"

namespace maninlab {

namespace {

constexpr std::size_t kMaxGenerators = 20;

bool is_zero(const QVec& v) {
  return std::all_of(v.begin(), v.end(), [](const BigRational& x) { return x == 0; });
}

QVec combo(const std::vector<std::pair<BigRational, IVec>>& terms, std::size_t r) {
  QVec out(r, BigRational(0));
  for (const auto& [c, v] : terms)
    for (std::size_t k = 0; k < r; ++k) out[k] += c * qrat(v[k]);
  return out;
}

}  // namespace

Variety::Variety(VarietyDescriptor d) : d_(std::move(d)), eff_(std::max<std::size_t>(d_.pic_basis.size(), 1), d_.effective_cone) {
  validate();
  derive_incidence();
}

long long Variety::t_exponent(std::size_t j) const {
  return (d_.shape == RelationShape::QuasiLinearT1Squared && j == 0) ? 2 : 1;
}

const std::string& Variety::generator_id(std::size_t k) const {
  return k < num_s() ? d_.s_generators[k].id : d_.t_generators[k - num_s()].id;
}

const IVec& Variety::degree(std::size_t k) const {
  return k < num_s() ? d_.s_generators[k].degree : d_.t_generators[k - num_s()].degree;
}

void Variety::validate() {
  const std::size_t r = pic_rank();
  if (r == 0) throw MathError("descriptor has an empty Pic basis");
  if (num_s() == 0 || num_t() == 0) throw MathError("descriptor needs s- and t-generators");
  if (num_generators() > kMaxGenerators) throw CapExceeded("too many generators for the support tables");
  std::set<std::string> ids;
  for (std::size_t k = 0; k < num_generators(); ++k) {
    if (!ids.insert(generator_id(k)).second) throw MathError("duplicate generator id " + generator_id(k));
    if (degree(k).size() != r) throw MathError("degree of " + generator_id(k) + " has the wrong length");
  }
  if (d_.b.size() != num_s()) throw MathError("exponent matrix needs one row per s-generator");
  for (const auto& row : d_.b) {
    if (row.size() != num_t()) throw MathError("exponent matrix needs one column per t-generator");
    for (auto x : row)
      if (x < 0) throw MathError("negative relation exponent");
  }
  for (const auto& g : d_.effective_cone)
    if (g.size() != r) throw MathError("effective cone generator has the wrong length");

  for (std::size_t j = 0; j < num_t(); ++j) {
    Monomial m;
    m.j = j;
    m.vars.emplace_back(t_index(j), t_exponent(j));
    for (std::size_t i = 0; i < num_s(); ++i)
      if (d_.b[i][j] > 0) m.vars.emplace_back(i, d_.b[i][j]);
    for (const auto& [k, e] : m.vars) m.support |= Mask{1} << k;
    IVec deg(r, 0);
    for (const auto& [k, e] : m.vars)
      for (std::size_t c = 0; c < r; ++c) deg[c] += e * degree(k)[c];
    if (j == 0) d_tot_ = deg;
    else if (deg != d_tot_) throw MathError("relation is not homogeneous: monomial " + std::to_string(j + 1));
    monomials_.push_back(std::move(m));
  }

  anti_k_.assign(r, 0);
  for (std::size_t k = 0; k < num_generators(); ++k)
    for (std::size_t c = 0; c < r; ++c) anti_k_[c] += degree(k)[c];
  for (std::size_t c = 0; c < r; ++c) anti_k_[c] -= d_tot_[c];
  if (!eff_.interior(anti_k_)) throw MathError("anticanonical class is not interior to the effective cone");
}

std::size_t Variety::surviving_monomials(Mask support) const {
  std::size_t n = 0;
  for (const auto& m : monomials_)
    if ((m.support & support) == m.support) ++n;
  return n;
}

void Variety::derive_incidence() {
  const std::size_t n = num_generators();
  const Mask full = (Mask{1} << n) - 1;
  const std::size_t r = pic_rank();
  if (d_.fan) {
    const Fan& fan = *d_.fan;
    if (fan.rays.size() != n || d_.generator_ray.size() != n)
      throw MathError("fan rays do not match the generators");
    std::vector<Mask> ray_gen(n);
    std::set<std::size_t> used;
    for (std::size_t k = 0; k < n; ++k) {
      if (d_.generator_ray[k] >= n || !used.insert(d_.generator_ray[k]).second)
        throw MathError("generator to ray map is not a bijection");
      ray_gen[d_.generator_ray[k]] = Mask{1} << k;
    }
    for (const auto& cone : fan.cones) {
      Mask inside = 0;
      for (auto ray : cone) inside |= ray_gen[ray];
      cov_.push_back(full & ~inside);
    }
    incidence_source_ = "fan";
  } else if (d_.ample_class) {
    const IVec& a = *d_.ample_class;
    if (a.size() != r) throw MathError("ample class has the wrong length");
    for (std::size_t k = 0; k < n; ++k) {
      std::vector<IVec> others;
      for (std::size_t l = 0; l < n; ++l)
        if (l != k) others.push_back(degree(l));
      if (!Cone(r, others).interior(a)) throw MathError("ample class is not inside the moving cone");
    }
    std::vector<bool> hit(full + 1, false);
    for (Mask s = 1; s <= full; ++s) {
      std::vector<IVec> gens;
      for (std::size_t k = 0; k < n; ++k)
        if (s >> k & 1) gens.push_back(degree(k));
      Cone c(r, gens);
      if (!c.contains(a)) continue;
      if (!c.interior(a)) throw MathError("ample class lies on a wall of the degree arrangement");
      hit[s] = true;
    }
    for (Mask s = 1; s <= full; ++s) {
      if (!hit[s]) continue;
      bool minimal = true;
      for (std::size_t k = 0; k < n && minimal; ++k)
        if ((s >> k & 1) && hit[s & ~(Mask{1} << k)]) minimal = false;
      if (minimal) cov_.push_back(s);
    }
    incidence_source_ = "ample_class";
  } else if (d_.external_relevant) {
    for (const auto& sup : *d_.external_relevant) {
      Mask s = 0;
      for (auto k : sup) {
        if (k >= n) throw MathError("relevant support mentions an unknown generator");
        s |= Mask{1} << k;
      }
      cov_.push_back(s);
    }
    incidence_source_ = "external";
  } else {
    throw MathError("descriptor has no fan, ample class or explicit incidence data");
  }

  relevant_.assign(full + 1, false);
  for (Mask s = 0; s <= full; ++s) {
    if (!is_f_face(s)) continue;
    for (auto c : cov_)
      if ((c & s) == c) {
        relevant_[s] = true;
        break;
      }
  }
  for (Mask s = 0; s <= full; ++s) {
    if (!relevant_[s]) continue;
    bool minimal = true;
    for (std::size_t k = 0; k < n && minimal; ++k)
      if ((s >> k & 1) && relevant_[s & ~(Mask{1} << k)]) minimal = false;
    if (minimal) relevant_minimal_.push_back(s);
  }
  // some_relevant[T]: T contains a relevant support.
  std::vector<bool> some_relevant(relevant_);
  for (std::size_t k = 0; k < n; ++k)
    for (Mask s = 0; s <= full; ++s)
      if ((s >> k & 1) && some_relevant[s & ~(Mask{1} << k)]) some_relevant[s] = true;
  incidence_.assign(full + 1, false);
  for (Mask v = 0; v <= full; ++v) incidence_[v] = some_relevant[full & ~v];
  if (!incidence_[0]) throw MathError("no relevant support: the torsor would be empty");

  mu0_.assign(full + 1, 0);
  for (Mask v = 0; v <= full; ++v) mu0_[v] = incidence_[v] ? 1 : 0;
  for (std::size_t k = 0; k < n; ++k)
    for (Mask s = 0; s <= full; ++s)
      if (s >> k & 1) mu0_[s] -= mu0_[s & ~(Mask{1} << k)];
}

long long Variety::mu0(const std::vector<long long>& alpha) const {
  if (alpha.size() != num_generators()) throw MathError("pattern length mismatch");
  Mask m = 0;
  for (std::size_t k = 0; k < alpha.size(); ++k) {
    if (alpha[k] < 0) throw MathError("negative multiplicity");
    if (alpha[k] >= 2) return 0;
    if (alpha[k] == 1) m |= Mask{1} << k;
  }
  return mu0_[m];
}

PositivityReport Variety::check_positivity() const {
  PositivityReport rep;
  const std::size_t r = pic_rank();
  const std::size_t nt = num_t();
  auto g = [&](std::size_t j) { return degree(t_index(j)); };
  auto test = [&](const std::string& name, const QVec& w, const std::string& fail_note = "") {
    PositivityCondition c;
    c.name = name;
    c.witness = w;
    c.pass = eff_.contains(w) && !is_zero(w);
    if (c.pass) c.coefficients = eff_.certificate(w);
    if (!c.pass) c.note = fail_note;
    rep.conditions.push_back(c);
    return c.pass;
  };
  auto pair_vec = [&](std::size_t a, std::size_t b) {
    return combo({{1, g(a)}, {1, g(b)}, {-1, d_tot_}}, r);
  };
  Mask all_t = 0;
  for (std::size_t j = 0; j < nt; ++j) all_t |= Mask{1} << t_index(j);
  {
    PositivityCondition c;
    c.name = "intersection of all G_j is nonempty";
    c.pass = incidence(all_t);
    rep.conditions.push_back(c);
  }
  auto gname = [&](std::size_t j) { return "G_" + std::to_string(j + 1); };

  if (d_.shape == RelationShape::Linear) {
    if (nt < 2) throw MathError("positivity checks need at least two t-generators");
    for (std::size_t j = 0; j + 1 < nt; ++j)
      test(gname(j) + " + " + gname(j + 1) + " - D_tot (natural order)", pair_vec(j, j + 1));
    std::vector<std::vector<bool>> ok(nt, std::vector<bool>(nt, false));
    bool every_pair = true;
    for (std::size_t a = 0; a < nt; ++a)
      for (std::size_t b = a + 1; b < nt; ++b) {
        QVec w = pair_vec(a, b);
        ok[a][b] = ok[b][a] = eff_.contains(w) && !is_zero(w);
        every_pair = every_pair && ok[a][b];
      }
    {
      PositivityCondition c;
      c.name = "every ordering of J satisfies the consecutive-pair condition";
      c.pass = every_pair;
      rep.conditions.push_back(c);
    }
    {
      PositivityCondition c;
      c.name = "some ordering of J satisfies the consecutive-pair condition";
      if (nt > 9) throw CapExceeded("ordering search limited to |J| <= 9");
      std::vector<std::size_t> perm(nt);
      std::iota(perm.begin(), perm.end(), 0);
      do {
        bool good = true;
        for (std::size_t j = 0; j + 1 < nt && good; ++j) good = ok[perm[j]][perm[j + 1]];
        if (good) {
          c.pass = true;
          std::ostringstream os;
          for (std::size_t j = 0; j < nt; ++j) os << (j ? "," : "") << perm[j] + 1;
          c.note = "ordering " + os.str();
          break;
        }
      } while (std::next_permutation(perm.begin(), perm.end()));
      rep.conditions.push_back(c);
    }
    std::vector<std::pair<BigRational, IVec>> terms;
    for (std::size_t j = 0; j < nt; ++j) terms.emplace_back(make_rational(1, static_cast<long>(nt) - 1), g(j));
    terms.emplace_back(-1, d_tot_);
    test("(1/(|J|-1)) sum_j G_j - D_tot", combo(terms, r));
  } else {
    if (nt != 3) throw MathError("quasi-linear positivity checks need exactly three t-generators");
    const BigRational eps = make_rational(1, 1000);
    const BigRational half = make_rational(1, 2);
    const std::string fails = "fails at eps=1/1000";
    test("G_2 + G_3 - D_tot", pair_vec(1, 2));
    test("G_1 + G_2/2 + G_3/2 - D_tot", combo({{1, g(0)}, {half, g(1)}, {half, g(2)}, {-1, d_tot_}}, r));
    for (std::size_t i = 0; i < 3; ++i) {
      std::size_t j = (i + 1) % 3, k = (i + 2) % 3;
      test("(1-eps) " + gname(i) + " + " + gname(j) + "/2 + " + gname(k) + "/2 - D_tot, eps=1/1000",
           combo({{1 - eps, g(i)}, {half, g(j)}, {half, g(k)}, {-1, d_tot_}}, r), fails);
    }
    test("(1-eps) G_2 + (1-eps) G_3 - D_tot, eps=1/1000", combo({{1 - eps, g(1)}, {1 - eps, g(2)}, {-1, d_tot_}}, r),
         fails);
  }
  rep.all_pass = std::all_of(rep.conditions.begin(), rep.conditions.end(), [](const auto& c) { return c.pass; });
  return rep;
}

VarietyDescriptor builtin_xn(int n) {
  if (n < 3) throw MathError("X_n needs n >= 3");
  VarietyDescriptor d;
  d.name = "xn:" + std::to_string(n);
  const std::size_t r = static_cast<std::size_t>(n) + 1;
  for (int i = 0; i <= n; ++i) {
    d.pic_basis.push_back("F" + std::to_string(i));
    IVec deg(r, 0);
    deg[i] = 1;
    d.s_generators.push_back({"s" + std::to_string(i), deg});
    d.effective_cone.push_back(deg);
  }
  for (int i = 1; i <= n; ++i) {
    IVec deg(r, 1);
    deg[i] = 0;
    d.t_generators.push_back({"t" + std::to_string(i), deg});
  }
  d.shape = RelationShape::Linear;
  d.b.assign(r, std::vector<long long>(n, 0));
  for (int i = 1; i <= n; ++i) d.b[i][i - 1] = 1;
  d.fan = build_sigma_n(n);
  // s_0 ↔ h, s_i ↔ f_i, t_i ↔ g_i.
  for (int i = 0; i <= n; ++i) d.generator_ray.push_back(i);
  for (int i = 1; i <= n; ++i) d.generator_ray.push_back(n + i);
  return d;
}

IVec dp6a2_ample_class() { return {14, 6, 10, 13}; }

VarietyDescriptor builtin_dp6a2() {
  VarietyDescriptor d;
  d.name = "dp6a2";
  d.pic_basis = {"F0", "F1", "F2", "F3"};
  for (int i = 0; i < 4; ++i) {
    IVec deg(4, 0);
    deg[i] = 1;
    d.s_generators.push_back({"s" + std::to_string(i), deg});
    d.effective_cone.push_back(deg);
  }
  d.t_generators = {{"t1", {1, 0, 1, 1}}, {"t2", {2, 1, 1, 2}}, {"t3", {2, 1, 2, 1}}};
  d.shape = RelationShape::QuasiLinearT1Squared;
  d.b = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  d.ample_class = dp6a2_ample_class();
  return d;
}

namespace {

using nlohmann::json;

IVec read_ivec(const json& j, const std::string& what) {
  if (!j.is_array()) throw MathError(what + " must be an integer array");
  IVec v;
  for (const auto& x : j) {
    if (!x.is_number_integer()) throw MathError(what + " must contain integers only");
    v.push_back(x.get<long long>());
  }
  return v;
}

std::vector<Generator> read_generators(const json& j, const std::string& what) {
  if (!j.is_array()) throw MathError(what + " must be an array");
  std::vector<Generator> out;
  for (const auto& g : j) {
    if (!g.is_object() || !g.contains("id") || !g.contains("degree") || !g["id"].is_string())
      throw MathError(what + " entries need \"id\" and \"degree\"");
    out.push_back({g["id"].get<std::string>(), read_ivec(g["degree"], what + " degree")});
  }
  return out;
}

}  // namespace

VarietyDescriptor parse_descriptor(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw MathError(std::string("malformed descriptor JSON: ") + e.what());
  }
  try {
    VarietyDescriptor d;
    if (!j.is_object()) throw MathError("descriptor must be a JSON object");
    for (const char* key : {"name", "pic_basis", "s_generators", "t_generators", "relation", "effective_cone"})
      if (!j.contains(key)) throw MathError(std::string("descriptor is missing \"") + key + "\"");
    d.name = j["name"].get<std::string>();
    for (const auto& b : j["pic_basis"]) d.pic_basis.push_back(b.get<std::string>());
    d.s_generators = read_generators(j["s_generators"], "s_generators");
    d.t_generators = read_generators(j["t_generators"], "t_generators");
    const auto& rel = j["relation"];
    std::string shape = rel.at("shape").get<std::string>();
    if (shape == "linear") d.shape = RelationShape::Linear;
    else if (shape == "quasi_linear_t1_squared") d.shape = RelationShape::QuasiLinearT1Squared;
    else throw MathError("unknown relation shape " + shape);
    for (const auto& row : rel.at("b")) d.b.push_back(read_ivec(row, "relation b"));
    for (const auto& g : j["effective_cone"]) d.effective_cone.push_back(read_ivec(g, "effective_cone"));

    std::vector<std::string> ids;
    for (const auto& g : d.s_generators) ids.push_back(g.id);
    for (const auto& g : d.t_generators) ids.push_back(g.id);
    auto index_of = [&](const std::string& id) {
      auto it = std::find(ids.begin(), ids.end(), id);
      if (it == ids.end()) throw MathError("unknown generator id " + id);
      return static_cast<std::size_t>(it - ids.begin());
    };
    if (j.contains("fan")) {
      const auto& f = j["fan"];
      Fan fan;
      for (const auto& ray : f.at("rays")) fan.rays.push_back(read_ivec(ray, "fan ray"));
      if (fan.rays.empty()) throw MathError("fan has no rays");
      fan.rank = fan.rays[0].size();
      for (std::size_t k = 0; k < fan.rays.size(); ++k) fan.ray_labels.push_back("r" + std::to_string(k));
      for (const auto& cone : f.at("cones")) {
        std::vector<std::size_t> c;
        for (const auto& x : cone) {
          auto v = x.get<long long>();
          if (v < 0 || static_cast<std::size_t>(v) >= fan.rays.size()) throw MathError("fan cone refers to a missing ray");
          c.push_back(static_cast<std::size_t>(v));
        }
        fan.cone_labels.push_back("cone" + std::to_string(fan.cones.size()));
        fan.cones.push_back(c);
      }
      const auto& gr = f.at("generator_rays");
      if (!gr.is_object()) throw MathError("generator_rays must map generator ids to ray indices");
      d.generator_ray.assign(ids.size(), 0);
      std::set<std::string> seen;
      for (auto it = gr.begin(); it != gr.end(); ++it) {
        d.generator_ray[index_of(it.key())] = it.value().get<std::size_t>();
        seen.insert(it.key());
      }
      if (seen.size() != ids.size()) throw MathError("generator_rays must cover every generator");
      d.fan = fan;
    }
    if (j.contains("ample_class")) d.ample_class = read_ivec(j["ample_class"], "ample_class");
    if (j.contains("incidence")) {
      const auto& inc = j["incidence"];
      if (!inc.is_object() || inc.value("provenance", "") != "external")
        throw MathError("explicit incidence data must carry \"provenance\": \"external\"");
      std::vector<std::vector<std::size_t>> rel_min;
      for (const auto& sup : inc.at("relevant_minimal")) {
        std::vector<std::size_t> s;
        for (const auto& id : sup) s.push_back(index_of(id.get<std::string>()));
        rel_min.push_back(s);
      }
      d.external_relevant = rel_min;
    }
    Variety check(d);  // eager validation
    return d;
  } catch (const json::exception& e) {
    throw MathError(std::string("malformed descriptor: ") + e.what());
  }
}

std::string descriptor_to_json(const VarietyDescriptor& d) {
  json j;
  j["name"] = d.name;
  j["pic_basis"] = d.pic_basis;
  auto gens = [](const std::vector<Generator>& gs) {
    json a = json::array();
    for (const auto& g : gs) a.push_back({{"id", g.id}, {"degree", g.degree}});
    return a;
  };
  j["s_generators"] = gens(d.s_generators);
  j["t_generators"] = gens(d.t_generators);
  j["relation"] = {{"shape", d.shape == RelationShape::Linear ? "linear" : "quasi_linear_t1_squared"}, {"b", d.b}};
  j["effective_cone"] = d.effective_cone;
  std::vector<std::string> ids;
  for (const auto& g : d.s_generators) ids.push_back(g.id);
  for (const auto& g : d.t_generators) ids.push_back(g.id);
  if (d.fan) {
    json gr = json::object();
    for (std::size_t k = 0; k < ids.size(); ++k) gr[ids[k]] = d.generator_ray[k];
    j["fan"] = {{"rays", d.fan->rays}, {"cones", d.fan->cones}, {"generator_rays", gr}};
  }
  if (d.ample_class) j["ample_class"] = *d.ample_class;
  if (d.external_relevant) {
    json sups = json::array();
    for (const auto& s : *d.external_relevant) {
      json a = json::array();
      for (auto k : s) a.push_back(ids[k]);
      sups.push_back(a);
    }
    j["incidence"] = {{"provenance", "external"}, {"relevant_minimal", sups}};
  }
  return j.dump();
}

VarietyDescriptor resolve_variety(const std::string& selector) {
  if (selector.rfind("xn:", 0) == 0) {
    int n = 0;
    std::size_t used = 0;
    const std::string digits = selector.substr(3);
    try {
      n = std::stoi(digits, &used);
    } catch (const std::exception&) {
      throw MathError("bad variety selector " + selector);
    }
    if (used != digits.size()) throw MathError("bad variety selector " + selector);
    return builtin_xn(n);
  }
  if (selector == "dp6a2") return builtin_dp6a2();
  std::ifstream in(selector);
  if (!in) throw MathError("unknown variety or unreadable descriptor file: " + selector);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_descriptor(ss.str());
}

std::vector<std::pair<std::string, bool>> xn_intersection_readings(const Variety& v) {
  const std::size_t n = v.num_t();
  if (v.num_s() != n + 1) throw MathError("readings are defined for the X_n family only");
  Mask all_fg = 0, all = (Mask{1} << v.num_generators()) - 1, all_g = 0;
  bool every = true, some = false;
  for (std::size_t i = 1; i <= n; ++i) {
    Mask fg = (Mask{1} << i) | (Mask{1} << v.t_index(i - 1));
    all_fg |= fg;
    all_g |= Mask{1} << v.t_index(i - 1);
    every = every && v.incidence(fg);
    some = some || v.incidence(fg);
  }
  return {
      {"G_1 through G_n meet", v.incidence(all_g)},
      {"all of F_1..F_n and G_1..G_n meet in one point", v.incidence(all_fg)},
      {"F_i meets G_i for every i", every},
      {"F_i meets G_i for some i", some},
      {"all generator divisors including F_0 meet", v.incidence(all)},
  };
}

}  // namespace maninlab
