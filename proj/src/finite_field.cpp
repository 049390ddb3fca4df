#include "maninlab/finite_field.hpp"

#include <map>
#include <mutex>
#include <sstream>

namespace maninlab {

namespace {

std::uint32_t smallest_primitive_root(std::uint32_t p) {
  if (p == 2) return 1;
  std::vector<std::uint32_t> factors;
  std::uint32_t m = p - 1;
  for (std::uint32_t d = 2; d * d <= m; ++d) {
    if (m % d == 0) {
      factors.push_back(d);
      while (m % d == 0) m /= d;
    }
  }
  if (m > 1) factors.push_back(m);
  auto powmod = [p](std::uint64_t b, std::uint64_t e) {
    std::uint64_t r = 1;
    b %= p;
    while (e) {
      if (e & 1) r = r * b % p;
      b = b * b % p;
      e >>= 1;
    }
    return r;
  };
  for (std::uint32_t g = 2; g < p; ++g) {
    bool ok = true;
    for (auto r : factors)
      if (powmod(g, (p - 1) / r) == 1) {
        ok = false;
        break;
      }
    if (ok) return g;
  }
  throw MathError("no primitive root found");
}

}  // namespace

FiniteField::FiniteField(std::uint32_t p, unsigned f) : p_(p), f_(f) {
  std::uint64_t q = 1;
  for (unsigned i = 0; i < f; ++i) q *= p;
  q_ = static_cast<std::uint32_t>(q);
  digit_pow_.resize(f + 1);
  digit_pow_[0] = 1;
  for (unsigned i = 1; i <= f; ++i) digit_pow_[i] = digit_pow_[i - 1] * p;

  if (f > 1) {
    bool found = false;
    for (const auto& entry : defining_polynomial_table()) {
      if (entry.p == p && entry.f == f) {
        modulus_ = entry.low_coeffs;
        found = true;
        break;
      }
    }
    if (!found) throw MathError("no bundled defining polynomial for this field");
  }

  // Addition tables for small odd-characteristic extensions.
  if (f > 1 && p != 2 && q_ <= 256) {
    add_table_.resize(static_cast<std::size_t>(q_) * q_);
    neg_table_.resize(q_);
    for (std::uint32_t a = 0; a < q_; ++a) {
      for (std::uint32_t b = 0; b < q_; ++b) {
        std::uint32_t r = 0;
        for (unsigned i = 0; i < f; ++i) {
          std::uint32_t da = (a / digit_pow_[i]) % p, db = (b / digit_pow_[i]) % p;
          r += ((da + db) % p) * digit_pow_[i];
        }
        add_table_[static_cast<std::size_t>(a) * q_ + b] = r;
      }
    }
    for (std::uint32_t a = 0; a < q_; ++a) {
      std::uint32_t r = 0;
      for (unsigned i = 0; i < f; ++i) {
        std::uint32_t da = (a / digit_pow_[i]) % p;
        r += ((p - da) % p) * digit_pow_[i];
      }
      neg_table_[a] = r;
    }
  }

  // Multiply-by-generator walk; fails loudly if the generator is not primitive.
  const std::uint32_t order = q_ - 1;
  exp_.assign(2 * static_cast<std::size_t>(order) + 2, 0);
  log_.assign(q_, 0);
  std::vector<std::uint32_t> coords(f, 0);
  coords[0] = 1;
  std::uint32_t g_prime = (f == 1) ? smallest_primitive_root(p) : 0;
  auto encode = [&]() {
    std::uint32_t v = 0;
    for (unsigned i = 0; i < f; ++i) v += coords[i] * digit_pow_[i];
    return v;
  };
  std::vector<bool> seen(q_, false);
  for (std::uint32_t k = 0; k < order; ++k) {
    std::uint32_t v = encode();
    if (v == 0 || seen[v]) throw MathError("defining polynomial is not primitive");
    seen[v] = true;
    exp_[k] = v;
    log_[v] = k;
    if (f == 1) {
      coords[0] = static_cast<std::uint32_t>(static_cast<std::uint64_t>(coords[0]) * g_prime % p);
    } else {
      // multiply by x modulo the monic modulus
      std::uint32_t top = coords[f - 1];
      for (unsigned i = f - 1; i > 0; --i) coords[i] = coords[i - 1];
      coords[0] = 0;
      if (top != 0) {
        for (unsigned i = 0; i < f; ++i) {
          std::uint64_t sub = static_cast<std::uint64_t>(top) * modulus_[i] % p;
          coords[i] = static_cast<std::uint32_t>((coords[i] + p - sub) % p);
        }
      }
    }
  }
  if (encode() != 1) throw MathError("generator order mismatch");
  for (std::uint32_t k = order; k < exp_.size(); ++k) exp_[k] = exp_[k - order];
}

FiniteField::Elem FiniteField::from_int(long long v) const {
  long long r = v % static_cast<long long>(p_);
  if (r < 0) r += p_;
  return static_cast<Elem>(r);
}

FiniteField::Elem FiniteField::add(Elem a, Elem b) const {
  if (f_ == 1) {
    std::uint32_t s = a + b;
    return s >= p_ ? s - p_ : s;
  }
  if (p_ == 2) return a ^ b;
  if (!add_table_.empty()) return add_table_[static_cast<std::size_t>(a) * q_ + b];
  std::uint32_t r = 0;
  for (unsigned i = 0; i < f_; ++i) {
    std::uint32_t da = (a / digit_pow_[i]) % p_, db = (b / digit_pow_[i]) % p_;
    std::uint32_t s = da + db;
    if (s >= p_) s -= p_;
    r += s * digit_pow_[i];
  }
  return r;
}

FiniteField::Elem FiniteField::neg(Elem a) const {
  if (f_ == 1) return a == 0 ? 0 : p_ - a;
  if (p_ == 2) return a;
  if (!neg_table_.empty()) return neg_table_[a];
  std::uint32_t r = 0;
  for (unsigned i = 0; i < f_; ++i) {
    std::uint32_t da = (a / digit_pow_[i]) % p_;
    r += ((p_ - da) % p_) * digit_pow_[i];
  }
  return r;
}

FiniteField::Elem FiniteField::inv(Elem a) const {
  if (a == 0) throw MathError("inverse of zero");
  std::uint32_t order = q_ - 1;
  return exp_[(order - log_[a]) % order];
}

FiniteField::Elem FiniteField::pow(Elem a, std::uint64_t e) const {
  if (e == 0) return 1;
  if (a == 0) return 0;
  std::uint64_t order = q_ - 1;
  return exp_[(static_cast<std::uint64_t>(log_[a]) * (e % order)) % order];
}

std::string FiniteField::describe() const {
  std::ostringstream os;
  os << "F_" << q_;
  if (f_ > 1) {
    os << " = F_" << p_ << "[x]/(x^" << f_;
    for (int i = static_cast<int>(f_) - 1; i >= 0; --i) {
      if (modulus_[i] == 0) continue;
      os << " + " << modulus_[i];
      if (i >= 1) os << "x";
      if (i >= 2) os << "^" << i;
    }
    os << ")";
  }
  return os.str();
}

std::string FiniteField::elem_str(Elem a) const { return std::to_string(a); }

std::shared_ptr<const FiniteField> build_field(std::uint32_t p, unsigned f) {
  return std::shared_ptr<const FiniteField>(new FiniteField(p, f));
}

FieldPtr field_make(std::uint32_t p, unsigned f) {
  if (!is_prime(p)) throw MathError("field characteristic must be prime");
  if (f == 0) throw MathError("extension degree must be at least 1");
  std::uint64_t q = 1;
  for (unsigned i = 0; i < f; ++i) {
    q *= p;
    if (q > FiniteField::kMaxSize) throw CapExceeded("field size exceeds 2^20");
  }
  static std::mutex mu;
  static std::map<std::pair<std::uint32_t, unsigned>, FieldPtr> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(p, f);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto field = build_field(p, f);
  cache.emplace(key, field);
  return field;
}

FieldPtr field_of_size(std::uint64_t q) {
  auto [p, f] = prime_power_decompose(q);
  if (p == 0) throw MathError("field size must be a prime power: " + std::to_string(q));
  return field_make(static_cast<std::uint32_t>(p), f);
}

}  // namespace maninlab
