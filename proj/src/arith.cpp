#include "maninlab/arith.hpp"

#include <limits>

namespace maninlab {

BigInt ipow(const BigInt& base, unsigned long e) {
  BigInt r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
  return r;
}

BigRational rpow(const BigRational& base, long e) {
  if (e >= 0) {
    BigRational r(ipow(base.get_num(), static_cast<unsigned long>(e)),
                  ipow(base.get_den(), static_cast<unsigned long>(e)));
    r.canonicalize();
    return r;
  }
  if (base == 0) throw MathError("zero raised to a negative power");
  return 1 / rpow(base, -e);
}

std::string to_string(const BigInt& x) { return x.get_str(); }

std::string to_string(const BigRational& x) {
  if (x.get_den() == 1) return x.get_num().get_str();
  return x.get_num().get_str() + "/" + x.get_den().get_str();
}

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

std::pair<std::uint64_t, unsigned> prime_power_decompose(std::uint64_t n) {
  if (n < 2) return {0, 0};
  std::uint64_t p = 0;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      p = d;
      break;
    }
  }
  if (p == 0) return {n, 1};
  unsigned f = 0;
  while (n % p == 0) {
    n /= p;
    ++f;
  }
  if (n != 1) return {0, 0};
  return {p, f};
}

bool is_prime_power(std::uint64_t n) { return prime_power_decompose(n).first != 0; }

int mobius(std::uint64_t n) {
  if (n == 0) throw MathError("mobius(0)");
  int sign = 1;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      n /= d;
      if (n % d == 0) return 0;
      sign = -sign;
    }
  }
  if (n > 1) sign = -sign;
  return sign;
}

std::int64_t checked_pow(std::int64_t base, unsigned e) {
  std::int64_t r = 1;
  for (unsigned i = 0; i < e; ++i) {
    if (base != 0 && std::llabs(r) > std::numeric_limits<std::int64_t>::max() / std::llabs(base))
      throw CapExceeded("integer power overflows 64 bits");
    r *= base;
  }
  return r;
}

}  // namespace maninlab
