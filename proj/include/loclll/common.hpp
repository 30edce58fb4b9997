#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace loclll {

using Rational = mpq_class;
using Integer = mpz_class;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised whenever an operation would need more than 2^bits enumeration steps.
class CapExceeded : public Error {
 public:
  CapExceeded(const std::string& what, double needed_bits, int cap_bits)
      : Error(what + ": needs ~2^" + std::to_string(needed_bits) + " > 2^" + std::to_string(cap_bits)),
        needed_bits(needed_bits), cap_bits(cap_bits) {}
  double needed_bits;
  int cap_bits;
};

inline constexpr int kDefaultCapBits = 20;
inline constexpr std::size_t kDefaultCanonicalCap = 12;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix(std::initializer_list<std::uint64_t> xs) {
  std::uint64_t h = 0x6a09e667f3bcc909ULL;
  for (auto x : xs) h = splitmix64(h ^ splitmix64(x));
  return h;
}

// Labeled seed derivation: every random stream is addressed by (root, component, index).
inline std::uint64_t derive_seed(std::uint64_t root, std::string_view component, std::uint64_t index = 0) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : component) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return mix({root, h, index});
}

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t root, std::string_view component, std::uint64_t index = 0) {
  return Rng(derive_seed(root, component, index));
}

inline std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi) {
  return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

inline Rational rpow(const Rational& base, unsigned e) {
  Rational r = 1;
  for (unsigned i = 0; i < e; ++i) r *= base;
  return r;
}

inline Integer ipow(const Integer& base, unsigned long e) {
  Integer r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
  return r;
}

inline std::string to_string(const Rational& q) { return q.get_str(); }

inline double to_double(const Rational& q) { return q.get_d(); }

inline Rational frac(long num, long den) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}

inline Rational frac(const Integer& num, const Integer& den) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}

// Certified rational lower bounds for e^{-1} and e^{-2}.
inline Rational e_inv_lower() { return frac(3678, 10000); }
inline Rational e_inv2_lower() { return frac(1353, 10000); }

}  // namespace loclll
