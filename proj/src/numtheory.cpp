#include "dgame/numtheory.hpp"

#include <stdexcept>

#include "dgame/rng.hpp"

namespace dgame {

std::size_t bit_length(const mpz_class& x) {
  if (x == 0) return 1;
  mpz_class a = abs(x);
  return mpz_sizeinbase(a.get_mpz_t(), 2);
}

namespace {

// Smallest composite that fools the first-k-primes witness set.
// Values from the standard deterministic Miller-Rabin thresholds.
struct Tier {
  const char* bound;
  int witnesses;
};

const Tier kTiers[] = {
    {"2047", 1},
    {"1373653", 2},
    {"25326001", 3},
    {"3215031751", 4},
    {"2152302898747", 5},
    {"3474749660383", 6},
    {"341550071728321", 7},
    {"3825123056546413051", 9},
    {"318665857834031151167461", 12},
    {"3317044064679887385961981", 13},
};

const int kSmallPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37, 41};

bool mr_witness(const mpz_class& n, const mpz_class& a) {
  // n odd, n > 2, 1 < a < n-1 assumed by caller.
  mpz_class d = n - 1;
  unsigned long r = mpz_scan1(d.get_mpz_t(), 0);
  mpz_tdiv_q_2exp(d.get_mpz_t(), d.get_mpz_t(), r);
  mpz_class x;
  mpz_powm(x.get_mpz_t(), a.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
  if (x == 1 || x == n - 1) return false;
  for (unsigned long i = 0; i + 1 < r; ++i) {
    x = (x * x) % n;
    if (x == n - 1) return false;
  }
  return true;  // a witnesses compositeness
}

}  // namespace

int miller_rabin_witness_count(const mpz_class& n) {
  for (const Tier& t : kTiers) {
    if (n < mpz_class(t.bound)) return t.witnesses;
  }
  return 64;
}

bool is_prime(const mpz_class& n) {
  if (n < 2) return false;
  for (int p : kSmallPrimes) {
    if (n == p) return true;
    if (n % p == 0) return false;
  }
  int count = miller_rabin_witness_count(n);
  if (count <= static_cast<int>(sizeof(kSmallPrimes) / sizeof(int))) {
    for (int i = 0; i < count; ++i) {
      if (mr_witness(n, kSmallPrimes[i])) return false;
    }
    return true;
  }
  // Large n: fixed-seed random bases.
  std::uint64_t s = 0x6e6f746865727933ULL;
  for (int i = 0; i < count; ++i) {
    mpz_class a = 2 + mpz_class(static_cast<unsigned long>(splitmix64(s) >> 1)) % (n - 3);
    if (mr_witness(n, a)) return false;
  }
  return true;
}

namespace {

mpz_class rho_split(const mpz_class& n, std::uint64_t seed) {
  // Brent's variant. n composite, odd, not a small-prime multiple.
  BitStream bits(seed);
  for (int attempt = 0; attempt < 64; ++attempt) {
    mpz_class c = 1 + mpz_class(static_cast<unsigned long>(bits.next_bits(32)));
    mpz_class y = 2 + mpz_class(static_cast<unsigned long>(bits.next_bits(32)));
    mpz_class x, q = 1, g = 1, ys;
    std::uint64_t r = 1;
    while (g == 1) {
      x = y;
      for (std::uint64_t i = 0; i < r; ++i) y = (y * y + c) % n;
      std::uint64_t k = 0;
      while (k < r && g == 1) {
        ys = y;
        std::uint64_t lim = std::min<std::uint64_t>(128, r - k);
        for (std::uint64_t i = 0; i < lim; ++i) {
          y = (y * y + c) % n;
          q = (q * abs(x - y)) % n;
        }
        mpz_class t;
        mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
        k += lim;
      }
      r *= 2;
    }
    if (g == n) {
      // Backtrack one step at a time.
      do {
        ys = (ys * ys + c) % n;
        mpz_class d = abs(x - ys);
        mpz_gcd(g.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
      } while (g == 1);
    }
    if (g != n) return g;
  }
  throw std::runtime_error("rho_split: failed to split composite");
}

void factor_rec(const mpz_class& n, std::vector<mpz_class>& out,
                std::uint64_t seed) {
  if (n == 1) return;
  if (is_prime(n)) {
    out.push_back(n);
    return;
  }
  mpz_class m = n;
  for (int p : kSmallPrimes) {
    while (m % p == 0) {
      out.push_back(p);
      m /= p;
    }
  }
  if (m == 1) return;
  if (is_prime(m)) {
    out.push_back(m);
    return;
  }
  mpz_class d = rho_split(m, seed);
  factor_rec(d, out, seed + 1);
  factor_rec(m / d, out, seed + 2);
}

}  // namespace

std::vector<mpz_class> factorize(const mpz_class& n) {
  if (n < 2) throw std::invalid_argument("factorize: n must be >= 2");
  std::vector<mpz_class> out;
  factor_rec(n, out, 0x7261626269747321ULL);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<mpz_class> trial_division_factorize(const mpz_class& n,
                                                std::uint64_t max_trials) {
  if (n < 2) throw std::invalid_argument("trial_division_factorize: n >= 2");
  std::vector<mpz_class> out;
  mpz_class v = n;
  mpz_class d = 2;
  std::uint64_t trials = 0;
  while (d * d <= v) {
    if (++trials > max_trials) return {};
    if (v % d == 0) {
      out.push_back(d);
      v /= d;
    } else {
      d += (d == 2) ? 1 : 2;
    }
  }
  if (v > 1) out.push_back(v);
  std::sort(out.begin(), out.end());
  return out;
}

mpz_class smallest_prime_factor(const mpz_class& n) {
  if (n < 2) throw std::invalid_argument("smallest_prime_factor: n >= 2");
  return factorize(n).front();
}

}  // namespace dgame
