#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dgame/vm.hpp"

namespace dgame {

// Strategy suite for the sequential factoring game: Alice emits a number,
// Bob answers with a prime factor claim or gives up.

// Target bit length of Alice's random number as a function of the payoff
// discount rate: max(2, ceil(1 / (eps * log2(1/eps)))). Requires eps < 1/2.
int n_of_epsilon(double eps);

// x * 2^(bits - bitlen(x)); rejects x longer than `bits`. Padding only adds
// factors of two, so the factorization stays easy to track.
mpz_class pad_to_length(const mpz_class& x, std::size_t bits);

// Alice builtins -------------------------------------------------------------

// Interpreted two-instruction program that outputs the number 2.
MeteredStrategy alice_const2();

// Uniform random number of exactly n_of_epsilon(eps) bits, high and low bits
// forced to 1 (exact length, odd). eps is reconstructed from the r0 input.
MeteredStrategy alice_random();

// Same sampler at a fixed output length, independent of eps.
MeteredStrategy alice_fixed_length(int bits);

// Bob builtins ---------------------------------------------------------------

// Halts immediately without output.
MeteredStrategy bob_halt();

// Trial division with a declared step budget. The cost of the full candidate
// scan is computed analytically from the host factorization, so a budget of
// 10^12 units is exact without simulating 10^12 divisions. When the scan
// would exceed the budget Bob spends the budget and gives up (halts with no
// claim); when it exceeds the interpreter cap he fails to halt.
MeteredStrategy bob_trial_division(std::uint64_t budget);

// Brent's cycle-finding variant of Pollard rho with metered per-iteration
// charges, small-prime pre-trials and a metered Miller-Rabin primality check.
// Gives up after min(budget, 2 * L * D) cost units where D = ceil(1/delta)
// from the r1 input and L = bitlen(D).
MeteredStrategy bob_pollard_rho(std::uint64_t budget);

struct LookupTable {
  std::map<mpz_class, std::vector<mpz_class>> entries;
  std::size_t covered_length = 0;  // max key bit length

  // Sum of key and factor bit lengths; the hardware-encoding size of the
  // table, used as the strategy's program size.
  std::uint64_t size_bits() const;

  // One line per entry: "key: f1 f2 ...", keys in decimal, ascending.
  std::string serialize() const;
  static LookupTable parse(const std::string& text);
};

// Factors every support element by trial division offline (build cost is not
// metered). Throws std::runtime_error naming the first element that cannot
// be factored within max_trials candidate divisors.
LookupTable build_lookup_table(const std::vector<mpz_class>& support,
                               std::uint64_t max_trials = 1ull << 24);

// Answers covered keys from the table at cost linear in the key bit length
// (at most 8 * bitlen(key) units); gives up on uncovered keys.
MeteredStrategy bob_lookup(LookupTable table);

// Routes to `inner` when Alice's output is at most max_bits bits long,
// otherwise to `fallback`.
MeteredStrategy bob_length_gated(std::size_t max_bits, MeteredStrategy inner,
                                 MeteredStrategy fallback);

// Distribution-D sampler: runs `alice` up to `repeats` times with step cap
// max(ceil(1/eps), 64 * n(eps)) and returns the first output of bit length
// at most n(eps), padded to exactly n(eps) bits; a fixed power-of-two-heavy
// fallback of that length covers total failure.
mpz_class sample_D(const MeteredStrategy& alice, double eps, int repeats,
                   std::uint64_t seed);

// Amplified factorer built from a Bob strategy: ceil(log2(n)) independent
// runs on input x of bit length n, each capped at n^c * ceil((log2 n)^(c+2))
// cost units, accepting the first claim whose product equals x.
struct AmplifiedFactorer {
  MeteredStrategy inner;
  double c = 1.0;
  std::uint64_t runs = 0;
  std::uint64_t per_run_cap = 0;

  static AmplifiedFactorer plan(MeteredStrategy inner, double c,
                                std::size_t input_bits);

  // Returns (p, x/p) for the first prime p of a verified claim, or nullopt
  // when no run produces one.
  std::optional<std::pair<mpz_class, mpz_class>> factor(
      const mpz_class& x, std::uint64_t seed) const;
};

std::optional<std::pair<mpz_class, mpz_class>> extract_algorithm_A(
    const MeteredStrategy& bob, double c, const mpz_class& x,
    std::uint64_t seed);

}  // namespace dgame
