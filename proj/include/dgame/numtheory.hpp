#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <vector>

namespace dgame {

// Bit length of |x|; bit_length(0) == 1 so every operand has positive cost.
std::size_t bit_length(const mpz_class& x);

// Deterministic Miller-Rabin. Below 3.317e24 a fixed prime-base set is a
// proven primality test; above that, 64 rounds with bases derived from a
// fixed splitmix seed.
bool is_prime(const mpz_class& n);

// Number of Miller-Rabin witnesses is_prime() uses for n. Exposed so metered
// strategies can charge the matching cost.
int miller_rabin_witness_count(const mpz_class& n);

// Full prime factorization (Pollard rho + Miller-Rabin), ascending with
// multiplicity. Host-side oracle; not metered. n >= 2.
std::vector<mpz_class> factorize(const mpz_class& n);

// Trial-division factorization, ascending. Aborts (returns empty) once more
// than max_trials candidate divisors were tried.
std::vector<mpz_class> trial_division_factorize(const mpz_class& n,
                                                std::uint64_t max_trials);

// Smallest prime factor of n >= 2.
mpz_class smallest_prime_factor(const mpz_class& n);

}  // namespace dgame
