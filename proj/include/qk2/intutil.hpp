#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include <gmpxx.h>

namespace qk2 {

using Int = mpz_class;

// rational primes up to and including bound
std::vector<long> primes_up_to(long bound);

bool is_prime(const Int& n);

// Factor |n| by trial division up to 10^6 followed by Brent rho. Returns
// nullopt when the rho effort cap is exceeded (callers must treat this as
// "unknown", never as success).
std::optional<std::map<Int, int>> factor(const Int& n, unsigned long rho_iterations = 1u << 22);

// n^-1 mod m (m > 1, gcd = 1)
long inv_mod(long n, long m);
long pow_mod(long b, long e, long m);

// multiplicative order of g modulo m (g coprime to m)
long mult_order(long g, long m);

// FNV-1a 64-bit over a byte string; stable across runs and platforms.
std::uint64_t fnv1a(const std::string& s, std::uint64_t seed = 1469598103934665603ull);

}  // namespace qk2
