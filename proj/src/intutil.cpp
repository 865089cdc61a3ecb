#include "qk2/intutil.hpp"

#include <stdexcept>
#include <string>

namespace qk2 {

std::vector<long> primes_up_to(long bound) {
    std::vector<long> out;
    if (bound < 2) return out;
    std::vector<bool> sieve(bound + 1, true);
    for (long i = 2; i <= bound; ++i) {
        if (!sieve[i]) continue;
        out.push_back(i);
        for (long j = i * i; j <= bound && i <= bound / i; j += i) sieve[j] = false;
    }
    return out;
}

bool is_prime(const Int& n) { return mpz_probab_prime_p(n.get_mpz_t(), 40) != 0; }

static Int brent_rho(const Int& n, unsigned long max_iter) {
    if (n % 2 == 0) return 2;
    gmp_randclass rng(gmp_randinit_mt);
    rng.seed(0x5eedul);
    for (int attempt = 0; attempt < 16; ++attempt) {
        Int y = rng.get_z_range(n - 3) + 2, c = rng.get_z_range(n - 2) + 1;
        Int x, q(1), g(1), ys;
        unsigned long r = 1, m = 128, done = 0;
        while (g == 1 && done < max_iter) {
            x = y;
            for (unsigned long i = 0; i < r; ++i) y = (y * y + c) % n;
            unsigned long k = 0;
            while (k < r && g == 1) {
                ys = y;
                unsigned long lim = std::min(m, r - k);
                for (unsigned long i = 0; i < lim; ++i) {
                    y = (y * y + c) % n;
                    Int d = x - y;
                    if (d < 0) d = -d;
                    q = q * d % n;
                }
                mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
                k += lim;
                done += lim;
            }
            r *= 2;
        }
        if (g == n) {
            g = 1;
            while (g == 1) {
                ys = (ys * ys + c) % n;
                Int d = x - ys;
                if (d < 0) d = -d;
                mpz_gcd(g.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
            }
        }
        if (g != 1 && g != n) return g;
    }
    return 0;
}

std::optional<std::map<Int, int>> factor(const Int& n_in, unsigned long rho_iterations) {
    std::map<Int, int> out;
    Int n = abs(n_in);
    if (n == 0) return std::nullopt;
    if (n == 1) return out;
    for (long p : {2L, 3L, 5L, 7L, 11L, 13L}) {
        while (n % p == 0) { out[Int(p)]++; n /= p; }
    }
    for (long p = 17; p <= 1000000 && Int(p) * p <= n; p += 2) {
        while (n % p == 0) { out[Int(p)]++; n /= p; }
    }
    std::vector<Int> stack;
    if (n > 1) stack.push_back(n);
    while (!stack.empty()) {
        Int m = stack.back();
        stack.pop_back();
        if (m == 1) continue;
        if (is_prime(m)) { out[m]++; continue; }
        Int d = brent_rho(m, rho_iterations);
        if (d == 0 || d == 1 || d == m) return std::nullopt;
        stack.push_back(d);
        stack.push_back(m / d);
    }
    return out;
}

long pow_mod(long b, long e, long m) {
    long r = 1 % m;
    b %= m;
    if (b < 0) b += m;
    while (e) {
        if (e & 1) r = (long)((__int128)r * b % m);
        b = (long)((__int128)b * b % m);
        e >>= 1;
    }
    return r;
}

long inv_mod(long n, long m) {
    long a = n % m, b = m, x0 = 1, x1 = 0;
    if (a < 0) a += m;
    while (b) {
        long q = a / b;
        a -= q * b;
        std::swap(a, b);
        x0 -= q * x1;
        std::swap(x0, x1);
    }
    if (a != 1) throw std::domain_error("not invertible");
    return ((x0 % m) + m) % m;
}

long mult_order(long g, long m) {
    long r = 1, acc = g % m;
    if (acc < 0) acc += m;
    while (acc != 1) {
        acc = (long)((__int128)acc * g % m);
        ++r;
        if (r > m) throw std::domain_error("element not invertible mod m");
    }
    return r;
}

std::uint64_t fnv1a(const std::string& s, std::uint64_t seed) {
    std::uint64_t h = seed;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace qk2
