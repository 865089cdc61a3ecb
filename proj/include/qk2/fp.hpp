#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace qk2 {

// Dense polynomial over F_p, little-endian coefficients, normalized (no
// trailing zeros). p is passed to each operation; fits in long.
using FpPoly = std::vector<long>;

FpPoly fp_trim(FpPoly a);
int fp_deg(const FpPoly& a);
FpPoly fp_add(const FpPoly& a, const FpPoly& b, long p);
FpPoly fp_sub(const FpPoly& a, const FpPoly& b, long p);
FpPoly fp_mul(const FpPoly& a, const FpPoly& b, long p);
FpPoly fp_mod(FpPoly a, const FpPoly& m, long p);
FpPoly fp_divexact(const FpPoly& a, const FpPoly& b, long p);
FpPoly fp_gcd(FpPoly a, FpPoly b, long p);
FpPoly fp_monic(FpPoly a, long p);
FpPoly fp_pow_ui(FpPoly base, unsigned long e, const FpPoly& m, long p);
FpPoly fp_powmod(FpPoly base, const mpz_class& e, const FpPoly& m, long p);
FpPoly fp_derivative(const FpPoly& a, long p);

// Monic irreducible factors with multiplicities, canonically sorted by
// (degree, coefficient vector). Deterministic: the equal-degree splitting
// draws trial elements from a fixed-seed generator.
std::vector<std::pair<FpPoly, int>> fp_factor(const FpPoly& f, long p);

bool fp_poly_less(const FpPoly& a, const FpPoly& b);

// --- small dense linear algebra over F_p ---
using FpMat = std::vector<std::vector<long>>;

// reduced row echelon form in place; returns rank
int fp_rref(FpMat& m, long p);
// basis of the null space of m (rows are vectors)
FpMat fp_nullspace(const FpMat& m, long p);

}  // namespace qk2
