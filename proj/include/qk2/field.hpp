#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace qk2 {

using Rat = mpq_class;
using Int = mpz_class;

// Element of Q(sqrt(D)), stored as a + b*sqrt(D) with exact rationals.
// All embedding magnitudes |x|^2, |sigma(x)|^2 of quartic elements live here,
// so every comparison that decides correctness stays exact.
struct Quad {
    Rat a, b;

    Quad() = default;
    Quad(Rat a_, Rat b_) : a(std::move(a_)), b(std::move(b_)) {}
    explicit Quad(long v) : a(v), b(0) {}

    bool operator==(const Quad& o) const { return a == o.a && b == o.b; }
};

Quad qadd(const Quad& x, const Quad& y);
Quad qsub(const Quad& x, const Quad& y);
Quad qmul(const Quad& x, const Quad& y, long D);
Quad qconj(const Quad& x);
Quad qscale(const Rat& s, const Quad& x);
// Sign of a + b*sqrt(D) as a real number (exact).
int qsign(const Quad& x, long D);
// x < y as real numbers.
bool qless(const Quad& x, const Quad& y, long D);
// Norm to Q: a^2 - D b^2.
Rat qnorm(const Quad& x, long D);
bool qis_zero(const Quad& x);
// Is x a square in Q(sqrt(D))? If so return a square root.
std::optional<Quad> qsqrt(const Quad& x, long D);

struct FieldParams {
    long A = -1;  // fixed to -1; kept explicit
    long B = 0;
    long C = 0;
    long D = 0;
    // The seven class-number-one cases are accepted as-is; anything else
    // requires this override (the run still validates the basic congruences).
    bool override_class_number_check = false;
};

// Quartic element x0 + x1*beta + x2*beta^2 + x3*beta^3, beta = i*sqrt(D+B*sqrt(D)).
struct Elem {
    std::array<Rat, 4> c{};

    Elem() = default;
    Elem(Rat a, Rat b, Rat cc, Rat d) : c{std::move(a), std::move(b), std::move(cc), std::move(d)} {}
    static Elem integer(long v) { return Elem(Rat(v), Rat(0), Rat(0), Rat(0)); }
    static Elem rational(const Rat& v) { return Elem(v, Rat(0), Rat(0), Rat(0)); }

    bool operator==(const Elem& o) const { return c == o.c; }
    bool operator!=(const Elem& o) const { return !(*this == o); }
    bool is_zero() const { return c[0] == 0 && c[1] == 0 && c[2] == 0 && c[3] == 0; }
};

// Deterministic total order on elements (coordinate-wise), used for tie-breaks.
bool elem_lex_less(const Elem& x, const Elem& y);
std::string elem_to_string(const Elem& x);

enum class BasisCase {
    EvenD,      // {1, sqrt(D), beta, beta3}
    OddDOddB,   // {1, (1+sqrt(D))/2, beta, beta3}
    HalfSum,    // {1, (1+sqrt(D))/2, (beta+beta3)/2, (beta-beta3)/2}
    QuarterM1,  // gamma2 = (1+sqrt(D)+beta-beta3)/4, gamma3 = (1-sqrt(D)+beta+beta3)/4
    QuarterM2,  // gamma2 = (1+sqrt(D)+beta+beta3)/4, gamma3 = (1-sqrt(D)+beta-beta3)/4
};

const char* basis_case_name(BasisCase b);

struct PrecisionExhausted : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class FieldContext {
public:
    FieldParams params;
    BasisCase basis_case;

    // minimal polynomial x^4 + m2 x^2 + m0
    Int m2, m0;

    // gamma_i = sum_j M[i][j] beta^j; W = (M^T)^{-1} maps power coords to
    // integral coords.
    std::array<std::array<Rat, 4>, 4> M, W;

    // integral-basis multiplication table: gamma_i*gamma_j = sum_k T[i][j][k] gamma_k
    std::array<std::array<std::array<Int, 4>, 4>, 4> mult_table;

    // trace form Tr(gamma_i * sigma^2(gamma_j)); positive definite, integral
    std::array<std::array<Int, 4>, 4> t2_gram;

    Int discriminant;       // field discriminant (trace form of integral basis)
    long conductor = 0;
    Int index;              // [O_F : Z[beta]]
    std::vector<long> index_primes;

    // fundamental unit of the real quadratic subfield, eps = (eu + ev*sqrt(D))/eden
    Int eu, ev;
    long eden = 1;
    int subfield_unit_norm = 0;  // N_{Q(sqrt D)/Q}(eps) = +-1

    Elem xi, xi_inv;        // fundamental unit of F and its inverse
    Quad xi_abs2;           // |xi|^2 as element of Q(sqrt(D)); |sigma(xi)|^2 = conj
    bool xi_is_sqrt_of_eps = false;
    int torsion_order = 2;  // 2, or 10 for the zeta_5 field

    unsigned precision_bits = 128;

    long D() const { return params.D; }

    // --- exact arithmetic ---
    Elem add(const Elem& x, const Elem& y) const;
    Elem sub(const Elem& x, const Elem& y) const;
    Elem neg(const Elem& x) const;
    Elem mul(const Elem& x, const Elem& y) const;
    Elem mul_rat(const Rat& s, const Elem& x) const;
    Elem inverse(const Elem& x) const;  // throws on zero
    Elem div(const Elem& x, const Elem& y) const;
    Elem pow(const Elem& x, long n) const;  // negative n via inverse

    Rat norm(const Elem& x) const;   // N(x) = |x|^2 |sigma(x)|^2, always >= 0 here
    Rat trace(const Elem& x) const;
    Elem sigma(const Elem& x) const;
    Elem conj(const Elem& x) const { return sigma(sigma(x)); }

    // 4x4 rational matrix of multiplication by x on the power basis
    std::array<std::array<Rat, 4>, 4> mul_matrix(const Elem& x) const;

    // |x|^2 and |sigma(x)|^2 as exact elements of Q(sqrt(D))
    Quad abs2(const Elem& x) const;
    Quad sabs2(const Elem& x) const { return qconj(abs2(x)); }

    // numeric embeddings |x|, |sigma(x)| with a rigorous enclosure half-width
    struct EmbeddingMagnitudes {
        double abs_value, sigma_abs_value, error;
    };
    EmbeddingMagnitudes abs_embeddings(const Elem& x) const;

    // integral-basis coordinates
    std::array<Rat, 4> to_integral(const Elem& x) const;
    Elem from_integral(const std::array<Rat, 4>& z) const;
    Elem from_integral(const std::array<long, 4>& z) const;
    bool is_integral(const Elem& x) const;

    Elem sqrtD() const;   // sqrt(D) = (-D - beta^2)/B
    Elem beta() const { return Elem(Rat(0), Rat(1), Rat(0), Rat(0)); }
    Elem beta3() const;   // the conjugate root i*sqrt(D - B*sqrt(D))
    Elem one() const { return Elem::integer(1); }

    // multiply by xi^k until |sigma(xi)| <= |sigma(a)/a| <= |xi| (Lemma 3.1 band)
    Elem band_reduce(const Elem& a) const;
    bool in_band(const Elem& a) const;

    // T2(x) = sum over embeddings |x|^2 = 2(|x|^2 + |sigma x|^2), a rational
    Rat t2(const Elem& x) const;

private:
    std::array<Elem, 4> sigma_beta_pow_;  // sigma(beta^k)
    friend FieldContext make_field(const FieldParams&, unsigned);
};

// Validates params, selects the integral basis case, cross-checks the
// discriminant against the conductor-discriminant formula, computes the
// fundamental unit.
FieldContext make_field(const FieldParams& params, unsigned precision_bits = 128);

// Fundamental unit of Q(sqrt(D)) by the continued-fraction expansion of
// sqrt(D), resp. (1+sqrt(D))/2 for D = 1 mod 4. Returns (u, v, den) with
// eps = (u + v sqrt(D))/den and its norm (+-1).
struct SubfieldUnit {
    Int u, v;
    long den;
    int nrm;
};
SubfieldUnit subfield_fundamental_unit(long D);

// The seven imaginary cyclic quartic fields with class number one: (B, C, D).
const std::vector<std::array<long, 3>>& class_number_one_fields();
// The six of them listed in the paper's bound table (zeta_5 excluded).
const std::vector<std::array<long, 3>>& bound_table_fields();

}  // namespace qk2
