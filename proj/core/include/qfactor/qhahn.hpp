#ifndef QFACTOR_QHAHN_HPP
#define QFACTOR_QHAHN_HPP

#include <vector>

#include "qfactor/chain.hpp"

namespace qfactor {

// Degree cap for the exact polynomial arithmetic below. Coefficients live in
// double precision, and past this degree the cancellation inside repeated
// raising steps stops being representable, so "exact" would be a lie.
inline constexpr int qpoly_degree_cap = 16;

// Dense real polynomial, coefficients in ascending degree. Invariant: the
// zero polynomial stores no coefficients, any other stores a nonzero leading
// one (normalize() restores this after arithmetic that may cancel).
struct QPoly {
    std::vector<double> c;

    static QPoly zero();
    static QPoly constant(double v);
    static QPoly monomial(int degree, double coeff);

    int degree() const; // -1 for the zero polynomial
    bool is_zero() const;
    double coeff(int m) const;           // 0 outside the stored range
    double operator()(double x) const;   // Horner evaluation
    QPoly& normalize();                  // trim exactly-zero leading terms
};

QPoly operator+(const QPoly& lhs, const QPoly& rhs);
QPoly operator-(const QPoly& lhs, const QPoly& rhs);
QPoly operator*(const QPoly& lhs, const QPoly& rhs);
QPoly operator*(double s, const QPoly& p);

// Exact monomial images of the two lattice primitives:
// ∂_q xᵐ = [m] x^{m-1} and Q⁻¹xᵐ = q^{-m} xᵐ.
QPoly q_derivative(const QPoly& p, double q);
QPoly shift_q_inv(const QPoly& p, double q);

// One level of the polynomial subcase of the chain: every raising step keeps
// polynomials polynomial because the second-order coefficient is the fixed
// quadratic B₀ = b₂x² + b₁x + b₀ and the drift A_k = ã_k x + b̃_k stays first
// order at every level.
struct QHahnLevel {
    int k;
    double q;
    double a_tilde; // ã_k = -q^{-2(k-1)}([2(k-1)]b₂ + q⁻¹a₀ - a₁)
    double b_tilde; // b̃_k = b₁/(1-q) - (1-q)q^{-k}h
    double b2, b1, b0;
};

// Build level k, checking that the parameters actually lie in the polynomial
// subcase: γ = 1, every d_j = 1/q, and A₀ equal to the first-order drift
// ([2]b₂ - qa₀ + q²a₁)x + b₁/(1-q) - (1-q)h, which is the combination that
// turns every f_j off. Anything else throws RegimeError.
QHahnLevel qhahn_level(const ChainParams& p, double q, int k);

// Raising step on polynomials: p ↦ -B₀ ∂_q Q⁻¹ p - (ã_k x + b̃_k) p.
// Degree grows by at most one; past qpoly_degree_cap this throws ParamError.
QPoly hahn_create(const QHahnLevel& level, const QPoly& p);

// The polynomial second-order operator (B₀ ∂_q Q⁻¹ ∂_q + A_k ∂_q) p, the
// eigenproblem the raised polynomials solve.
QPoly hahn_operator(const QHahnLevel& level, const QPoly& p);

// Its eigenvalue at height n: ã_k[n] + b₂[n][n-1]q^{-(n-1)} (zero at n = 0).
double hahn_eigen(const QHahnLevel& level, int n);

struct QHahnPair {
    QPoly psi;
    double lambda;
};

// The polynomial family at level k: ψ⁰ = 1 and ψⁿ the product of raising
// steps at levels k-n+1, ..., k applied to 1, paired with hahn_eigen values,
// for n = 0..n_max ≤ k.
std::vector<QHahnPair> hahn_family(const ChainParams& p, double q, int k, int n_max);

// Level-k weight in quotient form: ρ₀(q^{-k}x) / (B₀(q^{-k+1}x) ··· B₀(x)).
// Satisfies the same one-step recursion as Chain::rhok, so the two agree up
// to a factor constant along each q-line; unusable where a denominator
// factor meets a root of B₀ (DomainError), which Chain::rhok is not.
double hahn_weight(const Chain& chain, int k, double x);

// Gram matrix of {ψⁿ}_{n=0..n_max} under the level-k Jackson pairing with
// weight Chain::rhok. The weight must be nonnegative and finite at every
// lattice point (DomainError otherwise; steep weights may underflow to zero
// deep on a line, and such rows simply drop out), and the boundary product
// B₀ρ_k must vanish at the head and the deep end of every line, or the
// pairing is not self-adjoint and a DomainError reports the surviving
// boundary term. Entries are symmetric by construction.
std::vector<std::vector<double>> hahn_orthogonality(const ChainParams& p, const QLattice& lat,
                                                    int k, int n_max);

} // namespace qfactor

#endif
