#ifndef QFACTOR_OSCILLATORS_HPP
#define QFACTOR_OSCILLATORS_HPP

#include "qfactor/chain.hpp"
#include "qfactor/eigenstates.hpp"
#include "qfactor/lattice.hpp"

namespace qfactor {

// The two constant-weight members of the factorization chain. Both keep
// B_k ≡ 1 and ρ_k ≡ 1 at every level, so the whole ladder structure sits in
// the superpotential f_k(x) = q^{-γk}φ₀(q^{-k}x) − 1/((1-q)x) and the states
// admit closed product forms instead of the generic weight recursion.
enum class OscVariant {
    harmonic,     // γ = 1, d_k = q⁻¹, the constant B₀ slot set to one
    isotropic_3d, // γ = 2, d_k = q⁻², the x^{2-γ} slot of B₀ set to one
};

const char* osc_variant_name(OscVariant v);

// Parameter triple of a constant-weight case: a0 and a1 seed the chain
// constants a_k, h is the integration constant inside the level-0
// superpotential.
struct OscillatorCase {
    OscVariant variant;
    double a0;
    double a1;
    double h;

    // The chain family the case belongs to: a single unit coefficient in B₀,
    // empty drift, level rule d_k = q^{-γ}. max_k keeps its default; callers
    // with deeper ladders raise it on the returned value.
    ChainParams chain_params() const;

    // Closed form of the level-0 superpotential,
    //   harmonic:  f₀(x) = √(q²(q⁻¹a₀−a₁)/(1−q) + h/x + 1/((1−q)²x²)) − 1/((1−q)x),
    //   isotropic: f₀(x) = √(q⁴(q⁻²a₀−a₁)/(1−q²) + h/x²) − 1/((1−q)x).
    // ParamError outside q ∈ (0,1) or x ≤ 0, SqrtDomainError when the
    // radicand is negative.
    double f0(double q, double x) const;
};

// Ground state of the level-k operator from the closed product forms.
//
// Harmonic: ψ_k⁰ ∝ 1/√(P(q^{-k}x)) where P(y) = Π_{m≥0} g(qᵐy) telescopes the
// one-step rule ψ(qy) = ψ(y)√g(y) with g(y) = 1 + (1−q)²hy + (1−q)q(a₀−qa₁)y².
// The two geometric factor families attached to the roots of g are evaluated
// through the real quadratic itself, so a conjugate root pair never needs
// complex intermediates; a₀ = qa₁ degenerates g to its linear part and leaves
// the single factor family of −(1−q)²h q^{-k}x.
//
// Isotropic: ψ_k⁰ ∝ x^{ξ_k}/√(T_k(x)) with ξ_k = −k + log_q((1−q)√h) and
// T_k(x) = (−(c/h) q^{-2k}x²; q²)_∞, c = q⁴(q⁻²a₀−a₁)/(1−q²) the constant
// part of the f₀ radicand. The base is q² because one lattice step scales x²
// by q². Needs h > 0 (RegimeError otherwise); a₀ = q²a₁ empties the product
// and leaves the pure power.
//
// The state is scaled to unit weighted norm, the eigenvalue is the chain
// constant a_k, and the residual is recomputed against the level-k operator.
// A product that fails to stay positive on the lattice is reported as
// SqrtDomainError.
EigenPair osc_ground(const OscillatorCase& c, const QLattice& lat, int k);

// Interior deviations of the four shift-ladder relations at level k,
//   q A*_k Q⁻¹ = Q⁻¹ A*_{k-1},   A*_k Q = q Q A*_{k+1},
//   q A_k  Q⁻¹ = Q⁻¹ A_{k-1},    A_k  Q = q Q A_{k+1},
// applied to one test function. The relations are exact for the harmonic
// case: there q f_k(x) = f_{k-1}(x/q), so conjugating a ladder operator by
// one lattice shift lands on the neighbouring level. For γ ≠ 1 that identity
// picks up the defect q f_k(x) − f_{k-1}(x/q) = (q − q^γ) q^{-γk}φ₀(q^{-k}x)
// and the deviations are of the order of the superpotential itself.
struct CommutationDeviations {
    double raise_down; // q A*_k Q⁻¹ vs Q⁻¹ A*_{k-1}
    double raise_up;   // A*_k Q     vs q Q A*_{k+1}
    double lower_down; // q A_k Q⁻¹  vs Q⁻¹ A_{k-1}
    double lower_up;   // A_k Q      vs q Q A_{k+1}

    double max_deviation() const;
};

// Both sides of each relation are assembled independently from the shift
// primitives and the closed superpotential, and compared on the rows where
// both are defined, excluding the head row (the Q⁻¹ boundary rule truncates
// real data there on one side but not the other). Needs k ≥ 1.
CommutationDeviations commutation_check(const OscillatorCase& c, const QLattice& lat,
                                        int k, const LatticeFn& psi);

// Closed eigenvalue of the n-th ladder state at level k:
//   harmonic:  λ_k^n = q^{n-2k}(a₀ + (q²a₁−a₀)[k−n])        for any n ≥ 0,
//   isotropic: λ_k^n = q^{-2(2k-n)}(a₀ + (q⁴a₁−a₀)[2(k−n)]/[2]) for n ≤ k
// (ParamError beyond). Both reduce to the chain constant a_k at n = 0, and
// for n ≤ k both equal d_k···d_{k-n+1} a_{k-n}; the harmonic formula keeps
// counting above n = k through the continuous bracket.
double osc_spectrum(const OscillatorCase& c, double q, int k, int n);

// A ladder state with its eigenvalue. normalized is false exactly when the
// harmonic prefactor 1/√((a₀−qa₁)ⁿ [1]···[n] q^{n(n-1)+k}) is singular
// (a₀ = qa₁, n ≥ 1); the raw product state is then returned unscaled. It is
// still a genuine eigenfunction — raising is intertwining algebra, pointwise
// on the lattice — but the spectrum degenerates: d_j a_{j-1} = a_j at every
// level, so the whole ladder sits at λ = q^{-k} a₀.
struct OscState {
    EigenPair pair;
    bool normalized;
};

// n-th eigenstate of the level-k operator.
//
// Harmonic: ψ_k^n = Q^{n-k} A*_n···A*_1 ψ₀⁰ times the prefactor above. The
// power of Q is exact exponent reindexing on the geometric lattice, so
// |n−k| rows drop off one end and stay undefined; residual norms skip them.
// Requires a₀ ≥ qa₁ (SqrtDomainError below, the flagged degenerate ladder
// at equality). n may exceed k: the reindexing extends the level-n ladder
// state down to level k.
//
// Isotropic: ψ_k^n = A*_k···A*_{k-n+1} ψ⁰_{k-n} with every raising step
// evaluated from its closed radical form
//   (A*_i ψ)(x) = (q^{-i}(1−q)√h √(1 + (c/h)q^{-2i}x²) ψ(x) − ψ(x/q)) / ((1−q)x),
// n ≤ k (ParamError beyond).
//
// The weighted residual skips the head rows the construction truncates
// (k+1 rows for the harmonic states, n+1 for the isotropic ones).
OscState osc_state(const OscillatorCase& c, const QLattice& lat, int k, int n);

} // namespace qfactor

#endif
