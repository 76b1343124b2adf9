#ifndef QFACTOR_EIGENSTATES_HPP
#define QFACTOR_EIGENSTATES_HPP

#include "qfactor/chain.hpp"
#include "qfactor/lattice.hpp"

namespace qfactor {

// Parameter regimes admitting a ground state of the product form
// x^ξ · Π(convergent factors). The admissible drift shape and the exponent ξ
// depend on which coefficient carries the small-x head of B₀ and on the sign
// of γ.
enum class GroundRegime {
    positive_gamma_b0, // γ > 0, b₀ ≠ 0
    positive_gamma_b1, // γ > 0, b₀ = 0, b₁ ≠ 0, h ≠ 0
    positive_gamma_b2, // γ > 0, b₀ = b₁ = h = 0, b₂ ≠ 0
    zero_gamma,        // γ = 0
    negative_gamma_b2, // γ < 0, b₂ ≠ 0
    negative_gamma_b1, // γ < 0, b₂ = 0, b₁ ≠ 0, h ≠ 0, d₁a₀ = a₁
    negative_gamma_b0, // γ < 0, b₂ = b₁ = h = 0, b₀ ≠ 0, d₁a₀ = a₁
};

const char* ground_regime_name(GroundRegime r);

struct GroundStateSpec {
    int k;
    GroundRegime regime;
    double xi; // seed exponent: ψ_k ~ x^ξ at the deep end
};

// Classify the parameters into one of the regimes above and evaluate ξ_k.
// Throws RegimeError when no regime matches or when the log argument behind
// ξ_k is not positive.
GroundStateSpec ground_spec(const ChainParams& p, double q, int k);

struct EigenPair {
    int k;          // chain level the state lives in
    int n;          // ladder height above its ground level
    double lambda;  // eigenvalue of the level-k second-order operator
    LatticeFn psi;
    double residual; // recomputed weighted residual of H ψ = λ ψ
};

// Solve the lowering equation (annihilate_k ψ = 0) by the outward first-rank
// recursion: the deepest point of each branch is seeded with the convergent
// tail product times x^ξ, every shallower value follows exactly. The state is
// scaled to unit weighted norm when the norm is numerically summable,
// otherwise it keeps the seed scale. Needs one level of headroom above k for
// the residual.
EigenPair ground_state(const Chain& chain, int k);

// ψ_k^n: the level-(k−n) ground state raised n times. λ = d_k···d_{k−n+1}a_{k−n}.
EigenPair ladder_up(const Chain& chain, int k, int n);

// Lower an n-rung state at level k back down: applies annihilate at levels
// k, k−1, ..., k−n+1. For an exact ψ_k^n the result is proportional to the
// level-(k−n) ground state.
LatticeFn ladder_down(const Chain& chain, int k, int n, const LatticeFn& psi);

// Weighted residual ‖H_kψ − λψ‖ / ‖ψ‖ with weight ρ_k, branch-positive
// Jackson measure, interior rows only (the head row of the second-order
// stencil is truncated, the deepest row undefined). Each raising step bakes
// the head truncation into one more row of the state, so a state raised m
// times is scored with head_skip = m + 1; the default covers ground states.
// Rows where ψ is undefined drop out of both norms.
double eigen_residual(const Chain& chain, int k, const LatticeFn& psi, double lambda,
                      int head_skip = 1);

// Classification of the squared-state density |ψ_k|²ρ_k. The labels follow
// the order of the closed-form catalogue: the γ = 0 power case, then the
// γ ≠ 0 cases keyed on which of b₀, b₁, b₂, h vanish and on whether
// kappa := b₂ + (1−q)²(d₁a₀−a₁)/((1−q^γ)qd₁) is zero; vi/vii split further
// on the sign of a q-power ratio.
enum class DensityCase {
    power_gamma_zero,
    full_quadratic,          // b₀,b₂ ≠ 0, kappa ≠ 0
    cut_denominator,         // b₀,b₂,h ≠ 0, kappa = 0
    pure_numerator,          // b₀,b₂ ≠ 0, h = 0, kappa = 0
    linear_with_pole,        // b₀ = 0, b₁,b₂,h ≠ 0, kappa ≠ 0
    linear_cut,              // b₀ = 0, b₁,b₂,h ≠ 0, kappa = 0
    theta_shift_pos,         // b₀ = h = 0, b₁,b₂ ≠ 0, kappa ≠ 0, ratio > 0
    theta_shift_neg,         //   〃 with ratio < 0
    theta_origin_pos,        // b₀ = b₁ = 0, b₂,h ≠ 0, kappa ≠ 0, ratio > 0
    theta_origin_neg,        //   〃 with ratio < 0
    pure_power,              // b₀ = b₁ = h = 0, b₂ ≠ 0, kappa ≠ 0
};

const char* density_case_name(DensityCase c);

// Pick the density case for the parameters; RegimeError when no case matches
// (listing the failed conditions) or when a sign-split ratio is zero.
DensityCase classify_density_case(const ChainParams& p, double q);

// Closed form of |ψ_k|²ρ_k for the given case, as an unnormalized lattice
// function (the defining recursion fixes it only up to one constant).
// ParamError if the case does not match classify_density_case.
LatticeFn density_closed_form(const Chain& chain, int k, DensityCase c);

struct Membership {
    bool in_space;
    DensityCase case_id;
};

// Whether the level-k ground state has finite weighted norm, decided by the
// exact parameter conditions case by case (γ < 0 never qualifies).
Membership membership(const ChainParams& p, double q, int k);

// Numerical counterpart of membership(): walks the density recursion in log
// scale (through the modulus of the step factor, so sign-changing densities
// are still measured by size) down to 2·probe_depth points per branch and
// declares summability when the largest Jackson term of the deep window sits
// at least a decade below that of the shallow window.
bool summability_heuristic(const Chain& chain, int k, int probe_depth = 200);

} // namespace qfactor

#endif
