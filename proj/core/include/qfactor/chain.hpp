#ifndef QFACTOR_CHAIN_HPP
#define QFACTOR_CHAIN_HPP

#include <optional>
#include <vector>

#include "qfactor/lattice.hpp"

namespace qfactor {

// Rule producing the factorization constants d_k, k >= 1.
struct DRule {
    enum class Kind { q_power, constant, list };

    Kind kind = Kind::q_power;
    double value = -1.0;        // exponent for q_power, the value for constant
    std::vector<double> values; // d_1, d_2, ... for Kind::list

    static DRule q_power(double exponent);
    static DRule constant(double v);
    static DRule list(std::vector<double> v);

    double at(int k, double q) const;
};

// A₀(x) = x^p A(x) with a polynomial A. The prefactor exponent p is tied to
// one of the three exponents of B₀ = b₂x² + b₁x^{2-γ} + b₀x^{2-2γ} so that
// A₀/B₀ stays finite at the origin.
enum class A0Shape {
    x_pow_1_minus_2gamma, // p = 1-2γ, pairs with the b₀ term
    x_pow_1_minus_gamma,  // p = 1-γ,  pairs with the b₁ term
    x_pow_1,              // p = 1,    pairs with the b₂ term
};

struct ChainParams {
    double gamma = 1.0;
    double b0 = 0.0;
    double b1 = 0.0;
    double b2 = 0.0;
    double h = 0.0;
    // Alternative way to give h, as h = b₁ q^{h̃}/(1-q)²; this is the scaling
    // that keeps the x^{-γ} term of α₀ meaningful in the q -> 1 limit.
    std::optional<double> h_tilde;
    double a0 = 0.0;
    double a1 = 0.0;
    DRule d;
    A0Shape shape = A0Shape::x_pow_1;
    std::vector<double> A; // coefficients of A(x); A[i] multiplies x^i
    int max_k = 8;

    double shape_exponent() const; // the p in A₀ = x^p A(x)
};

// One fully populated level of the operator chain, sampled on a lattice.
struct ChainLevel {
    int k;
    double ak;
    LatticeFn Bk;
    LatticeFn Ak;
    LatticeFn fk;
    LatticeFn etak;
    LatticeFn phik;
    LatticeFn alphak;
    LatticeFn rhok;
};

// The solved subcase g_k = d_{k+1} q^γ of the factorization chain. All
// level-k data reduce to the level-0 closed forms evaluated at q^{-k}x, so
// every evaluator below is analytic in x > 0 and never interpolates lattice
// data; only sampled ChainLevel fields live on the lattice.
class Chain {
public:
    Chain(ChainParams params, QLattice lat);

    const ChainParams& params() const { return params_; }
    const QLattice& lattice() const { return lat_; }
    double q() const { return lat_.q; }
    double h() const { return h_; } // resolved value (h_tilde applied)

    double d(int k) const; // k >= 1
    double D(int k) const; // d_k ··· d_1, with D(0) = 1
    double g(int k) const; // g_k = d_{k+1} q^γ
    double a(int k) const; // factorization constants

    // level-0 closed forms
    double B0(double x) const;
    double Apoly(double x) const; // the polynomial A(x)
    double A0(double x) const;    // x^p A(x)
    double eta0(double x) const;  // B₀ - (1-q)x A₀
    double alpha0(double x) const;
    double phi0(double x) const; // sqrt(α₀/η₀)
    double f0(double x) const;   // φ₀ - 1/((1-q)x)
    double rho0(double x) const; // weight, normalized so A₀ ≡ 0 gives 1/B₀

    // level-k closed forms via the transformation rules
    double Bk(int k, double x) const;
    double Ak(int k, double x) const;
    double etak(int k, double x) const;
    double alphak(int k, double x) const;
    double phik(int k, double x) const;
    double fk(int k, double x) const;
    double rhok(int k, double x) const; // ρ₀ / (η₁ ··· η_k)

    ChainLevel level(int k) const;

private:
    ChainParams params_;
    QLattice lat_;
    double h_;

    // head behaviour of B₀ as x -> 0: smallest exponent among the present
    // terms and the total coefficient sitting at it
    double head_exponent_ = 0.0;
    double head_coeff_ = 0.0;
    // limit of B₀(qx)/η₀(x) as x -> 0, the geometric rate regularizing ρ₀
    double rho_rate_ = 1.0;

    void resolve_head_behaviour();
};

// The x^{-γ} coefficient of α₀ with the h̃ convention applied:
// h = b₁ q^{h̃}/(1-q)² when h_tilde is set, the literal h otherwise.
double resolved_h(const ChainParams& p, double q);

// Free helpers matching the sampled, lattice-level view of the chain.
LatticeFn b0_poly(const ChainParams& p, const QLattice& lat);
double a_k_sequence(const ChainParams& p, double q, int k);
LatticeFn alpha0_fn(const ChainParams& p, const QLattice& lat);
ChainLevel build_level(const ChainParams& p, const QLattice& lat, int k);
LatticeFn rho0_product(const ChainParams& p, const QLattice& lat);

} // namespace qfactor

#endif
