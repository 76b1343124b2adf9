#ifndef QFACTOR_QCALC_HPP
#define QFACTOR_QCALC_HPP

#include "qfactor/lattice.hpp"

namespace qfactor {

// Truncation policy for the infinite products below: stop once the current
// factor differs from 1 by less than eps_poch, or give up at poch_term_cap
// factors (reported through InfProduct::converged).
inline constexpr double eps_poch = 1e-16;
inline constexpr int poch_term_cap = 100000;

// [n] = (1 - qⁿ)/(1 - q), continuous in real n. Evaluated through expm1 so it
// stays accurate as q -> 1.
double q_bracket(double n, double q);

// (∂_q f)(x) = (f(x) - f(qx)) / ((1-q)x). Undefined at the deepest point of
// each branch, where qx is not on the lattice.
LatticeFn q_derivative(const LatticeFn& f);

// (Q f)(x) = f(qx). Undefined at the deepest point of each branch.
LatticeFn shift_q(const LatticeFn& f);

// (Q⁻¹ f)(x) = f(x/q) at interior points, and exactly 0 at the branch heads
// x = a and x = b, where x/q falls outside the interval.
LatticeFn shift_q_inv(const LatticeFn& f);

struct JacksonResult {
    double value;
    double last_term; // magnitude of the deepest summand, truncation diagnostic
};

// Jackson integral over [a,b]_q truncated at the lattice depth:
//   sum_{n=0}^{N-1} (1-q) qⁿ (b f(qⁿb) - a f(qⁿa)).
// Every point of f must be defined and finite.
JacksonResult jackson_integral(const LatticeFn& f);

// (a; q)_n = prod_{m=0}^{n-1} (1 - qᵐ a).
double q_pochhammer(double a, double q, int n);

struct InfProduct {
    double value;
    int terms;      // factors actually multiplied
    bool converged; // false when the term cap fired before the factor threshold
};

// (a; q)_inf.
InfProduct q_pochhammer_inf(double a, double q);

// prod_{m>=0} (1 - baseᵐ u s1 + base^{2m} u² s2): the product of two
// q-Pochhammer symbols whose arguments are the reciprocal roots of
// 1 - s1 t + s2 t², evaluated in real arithmetic so a complex-conjugate
// root pair needs no complex intermediates.
InfProduct q_pochhammer_pair_inf(double u, double base, double s1, double s2);

struct TripleProductSides {
    double lhs; // sum_{k=-K}^{K} q^{k²} x^k
    double rhs; // (q²;q²)_inf (-qx;q²)_inf (-q/x;q²)_inf
};

// Both sides of the triple product identity, computed independently so tests
// can compare them.
TripleProductSides jacobi_triple_check(double x, double q, int K);

} // namespace qfactor

#endif
