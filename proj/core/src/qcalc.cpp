#include "qfactor/qcalc.hpp"

#include <cmath>
#include <sstream>

namespace qfactor {

namespace {

void require_q(double q, const char* who) {
    if (!(q > 0.0 && q < 1.0)) {
        std::ostringstream os;
        os << who << " needs q in (0,1), got q=" << q;
        throw ParamError(os.str());
    }
}

} // namespace

double q_bracket(double n, double q) {
    require_q(q, "q_bracket");
    if (n == 0.0) return 0.0;
    return std::expm1(n * std::log1p(q - 1.0)) / (q - 1.0);
}

LatticeFn q_derivative(const LatticeFn& f) {
    const QLattice& lat = f.lattice();
    LatticeFn out(lat);
    for (Branch br : lat.branches()) {
        int m = lat.branch_size(br);
        for (int n = 0; n < m; ++n) {
            if (n + 1 < m && f.defined(br, n) && f.defined(br, n + 1)) {
                double x = lat.point(br, n);
                out.set(br, n, (f.at(br, n) - f.at(br, n + 1)) / ((1.0 - lat.q) * x));
            } else {
                out.set_undefined(br, n);
            }
        }
    }
    return out;
}

LatticeFn shift_q(const LatticeFn& f) {
    const QLattice& lat = f.lattice();
    LatticeFn out(lat);
    for (Branch br : lat.branches()) {
        int m = lat.branch_size(br);
        for (int n = 0; n < m; ++n) {
            if (n + 1 < m && f.defined(br, n + 1)) {
                out.set(br, n, f.at(br, n + 1));
            } else {
                out.set_undefined(br, n);
            }
        }
    }
    return out;
}

LatticeFn shift_q_inv(const LatticeFn& f) {
    const QLattice& lat = f.lattice();
    LatticeFn out(lat);
    for (Branch br : lat.branches()) {
        int m = lat.branch_size(br);
        for (int n = 0; n < m; ++n) {
            if (n == 0) {
                out.set(br, n, 0.0);
            } else if (f.defined(br, n - 1)) {
                out.set(br, n, f.at(br, n - 1));
            } else {
                out.set_undefined(br, n);
            }
        }
    }
    return out;
}

JacksonResult jackson_integral(const LatticeFn& f) {
    const QLattice& lat = f.lattice();
    if (!f.all_defined()) {
        throw DomainError("jackson_integral needs the integrand defined at every lattice point");
    }
    // Summed deepest-first so the small tail terms are not absorbed into a
    // large partial sum.
    double value = 0.0;
    double last_term = 0.0;
    for (int n = lat.depth - 1; n >= 0; --n) {
        double w = (1.0 - lat.q) * std::pow(lat.q, n);
        double term = lat.b * f.at(Branch::B, n);
        if (lat.has_branch(Branch::A)) term -= lat.a * f.at(Branch::A, n);
        term *= w;
        if (!std::isfinite(term)) {
            std::ostringstream os;
            os << "jackson_integral hit a non-finite summand at n=" << n;
            throw DomainError(os.str());
        }
        if (n == lat.depth - 1) last_term = std::fabs(term);
        value += term;
    }
    return JacksonResult{value, last_term};
}

double q_pochhammer(double a, double q, int n) {
    require_q(q, "q_pochhammer");
    if (n < 0) throw ParamError("q_pochhammer needs n >= 0");
    double value = 1.0;
    double qm = 1.0;
    for (int m = 0; m < n; ++m) {
        value *= 1.0 - qm * a;
        qm *= q;
    }
    return value;
}

InfProduct q_pochhammer_inf(double a, double q) {
    require_q(q, "q_pochhammer_inf");
    double value = 1.0;
    double qm = 1.0;
    int terms = 0;
    while (terms < poch_term_cap) {
        if (std::fabs(qm * a) < eps_poch) {
            return InfProduct{value, terms, true};
        }
        value *= 1.0 - qm * a;
        qm *= q;
        ++terms;
    }
    return InfProduct{value, terms, false};
}

InfProduct q_pochhammer_pair_inf(double u, double base, double s1, double s2) {
    require_q(base, "q_pochhammer_pair_inf");
    double value = 1.0;
    double p = u; // baseᵐ u
    int terms = 0;
    while (terms < poch_term_cap) {
        double lin = p * s1;
        double quad = p * p * s2;
        if (std::fabs(lin) + std::fabs(quad) < eps_poch) {
            return InfProduct{value, terms, true};
        }
        value *= 1.0 - lin + quad;
        p *= base;
        ++terms;
    }
    return InfProduct{value, terms, false};
}

TripleProductSides jacobi_triple_check(double x, double q, int K) {
    require_q(q, "jacobi_triple_check");
    if (x == 0.0) throw ParamError("jacobi_triple_check needs x != 0");
    if (K < 0) throw ParamError("jacobi_triple_check needs K >= 0");
    // Partial sums accumulate k = ±1, ±2, ... outward; q^{k²} dies fast.
    double lhs = 1.0;
    double xp = 1.0;
    double xn = 1.0;
    for (int k = 1; k <= K; ++k) {
        xp *= x;
        xn /= x;
        lhs += std::pow(q, static_cast<double>(k) * k) * (xp + xn);
    }
    double q2 = q * q;
    double rhs = q_pochhammer_inf(q2, q2).value
               * q_pochhammer_inf(-q * x, q2).value
               * q_pochhammer_inf(-q / x, q2).value;
    return TripleProductSides{lhs, rhs};
}

} // namespace qfactor
