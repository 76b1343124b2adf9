#include "qfactor/eigenstates.hpp"

#include <cmath>
#include <sstream>

#include "qfactor/oper.hpp"
#include "qfactor/qcalc.hpp"

namespace qfactor {

namespace {

double log_base_q(double u, double q) { return std::log(u) / std::log(q); }

// kappa = b₂ + (1-q)²(d₁a₀ - a₁)/((1-q^γ)qd₁), the constant deciding whether
// the x² and constant pieces of α₀ conspire to a perfect square of the
// numerator quadratic. Only meaningful for γ ≠ 0.
double kappa_const(const ChainParams& p, double q) {
    double d1 = p.d.at(1, q);
    double omq2 = (1.0 - q) * (1.0 - q);
    return p.b2 + omq2 * (d1 * p.a0 - p.a1) / ((1.0 - std::pow(q, p.gamma)) * q * d1);
}

bool kappa_vanishes(const ChainParams& p, double q) {
    double kap = kappa_const(p, q);
    double scale = std::fabs(p.b2) + std::fabs(kap - p.b2);
    return std::fabs(kap) <= 1e-12 * (scale > 0.0 ? scale : 1.0);
}

// The value A(0) entering the seed-exponent table, counted only when the
// declared drift shape pairs A₀ with the B₀ term that owns the small-x head
// in the regime at hand; otherwise the drift is subleading there.
double paired_drift(const ChainParams& p, double required_p) {
    if (p.A.empty()) return 0.0;
    if (std::fabs(p.shape_exponent() - required_p) > 1e-12) return 0.0;
    return p.A[0];
}

double xi_from_ratio(double arg, double gamma, int k, double q) {
    if (!std::isfinite(arg) || !(arg > 0.0)) {
        std::ostringstream os;
        os << "seed exponent needs a positive head ratio, got " << arg;
        throw RegimeError(os.str());
    }
    return -(gamma - 1.0) * k - 0.5 * log_base_q(arg, q);
}

void require_constraint_a1(const ChainParams& p, double q, const char* row) {
    double d1 = p.d.at(1, q);
    if (std::fabs(d1 * p.a0 - p.a1) > 1e-12 * (1.0 + std::fabs(p.a1))) {
        std::ostringstream os;
        os << "the " << row << " regime at gamma < 0 requires d_1 a_0 = a_1";
        throw RegimeError(os.str());
    }
}

double poch_value(double a, double base, const char* what) {
    InfProduct prod = q_pochhammer_inf(a, base);
    if (!prod.converged) {
        std::ostringstream os;
        os << what << " product did not converge (base " << base << ")";
        throw ConvergenceError(os.str());
    }
    return prod.value;
}

double poch_pair_value(double u, double base, double s1, double s2, const char* what) {
    InfProduct prod = q_pochhammer_pair_inf(u, base, s1, s2);
    if (!prod.converged) {
        std::ostringstream os;
        os << what << " paired product did not converge (base " << base << ")";
        throw ConvergenceError(os.str());
    }
    return prod.value;
}

// Exponent r of the pure-power factor x^r from its one-step ratio q^{-r}.
double power_exponent(double step_ratio, double q, const char* what) {
    if (!std::isfinite(step_ratio) || !(step_ratio > 0.0)) {
        std::ostringstream os;
        os << what << " needs a positive density step ratio, got " << step_ratio;
        throw RegimeError(os.str());
    }
    return -log_base_q(step_ratio, q);
}

} // namespace

const char* ground_regime_name(GroundRegime r) {
    switch (r) {
        case GroundRegime::positive_gamma_b0: return "positive_gamma_b0";
        case GroundRegime::positive_gamma_b1: return "positive_gamma_b1";
        case GroundRegime::positive_gamma_b2: return "positive_gamma_b2";
        case GroundRegime::zero_gamma: return "zero_gamma";
        case GroundRegime::negative_gamma_b2: return "negative_gamma_b2";
        case GroundRegime::negative_gamma_b1: return "negative_gamma_b1";
        case GroundRegime::negative_gamma_b0: return "negative_gamma_b0";
    }
    return "unknown";
}

const char* density_case_name(DensityCase c) {
    switch (c) {
        case DensityCase::power_gamma_zero: return "power_gamma_zero";
        case DensityCase::full_quadratic: return "full_quadratic";
        case DensityCase::cut_denominator: return "cut_denominator";
        case DensityCase::pure_numerator: return "pure_numerator";
        case DensityCase::linear_with_pole: return "linear_with_pole";
        case DensityCase::linear_cut: return "linear_cut";
        case DensityCase::theta_shift_pos: return "theta_shift_pos";
        case DensityCase::theta_shift_neg: return "theta_shift_neg";
        case DensityCase::theta_origin_pos: return "theta_origin_pos";
        case DensityCase::theta_origin_neg: return "theta_origin_neg";
        case DensityCase::pure_power: return "pure_power";
    }
    return "unknown";
}

GroundStateSpec ground_spec(const ChainParams& p, double q, int k) {
    if (!(q > 0.0 && q < 1.0)) throw ParamError("ground_spec needs 0 < q < 1");
    if (k < 0) throw ParamError("ground_spec needs k >= 0");
    const double gm = p.gamma;
    const double h = resolved_h(p, q);
    const double d1 = p.d.at(1, q);
    const double omq2 = (1.0 - q) * (1.0 - q);

    // Head ratio: the limit of η₀ / ((1-q)²x²α₀) as x -> 0. Which closed form
    // it takes depends on the lowest exponent present in B₀, hence on the
    // sign of γ and on which coefficients vanish.
    auto b0_row = [&]() {
        double drift = paired_drift(p, 1.0 - 2.0 * gm);
        return std::pow(q, gm - 1.0) * (1.0 - (1.0 - q) * drift / p.b0);
    };
    auto b1_row = [&]() {
        double drift = paired_drift(p, 1.0 - gm);
        return (p.b1 - (1.0 - q) * drift) / (omq2 * h);
    };
    auto b2_row = [&]() {
        double drift = paired_drift(p, 1.0);
        double denom = std::pow(q, gm + 1.0) * p.b2
                     + (1.0 - q) * std::pow(q, gm) * (d1 * p.a0 - p.a1) / (q_bracket(gm, q) * d1);
        return (p.b2 - (1.0 - q) * drift) / denom;
    };

    GroundRegime regime;
    double arg;
    if (gm == 0.0) {
        double drift = paired_drift(p, 1.0);
        regime = GroundRegime::zero_gamma;
        arg = (p.b2 + p.b1 + p.b0 - (1.0 - q) * drift) / (omq2 * h);
    } else if (gm > 0.0) {
        if (p.b0 != 0.0) {
            regime = GroundRegime::positive_gamma_b0;
            arg = b0_row();
        } else if (p.b1 != 0.0 && h != 0.0) {
            regime = GroundRegime::positive_gamma_b1;
            arg = b1_row();
        } else if (p.b1 == 0.0 && h == 0.0 && p.b2 != 0.0) {
            regime = GroundRegime::positive_gamma_b2;
            arg = b2_row();
        } else {
            throw RegimeError("no seed-exponent regime for gamma > 0: need b0 != 0, "
                              "or b0 = 0 with b1 and h nonzero, or only b2 nonzero");
        }
    } else {
        if (p.b2 != 0.0) {
            regime = GroundRegime::negative_gamma_b2;
            arg = b2_row();
        } else if (p.b1 != 0.0 && h != 0.0) {
            require_constraint_a1(p, q, "b1");
            regime = GroundRegime::negative_gamma_b1;
            arg = b1_row();
        } else if (p.b1 == 0.0 && h == 0.0 && p.b0 != 0.0) {
            require_constraint_a1(p, q, "b0");
            regime = GroundRegime::negative_gamma_b0;
            arg = b0_row();
        } else {
            throw RegimeError("no seed-exponent regime for gamma < 0: need b2 != 0, "
                              "or b2 = 0 with b1 and h nonzero, or only b0 nonzero");
        }
    }
    return GroundStateSpec{k, regime, xi_from_ratio(arg, gm, k, q)};
}

EigenPair ground_state(const Chain& chain, int k) {
    const ChainParams& p = chain.params();
    const QLattice& lat = chain.lattice();
    const double q = lat.q;
    if (k < 0) throw ParamError("ground_state needs k >= 0");
    if (k + 1 > p.max_k) {
        throw ParamError("ground_state reports the second-order residual, which needs "
                         "one level of headroom: k + 1 <= max_k");
    }
    GroundStateSpec spec = ground_spec(p, q, k);

    const double qgk = std::pow(q, p.gamma * k);
    const double qmk = std::pow(q, -static_cast<double>(k));
    // One outward step of the lowering equation: ψ(x) = step(x) ψ(qx).
    auto step = [&](double x) {
        double eta = chain.eta0(qmk * x);
        double alpha = chain.alpha0(qmk * x);
        if (alpha == 0.0) {
            std::ostringstream os;
            os << "ground state recursion hit alpha0 = 0 at x=" << x;
            throw DomainError(os.str());
        }
        double rad = eta / alpha;
        if (rad < 0.0) {
            std::ostringstream os;
            os << "ground state recursion needs eta0/alpha0 >= 0, got " << rad << " at x=" << x;
            throw SqrtDomainError(os.str());
        }
        return qgk * std::sqrt(rad) / ((1.0 - q) * x);
    };

    LatticeFn psi(lat);
    const double qxi = std::pow(q, spec.xi);
    for (Branch br : lat.branches()) {
        const int last = lat.depth - 1;
        const double xd = lat.point(br, last);
        // Seed the deepest point with the full product x^ξ · Π q^ξ step(qⁿx);
        // ξ is exactly the exponent that drives the factors to 1, so the tail
        // converges geometrically whenever the regime fits the parameters.
        double tail = 1.0;
        double x = xd;
        int settled = 0;
        for (int n = 0; n < poch_term_cap && settled < 2; ++n) {
            double factor = qxi * step(x);
            tail *= factor;
            x *= q;
            settled = std::fabs(factor - 1.0) < 1e-15 ? settled + 1 : 0;
        }
        if (settled < 2 || !std::isfinite(tail)) {
            throw RegimeError("ground state seed product does not settle at 1; the "
                              "parameters sit outside the declared regime");
        }
        psi.set(br, last, std::pow(xd, spec.xi) * tail);
        for (int m = last - 1; m >= 0; --m) {
            psi.set(br, m, step(lat.point(br, m)) * psi.at(br, m + 1));
        }
    }

    // Scale to unit weighted norm when the truncated norm is trustworthy:
    // every term finite and the geometric remainder estimate negligible.
    // Otherwise the seed scale is kept (the state may not be normalizable).
    double norm2 = 0.0;
    double remainder = 0.0;
    bool usable = true;
    for (Branch br : lat.branches()) {
        double head = lat.head(br);
        double prev = 0.0;
        double term = 0.0;
        for (int n = 0; n < lat.depth && usable; ++n) {
            double v = psi.at(br, n);
            double rho = chain.rhok(k, lat.point(br, n));
            prev = term;
            term = (1.0 - q) * std::pow(q, n) * head * v * v * rho;
            if (!std::isfinite(term) || term < 0.0) usable = false;
            norm2 += term;
        }
        if (!usable) break;
        double ratio = prev > 0.0 ? std::min(term / prev, 0.999) : q;
        remainder += term * ratio / (1.0 - ratio);
    }
    if (usable && norm2 > 0.0 && remainder < 1e-6 * norm2) {
        double scale = 1.0 / std::sqrt(norm2);
        for (Branch br : lat.branches())
            for (int n = 0; n < lat.depth; ++n) psi.set(br, n, scale * psi.at(br, n));
    }

    double lambda = chain.a(k);
    double res = eigen_residual(chain, k, psi, lambda);
    return EigenPair{k, 0, lambda, std::move(psi), res};
}

EigenPair ladder_up(const Chain& chain, int k, int n) {
    if (k < 0 || k > chain.params().max_k) throw ParamError("ladder level k outside [0, max_k]");
    if (n < 0 || n > k) {
        std::ostringstream os;
        os << "ladder height n=" << n << " must satisfy 0 <= n <= k=" << k;
        throw ParamError(os.str());
    }
    EigenPair out = ground_state(chain, k - n);
    for (int j = k - n + 1; j <= k; ++j) {
        out.psi = create(chain.level(j), out.psi);
        out.lambda *= chain.d(j);
    }
    out.k = k;
    out.n = n;
    out.residual = eigen_residual(chain, k, out.psi, out.lambda, n + 1);
    return out;
}

LatticeFn ladder_down(const Chain& chain, int k, int n, const LatticeFn& psi) {
    if (k < 0 || k > chain.params().max_k) throw ParamError("ladder level k outside [0, max_k]");
    if (n < 0 || n > k) {
        std::ostringstream os;
        os << "ladder height n=" << n << " must satisfy 0 <= n <= k=" << k;
        throw ParamError(os.str());
    }
    LatticeFn out = psi;
    for (int j = k; j > k - n; --j) out = annihilate(chain.level(j), out);
    return out;
}

double eigen_residual(const Chain& chain, int k, const LatticeFn& psi, double lambda,
                      int head_skip) {
    const QLattice& lat = chain.lattice();
    if (psi.lattice() != lat) throw ParamError("eigen_residual needs psi on the chain's lattice");
    if (head_skip < 1) throw ParamError("eigen_residual needs head_skip >= 1");
    const double q = lat.q;
    LatticeFn hpsi = apply_hamiltonian(chain, k, psi);
    // Branch-positive Jackson weights; the defect is measured on interior
    // rows only, since the second-order stencil truncates at the branch head
    // and has no forward neighbour at the deepest point. A state produced by
    // m raising steps inherits the head truncation at its first m rows, so
    // its defect is meaningful from row m+1 on; head_skip widens the excluded
    // band accordingly. Undefined rows (a reindexed state loses a band at
    // one end of each branch) drop out of both norms.
    double num = 0.0;
    double den = 0.0;
    for (Branch br : lat.branches()) {
        double head = lat.head(br);
        for (int n = 0; n < lat.depth; ++n) {
            if (!psi.defined(br, n)) continue;
            double w = (1.0 - q) * std::pow(q, n) * head;
            double rho = chain.rhok(k, lat.point(br, n));
            double v = psi.at(br, n);
            den += w * v * v * rho;
            if (n < head_skip || n == lat.depth - 1) continue;
            if (!hpsi.defined(br, n)) continue;
            double r = hpsi.at(br, n) - lambda * v;
            num += w * r * r * rho;
        }
    }
    if (!(den > 0.0) || !std::isfinite(den)) {
        throw DomainError("eigen residual needs a positive finite reference norm");
    }
    return std::sqrt(num / den);
}

DensityCase classify_density_case(const ChainParams& p, double q) {
    if (!(q > 0.0 && q < 1.0)) throw ParamError("density classification needs 0 < q < 1");
    if (p.gamma == 0.0) return DensityCase::power_gamma_zero;
    const double h = resolved_h(p, q);
    const bool kz = kappa_vanishes(p, q);
    if (p.b0 != 0.0 && p.b2 != 0.0) {
        if (!kz) return DensityCase::full_quadratic;
        if (h != 0.0) return DensityCase::cut_denominator;
        return DensityCase::pure_numerator;
    }
    if (p.b0 == 0.0 && p.b1 != 0.0 && p.b2 != 0.0 && h != 0.0) {
        return kz ? DensityCase::linear_cut : DensityCase::linear_with_pole;
    }
    if (p.b0 == 0.0 && h == 0.0 && p.b1 != 0.0 && p.b2 != 0.0 && !kz) {
        return p.b1 / kappa_const(p, q) > 0.0 ? DensityCase::theta_shift_pos
                                              : DensityCase::theta_shift_neg;
    }
    if (p.b0 == 0.0 && p.b1 == 0.0 && p.b2 != 0.0 && h != 0.0 && !kz) {
        return p.b2 / h > 0.0 ? DensityCase::theta_origin_pos
                              : DensityCase::theta_origin_neg;
    }
    if (p.b0 == 0.0 && p.b1 == 0.0 && h == 0.0 && p.b2 != 0.0 && !kz) {
        return DensityCase::pure_power;
    }
    std::ostringstream os;
    os << "no density case matches: b0 " << (p.b0 != 0.0 ? "nonzero" : "zero")
       << ", b1 " << (p.b1 != 0.0 ? "nonzero" : "zero")
       << ", b2 " << (p.b2 != 0.0 ? "nonzero" : "zero")
       << ", h " << (h != 0.0 ? "nonzero" : "zero")
       << ", kappa " << (kz ? "zero" : "nonzero");
    throw RegimeError(os.str());
}

LatticeFn density_closed_form(const Chain& chain, int k, DensityCase c) {
    const ChainParams& p = chain.params();
    const QLattice& lat = chain.lattice();
    const double q = lat.q;
    if (k < 0 || k > p.max_k) throw ParamError("density level k outside [0, max_k]");
    DensityCase expected = classify_density_case(p, q);
    if (expected != c) {
        std::ostringstream os;
        os << "density case " << density_case_name(c) << " requested, but the parameters "
           << "classify as " << density_case_name(expected);
        throw ParamError(os.str());
    }

    const double gm = p.gamma;
    const double h = resolved_h(p, q);
    const double omq2 = (1.0 - q) * (1.0 - q);
    const double base = std::pow(q, gm);
    const double qmk = std::pow(q, -static_cast<double>(k));
    const double kap = kappa_const(p, q);

    if (c == DensityCase::power_gamma_zero) {
        if (h == 0.0) throw RegimeError("the gamma = 0 power density needs h != 0");
        double r = power_exponent(q * q * (p.b2 + p.b1 + p.b0) / (omq2 * h), q,
                                  "gamma = 0 density");
        return LatticeFn::sample(lat, [r](double x) { return std::pow(x, r); });
    }

    // Reciprocal-root sums of the numerator quadratic b₂t² + b₁t + b₀ and of
    // the denominator quadric q^{2γ}kappa·t² + (1-q)²q^{γ-1}h·t + b₀, used by
    // the paired products so complex root pairs need no special casing.
    auto sample = [&](const std::function<double(double)>& f) { return LatticeFn::sample(lat, f); };

    switch (c) {
        case DensityCase::full_quadratic: {
            double s1n = -p.b1 / p.b0, s2n = p.b2 / p.b0;
            double s1d = -omq2 * std::pow(q, gm - 1.0) * h / p.b0;
            double s2d = std::pow(q, 2.0 * gm) * kap / p.b0;
            return sample([&](double x) {
                double u = std::pow(q * x, gm), v = std::pow(qmk * x, gm);
                double num = poch_pair_value(u, base, s1n, s2n, "density numerator");
                double den = poch_pair_value(v, base, s1d, s2d, "density denominator");
                if (den == 0.0) throw DomainError("density closed form hit a denominator zero");
                return std::pow(x, gm - 1.0) * num / den;
            });
        }
        case DensityCase::cut_denominator: {
            double s1n = -p.b1 / p.b0, s2n = p.b2 / p.b0;
            double y1 = -p.b0 / (omq2 * std::pow(q, gm - 1.0) * h);
            return sample([&](double x) {
                double u = std::pow(q * x, gm), v = std::pow(qmk * x, gm);
                double num = poch_pair_value(u, base, s1n, s2n, "density numerator");
                double den = poch_value(v / y1, base, "density denominator");
                if (den == 0.0) throw DomainError("density closed form hit a denominator zero");
                return std::pow(x, gm - 1.0) * num / den;
            });
        }
        case DensityCase::pure_numerator: {
            double s1n = -p.b1 / p.b0, s2n = p.b2 / p.b0;
            return sample([&](double x) {
                double u = std::pow(q * x, gm);
                return std::pow(x, gm - 1.0)
                     * poch_pair_value(u, base, s1n, s2n, "density numerator");
            });
        }
        case DensityCase::linear_with_pole:
        case DensityCase::linear_cut: {
            double x1 = -p.b1 / p.b2;
            double r = power_exponent(
                std::fabs(std::pow(q, 2.0 + gm * (k - 1.0)) * p.b1 / (omq2 * h)), q,
                "linear density");
            if (c == DensityCase::linear_cut) {
                return sample([&, r, x1](double x) {
                    double u = std::pow(q * x, gm);
                    return std::pow(x, r) * poch_value(u / x1, base, "density numerator");
                });
            }
            double y1 = -omq2 * std::pow(q, gm - 1.0) * h / (std::pow(q, 2.0 * gm) * kap);
            return sample([&, r, x1, y1](double x) {
                double u = std::pow(q * x, gm), v = std::pow(qmk * x, gm);
                double den = poch_value(v / y1, base, "density denominator");
                if (den == 0.0) throw DomainError("density closed form hit a denominator zero");
                return std::pow(x, r) * poch_value(u / x1, base, "density numerator") / den;
            });
        }
        case DensityCase::theta_shift_pos:
        case DensityCase::theta_shift_neg: {
            double x1 = -p.b1 / p.b2;
            double ratio = std::pow(q, gm * k + 1.0) * p.b1 / (std::pow(q, 2.0 * gm) * kap);
            bool pos = c == DensityCase::theta_shift_pos;
            double r = power_exponent(pos ? ratio : -ratio, q, "theta density");
            return sample([&, r, x1, pos](double x) {
                double u = std::pow(q * x, gm), v = std::pow(qmk * x, gm);
                double den = pos
                    ? poch_value(-v, base, "density theta") * poch_value(-base / v, base, "density theta")
                    : poch_value(v, base, "density theta") * poch_value(base / v, base, "density theta");
                if (den == 0.0) throw DomainError("density closed form hit a denominator zero");
                return std::pow(x, r) * poch_value(u / x1, base, "density numerator") / den;
            });
        }
        case DensityCase::theta_origin_pos:
        case DensityCase::theta_origin_neg: {
            double y1 = -omq2 * std::pow(q, gm - 1.0) * h / (std::pow(q, 2.0 * gm) * kap);
            double ratio = std::pow(q, 2.0 + k * gm) * p.b2 / (omq2 * h);
            bool pos = c == DensityCase::theta_origin_pos;
            double r = power_exponent(pos ? ratio : -ratio, q, "theta density");
            return sample([&, r, y1, pos](double x) {
                double u0 = std::pow(x, gm), v = std::pow(qmk * x, gm);
                double num = pos
                    ? poch_value(-u0, base, "density theta") * poch_value(-base / u0, base, "density theta")
                    : poch_value(u0, base, "density theta") * poch_value(base / u0, base, "density theta");
                double den = poch_value(v / y1, base, "density denominator");
                if (den == 0.0) throw DomainError("density closed form hit a denominator zero");
                return std::pow(x, r) * num / den;
            });
        }
        case DensityCase::pure_power: {
            double r = power_exponent(
                std::fabs(std::pow(q, 1.0 - gm + 2.0 * k * gm) * p.b2 / kap), q,
                "pure power density");
            return sample([r](double x) { return std::pow(x, r); });
        }
        case DensityCase::power_gamma_zero:
            break; // handled above
    }
    throw ParamError("unhandled density case");
}

Membership membership(const ChainParams& p, double q, int k) {
    if (k < 0) throw ParamError("membership needs k >= 0");
    DensityCase c = classify_density_case(p, q);
    const double gm = p.gamma;
    const double h = resolved_h(p, q);
    const double omq2 = (1.0 - q) * (1.0 - q);
    bool in = false;
    if (gm == 0.0) {
        double s = p.b2 + p.b1 + p.b0;
        if (s == 0.0) throw RegimeError("gamma = 0 membership needs b2 + b1 + b0 != 0");
        in = h / s < q / omq2;
    } else if (gm < 0.0) {
        in = false;
    } else {
        switch (c) {
            case DensityCase::full_quadratic:
            case DensityCase::cut_denominator:
            case DensityCase::pure_numerator:
            case DensityCase::theta_shift_pos:
            case DensityCase::theta_shift_neg:
                in = true;
                break;
            case DensityCase::linear_with_pole:
            case DensityCase::linear_cut:
                in = h / p.b1 < std::pow(q, 1.0 + gm * (k - 1.0)) / omq2;
                break;
            case DensityCase::theta_origin_pos:
            case DensityCase::theta_origin_neg:
                in = false;
                break;
            case DensityCase::pure_power: {
                double d1 = p.d.at(1, q);
                double lhs = (d1 * p.a0 - p.a1) / (q * d1 * p.b2);
                double rhs = (1.0 - std::pow(q, gm))
                           * (std::pow(q, gm * (2.0 * k - 1.0)) - 1.0) / omq2;
                in = lhs < rhs;
                break;
            }
            case DensityCase::power_gamma_zero:
                break; // unreachable: gm != 0 here
        }
    }
    return Membership{in, c};
}

bool summability_heuristic(const Chain& chain, int k, int probe_depth) {
    if (probe_depth < 8) throw ParamError("summability probe needs probe_depth >= 8");
    if (k < 0) throw ParamError("summability probe needs k >= 0");
    const QLattice& lat = chain.lattice();
    const double q = lat.q;
    const double gm = chain.params().gamma;
    const double scale = std::pow(q, 2.0 * gm * k);
    const double qmk = std::pow(q, -static_cast<double>(k));
    const double omq2 = (1.0 - q) * (1.0 - q);
    const double logq = std::log(q);
    for (Branch br : lat.branches()) {
        const double y = lat.head(br);
        double logdens = 0.0; // per-branch offset is irrelevant to the slopes
        double shallow = -HUGE_VAL;
        double deep = -HUGE_VAL;
        double x = y;
        for (int n = 0; n < 2 * probe_depth; ++n) {
            double t = std::log((1.0 - q) * y) + n * logq + logdens;
            if (n < probe_depth) {
                shallow = std::max(shallow, t);
            } else {
                deep = std::max(deep, t);
            }
            double alpha = chain.alpha0(qmk * x);
            double factor = scale * chain.B0(q * x) / (omq2 * x * x * alpha);
            if (factor == 0.0 || !std::isfinite(factor)) {
                std::ostringstream os;
                os << "density recursion factor is " << factor << " at x=" << x;
                throw DomainError(os.str());
            }
            logdens -= std::log(std::fabs(factor));
            x *= q;
        }
        if (!(deep <= shallow - std::log(10.0))) return false;
    }
    return true;
}

} // namespace qfactor
