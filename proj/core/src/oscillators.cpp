#include "qfactor/oscillators.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qfactor/oper.hpp"
#include "qfactor/qcalc.hpp"

namespace qfactor {

namespace {

void require_q(double q, const char* who) {
    if (!(q > 0.0 && q < 1.0)) {
        std::ostringstream os;
        os << who << " needs q in (0,1), got q=" << q;
        throw ParamError(os.str());
    }
}

// Constant part of the f₀ radicand: q²(q⁻¹a₀−a₁)/(1−q) for the harmonic
// case, q⁴(q⁻²a₀−a₁)/(1−q²) for the isotropic one. The ground-state factor
// families are built from this number.
double radicand_constant(const OscillatorCase& c, double q) {
    if (c.variant == OscVariant::harmonic) return q * (c.a0 - q * c.a1) / (1.0 - q);
    return q * q * (c.a0 - q * q * c.a1) / (1.0 - q * q);
}

// Q^m as exponent reindexing: row j of the result reads row j+m of f, and
// rows whose source falls outside the truncation stay undefined.
LatticeFn reindex_rows(const LatticeFn& f, int m) {
    const QLattice& lat = f.lattice();
    LatticeFn out(lat);
    for (Branch br : lat.branches()) {
        int size = lat.branch_size(br);
        for (int j = 0; j < size; ++j) {
            int src = j + m;
            if (src >= 0 && src < size && f.defined(br, src)) {
                out.set(br, j, f.at(br, src));
            } else {
                out.set_undefined(br, j);
            }
        }
    }
    return out;
}

// One raising step of the isotropic ladder in its closed radical form,
//   (A*_i ψ)(x) = (q^{-i}(1−q)√h √(1 + (c/h)q^{-2i}x²) ψ(x) − ψ(x/q)) / ((1−q)x).
// The Q⁻¹ boundary rule zeroes the shifted term at the branch heads, matching
// the shift form of the general raising operator.
LatticeFn iso_raise_step(const OscillatorCase& c, const QLattice& lat, int i,
                         const LatticeFn& psi) {
    double q = lat.q;
    double cc = radicand_constant(c, q);
    double qi = std::pow(q, -static_cast<double>(i));
    LatticeFn shifted = shift_q_inv(psi);
    LatticeFn out(lat);
    for (Branch br : lat.branches()) {
        for (int n = 0; n < lat.branch_size(br); ++n) {
            if (!psi.defined(br, n) || !shifted.defined(br, n)) {
                out.set_undefined(br, n);
                continue;
            }
            double x = lat.point(br, n);
            double rad = 1.0 + (cc / c.h) * qi * qi * x * x;
            if (rad < 0.0) {
                std::ostringstream os;
                os << "raising step radicand " << rad << " at x=" << x << ", level " << i;
                throw SqrtDomainError(os.str());
            }
            double mult = qi * (1.0 - q) * std::sqrt(c.h) * std::sqrt(rad);
            out.set(br, n, (mult * psi.at(br, n) - shifted.at(br, n)) / ((1.0 - q) * x));
        }
    }
    return out;
}

// f_k sampled from the closed forms: q^{-k}f₀(q^{-k}x) for the harmonic
// case, q^{-2k}f₀(q^{-k}x) − (1−q^{-k})/((1−q)x) for the isotropic one.
LatticeFn closed_potential(const OscillatorCase& c, const QLattice& lat, int k) {
    double q = lat.q;
    double qk = std::pow(q, -static_cast<double>(k));
    return LatticeFn::sample(lat, [&](double x) {
        if (c.variant == OscVariant::harmonic) return qk * c.f0(q, qk * x);
        return qk * qk * c.f0(q, qk * x) - (1.0 - qk) / ((1.0 - q) * x);
    });
}

// Largest |lhs − rhs| over the rows where both sides are defined, the head
// row excluded: the Q⁻¹ boundary rule truncates real data there on one side
// of a relation but not the other.
double interior_max_diff(const LatticeFn& lhs, const LatticeFn& rhs) {
    const QLattice& lat = lhs.lattice();
    double out = 0.0;
    for (Branch br : lat.branches()) {
        for (int n = 1; n < lat.branch_size(br); ++n) {
            if (!lhs.defined(br, n) || !rhs.defined(br, n)) continue;
            out = std::max(out, std::fabs(lhs.at(br, n) - rhs.at(br, n)));
        }
    }
    return out;
}

} // namespace

const char* osc_variant_name(OscVariant v) {
    switch (v) {
        case OscVariant::harmonic: return "harmonic";
        case OscVariant::isotropic_3d: return "isotropic_3d";
    }
    throw ParamError("unknown oscillator variant");
}

ChainParams OscillatorCase::chain_params() const {
    ChainParams p;
    if (variant == OscVariant::harmonic) {
        p.gamma = 1.0;
        p.b0 = 1.0;
        p.d = DRule::q_power(-1.0);
    } else {
        p.gamma = 2.0;
        p.b1 = 1.0;
        p.d = DRule::q_power(-2.0);
    }
    p.h = h;
    p.a0 = a0;
    p.a1 = a1;
    p.A = {};
    return p;
}

double OscillatorCase::f0(double q, double x) const {
    require_q(q, "f0");
    if (!(x > 0.0)) {
        std::ostringstream os;
        os << "f0 needs x > 0, got x=" << x;
        throw ParamError(os.str());
    }
    double one_m_q = 1.0 - q;
    double rad = radicand_constant(*this, q);
    if (variant == OscVariant::harmonic) {
        rad += h / x + 1.0 / (one_m_q * one_m_q * x * x);
    } else {
        rad += h / (x * x);
    }
    if (rad < 0.0) {
        std::ostringstream os;
        os << "superpotential radicand " << rad << " at x=" << x << " is negative";
        throw SqrtDomainError(os.str());
    }
    return std::sqrt(rad) - 1.0 / (one_m_q * x);
}

EigenPair osc_ground(const OscillatorCase& c, const QLattice& lat, int k) {
    if (k < 0) throw ParamError("osc_ground needs k >= 0");
    double q = lat.q;
    ChainParams params = c.chain_params();
    params.max_k = k + 1;
    Chain chain(params, lat);

    LatticeFn psi(lat);
    double qk = std::pow(q, -static_cast<double>(k));
    if (c.variant == OscVariant::harmonic) {
        // ψ ∝ 1/√(P(q^{-k}x)) with P(y) = Π g(qᵐy) over the quadratic
        // g(y) = 1 + (1−q)²hy + (1−q)q(a₀−qa₁)y², the factor families of the
        // two roots of g taken as one real product.
        double s1 = -(1.0 - q) * (1.0 - q) * c.h;
        double s2 = (1.0 - q) * q * (c.a0 - q * c.a1);
        for (Branch br : lat.branches()) {
            for (int n = 0; n < lat.branch_size(br); ++n) {
                InfProduct prod = q_pochhammer_pair_inf(qk * lat.point(br, n), q, s1, s2);
                if (!prod.converged) {
                    throw ConvergenceError("harmonic ground product did not converge");
                }
                if (!(prod.value > 0.0)) {
                    std::ostringstream os;
                    os << "harmonic ground product " << prod.value << " at x="
                       << lat.point(br, n) << " is not positive";
                    throw SqrtDomainError(os.str());
                }
                psi.set(br, n, 1.0 / std::sqrt(prod.value));
            }
        }
    } else {
        // ψ ∝ x^{ξ_k}/√(T_k(x)) with T_k(x) = (−(c/h)q^{-2k}x²; q²)_∞; one
        // lattice step scales x² by q², hence the base q².
        if (!(c.h > 0.0)) {
            throw RegimeError("the isotropic ground form needs h > 0");
        }
        double cc = radicand_constant(c, q);
        double xi = -static_cast<double>(k)
                  + std::log((1.0 - q) * std::sqrt(c.h)) / std::log(q);
        for (Branch br : lat.branches()) {
            for (int n = 0; n < lat.branch_size(br); ++n) {
                double x = lat.point(br, n);
                InfProduct prod = q_pochhammer_inf(-(cc / c.h) * qk * qk * x * x, q * q);
                if (!prod.converged) {
                    throw ConvergenceError("isotropic ground product did not converge");
                }
                if (!(prod.value > 0.0)) {
                    std::ostringstream os;
                    os << "isotropic ground product " << prod.value << " at x=" << x
                       << " is not positive";
                    throw SqrtDomainError(os.str());
                }
                psi.set(br, n, std::pow(x, xi) / std::sqrt(prod.value));
            }
        }
    }

    // Unit weighted norm on the truncated lattice; ρ_k ≡ 1 for both cases,
    // so the weight is the bare branch-positive Jackson measure.
    double norm2 = 0.0;
    for (Branch br : lat.branches()) {
        double head = lat.head(br);
        for (int n = 0; n < lat.branch_size(br); ++n) {
            double v = psi.at(br, n);
            norm2 += (1.0 - q) * std::pow(q, n) * head * v * v;
        }
    }
    if (norm2 > 0.0 && std::isfinite(norm2)) {
        double scale = 1.0 / std::sqrt(norm2);
        for (Branch br : lat.branches())
            for (int n = 0; n < lat.branch_size(br); ++n) psi.set(br, n, scale * psi.at(br, n));
    }

    double lambda = chain.a(k);
    double res = eigen_residual(chain, k, psi, lambda);
    return EigenPair{k, 0, lambda, std::move(psi), res};
}

double CommutationDeviations::max_deviation() const {
    return std::max(std::max(raise_down, raise_up), std::max(lower_down, lower_up));
}

CommutationDeviations commutation_check(const OscillatorCase& c, const QLattice& lat,
                                        int k, const LatticeFn& psi) {
    if (k < 1) throw ParamError("commutation_check needs k >= 1");
    if (psi.lattice() != lat) {
        throw ParamError("commutation_check needs psi on the given lattice");
    }
    double q = lat.q;
    LatticeFn pot_prev = closed_potential(c, lat, k - 1);
    LatticeFn pot = closed_potential(c, lat, k);
    LatticeFn pot_next = closed_potential(c, lat, k + 1);
    auto lower = [](const LatticeFn& w, const LatticeFn& g) { return q_derivative(g) + w * g; };
    auto raise = [](const LatticeFn& w, const LatticeFn& g) {
        return w * g - q_derivative(shift_q_inv(g));
    };
    LatticeFn down = shift_q_inv(psi);
    LatticeFn up = shift_q(psi);
    CommutationDeviations dev;
    dev.raise_down = interior_max_diff(q * raise(pot, down), shift_q_inv(raise(pot_prev, psi)));
    dev.raise_up = interior_max_diff(raise(pot, up), q * shift_q(raise(pot_next, psi)));
    dev.lower_down = interior_max_diff(q * lower(pot, down), shift_q_inv(lower(pot_prev, psi)));
    dev.lower_up = interior_max_diff(lower(pot, up), q * shift_q(lower(pot_next, psi)));
    return dev;
}

double osc_spectrum(const OscillatorCase& c, double q, int k, int n) {
    require_q(q, "osc_spectrum");
    if (k < 0 || n < 0) throw ParamError("osc_spectrum needs k >= 0 and n >= 0");
    double diff = static_cast<double>(k) - n;
    if (c.variant == OscVariant::harmonic) {
        return std::pow(q, n - 2.0 * k)
             * (c.a0 + (q * q * c.a1 - c.a0) * q_bracket(diff, q));
    }
    if (n > k) {
        std::ostringstream os;
        os << "the isotropic ladder stops at n = k, got n=" << n << ", k=" << k;
        throw ParamError(os.str());
    }
    double q4 = q * q * q * q;
    return std::pow(q, -2.0 * (2.0 * k - n))
         * (c.a0 + (q4 * c.a1 - c.a0) * q_bracket(2.0 * diff, q) / q_bracket(2.0, q));
}

OscState osc_state(const OscillatorCase& c, const QLattice& lat, int k, int n) {
    if (k < 0 || n < 0) throw ParamError("osc_state needs k >= 0 and n >= 0");
    if (n == 0) return OscState{osc_ground(c, lat, k), true};
    double q = lat.q;
    double lambda = osc_spectrum(c, q, k, n);

    ChainParams params = c.chain_params();
    params.max_k = std::max(k, n) + 1;
    Chain chain(params, lat);

    if (c.variant == OscVariant::harmonic) {
        double gap = c.a0 - q * c.a1;
        if (gap < 0.0) {
            std::ostringstream os;
            os << "the ladder normalization needs a0 >= q a1, got a0 - q a1 = " << gap;
            throw SqrtDomainError(os.str());
        }
        LatticeFn psi = osc_ground(c, lat, 0).psi;
        for (int j = 1; j <= n; ++j) psi = create(chain.level(j), psi);
        psi = reindex_rows(psi, n - k);
        bool normalized = gap > 0.0;
        if (normalized) {
            double fact = 1.0;
            for (int j = 1; j <= n; ++j) fact *= q_bracket(j, q);
            psi = (1.0 / std::sqrt(std::pow(gap, n) * fact
                                   * std::pow(q, static_cast<double>(n) * (n - 1) + k)))
                * psi;
        }
        // The raising product leaves truncated data in the first n rows and
        // the reindexing moves that band to the first k rows on either sign
        // of n − k, so the defect is scored from row k + 1 on.
        double res = eigen_residual(chain, k, psi, lambda, k + 1);
        return OscState{EigenPair{k, n, lambda, std::move(psi), res}, normalized};
    }

    LatticeFn psi = osc_ground(c, lat, k - n).psi;
    for (int i = k - n + 1; i <= k; ++i) psi = iso_raise_step(c, lat, i, psi);
    double res = eigen_residual(chain, k, psi, lambda, n + 1);
    return OscState{EigenPair{k, n, lambda, std::move(psi), res}, true};
}

} // namespace qfactor
