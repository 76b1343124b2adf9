#include "qfactor/chain.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "qfactor/qcalc.hpp"

namespace qfactor {

DRule DRule::q_power(double exponent) {
    DRule r;
    r.kind = Kind::q_power;
    r.value = exponent;
    return r;
}

DRule DRule::constant(double v) {
    DRule r;
    r.kind = Kind::constant;
    r.value = v;
    return r;
}

DRule DRule::list(std::vector<double> v) {
    DRule r;
    r.kind = Kind::list;
    r.values = std::move(v);
    return r;
}

double DRule::at(int k, double q) const {
    if (k < 1) throw ParamError("d_k is indexed from k = 1");
    switch (kind) {
        case Kind::q_power: return std::pow(q, value);
        case Kind::constant: return value;
        case Kind::list:
            if (k > static_cast<int>(values.size())) {
                std::ostringstream os;
                os << "d_k list has " << values.size() << " entries, k=" << k << " requested";
                throw ParamError(os.str());
            }
            return values[static_cast<size_t>(k - 1)];
    }
    throw ParamError("unknown d_k rule");
}

double ChainParams::shape_exponent() const {
    switch (shape) {
        case A0Shape::x_pow_1_minus_2gamma: return 1.0 - 2.0 * gamma;
        case A0Shape::x_pow_1_minus_gamma: return 1.0 - gamma;
        case A0Shape::x_pow_1: return 1.0;
    }
    throw ParamError("unknown A0 shape");
}

Chain::Chain(ChainParams params, QLattice lat)
    : params_(std::move(params)), lat_(lat), h_(params_.h) {
    double q = lat_.q;
    if (params_.max_k < 0) throw ParamError("max_k must be >= 0");
    for (int k = 1; k <= params_.max_k + 1; ++k) {
        if (!(params_.d.at(k, q) > 0.0)) {
            std::ostringstream os;
            os << "factorization constants must be positive, d_" << k << " = " << params_.d.at(k, q);
            throw ParamError(os.str());
        }
    }
    h_ = resolved_h(params_, q);
    if (params_.gamma == 0.0) {
        double d1 = params_.d.at(1, q);
        if (std::fabs(d1 * params_.a0 - params_.a1) > 1e-12 * (1.0 + std::fabs(params_.a1))) {
            throw ParamError("gamma = 0 (constant alpha0) requires d_1 a_0 = a_1");
        }
    }
    resolve_head_behaviour();
}

void Chain::resolve_head_behaviour() {
    // B₀(x) -> head_coeff · x^head_exponent as x -> 0. The three exponents
    // only coincide at γ = 0, where the coefficients add up.
    struct Term {
        double exp;
        double coeff;
    };
    Term terms[3] = {
        {2.0, params_.b2},
        {2.0 - params_.gamma, params_.b1},
        {2.0 - 2.0 * params_.gamma, params_.b0},
    };
    bool found = false;
    double e = 0.0;
    for (const Term& t : terms) {
        if (t.coeff == 0.0) continue;
        if (!found || t.exp < e - 1e-12) {
            e = t.exp;
            found = true;
        }
    }
    if (!found) throw ParamError("B0 must have at least one nonzero coefficient");
    double c = 0.0;
    for (const Term& t : terms) {
        if (t.coeff != 0.0 && std::fabs(t.exp - e) <= 1e-12) c += t.coeff;
    }
    head_exponent_ = e;
    head_coeff_ = c;

    // η₀ = B₀ - (1-q)x A₀ shares the head exponent exactly when the A₀ shape
    // pairs with the head term of B₀ (1 + p = e); otherwise the A₀ part is
    // subleading and does not perturb the head coefficient.
    double head_a = 0.0;
    if (!params_.A.empty() && std::fabs(1.0 + params_.shape_exponent() - e) <= 1e-12) {
        head_a = params_.A[0];
    }
    double eta_head = c - (1.0 - lat_.q) * head_a;
    if (!(eta_head > 0.0) || !(c * eta_head > 0.0)) {
        std::ostringstream os;
        os << "weight regularization needs a positive head ratio, got B0 head " << c
           << " and eta0 head " << eta_head;
        throw DomainError(os.str());
    }
    rho_rate_ = std::pow(lat_.q, e) * c / eta_head;
}

double Chain::d(int k) const { return params_.d.at(k, lat_.q); }

double Chain::D(int k) const {
    if (k < 0) throw ParamError("D(k) needs k >= 0");
    double out = 1.0;
    for (int j = 1; j <= k; ++j) out *= d(j);
    return out;
}

double Chain::g(int k) const { return d(k + 1) * std::pow(lat_.q, params_.gamma); }

double Chain::a(int k) const {
    if (k < 0) throw ParamError("a_k needs k >= 0");
    if (k == 0) return params_.a0;
    if (k == 1) return params_.a1;
    double q = lat_.q;
    if (params_.gamma == 0.0) {
        // continuous extension [γm]/[γ] -> m, with the γ = 0 constraint
        // d₁a₀ = a₁ already enforced, collapses the bracket formula to D_k a₀
        return D(k) * params_.a0;
    }
    double gm = params_.gamma;
    int m = k - 1; // a_k = a_{m+1}
    double ratio_m = q_bracket(gm * m, q) / q_bracket(gm, q);
    double ratio_m1 = q_bracket(gm * (m + 1), q) / q_bracket(gm, q);
    double inner = -params_.a0 * ratio_m + (params_.a1 / d(1)) * ratio_m1
                 - q * params_.b2 * q_bracket(gm * m, q) * q_bracket(gm * (m + 1), q);
    return D(k) * std::pow(q, -gm * m) * inner;
}

double Chain::B0(double x) const {
    double out = 0.0;
    if (params_.b2 != 0.0) out += params_.b2 * x * x;
    if (params_.b1 != 0.0) out += params_.b1 * std::pow(x, 2.0 - params_.gamma);
    if (params_.b0 != 0.0) out += params_.b0 * std::pow(x, 2.0 - 2.0 * params_.gamma);
    return out;
}

double Chain::Apoly(double x) const {
    double out = 0.0;
    for (size_t i = params_.A.size(); i-- > 0;) out = out * x + params_.A[i];
    return out;
}

double Chain::A0(double x) const {
    if (params_.A.empty()) return 0.0;
    return std::pow(x, params_.shape_exponent()) * Apoly(x);
}

double Chain::eta0(double x) const {
    return B0(x) - (1.0 - lat_.q) * x * A0(x);
}

double Chain::alpha0(double x) const {
    double q = lat_.q;
    if (params_.gamma == 0.0) return h_;
    double gm = params_.gamma;
    double one_m_q2 = (1.0 - q) * (1.0 - q);
    double out = std::pow(q, gm + 1.0) * params_.b2 / one_m_q2
               + std::pow(q, gm) * (d(1) * params_.a0 - params_.a1) / ((1.0 - std::pow(q, gm)) * d(1));
    if (h_ != 0.0) out += h_ * std::pow(x, -gm);
    if (params_.b0 != 0.0) out += std::pow(q, 1.0 - gm) * params_.b0 * std::pow(x, -2.0 * gm) / one_m_q2;
    return out;
}

double Chain::phi0(double x) const {
    double eta = eta0(x);
    if (eta == 0.0) {
        std::ostringstream os;
        os << "eta0 vanishes at x=" << x;
        throw DomainError(os.str());
    }
    double ratio = alpha0(x) / eta;
    if (ratio < 0.0) {
        std::ostringstream os;
        os << "negative radicand alpha0/eta0 = " << ratio << " at x=" << x;
        throw SqrtDomainError(os.str());
    }
    return std::sqrt(ratio);
}

double Chain::f0(double x) const {
    return phi0(x) - 1.0 / ((1.0 - lat_.q) * x);
}

double Chain::rho0(double x) const {
    // The literal weight product over B₀(qⁿx)/η₀(qⁿx) has factors tending to
    // the constant rho_rate_, so it diverges whenever that rate is not 1.
    // Pulling the rate out as the power x^{-log_q rate} leaves a geometrically
    // convergent product and keeps the functional equation
    // B₀(qx)ρ₀(qx) = η₀(x)ρ₀(x) intact; the normalization 1/head_coeff makes
    // A₀ ≡ 0 give back exactly 1/B₀.
    double q = lat_.q;
    double L = rho_rate_;
    double value = std::exp(-std::log(x) * std::log(L) / std::log(q)) / head_coeff_;
    double y = x;
    double prev_dev = std::numeric_limits<double>::infinity();
    for (int n = 0; n < poch_term_cap; ++n) {
        double eta = eta0(y);
        if (eta == 0.0) {
            std::ostringstream os;
            os << "weight product hit eta0 = 0 at x=" << y;
            throw DomainError(os.str());
        }
        double factor = B0(q * y) / (L * eta);
        if (!(factor > 0.0)) {
            std::ostringstream os;
            os << "weight product factor " << factor << " at x=" << y << " is not positive";
            throw DomainError(os.str());
        }
        value *= factor;
        y *= q;
        double dev = std::fabs(factor - 1.0);
        if (dev < eps_poch) return value;
        // Exact deviations shrink by q each step; once they stop shrinking
        // the rounding noise of the eta0 cancellation has taken over and no
        // further factor carries information.
        if (dev < 1e-12 && dev >= prev_dev) return value;
        prev_dev = dev;
    }
    std::ostringstream os;
    os << "weight product did not converge within " << poch_term_cap << " factors at x=" << x;
    throw ConvergenceError(os.str());
}

double Chain::Bk(int k, double x) const {
    return std::pow(lat_.q, params_.gamma * k) * D(k) * B0(x);
}

double Chain::Ak(int k, double x) const {
    double q = lat_.q;
    double gm = params_.gamma;
    double qk = std::pow(q, -static_cast<double>(k));
    double inner = qk * A0(qk * x);
    if (params_.b2 != 0.0) inner += q_bracket(-2.0 * k, q) * params_.b2 * x;
    if (params_.b1 != 0.0) inner += q_bracket(k * (gm - 2.0), q) * params_.b1 * std::pow(x, 1.0 - gm);
    if (params_.b0 != 0.0) inner += q_bracket(2.0 * k * (gm - 1.0), q) * params_.b0 * std::pow(x, 1.0 - 2.0 * gm);
    return std::pow(q, gm * k) * D(k) * inner;
}

double Chain::etak(int k, double x) const {
    double q = lat_.q;
    return std::pow(q, params_.gamma * k) * D(k) * eta0(std::pow(q, -static_cast<double>(k)) * x);
}

double Chain::alphak(int k, double x) const {
    double q = lat_.q;
    return std::pow(q, -params_.gamma * k) * D(k) * alpha0(std::pow(q, -static_cast<double>(k)) * x);
}

double Chain::phik(int k, double x) const {
    double q = lat_.q;
    return std::pow(q, -params_.gamma * k) * phi0(std::pow(q, -static_cast<double>(k)) * x);
}

double Chain::fk(int k, double x) const {
    return phik(k, x) - 1.0 / ((1.0 - lat_.q) * x);
}

double Chain::rhok(int k, double x) const {
    if (k < 0) throw ParamError("rhok needs k >= 0");
    double value = rho0(x);
    for (int j = 1; j <= k; ++j) value /= etak(j, x);
    return value;
}

ChainLevel Chain::level(int k) const {
    if (k < 0 || k > params_.max_k) {
        std::ostringstream os;
        os << "level k=" << k << " outside the declared range [0, " << params_.max_k << "]";
        throw ParamError(os.str());
    }
    LatticeFn B(lat_), A(lat_), f(lat_), eta(lat_), phi(lat_), alpha(lat_), rho(lat_);
    for (Branch br : lat_.branches()) {
        for (int n = 0; n < lat_.branch_size(br); ++n) {
            double x = lat_.point(br, n);
            B.set(br, n, Bk(k, x));
            A.set(br, n, Ak(k, x));
            f.set(br, n, fk(k, x));
            eta.set(br, n, etak(k, x));
            phi.set(br, n, phik(k, x));
            alpha.set(br, n, alphak(k, x));
            rho.set(br, n, rhok(k, x));
        }
    }
    return ChainLevel{k, a(k), std::move(B), std::move(A), std::move(f),
                      std::move(eta), std::move(phi), std::move(alpha), std::move(rho)};
}

double resolved_h(const ChainParams& p, double q) {
    if (p.h_tilde) return p.b1 * std::pow(q, *p.h_tilde) / ((1.0 - q) * (1.0 - q));
    return p.h;
}

LatticeFn b0_poly(const ChainParams& p, const QLattice& lat) {
    Chain chain(p, lat);
    return LatticeFn::sample(lat, [&](double x) { return chain.B0(x); });
}

double a_k_sequence(const ChainParams& p, double q, int k) {
    Chain chain(p, QLattice(q, 0.0, 1.0, 1));
    return chain.a(k);
}

LatticeFn alpha0_fn(const ChainParams& p, const QLattice& lat) {
    Chain chain(p, lat);
    return LatticeFn::sample(lat, [&](double x) { return chain.alpha0(x); });
}

ChainLevel build_level(const ChainParams& p, const QLattice& lat, int k) {
    return Chain(p, lat).level(k);
}

LatticeFn rho0_product(const ChainParams& p, const QLattice& lat) {
    Chain chain(p, lat);
    return LatticeFn::sample(lat, [&](double x) { return chain.rho0(x); });
}

} // namespace qfactor
