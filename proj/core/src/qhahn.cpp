#include "qfactor/qhahn.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qfactor/error.hpp"
#include "qfactor/qcalc.hpp"

namespace qfactor {

QPoly QPoly::zero() { return QPoly{}; }

QPoly QPoly::constant(double v) {
    QPoly p;
    if (v != 0.0) p.c = {v};
    return p;
}

QPoly QPoly::monomial(int degree, double coeff) {
    if (degree < 0) throw ParamError("monomial degree must be >= 0");
    QPoly p;
    if (coeff != 0.0) {
        p.c.assign(static_cast<size_t>(degree) + 1, 0.0);
        p.c.back() = coeff;
    }
    return p;
}

int QPoly::degree() const { return static_cast<int>(c.size()) - 1; }

bool QPoly::is_zero() const { return c.empty(); }

double QPoly::coeff(int m) const {
    if (m < 0 || m >= static_cast<int>(c.size())) return 0.0;
    return c[static_cast<size_t>(m)];
}

double QPoly::operator()(double x) const {
    double acc = 0.0;
    for (size_t i = c.size(); i-- > 0;) acc = acc * x + c[i];
    return acc;
}

QPoly& QPoly::normalize() {
    while (!c.empty() && c.back() == 0.0) c.pop_back();
    return *this;
}

QPoly operator+(const QPoly& lhs, const QPoly& rhs) {
    QPoly out;
    out.c.assign(std::max(lhs.c.size(), rhs.c.size()), 0.0);
    for (size_t i = 0; i < out.c.size(); ++i) out.c[i] = lhs.coeff(static_cast<int>(i)) + rhs.coeff(static_cast<int>(i));
    return out.normalize();
}

QPoly operator-(const QPoly& lhs, const QPoly& rhs) {
    return lhs + (-1.0 * rhs);
}

QPoly operator*(const QPoly& lhs, const QPoly& rhs) {
    if (lhs.is_zero() || rhs.is_zero()) return QPoly::zero();
    QPoly out;
    out.c.assign(lhs.c.size() + rhs.c.size() - 1, 0.0);
    for (size_t i = 0; i < lhs.c.size(); ++i)
        for (size_t j = 0; j < rhs.c.size(); ++j) out.c[i + j] += lhs.c[i] * rhs.c[j];
    return out.normalize();
}

QPoly operator*(double s, const QPoly& p) {
    QPoly out = p;
    for (double& v : out.c) v *= s;
    return out.normalize();
}

QPoly q_derivative(const QPoly& p, double q) {
    QPoly out;
    if (p.c.size() <= 1) return out;
    out.c.assign(p.c.size() - 1, 0.0);
    for (size_t m = 1; m < p.c.size(); ++m)
        out.c[m - 1] = q_bracket(static_cast<double>(m), q) * p.c[m];
    return out.normalize();
}

QPoly shift_q_inv(const QPoly& p, double q) {
    QPoly out = p;
    for (size_t m = 0; m < out.c.size(); ++m)
        out.c[m] *= std::pow(q, -static_cast<double>(m));
    return out.normalize();
}

namespace {

// The drift polynomial that turns every f_j off, as coefficients of 1 and x.
void required_drift(const ChainParams& p, double q, double& c0, double& c1) {
    c1 = (1.0 + q) * p.b2 - q * p.a0 + q * q * p.a1;
    c0 = p.b1 / (1.0 - q) - (1.0 - q) * resolved_h(p, q);
}

} // namespace

QHahnLevel qhahn_level(const ChainParams& p, double q, int k) {
    if (!(q > 0.0 && q < 1.0)) throw ParamError("polynomial levels need 0 < q < 1");
    if (k < 0 || k > p.max_k) {
        std::ostringstream os;
        os << "level k=" << k << " outside the declared range [0, " << p.max_k << "]";
        throw ParamError(os.str());
    }
    if (p.gamma != 1.0) {
        std::ostringstream os;
        os << "polynomial ladder needs gamma = 1, got " << p.gamma;
        throw RegimeError(os.str());
    }
    for (int j = 1; j <= std::max(k, 1); ++j) {
        double dj = p.d.at(j, q);
        if (std::fabs(dj - 1.0 / q) > 1e-12 / q) {
            std::ostringstream os;
            os << "polynomial ladder needs d_k = 1/q at every level, got d_" << j << " = " << dj;
            throw RegimeError(os.str());
        }
    }

    // A₀ = x^p A(x) must equal c₁x + c₀ exactly; collect the coefficient that
    // each A entry puts at integer exponent p+i and compare.
    double c0_req = 0.0;
    double c1_req = 0.0;
    required_drift(p, q, c0_req, c1_req);
    double act_c0 = 0.0;
    double act_c1 = 0.0;
    double stray = 0.0;
    int base = static_cast<int>(p.shape_exponent());
    for (size_t i = 0; i < p.A.size(); ++i) {
        int e = base + static_cast<int>(i);
        if (e == 0) act_c0 += p.A[i];
        else if (e == 1) act_c1 += p.A[i];
        else stray += std::fabs(p.A[i]);
    }
    double tol = 1e-12 * (1.0 + std::fabs(c0_req) + std::fabs(c1_req));
    if (stray > 0.0 || std::fabs(act_c0 - c0_req) > tol || std::fabs(act_c1 - c1_req) > tol) {
        std::ostringstream os;
        os << "polynomial ladder needs the drift (" << c1_req << ")x + (" << c0_req
           << "), got (" << act_c1 << ")x + (" << act_c0 << ")"
           << (stray > 0.0 ? " plus terms of other degrees" : "");
        throw RegimeError(os.str());
    }

    QHahnLevel level;
    level.k = k;
    level.q = q;
    level.a_tilde = -std::pow(q, -2.0 * (k - 1))
                  * (q_bracket(2.0 * (k - 1), q) * p.b2 + p.a0 / q - p.a1);
    level.b_tilde = p.b1 / (1.0 - q) - (1.0 - q) * std::pow(q, -k) * resolved_h(p, q);
    level.b2 = p.b2;
    level.b1 = p.b1;
    level.b0 = p.b0;
    return level;
}

QPoly hahn_create(const QHahnLevel& level, const QPoly& p) {
    if (p.degree() + 1 > qpoly_degree_cap) {
        std::ostringstream os;
        os << "raising a degree-" << p.degree() << " polynomial exceeds the degree cap "
           << qpoly_degree_cap;
        throw ParamError(os.str());
    }
    QPoly B0;
    B0.c = {level.b0, level.b1, level.b2};
    B0.normalize();
    QPoly drift;
    drift.c = {level.b_tilde, level.a_tilde};
    drift.normalize();
    QPoly t = q_derivative(shift_q_inv(p, level.q), level.q);
    return (-1.0 * (B0 * t)) - drift * p;
}

QPoly hahn_operator(const QHahnLevel& level, const QPoly& p) {
    QPoly B0;
    B0.c = {level.b0, level.b1, level.b2};
    B0.normalize();
    QPoly drift;
    drift.c = {level.b_tilde, level.a_tilde};
    drift.normalize();
    QPoly dp = q_derivative(p, level.q);
    return B0 * q_derivative(shift_q_inv(dp, level.q), level.q) + drift * dp;
}

double hahn_eigen(const QHahnLevel& level, int n) {
    if (n < 0) throw ParamError("eigenvalue height n must be >= 0");
    double q = level.q;
    return level.a_tilde * q_bracket(n, q)
         + level.b2 * q_bracket(n, q) * q_bracket(n - 1.0, q) * std::pow(q, 1.0 - n);
}

std::vector<QHahnPair> hahn_family(const ChainParams& p, double q, int k, int n_max) {
    if (n_max < 0 || n_max > k) {
        std::ostringstream os;
        os << "family height n_max=" << n_max << " must satisfy 0 <= n_max <= k=" << k;
        throw ParamError(os.str());
    }
    QHahnLevel top = qhahn_level(p, q, k);
    std::vector<QHahnPair> out;
    out.reserve(static_cast<size_t>(n_max) + 1);
    for (int n = 0; n <= n_max; ++n) {
        QPoly psi = QPoly::constant(1.0);
        for (int j = k - n + 1; j <= k; ++j) psi = hahn_create(qhahn_level(p, q, j), psi);
        out.push_back({std::move(psi), hahn_eigen(top, n)});
    }
    return out;
}

double hahn_weight(const Chain& chain, int k, double x) {
    qhahn_level(chain.params(), chain.q(), k);
    double q = chain.q();
    double den = 1.0;
    for (int j = 0; j < k; ++j) den *= chain.B0(std::pow(q, -k + 1 + j) * x);
    if (den == 0.0) {
        std::ostringstream os;
        os << "weight quotient hit B0 = 0 at x=" << x;
        throw DomainError(os.str());
    }
    return chain.rho0(std::pow(q, -k) * x) / den;
}

std::vector<std::vector<double>> hahn_orthogonality(const ChainParams& p, const QLattice& lat,
                                                    int k, int n_max) {
    std::vector<QHahnPair> fam = hahn_family(p, lat.q, k, n_max);
    Chain chain(p, lat);
    LatticeFn w(lat);
    for (Branch br : lat.branches()) {
        for (int n = 0; n < lat.branch_size(br); ++n) {
            double x = lat.point(br, n);
            double v = chain.rhok(k, x);
            // Steep weights underflow to +0 deep on the line; such rows
            // contribute nothing and are harmless. Anything signed or
            // non-finite would corrupt the Gram matrix.
            if (!(v >= 0.0) || !std::isfinite(v)) {
                std::ostringstream os;
                os << "orthogonality needs a nonnegative finite weight, got " << v << " at x=" << x;
                throw DomainError(os.str());
            }
            w.set(br, n, v);
        }
    }
    // Self-adjointness of the level operator under this pairing needs the
    // boundary terms of the summation by parts to drop: B₀ρ_k must vanish at
    // each branch head and again toward x = 0 along each line. A family with
    // b₀ ≠ 0 keeps B₀(0)ρ_k(0⁺) > 0 on a half-line lattice, which is exactly
    // the surviving inner term, so the check rejects it rather than return a
    // Gram matrix that cannot be orthogonal.
    double edge_scale = 0.0;
    for (Branch br : lat.branches()) {
        for (int n = 0; n < lat.branch_size(br); ++n) {
            double x = lat.point(br, n);
            edge_scale = std::max(edge_scale, std::fabs(chain.B0(x) * w.at(br, n)));
        }
    }
    if (edge_scale == 0.0) throw DomainError("orthogonality weight vanished on the whole lattice");
    for (Branch br : lat.branches()) {
        double head = lat.point(br, 0);
        double deep = lat.point(br, lat.branch_size(br) - 1);
        double outer = std::fabs(chain.B0(head) * w.at(br, 0));
        double inner = std::fabs(chain.B0(deep) * w.at(br, lat.branch_size(br) - 1));
        if (outer > 1e-6 * edge_scale || inner > 1e-6 * edge_scale) {
            std::ostringstream os;
            os << "orthogonality boundary terms do not vanish: |B0 rho| reaches " << outer
               << " at the head " << head << " and " << inner << " at the deep end " << deep
               << " against interior scale " << edge_scale;
            throw DomainError(os.str());
        }
    }
    std::vector<LatticeFn> sampled;
    sampled.reserve(fam.size());
    for (const QHahnPair& pr : fam)
        sampled.push_back(LatticeFn::sample(lat, [&](double x) { return pr.psi(x); }));
    std::vector<std::vector<double>> gram(fam.size(), std::vector<double>(fam.size(), 0.0));
    for (size_t n = 0; n < fam.size(); ++n) {
        for (size_t m = n; m < fam.size(); ++m) {
            double v = jackson_integral(sampled[n] * sampled[m] * w).value;
            gram[n][m] = v;
            gram[m][n] = v;
        }
    }
    return gram;
}

} // namespace qfactor
