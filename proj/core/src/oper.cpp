#include "qfactor/oper.hpp"

#include <algorithm>
#include <cmath>

#include "qfactor/qcalc.hpp"

namespace qfactor {

LatticeFn apply(const QDiffOp& op, const LatticeFn& psi) {
    LatticeFn d1 = q_derivative(psi);
    LatticeFn d2 = q_derivative(shift_q_inv(d1));
    return op.Z * d2 + op.W * d1 + op.V * psi;
}

LatticeFn annihilate(const ChainLevel& level, const LatticeFn& psi) {
    return q_derivative(psi) + level.fk * psi;
}

LatticeFn create(const ChainLevel& level, const LatticeFn& psi) {
    const QLattice& lat = psi.lattice();
    double q = lat.q;
    LatticeFn shifted = shift_q_inv(psi);
    LatticeFn out(lat);
    for (Branch br : lat.branches()) {
        for (int n = 0; n < lat.branch_size(br); ++n) {
            if (!psi.defined(br, n) || !shifted.defined(br, n)) {
                out.set_undefined(br, n);
                continue;
            }
            double x = lat.point(br, n);
            out.set(br, n,
                    level.etak.at(br, n) * level.phik.at(br, n) * psi.at(br, n)
                        - level.Bk.at(br, n) / ((1.0 - q) * x) * shifted.at(br, n));
        }
    }
    return out;
}

LatticeFn create_expanded(const ChainLevel& level, const LatticeFn& psi) {
    const QLattice& lat = psi.lattice();
    double q = lat.q;
    LatticeFn dqi = q_derivative(shift_q_inv(psi));
    LatticeFn out(lat);
    for (Branch br : lat.branches()) {
        for (int n = 0; n < lat.branch_size(br); ++n) {
            if (!psi.defined(br, n) || !dqi.defined(br, n)) {
                out.set_undefined(br, n);
                continue;
            }
            double x = lat.point(br, n);
            double f = level.fk.at(br, n);
            out.set(br, n,
                    level.Bk.at(br, n) * (-dqi.at(br, n) + f * psi.at(br, n))
                        - level.Ak.at(br, n) * (1.0 + (1.0 - q) * x * f) * psi.at(br, n));
        }
    }
    return out;
}

namespace {

// Jackson integral that treats undefined points as truncated away. Used for
// the adjoint pairing, where the lowered factor loses the deepest point.
double jackson_truncated(const LatticeFn& f) {
    LatticeFn filled(f.lattice());
    for (Branch br : f.lattice().branches()) {
        for (int n = 0; n < f.lattice().branch_size(br); ++n) {
            filled.set(br, n, f.defined(br, n) ? f.at(br, n) : 0.0);
        }
    }
    return jackson_integral(filled).value;
}

} // namespace

AdjointSides adjoint_check(const ChainLevel& level, const LatticeFn& phi,
                           const LatticeFn& psi) {
    LatticeFn rho_prev = level.etak * level.rhok;
    AdjointSides sides;
    sides.lhs = jackson_truncated(annihilate(level, phi) * psi * rho_prev);
    sides.rhs = jackson_truncated(phi * create(level, psi) * level.rhok);
    return sides;
}

QDiffOp hamiltonian(const Chain& chain, int k) {
    if (k < 0 || k + 1 > chain.params().max_k) {
        throw ParamError("hamiltonian needs 0 <= k < max_k (level k+1 data)");
    }
    const QLattice& lat = chain.lattice();
    double q = lat.q;
    double ak = chain.a(k);
    QDiffOp op{LatticeFn(lat), LatticeFn(lat), LatticeFn(lat)};
    for (Branch br : lat.branches()) {
        for (int n = 0; n < lat.branch_size(br); ++n) {
            double x = lat.point(br, n);
            double B = chain.Bk(k, x);
            double ep = chain.etak(k, x) * chain.phik(k, x);
            // q^{γ-1} B_k φ_{k+1}, the weight of the backward shift
            double m = std::pow(q, chain.params().gamma - 1.0) * B * chain.phik(k + 1, x);
            op.Z.set(br, n, -(1.0 - q) * x * m);
            op.W.set(br, n, ep - m);
            op.V.set(br, n, q * B / ((1.0 - q) * (1.0 - q) * x * x) + chain.alphak(k, x)
                                + ak - (q * m + ep) / ((1.0 - q) * x));
        }
    }
    return op;
}

LatticeFn apply_hamiltonian(const Chain& chain, int k, const LatticeFn& psi) {
    return apply(hamiltonian(chain, k), psi);
}

double interior_sup_norm(const LatticeFn& f) {
    double out = 0.0;
    for (Branch br : f.lattice().branches()) {
        for (int n = 1; n + 1 < f.lattice().branch_size(br); ++n) {
            if (f.defined(br, n)) out = std::max(out, std::fabs(f.at(br, n)));
        }
    }
    return out;
}

} // namespace qfactor
