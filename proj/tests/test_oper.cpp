#include "doctest.h"

#include <cmath>
#include <vector>

#include "qfactor/oper.hpp"
#include "qfactor/qcalc.hpp"
#include "test_params.hpp"
#include "test_util.hpp"

using namespace qfactor;
using testutil::max_rel_diff;
using testutil::random_fn;
using testutil::rel_err;

namespace {

// Random values damped by x^pow: keeps the 1/x² stencil terms of the
// second-order form well conditioned toward the origin and makes Jackson
// tails negligible.
LatticeFn decayed_random(const QLattice& lat, unsigned seed, double pow = 1.0) {
    LatticeFn r = random_fn(lat, seed);
    LatticeFn out(lat);
    for (Branch br : lat.branches()) {
        for (int n = 0; n < lat.branch_size(br); ++n) {
            out.set(br, n, std::pow(lat.point(br, n), pow) * r.at(br, n));
        }
    }
    return out;
}

} // namespace

TEST_CASE("second-order apply: V extraction and the domain mask") {
    double q = 0.5;
    QLattice lat(q, 0.25, 1.0, QLattice::depth_for(q, 1e-2));
    Chain chain(testparams::little_jacobi(q), lat);
    QDiffOp op = hamiltonian(chain, 1);

    LatticeFn one = LatticeFn::sample(lat, [](double) { return 1.0; });
    LatticeFn applied = apply(op, one);
    for (Branch br : lat.branches()) {
        int N = lat.branch_size(br);
        CHECK(!applied.defined(br, N - 1));
        for (int n = 0; n + 1 < N; ++n) {
            CHECK(rel_err(applied.at(br, n), op.V.at(br, n)) < 1e-15);
        }
    }
}

TEST_CASE("annihilate matches its shift form and kills the drift-free case") {
    double q = 0.5;
    QLattice lat(q, 0.25, 1.0, QLattice::depth_for(q, 1e-2));

    {
        Chain chain(testparams::positive_quadratic(q), lat);
        ChainLevel lv = chain.level(2);
        LatticeFn psi = random_fn(lat, 7);
        LatticeFn lowered = annihilate(lv, psi);
        for (Branch br : lat.branches()) {
            for (int n = 0; n + 1 < lat.branch_size(br); ++n) {
                double x = lat.point(br, n);
                double shift_form = lv.phik.at(br, n) * psi.at(br, n)
                                  - psi.at(br, n + 1) / ((1.0 - q) * x);
                CHECK(rel_err(lowered.at(br, n), shift_form) < 1e-13);
            }
        }
    }

    // f_k ≡ 0 family: constants are annihilated (zero up to the cancellation
    // noise of f_k itself, which scales like 1/((1-q)x))
    {
        Chain chain(testparams::little_jacobi(q), lat);
        LatticeFn one = LatticeFn::sample(lat, [](double) { return 1.0; });
        for (int k = 0; k <= 3; ++k) {
            LatticeFn lowered = annihilate(chain.level(k), one);
            for (Branch br : lat.branches()) {
                for (int n = 0; n + 1 < lat.branch_size(br); ++n) {
                    CHECK(std::fabs(lowered.at(br, n) * (1.0 - q) * lat.point(br, n)) < 1e-10);
                }
            }
        }
    }

    // explicit value on ψ(x) = x: ∂_q x = 1
    {
        Chain chain(testparams::harmonic(q), lat);
        ChainLevel lv = chain.level(0);
        LatticeFn xs = LatticeFn::sample(lat, [](double x) { return x; });
        LatticeFn lowered = annihilate(lv, xs);
        for (Branch br : lat.branches()) {
            for (int n = 0; n + 1 < lat.branch_size(br); ++n) {
                double x = lat.point(br, n);
                CHECK(rel_err(lowered.at(br, n), 1.0 + x * chain.f0(x)) < 1e-13);
            }
        }
    }
}

TEST_CASE("create: shift form, defining form, and the head rule agree") {
    double q = 0.5;
    QLattice lat(q, 0.25, 1.0, QLattice::depth_for(q, 1e-2));
    std::vector<ChainParams> families = {
        testparams::little_jacobi(q), testparams::positive_quadratic(q),
        testparams::gamma_two(q),     testparams::gamma_negative(q),
    };
    unsigned seed = 11;
    for (const ChainParams& p : families) {
        Chain chain(p, lat);
        for (int k = 0; k <= 4; ++k) {
            ChainLevel lv = chain.level(k);
            LatticeFn psi = random_fn(lat, seed++);
            LatticeFn raised = create(lv, psi);
            CHECK(max_rel_diff(raised, create_expanded(lv, psi)) < 1e-12);
            // at the branch heads Q⁻¹ψ contributes nothing
            for (Branch br : lat.branches()) {
                CHECK(raised.at(br, 0) ==
                      lv.etak.at(br, 0) * lv.phik.at(br, 0) * psi.at(br, 0));
            }
        }
    }

    // f_k ≡ 0 family: raising a constant gives minus the drift coefficient
    {
        Chain chain(testparams::little_jacobi(q), lat);
        LatticeFn one = LatticeFn::sample(lat, [](double) { return 1.0; });
        for (int k = 0; k <= 3; ++k) {
            ChainLevel lv = chain.level(k);
            LatticeFn raised = create(lv, one);
            for (Branch br : lat.branches()) {
                for (int n = 1; n < lat.branch_size(br); ++n) {
                    CHECK(rel_err(raised.at(br, n), -lv.Ak.at(br, n)) < 1e-11);
                }
            }
        }
    }
}

TEST_CASE("explicit second-order form factorizes through the ladder pair") {
    // create_k(annihilate_k ψ) + a_k ψ reproduces the Z/W/V form at interior
    // points (the head rows differ by the truncated qB_k/((1-q)²x²) piece
    // unless B_k vanishes there).
    double q = 0.5;
    QLattice lat(q, 0.25, 1.0, QLattice::depth_for(q, 1e-2));
    std::vector<ChainParams> families = {
        testparams::little_jacobi(q),
        testparams::positive_quadratic(q),
        testparams::gamma_two(q),
    };
    for (const ChainParams& p : families) {
        Chain chain(p, lat);
        for (int k = 0; k <= 4; ++k) {
            ChainLevel lv = chain.level(k);
            QDiffOp op = hamiltonian(chain, k);
            for (unsigned seed : {1u, 2u, 3u}) {
                LatticeFn psi = decayed_random(lat, seed);
                LatticeFn factored = create(lv, annihilate(lv, psi)) + chain.a(k) * psi;
                LatticeFn residual = apply(op, psi) - factored;
                CHECK(interior_sup_norm(residual) / sup_norm(psi) < 1e-10);
            }
        }
    }
}

TEST_CASE("explicit second-order form factorizes through the next level up") {
    // H_k ψ = d_{k+1}^{-1} (annihilate_{k+1}(create_{k+1} ψ) + a_{k+1} ψ) at
    // interior points; the head rows of the two sides truncate different
    // couplings (diagonal vs ψ(q⁻¹x)) and differ by a multiple of B_k(head).
    double q = 0.5;
    QLattice lat(q, 0.25, 1.0, QLattice::depth_for(q, 1e-2));
    std::vector<ChainParams> families = {
        testparams::little_jacobi(q),
        testparams::positive_quadratic(q),
        testparams::gamma_two(q),
    };
    for (const ChainParams& p : families) {
        Chain chain(p, lat);
        for (int k = 0; k <= 4; ++k) {
            ChainLevel next = chain.level(k + 1);
            double d = chain.d(k + 1);
            for (unsigned seed : {4u, 5u}) {
                LatticeFn psi = decayed_random(lat, seed);
                LatticeFn up = (1.0 / d)
                             * (annihilate(next, create(next, psi)) + chain.a(k + 1) * psi);
                LatticeFn residual = apply_hamiltonian(chain, k, psi) - up;
                CHECK(interior_sup_norm(residual) / sup_norm(psi) < 1e-10);
            }
        }
    }
}

TEST_CASE("raising intertwines consecutive second-order operators") {
    // H_{k+1}(create_{k+1} ψ) = d_{k+1} create_{k+1}(H_k ψ). Composing smears
    // the head-row truncation one point inward, so the comparison starts two
    // points below each head.
    double q = 0.5;
    QLattice lat(q, 0.25, 1.0, QLattice::depth_for(q, 1e-2));
    for (const ChainParams& p :
         {testparams::little_jacobi(q), testparams::positive_quadratic(q)}) {
        Chain chain(p, lat);
        for (int k = 0; k <= 3; ++k) {
            ChainLevel next = chain.level(k + 1);
            LatticeFn psi = decayed_random(lat, 21 + static_cast<unsigned>(k));
            LatticeFn lhs = apply_hamiltonian(chain, k + 1, create(next, psi));
            LatticeFn rhs = chain.d(k + 1) * create(next, apply_hamiltonian(chain, k, psi));
            LatticeFn residual = lhs - rhs;
            double worst = 0.0;
            for (Branch br : lat.branches()) {
                for (int n = 2; n + 1 < lat.branch_size(br); ++n) {
                    worst = std::max(worst, std::fabs(residual.at(br, n)));
                }
            }
            CHECK(worst / sup_norm(psi) < 1e-9);
        }
    }
}

TEST_CASE("raising is the Jackson-integral adjoint of lowering") {
    double q = 0.5;
    QLattice lat(q, 0.25, 1.0, QLattice::depth_for(q, 1e-9));

    // decaying weight, bounded random test functions
    {
        Chain chain(testparams::little_jacobi(q), lat);
        for (int k : {1, 3}) {
            ChainLevel lv = chain.level(k);
            AdjointSides sides =
                adjoint_check(lv, random_fn(lat, 31), random_fn(lat, 32));
            CHECK(rel_err(sides.lhs, sides.rhs) < 1e-10);
        }
    }

    // flat weight, rapidly decaying test functions
    {
        Chain chain(testparams::harmonic(q), lat);
        ChainLevel lv = chain.level(2);
        AdjointSides sides = adjoint_check(lv, decayed_random(lat, 33, 3.0),
                                           decayed_random(lat, 34, 3.0));
        CHECK(rel_err(sides.lhs, sides.rhs) < 1e-10);
    }
}

TEST_CASE("hamiltonian rejects levels without one level of headroom") {
    double q = 0.5;
    QLattice lat(q, 0.0, 1.0, 8);
    ChainParams p = testparams::little_jacobi(q);
    p.max_k = 3;
    Chain chain(p, lat);
    CHECK_THROWS_AS(hamiltonian(chain, 3), ParamError);
    CHECK_THROWS_AS(hamiltonian(chain, -1), ParamError);
    CHECK(apply_hamiltonian(chain, 2, random_fn(lat, 1)).defined(Branch::B, 0));
}
