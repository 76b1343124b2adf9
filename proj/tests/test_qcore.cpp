#include "doctest.h"

#include <cmath>
#include <vector>

#include "qfactor/qcalc.hpp"
#include "test_util.hpp"

using namespace qfactor;
using testutil::max_rel_diff;
using testutil::random_fn;
using testutil::rel_err;

TEST_CASE("q_bracket values and limits") {
    CHECK(q_bracket(0.0, 0.5) == 0.0);
    CHECK(q_bracket(1.0, 0.5) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(q_bracket(2.0, 0.5) == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(q_bracket(3.0, 0.5) == doctest::Approx(1.75).epsilon(1e-14));

    // [n+1] = 1 + q[n]
    for (double q : {0.2, 0.5, 0.9, 0.9999}) {
        for (double n : {-2.0, -0.5, 0.0, 1.0, 3.5, 7.0}) {
            CHECK(rel_err(q_bracket(n + 1.0, q), 1.0 + q * q_bracket(n, q)) < 1e-14);
        }
    }

    // [n] -> n as q -> 1
    for (double n : {1.0, 2.0, 5.0, -3.0}) {
        CHECK(rel_err(q_bracket(n, 1.0 - 1e-8), n) < 1e-7);
    }

    CHECK_THROWS_AS(q_bracket(1.0, 1.0), ParamError);
    CHECK_THROWS_AS(q_bracket(1.0, 0.0), ParamError);
}

TEST_CASE("lattice construction and point layout") {
    QLattice lat(0.5, 0.25, 1.0, 6);
    CHECK(lat.total_points() == 12);
    CHECK(lat.point(Branch::B, 0) == 1.0);
    CHECK(lat.point(Branch::B, 3) == doctest::Approx(0.125));
    CHECK(lat.point(Branch::A, 2) == doctest::Approx(0.0625));
    for (Branch br : lat.branches()) {
        for (int n = 0; n + 1 < lat.branch_size(br); ++n) {
            CHECK(lat.point(br, n) > lat.point(br, n + 1));
            CHECK(lat.point(br, n + 1) > 0.0);
        }
    }

    QLattice half(0.5, 0.0, 1.0, 4);
    CHECK_FALSE(half.has_branch(Branch::A));
    CHECK(half.branch_size(Branch::A) == 0);
    CHECK(half.total_points() == 4);
    CHECK(half.branches().size() == 1);

    CHECK_THROWS_AS(QLattice(1.5, 0.0, 1.0, 4), ParamError);
    CHECK_THROWS_AS(QLattice(0.5, -0.1, 1.0, 4), ParamError);
    CHECK_THROWS_AS(QLattice(0.5, 1.0, 0.5, 4), ParamError);
    CHECK_THROWS_AS(QLattice(0.5, 0.0, 1.0, 0), ParamError);
}

TEST_CASE("depth_for keeps the deepest point above the requested scale") {
    for (double q : {0.3, 0.5, 0.8, 0.97}) {
        for (double scale : {1e-1, 1e-2, 1e-3}) {
            int n = QLattice::depth_for(q, scale);
            CHECK(std::pow(q, n - 1) >= scale);
            CHECK(std::pow(q, n) < scale);
        }
    }
    CHECK(QLattice::depth_for(0.5, 1.0) == 1);
}

TEST_CASE("lattice function sampling and the undefined mask") {
    QLattice lat(0.5, 0.25, 1.0, 5);
    LatticeFn f = LatticeFn::sample(lat, [](double x) { return x * x; });
    CHECK(f.at(Branch::B, 1) == doctest::Approx(0.25));
    CHECK(f.all_defined());

    f.set_undefined(Branch::A, 2);
    CHECK_FALSE(f.defined(Branch::A, 2));
    CHECK_FALSE(f.all_defined());
    CHECK_THROWS_AS(f.at(Branch::A, 2), DomainError);
    f.set(Branch::A, 2, 7.0);
    CHECK(f.defined(Branch::A, 2));

    CHECK_THROWS_AS(f.at(Branch::B, 5), ParamError);
    CHECK_THROWS_AS(f.at(Branch::B, -1), ParamError);
}

TEST_CASE("q_derivative matches the monomial rule") {
    QLattice lat(0.5, 0.25, 2.0, 8);

    LatticeFn c = LatticeFn::sample(lat, [](double) { return 3.25; });
    LatticeFn dc = q_derivative(c);
    for (Branch br : lat.branches()) {
        for (int n = 0; n + 1 < lat.branch_size(br); ++n) {
            CHECK(dc.at(br, n) == 0.0);
        }
        CHECK_FALSE(dc.defined(br, lat.depth - 1));
    }

    // d_q x^m = [m] x^{m-1}
    for (int m : {1, 2, 3, 4}) {
        LatticeFn f = LatticeFn::sample(lat, [&](double x) { return std::pow(x, m); });
        LatticeFn df = q_derivative(f);
        LatticeFn expect = LatticeFn::sample(lat, [&](double x) {
            return q_bracket(m, lat.q) * std::pow(x, m - 1);
        });
        CHECK(max_rel_diff(df, expect) < 1e-12);
    }

    // spot value from the difference quotient itself
    QLattice unit(0.5, 0.0, 1.0, 4);
    LatticeFn cube = LatticeFn::sample(unit, [](double x) { return x * x * x; });
    CHECK(q_derivative(cube).at(Branch::B, 0) == doctest::Approx(1.75).epsilon(1e-14));
}

TEST_CASE("q_derivative is linear") {
    QLattice lat(0.6, 0.3, 1.7, 12);
    LatticeFn f = random_fn(lat, 101);
    LatticeFn g = random_fn(lat, 202);
    double alpha = 1.375, beta = -0.625;

    LatticeFn combo(lat);
    for (Branch br : lat.branches()) {
        for (int n = 0; n < lat.branch_size(br); ++n) {
            combo.set(br, n, alpha * f.at(br, n) + beta * g.at(br, n));
        }
    }
    LatticeFn lhs = q_derivative(combo);
    LatticeFn df = q_derivative(f);
    LatticeFn dg = q_derivative(g);
    for (Branch br : lat.branches()) {
        for (int n = 0; n + 1 < lat.branch_size(br); ++n) {
            CHECK(std::fabs(lhs.at(br, n) - alpha * df.at(br, n) - beta * dg.at(br, n)) < 1e-14 * 100);
        }
    }
}

TEST_CASE("shift operators and the boundary convention") {
    QLattice lat(0.5, 0.25, 1.0, 6);
    LatticeFn f = random_fn(lat, 42);

    LatticeFn qf = shift_q(f);
    LatticeFn qinvf = shift_q_inv(f);

    for (Branch br : lat.branches()) {
        CHECK(qinvf.at(br, 0) == 0.0); // zero convention at x = a and x = b
        for (int n = 1; n < lat.branch_size(br); ++n) {
            CHECK(qinvf.at(br, n) == f.at(br, n - 1));
        }
        for (int n = 0; n + 1 < lat.branch_size(br); ++n) {
            CHECK(qf.at(br, n) == f.at(br, n + 1));
        }
        CHECK_FALSE(qf.defined(br, lat.depth - 1));
    }

    // Q^{-1} Q f = f wherever Q f is defined
    LatticeFn roundtrip = shift_q_inv(qf);
    for (Branch br : lat.branches()) {
        for (int n = 1; n < lat.branch_size(br); ++n) {
            CHECK(roundtrip.at(br, n) == f.at(br, n));
        }
    }

    // Q f of the identity map at the head is qb
    LatticeFn ident = LatticeFn::sample(lat, [](double x) { return x; });
    CHECK(shift_q(ident).at(Branch::B, 0) == doctest::Approx(lat.q * lat.b));
}

TEST_CASE("d_q Q^{-1} equals (Q^{-1} - 1)/((1-q)x) including branch heads") {
    // The zero convention makes this operator identity hold at every point,
    // not just in the interior; later factorization identities rely on it.
    QLattice lat(0.4, 0.2, 1.3, 7);
    LatticeFn f = random_fn(lat, 7);

    LatticeFn lhs = q_derivative(shift_q_inv(f));
    LatticeFn qinvf = shift_q_inv(f);
    for (Branch br : lat.branches()) {
        for (int n = 0; n + 1 < lat.branch_size(br); ++n) {
            double x = lat.point(br, n);
            double rhs = (qinvf.at(br, n) - f.at(br, n)) / ((1.0 - lat.q) * x);
            CHECK(rel_err(lhs.at(br, n), rhs) < 1e-14);
        }
    }
}

TEST_CASE("jackson integral on closed forms") {
    // f == 1 on [0,1]_q: the sum telescopes to 1 - q^N
    {
        QLattice lat(0.5, 0.0, 1.0, 50);
        LatticeFn one = LatticeFn::sample(lat, [](double) { return 1.0; });
        JacksonResult r = jackson_integral(one);
        CHECK(rel_err(r.value, 1.0) < 1e-12);
        CHECK(r.last_term > 0.0);
        CHECK(r.last_term < 1e-14);
    }
    // f == 1 on [a,b]_q: b - a
    {
        QLattice lat(0.5, 0.25, 2.0, 60);
        LatticeFn one = LatticeFn::sample(lat, [](double) { return 1.0; });
        CHECK(rel_err(jackson_integral(one).value, 1.75) < 1e-12);
    }
    // f = x on [0,1]_q, q = 0.5: 1/(1+q) = 2/3
    {
        QLattice lat(0.5, 0.0, 1.0, 40);
        LatticeFn ident = LatticeFn::sample(lat, [](double x) { return x; });
        CHECK(rel_err(jackson_integral(ident).value, 2.0 / 3.0) < 1e-12);
    }
}

TEST_CASE("jackson integral telescopes the q-derivative of monomials") {
    QLattice lat(0.55, 0.3, 1.5, 30);
    double qN = std::pow(lat.q, lat.depth);
    for (int m : {1, 2, 3, 4}) {
        // closed-form d_q x^m sampled everywhere, so the deepest point is defined
        LatticeFn dF = LatticeFn::sample(lat, [&](double x) {
            return q_bracket(m, lat.q) * std::pow(x, m - 1);
        });
        double F_b = std::pow(lat.b, m), F_qb = std::pow(qN * lat.b, m);
        double F_a = std::pow(lat.a, m), F_qa = std::pow(qN * lat.a, m);
        double expect = (F_b - F_qb) - (F_a - F_qa);
        CHECK(rel_err(jackson_integral(dF).value, expect) < 1e-12);
    }
}

TEST_CASE("jackson integral rejects undefined and non-finite input") {
    QLattice lat(0.5, 0.0, 1.0, 5);
    LatticeFn f = LatticeFn::sample(lat, [](double x) { return x; });
    f.set_undefined(Branch::B, 4);
    CHECK_THROWS_AS(jackson_integral(f), DomainError);

    LatticeFn g = LatticeFn::sample(lat, [](double x) { return x; });
    g.set(Branch::B, 2, std::numeric_limits<double>::infinity());
    CHECK_THROWS_AS(jackson_integral(g), DomainError);
}

TEST_CASE("q-Pochhammer finite products") {
    CHECK(q_pochhammer(0.5, 0.5, 2) == doctest::Approx(0.375).epsilon(1e-15));
    CHECK(q_pochhammer(0.7, 0.3, 0) == 1.0);
    // recursion (a;q)_{n+1} = (a;q)_n (1 - q^n a), same multiplication order,
    // so the doubles match bit for bit (q^n built by repeated multiplication
    // exactly as the product itself does)
    double qn = 1.0;
    for (int n = 0; n < 12; ++n) {
        CHECK(q_pochhammer(0.8, 0.6, n + 1) == q_pochhammer(0.8, 0.6, n) * (1.0 - qn * 0.8));
        qn *= 0.6;
    }
    CHECK_THROWS_AS(q_pochhammer(0.5, 0.5, -1), ParamError);
}

TEST_CASE("q-Pochhammer infinite products") {
    CHECK(q_pochhammer_inf(0.0, 0.5).value == 1.0);

    InfProduct p = q_pochhammer_inf(0.5, 0.5);
    CHECK(p.converged);
    CHECK(p.value == doctest::Approx(0.288788095086602).epsilon(1e-12));

    // tail agrees with a much deeper finite product
    InfProduct r = q_pochhammer_inf(-0.3, 0.7);
    CHECK(rel_err(r.value, q_pochhammer(-0.3, 0.7, 400)) < 1e-14);

    // q so close to 1 that the factor threshold is unreachable inside the cap
    InfProduct slow = q_pochhammer_inf(0.5, 1.0 - 1e-7);
    CHECK_FALSE(slow.converged);
    CHECK(slow.terms == poch_term_cap);
}

TEST_CASE("paired infinite product covers conjugate root quadratics") {
    // real roots: the pair product splits into two plain products
    {
        double r1 = 2.0, r2 = -5.0;
        double s1 = 1.0 / r1 + 1.0 / r2;
        double s2 = 1.0 / (r1 * r2);
        InfProduct pair = q_pochhammer_pair_inf(0.9, 0.6, s1, s2);
        CHECK(pair.converged);
        double split = q_pochhammer_inf(0.9 / r1, 0.6).value * q_pochhammer_inf(0.9 / r2, 0.6).value;
        CHECK(rel_err(pair.value, split) < 1e-13);
    }
    // complex pair: factors checked against the quadratic evaluated directly
    {
        double s1 = 0.5, s2 = 1.0; // roots of 1 - t/2 + t^2, complex
        InfProduct pair = q_pochhammer_pair_inf(0.8, 0.55, s1, s2);
        CHECK(pair.converged);
        double direct = 1.0;
        double t = 0.8;
        for (int m = 0; m < 300; ++m) {
            direct *= 1.0 - s1 * t + s2 * t * t;
            t *= 0.55;
        }
        CHECK(rel_err(pair.value, direct) < 1e-13);
    }
}

TEST_CASE("triple product sum matches its product form") {
    for (double q : {0.2, 0.5}) {
        for (double x : {0.5, 1.0, 2.0}) {
            TripleProductSides s = jacobi_triple_check(x, q, 40);
            CHECK(rel_err(s.lhs, s.rhs) < 1e-10);
        }
    }
    TripleProductSides tight = jacobi_triple_check(1.0, 0.3, 20);
    CHECK(std::fabs(tight.lhs - tight.rhs) < 1e-12 * (1.0 + std::fabs(tight.lhs)));

    TripleProductSides neg = jacobi_triple_check(-1.0, 0.3, 30);
    CHECK(rel_err(neg.lhs, neg.rhs) < 1e-10);

    // q -> 0: only the k = 0 term survives
    TripleProductSides tiny = jacobi_triple_check(1.0, 1e-4, 10);
    CHECK(tiny.lhs == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(rel_err(tiny.lhs, tiny.rhs) < 1e-10);

    CHECK_THROWS_AS(jacobi_triple_check(0.0, 0.3, 10), ParamError);
}
