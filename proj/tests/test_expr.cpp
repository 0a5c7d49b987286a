#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "noether/errors.hpp"
#include "support.hpp"

using namespace noether;
using namespace testsupport;

TEST_CASE("canonicalize: ring identities") {
    Expr u = E(djet("u", {0, 0}));
    CHECK((u * u - pow(u, 2)).is_zero());
    CHECK((Expr::imaginary() * Expr::imaginary() + Expr(1)).is_zero());
    CHECK(canonicalize(u * u - pow(u, 2)).is_zero());
}

TEST_CASE("canonicalize: rational cancellation, checked by exact evaluation") {
    Expr u10 = E(sjet("u", {1, 0}));
    Expr u01 = E(sjet("u", {0, 1}));
    Expr d = u10 - u01;
    Expr prod = d * (Expr(1) / d);
    CHECK(prod.is_one());

    // oracle: exact rational evaluation at 20 random integer assignments
    std::mt19937_64 rng(7);
    int done = 0;
    while (done < 20) {
        long a = static_cast<long>(rng() % 41) - 20;
        long b = static_cast<long>(rng() % 41) - 20;
        if (a == b) continue;
        EvalPoint pt;
        pt[sjet("u", {1, 0})] = EvalValue(CRat(Rat(a)));
        pt[sjet("u", {0, 1})] = EvalValue(CRat(Rat(b)));
        auto direct = evaluate(d, pt).value.q * evaluate(Expr(1) / d, pt).value.q;
        CHECK(direct == CRat(1));
        CHECK(evaluate(prod, pt).value.q == CRat(1));
        ++done;
    }
}

TEST_CASE("canonicalize: unique normal form for equal rational expressions") {
    Expr a = E(sjet("u", {1, 0}));
    Expr b = E(sjet("u", {0, 1}));
    CHECK((a * a - b * b) / (a - b) == a + b);
    CHECK((Expr(1) / (a - b) + Expr(1) / (b - a)).is_zero());
    // denominator orientation is canonical too
    CHECK(Expr(1) / (b - a) == Expr(-1) / (a - b));
}

TEST_CASE("exponentials merge multiplicatively") {
    Expr x = E(djet("u", {1}));
    Expr y = E(djet("v", {0}));
    CHECK((exp(x) * exp(-x)).is_one());
    CHECK(exp(x) * exp(y) == exp(x + y));
    CHECK(pow(exp(x), 3L) == exp(Expr(3) * x));
    CHECK(exp(Expr()).is_one());
    CHECK((Expr(1) / exp(x)) == exp(-x));
}

TEST_CASE("substitute: simultaneous, non-recursive") {
    Expr ux = E(djet("u", {1, 0}));
    Expr g = E(Atom::parameter("g"));
    std::map<Atom, Expr> b1{{Atom::parameter("g"), Expr()}};
    CHECK(substitute(ux + g, b1) == ux);

    // gamma1 -> gamma_{,2}: the local solution of the area-preserving constraint
    Expr g1 = E(darb("g1", {0, 0}));
    Expr gder = E(darb("g", {0, 1}));
    std::map<Atom, Expr> b2{{darb("g1", {0, 0}), gder}};
    CHECK(substitute(g1, b2) == gder);

    // simultaneous swap does not cascade
    Expr u = E(djet("u", {0}));
    Expr v = E(djet("v", {0}));
    std::map<Atom, Expr> swap{{djet("u", {0}), v}, {djet("v", {0}), u}};
    CHECK(substitute(u + Expr(2) * v, swap) == v + Expr(2) * u);
}

TEST_CASE("substitute: lattice multiplier at integer points is plain arithmetic") {
    Expr u00 = E(sjet("u", {0, 0})), u10 = E(sjet("u", {1, 0}));
    Expr u01 = E(sjet("u", {0, 1})), u11 = E(sjet("u", {1, 1}));
    Expr c = E(Atom::parameter("c"));
    Expr nu = u00 - u11 + c / (u10 - u01);
    std::map<Atom, Expr> b{{sjet("u", {0, 0}), Expr(3)},
                           {sjet("u", {1, 0}), Expr(7)},
                           {sjet("u", {0, 1}), Expr(2)},
                           {sjet("u", {1, 1}), Expr(-1)},
                           {Atom::parameter("c"), Expr(10)}};
    // oracle: 3 - (-1) + 10/(7-2) = 6
    CHECK(substitute(nu, b) == Expr(6));
}

TEST_CASE("evaluate: exact and float paths") {
    Expr ux = E(djet("u", {1, 0}));
    EvalPoint pt{{djet("u", {1, 0}), EvalValue(CRat(Rat(3)))}};
    CHECK(evaluate(ux * ux, pt).value.q == CRat(Rat(9)));

    Expr c = E(Atom::parameter("c"));
    Expr u10 = E(sjet("u", {1, 0})), u01 = E(sjet("u", {0, 1}));
    Expr e = c * ln(u10 - u01);
    EvalPoint pt2{{Atom::parameter("c"), EvalValue(CRat(Rat(2)))},
                  {sjet("u", {1, 0}), EvalValue(CRat(Rat(5)))},
                  {sjet("u", {0, 1}), EvalValue(CRat(Rat(2)))}};
    auto r = evaluate(e, pt2);
    CHECK(!r.value.exact);
    CHECK(std::abs(r.value.f.real() - 2.0L * std::log(3.0L)) < 1e-15L);

    Expr euler_arg = exp(Expr::imaginary() * E(Atom::parameter("p")));
    EvalPoint pt3{{Atom::parameter("p"), EvalValue(3.14159265358979L)}};
    auto r3 = evaluate(euler_arg, pt3);
    CHECK(std::abs(r3.value.f.real() + 1.0L) < 1e-10L);
    CHECK(std::abs(r3.value.f.imag()) < 1e-10L);
}

TEST_CASE("evaluate: division by zero and domain errors signal resample") {
    Expr u10 = E(sjet("u", {1, 0})), u01 = E(sjet("u", {0, 1}));
    EvalPoint pt{{sjet("u", {1, 0}), EvalValue(CRat(Rat(2)))},
                 {sjet("u", {0, 1}), EvalValue(CRat(Rat(2)))}};
    CHECK_THROWS_AS(evaluate(Expr(1) / (u10 - u01), pt), DivisionByZero);
    EvalPoint ptf{{sjet("u", {1, 0}), EvalValue(1.0L)}, {sjet("u", {0, 1}), EvalValue(2.0L)}};
    CHECK_THROWS_AS(evaluate(ln(u10 - u01), ptf), DomainError);
}

TEST_CASE("partial_wrt: basics") {
    Expr ux = E(djet("u", {1, 0})), ut = E(djet("u", {0, 1}));
    Expr L = Expr(Rat(1, 2)) * (ux * ux - ut * ut);
    CHECK(partial_wrt(L, djet("u", {1, 0})) == ux);
    CHECK(partial_wrt(ux, djet("u", {0, 1})).is_zero());

    Expr c = E(Atom::parameter("c"));
    Expr u10 = E(sjet("u", {1, 0})), u01 = E(sjet("u", {0, 1}));
    CHECK(partial_wrt(c * ln(u10 - u01), sjet("u", {0, 1})) == -c / (u10 - u01));
}

TEST_CASE("partial_wrt: linearity and product rule on random pairs") {
    std::vector<Atom> pool{djet("u", {0, 0}), djet("u", {1, 0}), djet("v", {0, 1}),
                           Atom::parameter("c")};
    RandomExprGen gen(11, pool);
    Atom x = djet("u", {1, 0});
    for (int k = 0; k < 40; ++k) {
        Expr a = ast_to_expr(gen.gen(3));
        Expr b = ast_to_expr(gen.gen(3));
        CHECK((a + b).diff(x) == a.diff(x) + b.diff(x));
        CHECK((a * b).diff(x) == a.diff(x) * b + a * b.diff(x));
    }
}

TEST_CASE("is_linear_homogeneous") {
    Expr psi = E(djet("psi", {0, 0, 0, 0}));
    Expr g = E(darb("g", {0, 0, 0, 0}));
    Expr q = -Expr::imaginary() * E(Atom::parameter("e")) * psi * g;
    CHECK(is_linear_homogeneous(q, {"g"}));
    CHECK(!is_linear_homogeneous(g * g, {"g"}));
    Expr x1 = E(djet("x", {1, 0, 0})), x2 = E(djet("x", {0, 1, 0}));
    Expr g1 = E(darb("g1", {0, 0, 0})), g2 = E(darb("g2", {0, 0, 0}));
    CHECK(is_linear_homogeneous(x1 * g1 + x2 * g2, {"g1", "g2"}));
    CHECK(is_linear_homogeneous(Expr(), {"g"}));
    // family inside a kernel argument is nonlinear dependence
    CHECK(!is_linear_homogeneous(ln(g), {"g"}));
    CHECK(!is_linear_homogeneous(Expr(1) / g, {"g"}));
}

TEST_CASE("conjugation: involution, multiplicativity, pairing") {
    std::map<std::string, std::string> pairs{{"psi", "psis"}, {"psis", "psi"}};
    std::vector<Atom> pool{djet("psi", {0, 0}), djet("psi", {1, 0}), djet("psis", {0, 0}),
                           Atom::parameter("m")};
    RandomExprGen gen(23, pool, /*fns=*/true);
    for (int k = 0; k < 30; ++k) {
        Expr a = ast_to_expr(gen.gen(3));
        Expr b = ast_to_expr(gen.gen(3));
        CHECK(a.conjugated(pairs).conjugated(pairs) == a);
        CHECK((a * b).conjugated(pairs) == a.conjugated(pairs) * b.conjugated(pairs));
        CHECK((a + b).conjugated(pairs) == a.conjugated(pairs) + b.conjugated(pairs));
    }
    CHECK(Expr::imaginary().conjugated(pairs) == -Expr::imaginary());
    CHECK(E(djet("psi", {1, 0})).conjugated(pairs) == E(djet("psis", {1, 0})));
    CHECK(E(Atom::parameter("m")).conjugated(pairs) == E(Atom::parameter("m")));
    // complex parameters pick up a conjugation mark, toggled by a second pass
    Expr z = E(Atom::parameter("z", false));
    CHECK(z.conjugated(pairs) != z);
    CHECK(z.conjugated(pairs).conjugated(pairs) == z);
}

TEST_CASE("construction canonicalizes without changing values (AST oracle)") {
    std::vector<Atom> pool{djet("u", {0, 0}), djet("u", {1, 0}), djet("v", {0, 0}),
                           Atom::parameter("c")};
    RandomExprGen gen(101, pool, /*fns=*/true);
    std::mt19937_64 rng(102);
    int checked_points = 0;
    for (int k = 0; k < 40; ++k) {
        AstPtr ast = gen.gen(4);
        Expr e = ast_to_expr(ast);
        CHECK(canonicalize(canonicalize(e)) == canonicalize(e));
        for (int p = 0; p < 5; ++p) {
            std::map<Atom, long double> pt;
            EvalPoint ept;
            for (const Atom& a : pool) {
                long double v = static_cast<long double>(rng() % 2001) / 1000.0L - 1.0L;
                pt[a] = v;
                ept[a] = EvalValue(v);
            }
            std::complex<long double> want;
            try {
                want = ast_eval(ast, pt);
            } catch (...) {
                continue;
            }
            if (!std::isfinite(want.real()) || !std::isfinite(want.imag())) continue;
            std::complex<long double> got;
            try {
                got = evaluate(e, ept).value.as_float();
            } catch (const EngineError&) {
                continue;  // domain edge (ln of negative real): oracle and engine may differ in policy
            }
            long double scale = 1.0L + std::abs(want);
            CHECK(std::abs(got - want) / scale < 1e-10L);
            ++checked_points;
        }
    }
    CHECK(checked_points >= 100);
}

TEST_CASE("rational powers") {
    Expr u = E(djet("u", {0}));
    Expr r = pow(u, Rat(3, 2));
    CHECK(pow(r, 2L) == pow(u, 3L));  // (u^(3/2))^2 folds back to u^3
    CHECK(pow(u, Rat(-1, 2)) * pow(u, Rat(1, 2)) == Expr(1));
    CHECK(pow(Expr(1), Rat(1, 3)).is_one());
}

TEST_CASE("multi-index invariants") {
    CHECK_THROWS_AS(MultiIndex(IndexMode::Derivative, {1, -1}), EngineError);
    MultiIndex J(IndexMode::Shift, {2, -3});
    CHECK(J.order() == 5);
    CHECK(MultiIndex::zero(IndexMode::Shift, 2).is_zero());
    CHECK(J.negated() == MultiIndex(IndexMode::Shift, {-2, 3}));
    CHECK(J.plus(MultiIndex(IndexMode::Shift, {1, 1})) == MultiIndex(IndexMode::Shift, {3, -2}));
}

TEST_CASE("printer round-trips through the value") {
    // str() output is re-parseable; full round-trip tests live in problem_io
    Expr u10 = E(sjet("u", {1, 0})), u01 = E(sjet("u", {0, 1}));
    Expr c = E(Atom::parameter("c"));
    Expr e = (u10 - u01) * c / (u10 + u01) + Expr(Rat(3, 2));
    CHECK(!e.str().empty());
}
