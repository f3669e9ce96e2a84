#include <doctest.h>

#include <random>

#include "hier/psdo.hpp"

using namespace hier;

namespace {
DiffPoly P(const std::string& s) { return parse_diffpoly(s); }
PsiDO op(const std::string& s) { return parse_psido(s); }

PsiDO L2() { return PsiDO::d(2) + PsiDO(P("u")); }

DiffPoly random_poly(std::mt19937& g, int nfuncs) {
    std::uniform_int_distribution<int> coef(-3, 3), ord(0, 2), deg(0, 2), fn(0, nfuncs - 1);
    DiffPoly r;
    for (int t = 0; t < 2; ++t) {
        DiffPoly m(coef(g));
        int d = deg(g);
        for (int i = 0; i < d; ++i) m *= DiffPoly::jet(fn(g), ord(g));
        r += m;
    }
    return r;
}

PsiDO random_op(std::mt19937& g, int depth) {
    std::uniform_int_distribution<int> top(-1, 3);
    int t = top(g);
    PsiDO r;
    for (int k = t; k >= t - 3; --k) r += PsiDO::term(random_poly(g, 2), k);
    r.set_depth(depth);
    return r;
}
}  // namespace

TEST_CASE("commutation rules") {
    CHECK(compose(PsiDO::d(), PsiDO(P("u"))) == op("u d + u_x"));
    PsiDO inv = compose(PsiDO::d(-1), PsiDO(P("u")));
    CHECK(inv.coeff(-1) == P("u"));
    CHECK(inv.coeff(-2) == P("-u_x"));
    CHECK(inv.coeff(-3) == P("u_xx"));
    CHECK(inv.coeff(-4) == P("-u_xxx"));
    CHECK(!inv.exact());

    PsiDO a = PsiDO(DiffPoly(1)) + PsiDO::term(P("u"), -1);
    PsiDO b = PsiDO(DiffPoly(1)) + PsiDO::term(P("v"), -1);
    PsiDO ab = compose(a, b);
    CHECK(ab.coeff(0) == P("1"));
    CHECK(ab.coeff(-1) == P("u + v"));
    CHECK(ab.coeff(-2) == P("u v"));
    CHECK(ab.coeff(-3) == P("-u v_x"));
    CHECK(ab.coeff(-4) == P("u v_xx"));
}

TEST_CASE("depth certification") {
    PsiDO R = fractional_power(L2(), 1, 2);
    CHECK(R.floor() == 1 - kDefaultDepth);
    CHECK_THROWS_AS(R.coeff(-kDefaultDepth - 1), DepthExhausted);
    PsiDO RR = compose(R, R);
    CHECK(RR.floor() == 2 - kDefaultDepth);
}

TEST_CASE("split and residue") {
    auto [p, m] = split(op("d^2 + u + u d^-1"));
    CHECK(p == op("d^2 + u"));
    CHECK(m == op("u d^-1"));
    CHECK(split(L2()).second.is_zero());
    CHECK(residue(op("u d^-1")) == P("u"));

    PsiDO A = fractional_power(L2(), 3, 2).plus_part();
    CHECK(A == op("d^3 + 3/2 u d + 3/4 u_x"));

    PsiDO c = commutator(op("u d"), op("u d^-1"));
    CHECK(is_total_derivative(residue(c)));
}

TEST_CASE("square root coefficients") {
    PsiDO R = fractional_power(L2(), 1, 2);
    CHECK(R.coeff(1) == P("1"));
    CHECK(R.coeff(0).is_zero());
    CHECK(R.coeff(-1) == P("1/2 u"));
    CHECK(R.coeff(-2) == P("-1/4 u_x"));
    CHECK(R.coeff(-3) == P("1/8 u_xx - 1/8 u^2"));
    CHECK(R.coeff(-4) == P("-1/16 u_xxx + 6/16 u u_x"));
    CHECK(compose(R, R).agrees_with(L2()));
    PsiDO c = commutator(R, L2());
    for (const auto& [k, v] : c.coeffs()) CHECK(v.is_zero());
    CHECK(fractional_power(L2(), 1, 1) == L2());
    CHECK_THROWS_AS(fractional_power(op("2 d^2 + u"), 1, 2), NotMonic);
}

TEST_CASE("even coefficients of the square root are total derivatives through d^-8") {
    PsiDO L = L2();
    L.set_depth(10);
    PsiDO R = fractional_power(L, 1, 2);
    for (int m = 2; m <= 8; m += 2) CHECK(is_total_derivative(R.coeff(-m)));
}

TEST_CASE("adjoint") {
    CHECK(adjoint(L2()) == L2());
    PsiDO A = op("d^3 + 3/2 u d + 3/4 u_x");
    CHECK(adjoint(A) == -A);
    CHECK(adjoint(op("u d")) == op("-u d - u_x"));
    std::mt19937 g(3);
    for (int i = 0; i < 10; ++i) {
        PsiDO a = random_op(g, 8), b = random_op(g, 8);
        CHECK(adjoint(adjoint(a)).agrees_with(a));
        CHECK(adjoint(compose(a, b)).agrees_with(compose(adjoint(b), adjoint(a))));
    }
}

TEST_CASE("associativity and residue pairing on random operators") {
    std::mt19937 g(5);
    for (int i = 0; i < 10; ++i) {
        PsiDO a = random_op(g, 8), b = random_op(g, 8), c = random_op(g, 8);
        CHECK(compose(compose(a, b), c).agrees_with(compose(a, compose(b, c))));
        CHECK(is_total_derivative(residue(commutator(a, b))));
        CHECK(residue_pairing(a, b) == residue_pairing_zseries(a, b));
    }
    CHECK(residue_pairing(PsiDO::d(), op("u d^-2")) == P("u"));
    CHECK(residue_pairing_zseries(PsiDO::d(), op("u d^-2")) == P("u"));
    CHECK(residue_pairing(PsiDO(DiffPoly(1)), PsiDO(DiffPoly(1))).is_zero());
    PsiDO K = op("1 + u d^-1 + v d^-2");
    CHECK(residue_pairing(K, K) == residue_pairing_zseries(K, K));
}

TEST_CASE("psido printing round trip") {
    PsiDO R = fractional_power(L2(), 1, 2);
    CHECK(parse_psido(R.str()) == R);
    CHECK(op("d^3 + 3/2 u d + 3/4 u_x").str() == "d^3 + 3/2 u d + 3/4 u_x");
    CHECK(op("(u_xx - u^2) d^-3").str() == "(-u^2 + u_xx) d^-3");
}

TEST_CASE("pseudo-difference operators") {
    DiffPoly c0 = DiffPoly::site(0, 0);
    CHECK(compose_shift(PsDiffOp::S(), PsDiffOp(c0)) == PsDiffOp::term(DiffPoly::site(0, 1), 1));
    PsDiffOp B1 = PsDiffOp::S() + PsDiffOp(DiffPoly::site(1, 0));
    CHECK(residue_shift(B1) == DiffPoly::site(1, 0));
    CHECK(parse_psdiffop(B1.str()) == B1);
    CHECK(B1.str() == "S + u0(n)");

    // sum over a periodic lattice of res[P, Q] telescopes
    std::mt19937 g(9);
    std::uniform_real_distribution<double> U(-1, 1);
    int N = 7;
    auto rnd = [&] {
        std::vector<double> v(N);
        for (auto& x : v) x = U(g);
        return v;
    };
    for (int trial = 0; trial < 5; ++trial) {
        PeriodicShiftOp A(N), B(N);
        for (int s = -2; s <= 2; ++s) {
            A.set(s, rnd());
            B.set(s, rnd());
        }
        auto r = residue_shift(A * B - B * A);
        double sum = 0, scale = 0;
        for (double x : r) {
            sum += x;
            scale += std::abs(x);
        }
        CHECK(std::abs(sum) < 1e-13 * (1 + scale));
    }
}
