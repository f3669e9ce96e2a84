#include <doctest.h>

#include <random>

#include "hier/bilinear.hpp"
#include "hier/fermion.hpp"

using namespace hier;
using namespace hier::fermion;

namespace {

cplx coeff(const FockVector& v, Mask s) {
    auto it = v.find(s);
    return it == v.end() ? cplx{} : it->second;
}

// random combination of basis states of charge n and weight <= wmax
FockVector random_state(const Window& w, int n, int wmax, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(-1, 1);
    FockVector v;
    for (int d = 0; d <= wmax; ++d)
        for (const auto& l : kp::partitions(d)) v[w.basis_mask(l, n)] = cplx(U(rng), U(rng));
    return v;
}

LinearMode random_mode(bool star, int lo, int hi, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(-1, 1);
    LinearMode m;
    m.star = star;
    for (int k = lo; k <= hi; ++k) m.c[k] = cplx(U(rng), U(rng));
    return m;
}

NormalExp random_exp(const std::vector<int>& rows, const std::vector<int>& cols, double scale, std::mt19937_64& rng,
                     Ordering o = Ordering::Empty) {
    std::uniform_real_distribution<double> U(-scale, scale);
    NormalExp e;
    e.ordering = o;
    for (int i : rows)
        for (int k : cols) e.B[{i, k}] = cplx(U(rng), U(rng));
    return e;
}

Clifford single(const Clifford::Factor& f) {
    Clifford g;
    g.factors.push_back(f);
    return g;
}

}  // namespace

TEST_CASE("mode action on vacua") {
    Window w(8, 4);
    FockVector vac = ket(w.vacuum(0));
    CHECK(apply_mode(w, false, 0, vac) == ket(w.vacuum(1)));
    CHECK(apply_mode(w, true, 0, vac).empty());
    CHECK(apply_mode(w, false, -1, vac).empty());
    for (int n = -3; n <= 3; ++n) {
        CHECK(apply_mode(w, false, n, ket(w.vacuum(n))) == ket(w.vacuum(n + 1)));
        CHECK(apply_mode(w, true, n, ket(w.vacuum(n + 1))) == ket(w.vacuum(n)));
    }
    CHECK_THROWS_AS(apply_mode(w, false, 8, vac), fermion::WindowExhausted);
    CHECK_THROWS_AS(apply_mode(w, true, -9, vac), fermion::WindowExhausted);

    // canonical anticommutators on a random state
    std::mt19937_64 rng(3);
    FockVector v = random_state(w, 0, 3, rng);
    for (int j = -3; j <= 3; ++j)
        for (int k = -3; k <= 3; ++k) {
            auto pp = axpy(apply_mode(w, false, j, apply_mode(w, false, k, v)), 1,
                           apply_mode(w, false, k, apply_mode(w, false, j, v)));
            CHECK(pp.empty());
            auto ps = axpy(apply_mode(w, false, j, apply_mode(w, true, k, v)), 1,
                           apply_mode(w, true, k, apply_mode(w, false, j, v)));
            CHECK(max_abs_diff(ps, j == k ? v : FockVector{}) < 1e-15);
        }
}

TEST_CASE("basis by charge and diagram") {
    Window w(10, 6);
    for (int n : {-2, 0, 1, 3}) {
        std::vector<FockVector> basis;
        for (int d = 0; d <= 4; ++d)
            for (const auto& l : kp::partitions(d)) {
                Mask s = w.basis_mask(l, n);
                CHECK(w.charge(s) == n);
                CHECK(w.diagram(s) == l);
                CHECK(w.weight(s) == d);
                FockVector b = basis_state(w, l, n);
                REQUIRE(b.size() == 1);
                CHECK(b.begin()->first == s);
                basis.push_back(b);
            }
        for (size_t i = 0; i < basis.size(); ++i)
            for (size_t j = 0; j < basis.size(); ++j) CHECK(pairing(basis[i], basis[j]) == cplx(i == j ? 1.0 : 0.0));
    }
    // different charges never pair
    CHECK(pairing(basis_state(w, {1}, 0), basis_state(w, {1}, 1)) == cplx{});
    CHECK_THROWS_AS(w.basis_mask({12}, 0), fermion::WindowExhausted);
}

TEST_CASE("wick theorem") {
    Window w(16, 8);
    CHECK(expectation(w, 0, {LinearMode::mode(false, -1), LinearMode::mode(true, -1)}) == cplx(1));
    CHECK(expectation(w, 0, {LinearMode::mode(false, -1), LinearMode::mode(true, -2)}) == cplx(0));
    CHECK(expectation(w, 0, {LinearMode::mode(false, 0), LinearMode::mode(true, 0)}) == cplx(0));

    // two-point function as a geometric sum over the window
    cplx z(0.15, 0.1), zeta(-2.1, 1.4);
    for (int n : {-1, 0, 2}) {
        cplx g = expectation(w, n, {LinearMode::psi_star(w, zeta), LinearMode::psi(w, z)});
        cplx exact = std::pow(z, n) * std::pow(zeta, 1 - n) / (zeta - z);
        CHECK(std::abs(g - exact) < 1e-12 * std::abs(exact));
    }

    // product formula for two pairs at n = 0
    {
        cplx z1(0.3, 0.1), z2(-0.25, 0.2), s1(2.2, -0.5), s2(-1.8, 1.7);
        cplx lhs = expectation(w, 0, {LinearMode::psi_star(w, s1), LinearMode::psi_star(w, s2), LinearMode::psi(w, z2),
                                      LinearMode::psi(w, z1)});
        cplx det = s1 * s2 * (1.0 / ((s1 - z1) * (s2 - z2)) - 1.0 / ((s1 - z2) * (s2 - z1)));
        cplx prod = (z2 - z1) * (s1 - s2) / ((s1 - z1) * (s1 - z2) * (s2 - z1) * (s2 - z2)) * s1 * s2;
        CHECK(std::abs(lhs - det) < 1e-12 * std::abs(det));
        CHECK(std::abs(det - prod) < 1e-14 * std::abs(det));
    }

    std::mt19937_64 rng(17);
    for (int m = 1; m <= 3; ++m) {
        std::vector<LinearMode> v, ws;
        for (int i = 0; i < m; ++i) {
            v.push_back(random_mode(false, -4, 3, rng));
            ws.push_back(random_mode(true, -4, 3, rng));
        }
        for (int n : {0, 1}) {
            cplx a = wick_expectation(w, v, ws, n);
            cplx b = brute_force_wick(w, Clifford::identity(), Clifford::identity(), v, ws, n);
            CHECK(std::abs(a - b) < 1e-12 * std::max(1.0, std::abs(b)));
        }
        // with group elements on both sides
        Clifford gp = single(random_exp({-3, -2, -1}, {0, 1, 2}, 0.7, rng));
        Clifford g = single(random_exp({-2, -1, 0}, {-1, 1, 3}, 0.7, rng));
        g *= single(random_exp({1, 2}, {-2, 0}, 0.5, rng, Ordering::Dirac));
        cplx a = generalized_wick(w, gp, g, v, ws, 0);
        cplx b = brute_force_wick(w, gp, g, v, ws, 0);
        CHECK(std::abs(a - b) < 1e-12 * std::max(1.0, std::abs(b)));
    }
    NormalExp kill;
    kill.B[{0, 0}] = -1;  // 1 - psi*_0 psi_0 annihilates |0>
    Clifford gk = single(kill);
    CHECK_THROWS_AS(generalized_wick(w, Clifford::identity(), gk, {}, {}, 0), ZeroDenominator);
    CHECK(std::abs(generalized_wick(w, Clifford::identity(), gk, {}, {}, 1) - 1.0) < 1e-15);
}

TEST_CASE("current algebra") {
    Window w(16, 8);
    std::mt19937_64 rng(5);
    FockVector v = random_state(w, 0, 4, rng);
    for (int k = 1; k <= 4; ++k) {
        auto c = axpy(apply_current(w, k, apply_current(w, -k, v)), -1, apply_current(w, -k, apply_current(w, k, v)));
        CHECK(max_abs_diff(c, axpy({}, k, v)) < 1e-13);
        for (int l = 1; l <= 4; ++l) {
            if (l == k) continue;
            auto d = axpy(apply_current(w, k, apply_current(w, -l, v)), -1, apply_current(w, -l, apply_current(w, k, v)));
            CHECK(max_abs_diff(d, {}) < 1e-13);
        }
    }
    // J_+ on the vacuum pairing
    Point tp{{1, 0.3}, {2, -0.2}, {3, 0.5}}, tm{{-1, 0.25}, {-2, 0.1}, {-3, -0.15}};
    CHECK(coeff(dual_vacuum_flow(w, 0, tp), w.vacuum(0)) == cplx(1));
    CHECK(max_abs_diff(j_plus_flow(w, tp, ket(w.vacuum(2)), false), ket(w.vacuum(2))) == 0);

    // e^{J+} e^{J-} |0> = exp(sum k t_k t_{-k}) e^{J-} |0>, compared at low weight
    Window big(24, 20);
    Point tps{{1, 0.05}, {2, -0.04}, {3, 0.03}}, tms{{-1, 0.06}, {-2, 0.02}, {-3, -0.05}};
    FockVector lhs = exp_current(big, tps, exp_current(big, tms, ket(big.vacuum(0))));
    FockVector rhs = exp_current(big, tms, ket(big.vacuum(0)));
    cplx f = std::exp(1.0 * 0.05 * 0.06 + 2.0 * (-0.04) * 0.02 + 3.0 * 0.03 * (-0.05));
    double worst = 0;
    for (const auto& [s, c] : rhs)
        if (big.weight(s) <= 6) worst = std::max(worst, std::abs(coeff(lhs, s) - f * c));
    CHECK(worst < 1e-14);

    // e^{J+} psi_n e^{-J+} = sum_k psi_{n-k} h_k(t), on a ket
    std::vector<cplx> tv{0.3, -0.2, 0.5};
    FockVector u = random_state(w, 0, 3, rng);
    for (int n : {-1, 0, 2}) {
        FockVector a = j_plus_flow(w, tp, apply_mode(w, false, n, u), false);
        FockVector eu = j_plus_flow(w, tp, u, false), b;
        for (int k = 0; k <= 6; ++k)
            b = axpy(b, kp::evaluate_times(kp::schur_h(k), tv), apply_mode(w, false, n - k, eu));
        CHECK(max_abs_diff(a, b) < 1e-13);
    }
}

TEST_CASE("schur functions as matrix elements of the current flow") {
    Window w(12, 6);
    auto dual = dual_vacuum_flow_exact(w, 0);
    for (int d = 0; d <= 4; ++d)
        for (const auto& l : kp::partitions(d)) {
            Mask s = w.basis_mask(l, 0);
            REQUIRE(dual.count(s));
            CHECK(dual.at(s) == kp::schur_s(l));
            // the Frobenius-ordered product differs by (-1)^{sum (beta_i + 1)}
            kp::YoungDiagram lt = kp::transpose(l);
            int b = 0;
            for (int i = 1; i <= static_cast<int>(l.size()) && l[i - 1] >= i; ++i) b += lt[i - 1] - i + 1;
            CHECK(basis_state(w, l, 0).at(s) == cplx(b % 2 ? -1.0 : 1.0));
        }
    // same through the complex polynomial route
    TimePoly one = vev_tau_poly(w, Clifford::identity());
    CHECK(one.is_constant());
    CHECK(one.constant_term() == cplx(1));
}

TEST_CASE("vacuum expectations as tau functions") {
    Window w(16, 8);
    Point tp{{1, 0.2}, {2, -0.1}}, tm{{-1, 0.15}};
    CHECK(vev_tau(w, Clifford::identity(), tp, {}, 0) == cplx(1));
    // <0|e^{J+} e^{-J-}|0> = exp(-sum k t_k t_{-k})
    CHECK(std::abs(vev_tau(w, Clifford::identity(), tp, tm, 0) - std::exp(-0.2 * 0.15)) < 1e-15);

    // charge selection
    Clifford charged = single(LinearMode::psi(w, 0.7));
    CHECK(vev_tau(w, charged, tp, {}, 0, 0) == cplx(0));
    CHECK(vev_tau(w, charged, {}, {}, 1) == cplx(1));  // <1|psi(z)|0> = 1

    // Toda solitons: the fermionic value against the determinant formula
    Window ws(24, 16);
    std::vector<cplx> p{0.6, cplx(1.3, 0.2), -0.9}, q{1.2, -0.5, cplx(0.4, 0.7)}, b{1.0, 0.7, cplx(0.3, -0.5)};
    Point pt{{1, 0.12}, {2, -0.03}, {3, 0.01}, {-1, 0.1}, {-2, 0.02}};
    Point tpl, tmi;
    cplx gauge{};
    for (const auto& [k, t] : pt) (k > 0 ? tpl : tmi)[k] = t;
    for (const auto& [k, t] : tpl)
        if (pt.count(-k)) gauge += double(k) * t * pt.at(-k);
    for (int N = 1; N <= 3; ++N) {
        SolitonSpec s;
        s.hierarchy = "toda";
        s.p.assign(p.begin(), p.begin() + N);
        s.q.assign(q.begin(), q.begin() + N);
        s.alpha.assign(b.begin(), b.begin() + N);
        TauExpr det = tau_soliton(s, Representation::Direct);
        Clifford g = Clifford::soliton_product(ws, s.p, s.q, s.alpha);
        for (int n : {0, 1, -1}) {
            Point at = pt;
            at[0] = n;
            cplx exact = std::exp(-gauge) * det.eval(at);
            cplx ferm = vev_tau(ws, g, tpl, tmi, n);
            CHECK(std::abs(ferm - exact) < 1e-10 * std::abs(exact));
        }
    }

    // a polynomial tau from a normal exponent passes the Hirota-Miwa test
    std::mt19937_64 rng(23);
    Window wp(16, 9);
    Clifford g = single(random_exp({-3, -2, -1}, {0, 1, 2}, 1.0, rng));
    TimePoly poly = vev_tau_poly(wp, g);
    CHECK(std::abs(vev_tau(wp, g, tp, {}, 0) - poly.eval(tp)) < 1e-12 * std::abs(poly.eval(tp)));
    TauExpr tau(poly);
    CHECK(bilinear::check_hirota_miwa(tau, 10, 31).max_rel < 1e-9);
    // a non-group perturbation of the same polynomial fails
    TauExpr bad = tau + TauExpr::time(1) * TauExpr::time(2) * 0.3;
    CHECK(bilinear::check_hirota_miwa(bad, 10, 31).max_rel > 1e-4);
    CHECK_THROWS_AS(vev_tau(Window(6, 8), Clifford::identity(), {}, {}, 0), fermion::WindowExhausted);
}

TEST_CASE("bosonization") {
    Window w(12, 6);
    for (int n : {0, 1, -1}) {
        auto triv = bosonization_check(w, n, {}, cplx(1.3, 0.4));
        CHECK(std::abs(triv.mode_sum - std::pow(cplx(1.3, 0.4), n - 1)) < 1e-14);
        Point t{{1, 0.02}, {2, -0.015}, {3, 0.01}, {-1, 0.018}, {-2, -0.01}};
        auto r = bosonization_check(w, n, t, cplx(1.3, 0.4));
        CHECK(r.residual < 1e-12);
        CHECK(std::abs(r.closed_form - r.closed_form_full) < 1e-4 * std::abs(r.closed_form_full));
    }
    Window wide(16, 8);
    CHECK(pair_vertex_check(wide, 0, cplx(3.0, 0.5), cplx(0.3, 0.2), 4) < 1e-10);
    CHECK(pair_vertex_check(wide, 1, cplx(-2.5, 1.0), cplx(0.2, -0.3), 4) < 1e-10);
}

TEST_CASE("normal ordering with respect to the two vacua") {
    auto c = dirac_to_empty({});
    CHECK(c.result.empty());
    CHECK(c.scalar == cplx(1));

    // rank one: B = A / (1 - alpha v.P+w), scalar 1 - alpha v.P+w
    std::vector<int> idx{-2, -1, 0, 1, 2};
    std::vector<cplx> wv{0.3, -0.5, 0.7, 0.2, -0.4}, vv{0.6, 0.1, -0.3, 0.8, 0.5};
    cplx alpha(0.7, 0.2), pair{};
    Matrix A;
    for (size_t i = 0; i < idx.size(); ++i) {
        for (size_t k = 0; k < idx.size(); ++k) A[{idx[i], idx[k]}] = alpha * wv[i] * vv[k];
        if (idx[i] >= 0) pair += vv[i] * wv[i];
    }
    c = dirac_to_empty(A);
    CHECK(std::abs(c.scalar - (1.0 - alpha * pair)) < 1e-14);
    for (const auto& [ik, a] : A) CHECK(std::abs(c.result[ik] - a / (1.0 - alpha * pair)) < 1e-14);
    auto back = empty_to_dirac(c.result);
    CHECK(std::abs(back.scalar * c.scalar - 1.0) < 1e-13);
    for (const auto& [ik, a] : A) CHECK(std::abs(back.result[ik] - a) < 1e-13);

    Matrix sing{{{0, 0}, 1.0}};
    CHECK_THROWS_AS(dirac_to_empty(sing), SingularConversion);

    // the scalar is the expectation in the empty vacuum, and the operators agree
    Window w(8, 4);
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 4; ++trial) {
        NormalExp d = random_exp({-2, -1, 0, 1}, {-1, 0, 1, 2}, 0.6, rng, Ordering::Dirac);
        auto conv = dirac_to_empty(d.B);
        FockVector full = ket(w.filled());
        FockVector img = apply(w, d, full);
        CHECK(std::abs(coeff(img, w.filled()) - conv.scalar) < 1e-13);
        NormalExp e;
        e.B = conv.result;
        FockVector v = random_state(w, 0, 3, rng);
        CHECK(max_abs_diff(apply(w, d, v), axpy({}, conv.scalar, apply(w, e, v))) < 1e-12);
    }
}

TEST_CASE("bilinear relation for constructed elements") {
    Window w(10, 4);
    std::mt19937_64 rng(59);
    std::vector<Clifford> gs;
    gs.push_back(Clifford::identity());
    gs.push_back(single(random_exp({-2, -1, 0}, {-1, 0, 1, 2}, 0.8, rng)));
    gs.push_back(single(random_exp({-1, 0, 1}, {-2, 0, 1}, 0.8, rng, Ordering::Dirac)));
    gs.push_back(Clifford::soliton_product(w, {0.6, -0.8}, {1.1, 0.5}, {1.0, cplx(0.4, 0.3)}));
    Clifford mixed = gs[1];
    mixed *= gs[3];
    mixed *= single(random_mode(true, -2, 2, rng));
    gs.push_back(mixed);
    for (const auto& g : gs) {
        int q = g.charge();
        FockVector v = random_state(w, 0, 2, rng), v2 = random_state(w, 0, 2, rng);
        FockVector u = random_state(w, q + 1, 2, rng), u2 = random_state(w, q - 1, 2, rng);
        CHECK(std::abs(bilinear_defect(w, g, u, v, u2, v2)) < 1e-11);
    }
}
