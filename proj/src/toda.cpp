#include "hier/toda.hpp"

#include <cmath>

namespace hier::toda {

namespace {
int wrap(int n, int N) { return ((n % N) + N) % N; }

double maxabs(std::initializer_list<cplx> v) {
    double m = 0;
    for (auto x : v) m = std::max(m, std::abs(x));
    return m;
}

Point at_site(Point pt, int dn) {
    pt[0] = (pt.count(0) ? pt.at(0) : cplx{}) + double(dn);
    return pt;
}

cplx value(const TauExpr& tau, const Point& pt) {
    cplx v = tau.eval(pt);
    if (v == cplx{}) throw TauZero("tau vanishes at a lattice point");
    return v;
}

// log tau_{n+dn} as a series in (t_1, t_{-1})
Taylor log_series(const TauExpr& tau, const Point& pt, int dn, int order) {
    return log_jet(tau, at_site(pt, dn), {1, -1}, order);
}
}  // namespace

TodaField TodaField::from_phi(const std::vector<double>& phi, const std::vector<double>& u0) {
    int N = static_cast<int>(phi.size());
    TodaField f;
    f.u0 = u0;
    for (int n = 0; n < N; ++n) f.c.push_back(std::exp(phi[n] - phi[wrap(n - 1, N)]));
    return f;
}

TodaRates flow_rhs(const TodaField& f) {
    int N = f.period();
    TodaRates r;
    for (int n = 0; n < N; ++n) {
        r.dlogc_t1.push_back(f.u0[n] - f.u0[wrap(n - 1, N)]);
        r.du0_tm1.push_back(f.c[n] - f.c[wrap(n + 1, N)]);
    }
    return r;
}

TodaField chain_rhs(const TodaField& f) {
    int N = f.period();
    TodaField d;
    for (int n = 0; n < N; ++n) {
        d.c.push_back(f.c[n] * (f.u0[n] - f.u0[wrap(n - 1, N)]));
        d.u0.push_back(f.c[wrap(n + 1, N)] - f.c[n]);
    }
    return d;
}

namespace {
TodaField axpy(const TodaField& x, double a, const TodaField& y) {
    TodaField r = x;
    for (size_t i = 0; i < r.c.size(); ++i) {
        r.c[i] += a * y.c[i];
        r.u0[i] += a * y.u0[i];
    }
    return r;
}
}  // namespace

TodaField rk4_step(const TodaField& f, double dt) {
    TodaField k1 = chain_rhs(f);
    TodaField k2 = chain_rhs(axpy(f, dt / 2, k1));
    TodaField k3 = chain_rhs(axpy(f, dt / 2, k2));
    TodaField k4 = chain_rhs(axpy(f, dt, k3));
    TodaField r = f;
    for (size_t i = 0; i < r.c.size(); ++i) {
        r.c[i] += dt / 6 * (k1.c[i] + 2 * k2.c[i] + 2 * k3.c[i] + k4.c[i]);
        r.u0[i] += dt / 6 * (k1.u0[i] + 2 * k2.u0[i] + 2 * k3.u0[i] + k4.u0[i]);
    }
    return r;
}

std::vector<Snapshot> integrate_chain(const TodaField& f, double T, int steps, int every) {
    std::vector<Snapshot> out{{0, f}};
    TodaField cur = f;
    double dt = T / steps;
    for (int s = 1; s <= steps; ++s) {
        cur = rk4_step(cur, dt);
        if (s % every == 0 || s == steps) out.push_back({s * dt, cur});
    }
    return out;
}

PeriodicShiftOp lax(const TodaField& f) {
    int N = f.period();
    PeriodicShiftOp L(N);
    L.set(1, std::vector<double>(N, 1.0));
    L.set(0, f.u0);
    L.set(-1, f.c);
    L.set_floor(-2);
    return L;
}

double conserved_J(int k, const TodaField& f) {
    if (k < 1) throw std::invalid_argument("J_k needs k >= 1");
    PeriodicShiftOp L = lax(f), P = L;
    for (int i = 1; i < k; ++i) P = P * L;
    double s = 0;
    for (double v : residue_shift(P)) s += v;
    return s;
}

PeriodicShiftOp gauge_transform(const PeriodicShiftOp& L, const std::vector<double>& phi, double alpha) {
    int N = L.period();
    PeriodicShiftOp r(N);
    for (const auto& [s, v] : L.coeffs()) {
        std::vector<double> w(N);
        for (int n = 0; n < N; ++n) w[n] = v[n] * std::exp(alpha * (phi[wrap(n + s, N)] - phi[n]));
        r.set(s, w);
    }
    r.set_floor(L.floor());
    return r;
}

Alphabet site_alphabet() {
    Alphabet a;
    a.sites = {"c", "u0", "c_t1", "u0_tm1"};
    return a;
}

std::pair<DiffPoly, DiffPoly> zero_curvature() {
    auto site = [](int f, int s) { return DiffPoly::site(f, s); };
    PsDiffOp B1 = PsDiffOp::S(1) + PsDiffOp(site(1, 0));
    PsDiffOp Bm1 = PsDiffOp::term(site(0, 0), -1);
    PsDiffOp d1Bm1 = PsDiffOp::term(site(2, 0), -1);
    PsDiffOp dm1B1 = PsDiffOp(site(3, 0));
    PsDiffOp zc = d1Bm1 - dm1B1 - (compose_shift(B1, Bm1) - compose_shift(Bm1, B1));
    return {zc.coeff(0), zc.coeff(-1)};
}

// ---------------------------------------------------------------- tau form

TauResidual tau_equation(const TauExpr& tau, const Point& pt) {
    cplx d = log_series(tau, pt, 0, 2).derivative({1, 1}) - 1.0;
    cplx t0 = value(tau, pt);
    cplx ratio = value(tau, at_site(pt, 1)) * value(tau, at_site(pt, -1)) / (t0 * t0);
    return {d + ratio, maxabs({d, ratio})};
}

double c_from_tau(const TauExpr& tau, const Point& pt) {
    cplx t0 = value(tau, pt);
    return (value(tau, at_site(pt, 1)) * value(tau, at_site(pt, -1)) / (t0 * t0)).real();
}

cplx u0_from_tau(const TauExpr& tau, const Point& pt) {
    // the gauge factor contributes -t_{-1} to d_1 log tau_n at every n, which cancels
    return log_jet(tau, at_site(pt, 1), {1}, 1).derivative({1}) - log_jet(tau, pt, {1}, 1).derivative({1});
}

TauResidual c_equation(const TauExpr& tau, const Point& pt) {
    auto lc = [&](int m) {
        return log_series(tau, pt, m + 1, 2) + log_series(tau, pt, m - 1, 2) - log_series(tau, pt, m, 2) * 2.0;
    };
    auto c = [&](int m) {
        Point q = at_site(pt, m);
        cplx t0 = value(tau, q);
        return value(tau, at_site(q, 1)) * value(tau, at_site(q, -1)) / (t0 * t0);
    };
    cplx lhs = lc(0).derivative({1, 1});
    cplx c0 = c(0), cp = c(1), cm = c(-1);
    return {lhs - 2.0 * c0 + cp + cm, maxabs({lhs, 2.0 * c0, cp, cm})};
}

TauResidual shifted_identity(const TauExpr& tau, const Point& pt, cplx a, cplx b) {
    // full tau = G tau' with log G = -sum k t_k t_{-k}; shifting t_+ by -[a^{-1}]
    // and t_- by -[b^{-1}] changes log G by xi(t_-, 1/a) + xi(t_+, 1/b) + log(1 - 1/(ab))
    auto xi = [&](int sign, cplx z) {
        cplx s{};
        for (const auto& [k, v] : pt)
            if (k * sign > 0) s += v * std::pow(z, std::abs(k));
        return s;
    };
    auto full = [&](int dn, bool sa, bool sb) {
        TauExpr t = tau.site_shifted(dn);
        cplx lg{};
        if (sa) {
            t = t.shifted(1, a, -1);
            lg += xi(-1, 1.0 / a);
        }
        if (sb) {
            t = t.shifted(-1, b, -1);
            lg += xi(1, 1.0 / b);
        }
        if (sa && sb) lg += std::log(1.0 - 1.0 / (a * b));
        return std::exp(lg) * t.eval(pt);
    };
    cplx x = full(0, true, false) * full(0, false, true);
    cplx y = full(0, false, false) * full(0, true, true);
    cplx z = full(1, false, true) * full(-1, true, false) / (a * b);
    return {x - y - z, maxabs({x, y, z})};
}

TauResidual chain_constraint(const TauExpr& tau, const Point& pt) {
    Taylor lc = log_series(tau, pt, 1, 1) + log_series(tau, pt, -1, 1) - log_series(tau, pt, 0, 1) * 2.0;
    cplx d = lc.derivative({1, 0}) + lc.derivative({0, 1});
    return {d, maxabs({lc.derivative({1, 0}), lc.derivative({0, 1}), 1.0})};
}

TauResidual sine_gordon(const TauExpr& tau, const Point& pt) {
    Taylor phi0 = log_series(tau, pt, 1, 2) - log_series(tau, pt, 0, 2);
    Taylor phi1 = log_series(tau, pt, 2, 2) - log_series(tau, pt, 1, 2);
    Taylor phi = (phi0 - phi1) * cplx(0, 1);
    cplx lhs = phi.derivative({1, 1}), rhs = 4.0 * std::sin(phi.value());
    return {lhs - rhs, maxabs({lhs, rhs})};
}

}  // namespace hier::toda
