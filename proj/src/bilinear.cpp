#include "hier/bilinear.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "hier/kp.hpp"
#include "hier/toda.hpp"

namespace hier::bilinear {

namespace {
constexpr int kTBase = 100;  // parameter index of T_1 in the generating expansion
constexpr int kXBase = 200;  // parameter index of X_1 in exact Hirota expansion

double maxabs(std::initializer_list<cplx> v) {
    double m = 0;
    for (auto x : v) m = std::max(m, std::abs(x));
    return m;
}
}  // namespace

void ResidualReport::add(const Residual& r, const Point& at) {
    ++probes;
    max_abs = std::max(max_abs, r.abs);
    max_rel = std::max(max_rel, r.rel);
    if (!(r.rel <= tolerance)) failures.push_back(at);
}

Residual make_residual(cplx value, double scale) {
    double a = std::abs(value);
    return {a, a / std::max(scale, std::numeric_limits<double>::min())};
}

// ---------------------------------------------------------------- Hirota operators

DiffPoly hirota_D(int k) { return DiffPoly::param(k - 1); }

Alphabet hirota_alphabet(int K) {
    Alphabet a;
    a.params.clear();
    for (int k = 1; k <= K; ++k) a.params.push_back("D" + std::to_string(k));
    return a;
}

DiffPoly parse_hirota(const std::string& s) { return parse_diffpoly(s, hirota_alphabet()); }

DiffPoly kp_hirota() { return hirota_D(1).pow(4) + Q(3) * hirota_D(2).pow(2) - Q(4) * hirota_D(1) * hirota_D(3); }

DiffPoly drop_odd(const DiffPoly& P) {
    DiffPoly r;
    for (const auto& [m, c] : P.terms())
        if (m.size() % 2 == 0) r.add_term(m, c);
    return r;
}

namespace {
// (time keys, exponent vectors, coefficients) of a Hirota polynomial
struct Expanded {
    std::vector<int> keys;
    std::vector<std::pair<Taylor::Index, double>> terms;
    int degree = 0;
};

Expanded expand(const DiffPoly& P) {
    Expanded e;
    for (const auto& v : P.variables()) {
        if (v.kind != Var::Param) throw std::invalid_argument("Hirota polynomial must be in D_k only");
        e.keys.push_back(v.index + 1);
    }
    for (const auto& [m, c] : P.terms()) {
        Taylor::Index a(e.keys.size(), 0);
        for (const auto& v : m) {
            auto pos = std::find(e.keys.begin(), e.keys.end(), v.index + 1) - e.keys.begin();
            a[pos] += 1;
        }
        e.degree = std::max(e.degree, static_cast<int>(m.size()));
        e.terms.emplace_back(a, c.get_d());
    }
    return e;
}
}  // namespace

cplx hirota_apply(const DiffPoly& P, const TauExpr& f, const TauExpr& g, const Point& pt) {
    Expanded e = expand(P);
    if (e.keys.empty()) return P.constant_term().get_d() * f.eval(pt) * g.eval(pt);
    Taylor h = f.jet(pt, e.keys, e.degree).reflected() * g.jet(pt, e.keys, e.degree);
    cplx s{};
    for (const auto& [a, c] : e.terms) s += c * h.derivative(a);
    return s;
}

DiffPoly hirota_apply_exact(const DiffPoly& P, const DiffPoly& f, const DiffPoly& g) {
    auto shift = [](const DiffPoly& p, int sign) {
        return p.substitute([sign](const Var& v) -> std::optional<DiffPoly> {
            if (v.kind != Var::Param || v.index >= kTBase) return std::nullopt;
            return DiffPoly::param(v.index) + Q(sign) * DiffPoly::param(kXBase + v.index);
        });
    };
    DiffPoly h = shift(f, -1) * shift(g, 1);
    DiffPoly r;
    for (const auto& [m, c] : P.terms()) {
        DiffPoly d = h;
        for (const auto& v : m) d = d.partial(Var{Var::Param, kXBase + v.index, 0});
        r += d * c;
    }
    return r.substitute([](const Var& v) -> std::optional<DiffPoly> {
        if (v.kind == Var::Param && v.index >= kXBase) return DiffPoly(0);
        return std::nullopt;
    });
}

DiffPoly hirota_generating_coefficient(const std::vector<int>& a) {
    int w = 0, d = 0;
    for (size_t k = 0; k < a.size(); ++k) {
        w += static_cast<int>(k + 1) * a[k];
        d += a[k];
    }
    auto T = [](int k) { return DiffPoly::param(kTBase + k - 1); };
    auto with = [](const DiffPoly& h, const std::function<DiffPoly(int)>& arg) {
        return h.substitute([&](const Var& v) -> std::optional<DiffPoly> {
            if (v.kind == Var::Param && v.index < kTBase) return arg(v.index + 1);
            return std::nullopt;
        });
    };
    DiffPoly expo, term(1), acc;
    for (int l = 1; l <= w; ++l) expo += T(l) * hirota_D(l);
    DiffPoly E(1);
    Q fact(1);
    for (int n = 1; n <= d; ++n) {
        term = term * expo;
        fact *= n;
        E += term * Q(1 / fact);
    }
    for (int j = 0; j <= w; ++j) {
        DiffPoly hj = with(kp::schur_h(j), [&](int k) { return Q(-2) * T(k); });
        DiffPoly hd = with(kp::schur_h(j + 1), [](int k) { return hirota_D(k) * Q(1, k); });
        acc += hj * hd * E;
    }
    for (size_t k = 0; k < a.size(); ++k) acc = acc.coefficient_of(Var{Var::Param, kTBase + static_cast<int>(k), 0}, a[k]);
    return acc.substitute([](const Var& v) -> std::optional<DiffPoly> {
        if (v.kind == Var::Param && v.index >= kTBase) return DiffPoly(0);
        return std::nullopt;
    });
}

// ---------------------------------------------------------------- difference identities

TauExpr miwa(const TauExpr& tau, const std::vector<cplx>& z, const std::vector<double>& m) {
    TauExpr r = tau;
    for (size_t i = 0; i < z.size(); ++i)
        if (m[i] != 0) r = r.shifted(1, z[i], -m[i]);
    return r;
}

Residual hirota_miwa(const TauExpr& tau, const std::array<cplx, 3>& l, const Point& pt) {
    std::vector<cplx> z(l.begin(), l.end());
    auto at = [&](std::vector<double> m) { return miwa(tau, z, m).eval(pt); };
    cplx a = (l[1] - l[2]) * at({1, 0, 0}) * at({0, 1, 1});
    cplx b = (l[2] - l[0]) * at({0, 1, 0}) * at({1, 0, 1});
    cplx c = (l[0] - l[1]) * at({0, 0, 1}) * at({1, 1, 0});
    return make_residual(a + b + c, maxabs({a, b, c}));
}

Residual hirota_miwa_four(const TauExpr& tau, const std::array<cplx, 4>& l, const Point& pt) {
    std::vector<cplx> z(l.begin(), l.end());
    auto at = [&](int i, int j) {
        std::vector<double> m(4, 0);
        m[i] = m[j] = 1;
        return miwa(tau, z, m).eval(pt);
    };
    cplx a = (l[0] - l[1]) * (l[2] - l[3]) * at(0, 1) * at(2, 3);
    cplx b = (l[0] - l[2]) * (l[3] - l[1]) * at(0, 2) * at(3, 1);
    cplx c = (l[0] - l[3]) * (l[1] - l[2]) * at(0, 3) * at(1, 2);
    return make_residual(a + b + c, maxabs({a, b, c}));
}

Residual hirota_miwa_log(const TauExpr& tau, const std::array<cplx, 2>& l, const Point& pt) {
    std::vector<cplx> z{l[0], l[1]};
    TauExpr t1 = miwa(tau, z, {-1, 0}), t2 = miwa(tau, z, {0, -1});
    cplx v1 = t1.eval(pt), v2 = t2.eval(pt);
    if (v1 == cplx{} || v2 == cplx{}) throw TauZero("tau vanishes at a shifted point");
    cplx lhs = t1.derivative(1).eval(pt) / v1 - t2.derivative(1).eval(pt) / v2;
    cplx ratio = tau.eval(pt) * miwa(tau, z, {-1, -1}).eval(pt) / (v1 * v2);
    cplx rhs = (l[1] - l[0]) * (ratio - 1.0);
    return make_residual(lhs - rhs, maxabs({lhs, (l[1] - l[0]) * ratio, l[1] - l[0]}));
}

Residual wronskian_identity(const TauExpr& tau, const std::vector<cplx>& lam, const Point& pt) {
    int m = static_cast<int>(lam.size());
    cplx vdm = 1;
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) vdm *= lam[j] - lam[i];
    std::vector<double> all(m, -1);
    cplx lhs = vdm * miwa(tau, lam, all).eval(pt) * std::pow(tau.eval(pt), m - 1);
    Eigen::MatrixXcd W(m, m);
    for (int j = 0; j < m; ++j) {
        std::vector<double> one(m, 0);
        one[j] = -1;
        Taylor s = miwa(tau, lam, one).jet(pt, {1}, std::max(m - 1, 1));
        for (int k = 0; k < m; ++k) {
            // (lam - d)^k applied to the shifted tau
            cplx v{};
            double binom = 1;
            for (int r = 0; r <= k; ++r) {
                if (r) binom = binom * (k - r + 1) / r;
                v += binom * std::pow(lam[j], k - r) * (r % 2 ? -1.0 : 1.0) * s.derivative({r});
            }
            W(j, k) = v;
        }
    }
    cplx rhs = W.determinant();
    return make_residual(lhs - rhs, maxabs({lhs, rhs}));
}

std::vector<cplx> random_lambdas(const TauExpr& tau, int count, std::uint64_t seed) {
    auto mom = tau.momenta(1);
    double rmax = 1;
    for (double p : mom) rmax = std::max(rmax, p);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> rad(1.5 * rmax, 3 * rmax), ang(0, 2 * M_PI);
    std::vector<cplx> r;
    while (static_cast<int>(r.size()) < count) {
        cplx z = std::polar(rad(rng), ang(rng));
        bool ok = true;
        for (auto w : r) ok = ok && std::abs(z - w) > 0.1 * rmax;
        if (ok) r.push_back(z);
    }
    return r;
}

std::vector<Point> random_points(const std::vector<int>& keys, int count, std::uint64_t seed, double scale) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> d(-scale, scale);
    std::uniform_int_distribution<int> site(-2, 2);
    std::vector<Point> r;
    for (int i = 0; i < count; ++i) {
        Point p;
        for (int k : keys) p[k] = k == 0 ? cplx(site(rng)) : cplx(d(rng));
        r.push_back(p);
    }
    return r;
}

ResidualReport check_hirota_miwa(const TauExpr& tau, int probes, std::uint64_t seed) {
    ResidualReport rep;
    rep.check = "hirota-miwa";
    rep.seed = seed;
    auto pts = random_points({1, 2, 3, 4}, probes, seed);
    for (int i = 0; i < probes; ++i) {
        auto l = random_lambdas(tau, 4, seed + 7919 * (i + 1));
        try {
            Residual a = hirota_miwa(tau, {l[0], l[1], l[2]}, pts[i]);
            Residual b = hirota_miwa_four(tau, {l[0], l[1], l[2], l[3]}, pts[i]);
            Residual c = hirota_miwa_log(tau, {l[0], l[1]}, pts[i]);
            rep.add({std::max({a.abs, b.abs, c.abs}), std::max({a.rel, b.rel, c.rel})}, pts[i]);
        } catch (const TauZero&) {
            ++rep.skipped;
        }
    }
    return rep;
}

ResidualReport check_wronskian(const TauExpr& tau, int m, int probes, std::uint64_t seed) {
    ResidualReport rep;
    rep.check = "wronskian-m" + std::to_string(m);
    rep.seed = seed;
    auto pts = random_points({1, 2, 3, 4}, probes, seed);
    for (int i = 0; i < probes; ++i) {
        auto l = random_lambdas(tau, m, seed + 104729 * (i + 1));
        rep.add(wronskian_identity(tau, l, pts[i]), pts[i]);
    }
    return rep;
}

// ---------------------------------------------------------------- bilinear residue

ContourResult bilinear_residue(const TauExpr& tau_a, const TauExpr& tau_b, const ContourSpec& spec) {
    double rmax = 0;
    for (double p : tau_a.momenta(1)) rmax = std::max(rmax, p);
    for (double p : tau_b.momenta(1)) rmax = std::max(rmax, p);
    double amin = std::numeric_limits<double>::infinity();
    for (auto a : spec.miwa_at) amin = std::min(amin, std::abs(a));
    double R = spec.radius;
    if (R == 0) {
        R = rmax > 0 ? 2 * rmax : 1.0;
        if (R * 1.05 >= amin) R = std::sqrt(std::max(rmax, 1e-3) * amin);
    }
    if (R <= rmax) throw ContourTooSmall("contour radius does not enclose all momenta");
    if (R >= amin) throw ContourTooSmall("contour radius exceeds a Miwa pole of e^{xi(t - t')}");

    TauExpr b = miwa(tau_b, spec.miwa_at, spec.miwa_mult);
    Point tp = spec.t;
    for (const auto& [k, v] : spec.dt) tp[k] -= v;

    auto integrand = [&](cplx z) {
        cplx e{};
        for (const auto& [k, v] : spec.dt) e += v * std::pow(z, k);
        cplx f = std::exp(e) * std::pow(z, spec.weight);
        for (size_t j = 0; j < spec.miwa_at.size(); ++j)
            f *= std::pow(1.0 - z / spec.miwa_at[j], -spec.miwa_mult[j]);
        return f * tau_a.shifted(1, z, -1).eval(spec.t) * b.shifted(1, z, 1).eval(tp);
    };
    std::vector<cplx> samples;  // values f(z_j) z_j on the finest grid so far
    auto quad = [&](int M) {
        cplx s{};
        for (int j = 0; j < M; ++j) {
            cplx z = std::polar(R, 2 * M_PI * j / M);
            s += integrand(z) * z;
        }
        return s / double(M);
    };
    ContourResult res;
    res.radius = R;
    int M = spec.start_points;
    cplx prev = quad(M);
    while (M < spec.max_points) {
        M *= 2;
        cplx cur = quad(M);
        double scale = std::max(1.0, std::abs(cur));
        bool done = std::abs(cur - prev) <= spec.stable * scale;
        prev = cur;
        if (done) {
            res.stabilized = true;
            break;
        }
    }
    res.value = prev;
    res.points = M;
    return res;
}

// ---------------------------------------------------------------- T-system, Y-system

namespace {
cplx tau_at(const TauExpr& tau, const std::array<cplx, 3>& lam, const Point& t, const std::array<double, 3>& p) {
    return miwa(tau, {lam[0], lam[1], lam[2]}, {p[0], p[1], p[2]}).eval(t);
}
std::array<double, 3> plus(std::array<double, 3> p, int i, double d) {
    p[i] += d;
    return p;
}
}  // namespace

Residual t_system(const TauExpr& tau, const std::array<cplx, 3>& l, const Point& t, const std::array<double, 3>& p) {
    auto T = [&](double a, double b, double c) { return tau_at(tau, l, t, {p[0] + a, p[1] + b, p[2] + c}); };
    cplx x = (l[1] - l[2]) * T(1, 0, 0) * T(0, 1, 1);
    cplx y = (l[2] - l[0]) * T(0, 1, 0) * T(1, 0, 1);
    cplx z = (l[0] - l[1]) * T(0, 0, 1) * T(1, 1, 0);
    return make_residual(x + y + z, maxabs({x, y, z}));
}

cplx t_function(const TauExpr& tau, const std::array<cplx, 3>& l, const Point& t, const std::array<double, 3>& x) {
    std::array<double, 3> p{(x[1] + x[2] - x[0]) / 2, (x[0] + x[2] - x[1]) / 2, (x[0] + x[1] - x[2]) / 2};
    cplx g{};
    for (int i = 0; i < 3; ++i) g += x[i] * x[i] / 2 * std::log(l[(i + 1) % 3] - l[(i + 2) % 3]);
    return std::exp(g) * tau_at(tau, l, t, p);
}

cplx y_function(const TauExpr& tau, const std::array<cplx, 3>& l, const Point& t, const std::array<double, 3>& x) {
    auto T = [&](int i, double d) { return t_function(tau, l, t, plus(x, i, d)); };
    return T(2, 1) * T(2, -1) / (T(0, 1) * T(0, -1));
}

Residual y_system(const TauExpr& tau, const std::array<cplx, 3>& l, const Point& t, const std::array<double, 3>& x) {
    auto Y = [&](int i, double d) { return y_function(tau, l, t, plus(x, i, d)); };
    cplx lhs = Y(1, 1) * Y(1, -1);
    cplx rhs = (1.0 + Y(2, 1)) * (1.0 + Y(2, -1)) / ((1.0 + 1.0 / Y(0, 1)) * (1.0 + 1.0 / Y(0, -1)));
    return make_residual(lhs - rhs, maxabs({lhs, rhs}));
}

// ---------------------------------------------------------------- linear problems

cplx wave_phi(const TauExpr& tau, const std::array<cplx, 3>& l, cplx z, const Point& t, const std::array<double, 3>& p) {
    cplx pre{};
    for (int i = 0; i < 3; ++i) pre += p[i] * std::log(z - l[i]);
    for (const auto& [k, v] : t)
        if (k > 0) pre += v * std::pow(z, k);
    TauExpr s = miwa(tau, {l[0], l[1], l[2], z}, {p[0], p[1], p[2], 1});
    return std::exp(pre) * s.eval(t);
}

LinearProblemReport linear_problems(const TauExpr& tau, const std::array<cplx, 3>& l, cplx z, const Point& t,
                                    const std::array<double, 3>& p) {
    auto T = [&](int a, int b, int c) { return tau_at(tau, l, t, {p[0] + a, p[1] + b, p[2] + c}); };
    auto F = [&](int a, int b, int c) { return wave_phi(tau, l, z, t, {p[0] + a, p[1] + b, p[2] + c}); };
    std::array<cplx, 3> zz{l[1] - l[2], l[2] - l[0], l[0] - l[1]};
    std::array<cplx, 3> t1{T(1, 0, 0), T(0, 1, 0), T(0, 0, 1)}, f1{F(1, 0, 0), F(0, 1, 0), F(0, 0, 1)};
    // t2[a] = tau shifted in the two directions other than a
    std::array<cplx, 3> t2{T(0, 1, 1), T(1, 0, 1), T(1, 1, 0)};
    cplx f0 = F(0, 0, 0);
    LinearProblemReport rep;
    for (int a = 0; a < 3; ++a) {
        int b = (a + 1) % 3, c = (a + 2) % 3;
        cplx u = t1[c] * f1[b], v = t1[b] * f1[c], w = zz[a] * t2[a] * f0;
        rep.scalar[a] = make_residual(u - v + w, maxabs({u, v, w}));
    }
    cplx g0 = zz[0] * t2[0] * f1[0], g1 = zz[1] * t2[1] * f1[1], g2 = zz[2] * t2[2] * f1[2];
    rep.fourth = make_residual(g0 + g1 + g2, maxabs({g0, g1, g2}));
    Eigen::Matrix4cd A;
    A << 0, t1[2], -t1[1], zz[0] * t2[0],  //
        -t1[2], 0, t1[0], zz[1] * t2[1],   //
        t1[1], -t1[0], 0, zz[2] * t2[2],   //
        -zz[0] * t2[0], -zz[1] * t2[1], -zz[2] * t2[2], 0;
    cplx pf = zz[0] * t1[0] * t2[0] + zz[1] * t1[1] * t2[1] + zz[2] * t1[2] * t2[2];
    cplx det = A.determinant();
    double scale = std::pow(A.cwiseAbs().maxCoeff(), 4);
    rep.determinant = make_residual(det - pf * pf, scale);
    Eigen::JacobiSVD<Eigen::Matrix4cd> svd(A);
    auto sv = svd.singularValues();
    rep.rank = 0;
    for (int i = 0; i < 4; ++i)
        if (sv[i] > 1e-8 * sv[0]) ++rep.rank;
    return rep;
}

// ---------------------------------------------------------------- PDE residuals

Taylor field_jet(const TauExpr& tau, const Point& pt, const std::vector<int>& vars, int order) {
    if (vars.empty() || vars[0] != 1) throw std::invalid_argument("first variable must be x = t_1");
    Taylor F = log_jet(tau, pt, vars, order + 2);
    Taylor U(static_cast<int>(vars.size()), order);
    for (size_t k = 0; k < U.size(); ++k) {
        Taylor::Index a = U.index_of(k), b = a;
        b[0] += 2;
        double fact = 1;
        for (int x : a)
            for (int i = 2; i <= x; ++i) fact *= i;
        U.at(k) = 2.0 * F.derivative(b) / fact;
    }
    return U;
}

namespace {
// series of f(M y) in y when f is a series in x = M y
Taylor compose_linear(const Taylor& f, const Eigen::MatrixXd& M) {
    int nv = f.nvars(), ord = f.order();
    std::vector<Taylor> lin;
    for (int i = 0; i < nv; ++i) {
        Taylor s(nv, ord);
        for (int j = 0; j < nv; ++j)
            if (M(i, j) != 0) s += Taylor::variable(nv, ord, j, 0) * M(i, j);
        lin.push_back(s);
    }
    std::map<std::pair<int, int>, Taylor> pw;
    auto power = [&](int i, int e) -> const Taylor& {
        auto key = std::make_pair(i, e);
        auto it = pw.find(key);
        if (it != pw.end()) return it->second;
        Taylor r = Taylor::constant(nv, ord, 1);
        for (int k = 0; k < e; ++k) r = r * lin[i];
        return pw.emplace(key, r).first->second;
    };
    Taylor r(nv, ord);
    for (size_t k = 0; k < f.size(); ++k) {
        if (f.at(k) == cplx{}) continue;
        Taylor term = Taylor::constant(nv, ord, f.at(k));
        const auto& a = f.index_of(k);
        for (int i = 0; i < nv; ++i)
            if (a[i]) term = term * power(i, a[i]);
        r += term;
    }
    return r;
}

struct Terms {
    cplx value;
    double scale;
};

// KdV in vars (x, t); KP in vars (x, y, t)
Terms kdv_terms(const Taylor& U) {
    cplx u = U.value(), ut = U.derivative({0, 1}), ux = U.derivative({1, 0}), uxxx = U.derivative({3, 0});
    cplx a = 4.0 * ut, b = 6.0 * u * ux;
    return {a - b - uxxx, maxabs({a, b, uxxx})};
}

Terms kp_terms(const Taylor& U) {
    cplx u = U.value(), ux = U.derivative({1, 0, 0}), uxx = U.derivative({2, 0, 0});
    cplx uxt = U.derivative({1, 0, 1}), uyy = U.derivative({0, 2, 0}), uxxxx = U.derivative({4, 0, 0});
    cplx a = 3.0 * uyy, b = 4.0 * uxt, c = 6.0 * ux * ux, d = 6.0 * u * uxx;
    return {a - b + c + d + uxxxx, maxabs({a, b, c, d, uxxxx})};
}

template <class F>
ResidualReport grid_report(const std::string& name, const Grid& g, int key_t, F&& eval) {
    ResidualReport rep;
    rep.check = name;
    std::vector<std::pair<Point, double>> abs_at;
    double scale = 0;
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.nt; ++j) {
            Point pt = g.base;
            pt[1] = g.x0 + (g.x1 - g.x0) * i / std::max(1, g.nx - 1);
            pt[key_t] = g.t0 + (g.t1 - g.t0) * j / std::max(1, g.nt - 1);
            try {
                Terms t = eval(pt);
                abs_at.emplace_back(pt, std::abs(t.value));
                scale = std::max(scale, t.scale);
            } catch (const TauZero&) {
                ++rep.skipped;
            }
        }
    for (const auto& [pt, a] : abs_at) rep.add(make_residual(a, scale), pt);
    return rep;
}
}  // namespace

ResidualReport pde_residual(Equation eq, const TauExpr& tau, const Grid& grid) {
    switch (eq) {
        case Equation::KdV:
            return grid_report("pde-kdv", grid, 3, [&](const Point& pt) { return kdv_terms(field_jet(tau, pt, {1, 3}, 3)); });
        case Equation::KP:
            return grid_report("pde-kp", grid, 3,
                               [&](const Point& pt) { return kp_terms(field_jet(tau, pt, {1, 2, 3}, 4)); });
        case Equation::Toda2D:
            return grid_report("pde-toda2d", grid, -1, [&](const Point& pt) {
                auto r = toda::tau_equation(tau, pt);
                return Terms{r.value, r.scale};
            });
    }
    return {};
}

ResidualReport symmetry_check(const Transform& tr, const TauExpr& tau, const Grid& grid) {
    double l = tr.lambda, a = tr.a, b = tr.b;
    if (l == 0) throw std::invalid_argument("scaling parameter must be nonzero");
    bool kdv = tr.kind == Transform::Galilean;
    // new coordinates = A * old coordinates
    Eigen::MatrixXd A;
    if (kdv) {
        A.resize(2, 2);
        A << l, 3 * a * l * l, 0, l * l * l;
    } else {
        A.resize(3, 3);
        A << l, 2 * b * l, 3 * a * l * l + 3 * b * b * l,  //
            0, l * l, 3 * b * l * l,                      //
            0, 0, l * l * l;
    }
    Eigen::MatrixXd M = A.inverse();
    std::vector<int> keys = kdv ? std::vector<int>{1, 3} : std::vector<int>{1, 2, 3};
    auto eval = [&](const Point& pt) {
        Eigen::VectorXd y(keys.size());
        for (size_t i = 0; i < keys.size(); ++i) y[i] = pt.count(keys[i]) ? pt.at(keys[i]).real() : 0.0;
        Eigen::VectorXd x = M * y;
        Point old = pt;
        for (size_t i = 0; i < keys.size(); ++i) old[keys[i]] = x[i];
        Taylor U = field_jet(tau, old, keys, kdv ? 3 : 4);
        Taylor V = compose_linear(U, M) * (1 / (l * l));
        V.at(0) -= 2 * a / l;
        return kdv ? kdv_terms(V) : kp_terms(V);
    };
    auto rep = grid_report(kdv ? "symmetry-galilean" : "symmetry-kp", grid, 3, eval);
    return rep;
}

RationalField rf_partial(const RationalField& f, int param) {
    Var v{Var::Param, param, 0};
    return {f.num.partial(v) * f.den - f.num * f.den.partial(v), f.den * f.den};
}

DiffPoly kdv_residual_exact(const RationalField& u) {
    RationalField ut = rf_partial(u, 1), ux = rf_partial(u, 0);
    RationalField uxxx = rf_partial(rf_partial(ux, 0), 0);
    // 4 u_t - 6 u u_x - u_xxx over the denominator d_t d_u d_x d_xxx
    DiffPoly a = Q(4) * ut.num * u.den * ux.den * uxxx.den;
    DiffPoly b = Q(6) * u.num * ux.num * ut.den * uxxx.den;
    DiffPoly c = uxxx.num * ut.den * u.den * ux.den;
    return a - b - c;
}

}  // namespace hier::bilinear
