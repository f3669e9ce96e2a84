#include "hier/tau.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <tuple>

namespace hier {

// ---------------------------------------------------------------- TimePoly

TimePoly::TimePoly(cplx c) {
    if (c != cplx{}) t_[{}] = c;
}

TimePoly TimePoly::time(int k) {
    TimePoly p;
    p.t_[{{k, 1}}] = 1;
    return p;
}

bool TimePoly::is_constant() const { return t_.empty() || (t_.size() == 1 && t_.begin()->first.empty()); }

cplx TimePoly::constant_term() const {
    auto it = t_.find({});
    return it == t_.end() ? cplx{} : it->second;
}

void TimePoly::add(const TimeMono& m, cplx c) {
    if (c == cplx{}) return;
    auto [it, fresh] = t_.emplace(m, c);
    if (!fresh) {
        it->second += c;
        if (it->second == cplx{}) t_.erase(it);
    }
}

TimePoly& TimePoly::operator+=(const TimePoly& o) {
    for (const auto& [m, c] : o.t_) add(m, c);
    return *this;
}

TimePoly& TimePoly::operator-=(const TimePoly& o) {
    for (const auto& [m, c] : o.t_) add(m, -c);
    return *this;
}

TimePoly& TimePoly::operator*=(cplx s) {
    if (s == cplx{}) {
        t_.clear();
        return *this;
    }
    for (auto& [m, c] : t_) c *= s;
    return *this;
}

static TimeMono mono_mul(const TimeMono& a, const TimeMono& b) {
    TimeMono r;
    size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && a[i].first < b[j].first))
            r.push_back(a[i++]);
        else if (i == a.size() || b[j].first < a[i].first)
            r.push_back(b[j++]);
        else {
            r.emplace_back(a[i].first, a[i].second + b[j].second);
            ++i, ++j;
        }
    }
    return r;
}

TimePoly operator*(const TimePoly& a, const TimePoly& b) {
    TimePoly r;
    for (const auto& [ma, ca] : a.t_)
        for (const auto& [mb, cb] : b.t_) r.add(mono_mul(ma, mb), ca * cb);
    return r;
}

TimePoly TimePoly::derivative(int k) const {
    TimePoly r;
    for (const auto& [m, c] : t_)
        for (size_t i = 0; i < m.size(); ++i) {
            if (m[i].first != k) continue;
            TimeMono d = m;
            int e = d[i].second;
            if (e == 1)
                d.erase(d.begin() + i);
            else
                d[i].second -= 1;
            r.add(d, c * double(e));
        }
    return r;
}

static cplx point_value(const Point& pt, int k) {
    auto it = pt.find(k);
    return it == pt.end() ? cplx{} : it->second;
}

cplx TimePoly::eval(const Point& pt) const {
    cplx s{};
    for (const auto& [m, c] : t_) {
        cplx v = c;
        for (auto [k, e] : m) v *= std::pow(point_value(pt, k), e);
        s += v;
    }
    return s;
}

static TimePoly binomial_power(int k, cplx shift, int e) {
    // (t_k + shift)^e
    TimePoly r(1.0), base = TimePoly::time(k) + TimePoly(shift);
    for (int i = 0; i < e; ++i) r = r * base;
    return r;
}

TimePoly TimePoly::shifted(const std::map<int, cplx>& delta) const {
    TimePoly r;
    for (const auto& [m, c] : t_) {
        TimePoly term(c);
        TimeMono rest;
        for (auto [k, e] : m) {
            auto it = delta.find(k);
            if (it == delta.end() || it->second == cplx{})
                rest.emplace_back(k, e);
            else
                term = term * binomial_power(k, it->second, e);
        }
        TimePoly mono;
        mono.t_[rest] = 1;
        r += term * mono;
    }
    return r;
}

TimePoly TimePoly::fixed(int k, cplx value) const {
    TimePoly r;
    for (const auto& [m, c] : t_) {
        TimeMono rest;
        cplx f = c;
        for (auto [kk, e] : m) {
            if (kk == k)
                f *= std::pow(value, e);
            else
                rest.emplace_back(kk, e);
        }
        r.add(rest, f);
    }
    return r;
}

Taylor TimePoly::jet(const Point& pt, const std::vector<int>& vars, int order) const {
    int nv = static_cast<int>(vars.size());
    Taylor acc(nv, order);
    std::map<std::pair<int, int>, Taylor> powers;
    auto power = [&](int v, int e) -> const Taylor& {
        auto key = std::make_pair(v, e);
        auto it = powers.find(key);
        if (it != powers.end()) return it->second;
        Taylor base = Taylor::variable(nv, order, v, point_value(pt, vars[v]));
        Taylor r = Taylor::constant(nv, order, 1);
        for (int i = 0; i < e; ++i) r = r * base;
        return powers.emplace(key, r).first->second;
    };
    for (const auto& [m, c] : t_) {
        cplx scalar = c;
        Taylor term = Taylor::constant(nv, order, 1);
        bool nontrivial = false;
        for (auto [k, e] : m) {
            auto pos = std::find(vars.begin(), vars.end(), k);
            if (pos == vars.end()) {
                scalar *= std::pow(point_value(pt, k), e);
            } else {
                term = term * power(static_cast<int>(pos - vars.begin()), e);
                nontrivial = true;
            }
        }
        if (nontrivial)
            acc += term * scalar;
        else
            acc.at(0) += scalar;
    }
    return acc;
}

std::vector<int> TimePoly::times() const {
    std::vector<int> r;
    for (const auto& [m, c] : t_)
        for (auto [k, e] : m)
            if (std::find(r.begin(), r.end(), k) == r.end()) r.push_back(k);
    std::sort(r.begin(), r.end());
    return r;
}

// ---------------------------------------------------------------- Phase

static auto piece_key(const Piece& p) { return std::make_tuple(p.fam, p.p.real(), p.p.imag()); }

void Phase::canonicalize() {
    std::sort(pieces.begin(), pieces.end(),
              [](const Piece& a, const Piece& b) { return piece_key(a) < piece_key(b); });
    std::vector<Piece> merged;
    for (const auto& pc : pieces) {
        if (pc.p == cplx{} && pc.fam != 0) continue;
        if (!merged.empty() && piece_key(merged.back()) == piece_key(pc))
            merged.back().s += pc.s;
        else
            merged.push_back(pc);
    }
    pieces.clear();
    for (const auto& pc : merged)
        if (pc.s != 0) pieces.push_back(pc);
    for (auto it = lin.begin(); it != lin.end();)
        it = it->second == cplx{} ? lin.erase(it) : std::next(it);
}

cplx Phase::coeff(int k) const {
    if (k == 0) throw std::invalid_argument("the lattice site is not a continuous time");
    int fam = k > 0 ? 1 : -1;
    int a = std::abs(k);
    cplx c{};
    for (const auto& pc : pieces)
        if (pc.fam == fam) c += pc.s * std::pow(pc.p, a);
    auto it = lin.find(k);
    if (it != lin.end()) c += it->second;
    return c;
}

cplx Phase::exponent(const Point& pt) const {
    cplx e{};
    for (const auto& [k, v] : pt) {
        if (v == cplx{}) continue;
        if (k == 0) {
            for (const auto& pc : pieces)
                if (pc.fam == 0) e += pc.s * v * std::log(pc.p);
        } else {
            e += coeff(k) * v;
        }
    }
    return e;
}

Phase Phase::operator+(const Phase& o) const {
    Phase r = *this;
    r.pieces.insert(r.pieces.end(), o.pieces.begin(), o.pieces.end());
    for (const auto& [k, c] : o.lin) r.lin[k] += c;
    r.canonicalize();
    return r;
}

bool Phase::operator<(const Phase& o) const {
    auto key = [](const Phase& p) {
        std::vector<std::tuple<int, double, double, double>> v;
        for (const auto& pc : p.pieces) v.emplace_back(pc.fam, pc.p.real(), pc.p.imag(), pc.s);
        return v;
    };
    auto a = key(*this), b = key(o);
    if (a != b) return a < b;
    auto lk = [](const Phase& p) {
        std::vector<std::tuple<int, double, double>> v;
        for (const auto& [k, c] : p.lin) v.emplace_back(k, c.real(), c.imag());
        return v;
    };
    return lk(*this) < lk(o);
}

bool Phase::operator==(const Phase& o) const { return !(*this < o) && !(o < *this); }

// ---------------------------------------------------------------- TauExpr

TauExpr::TauExpr(cplx c) {
    if (c != cplx{}) t_[Phase{}] = TimePoly(c);
}

TauExpr::TauExpr(const TimePoly& p) {
    if (!p.is_zero()) t_[Phase{}] = p;
}

TauExpr TauExpr::exponential(const Phase& ph, cplx coef) {
    TauExpr r;
    Phase c = ph;
    c.canonicalize();
    r.add(c, TimePoly(coef));
    return r;
}

TauExpr TauExpr::xi(int fam, cplx p, double s) {
    Phase ph;
    ph.pieces.push_back({fam, p, s});
    return exponential(ph);
}

std::vector<TauTerm> TauExpr::terms() const {
    std::vector<TauTerm> r;
    for (const auto& [ph, p] : t_) r.push_back({p, ph});
    return r;
}

void TauExpr::add(const Phase& ph, const TimePoly& p) {
    if (p.is_zero()) return;
    auto [it, fresh] = t_.emplace(ph, p);
    if (!fresh) {
        it->second += p;
        if (it->second.is_zero()) t_.erase(it);
    }
}

TauExpr& TauExpr::operator+=(const TauExpr& o) {
    for (const auto& [ph, p] : o.t_) add(ph, p);
    return *this;
}

TauExpr& TauExpr::operator-=(const TauExpr& o) {
    for (const auto& [ph, p] : o.t_) add(ph, p * cplx(-1));
    return *this;
}

TauExpr& TauExpr::operator*=(cplx s) {
    if (s == cplx{}) {
        t_.clear();
        return *this;
    }
    for (auto& [ph, p] : t_) p *= s;
    return *this;
}

TauExpr operator*(const TauExpr& a, const TauExpr& b) {
    TauExpr r;
    for (const auto& [pa, qa] : a.t_)
        for (const auto& [pb, qb] : b.t_) r.add(pa + pb, qa * qb);
    return r;
}

TauExpr TauExpr::derivative(int k, int times) const {
    TauExpr cur = *this;
    for (int i = 0; i < times; ++i) {
        TauExpr next;
        for (const auto& [ph, p] : cur.t_) next.add(ph, p.derivative(k) + p * ph.coeff(k));
        cur = std::move(next);
    }
    return cur;
}

cplx TauExpr::eval(const Point& pt) const {
    cplx s{};
    for (const auto& [ph, p] : t_) s += p.eval(pt) * std::exp(ph.exponent(pt));
    return s;
}

Taylor TauExpr::jet(const Point& pt, const std::vector<int>& vars, int order) const {
    int nv = static_cast<int>(vars.size());
    for (int v : vars)
        if (v == 0) throw std::invalid_argument("cannot expand in the lattice site");
    Taylor acc(nv, order);
    Taylor E(nv, order);
    for (const auto& [ph, p] : t_) {
        cplx base = std::exp(ph.exponent(pt));
        std::vector<cplx> c(nv);
        for (int v = 0; v < nv; ++v) c[v] = ph.coeff(vars[v]);
        for (size_t k = 0; k < E.size(); ++k) {
            const auto& a = E.index_of(k);
            cplx m = base;
            for (int v = 0; v < nv; ++v)
                for (int e = 1; e <= a[v]; ++e) m *= c[v] / double(e);
            E.at(k) = m;
        }
        if (p.is_constant())
            acc += E * p.constant_term();
        else
            acc += E * p.jet(pt, vars, order);
    }
    return acc;
}

TauExpr TauExpr::shifted(int fam, cplx z, double m) const {
    if (fam != 1 && fam != -1) throw std::invalid_argument("shift family must be +1 or -1");
    if (z == cplx{}) throw ShiftUncertified("Miwa shift at z = 0");
    TauExpr r;
    for (const auto& [ph, p] : t_) {
        cplx factor = 1;
        for (const auto& pc : ph.pieces) {
            if (pc.fam != fam) continue;
            cplx w = 1.0 - pc.p / z;
            double e = -pc.s * m;
            if (w == cplx{}) throw ShiftUncertified("Miwa shift hits a momentum");
            if (e == std::round(e))
                factor *= std::pow(w, static_cast<int>(e));
            else if (std::abs(pc.p) < std::abs(z))
                factor *= std::exp(e * std::log(w));
            else
                throw ShiftUncertified("non-integer power outside the disk of convergence");
        }
        cplx lin_shift{};
        for (const auto& [k, c] : ph.lin)
            if (k * fam > 0) {
                int a = std::abs(k);
                lin_shift += c * m * std::pow(z, -a) / double(a);
            }
        factor *= std::exp(lin_shift);
        std::map<int, cplx> delta;
        for (int k : p.times())
            if (k * fam > 0) {
                int a = std::abs(k);
                delta[k] = m * std::pow(z, -a) / double(a);
            }
        r.add(ph, p.shifted(delta) * factor);
    }
    return r;
}

TauExpr TauExpr::site_shifted(int m) const {
    TauExpr r;
    for (const auto& [ph, p] : t_) {
        cplx factor = 1;
        for (const auto& pc : ph.pieces)
            if (pc.fam == 0) factor *= std::exp(pc.s * double(m) * std::log(pc.p));
        r.add(ph, p.shifted({{0, cplx(m)}}) * factor);
    }
    return r;
}

TauExpr TauExpr::reversed() const {
    TauExpr r;
    for (const auto& [ph, p] : t_) {
        Phase q = ph;
        for (auto& pc : q.pieces)
            if (pc.fam != 0) pc.s = -pc.s;
        for (auto& [k, c] : q.lin) c = -c;
        q.canonicalize();
        TimePoly np;
        for (const auto& [m, c] : p.terms()) {
            int deg = 0;
            for (auto [k, e] : m)
                if (k != 0) deg += e;
            TimePoly mono(deg % 2 ? -c : c);
            for (auto [k, e] : m)
                for (int i = 0; i < e; ++i) mono = mono * TimePoly::time(k);
            np += mono;
        }
        r.add(q, np);
    }
    return r;
}

std::vector<double> TauExpr::momenta(int fam) const {
    std::vector<double> r;
    for (const auto& [ph, p] : t_)
        for (const auto& pc : ph.pieces)
            if (pc.fam == fam) r.push_back(std::abs(pc.p));
    return r;
}

TauExpr tau_determinant(const std::vector<std::vector<TauExpr>>& m) {
    size_t n = m.size();
    if (n == 0) return TauExpr(1.0);
    if (n == 1) return m[0][0];
    TauExpr r;
    for (size_t j = 0; j < n; ++j) {
        if (m[0][j].is_zero()) continue;
        std::vector<std::vector<TauExpr>> minor;
        for (size_t i = 1; i < n; ++i) {
            std::vector<TauExpr> row;
            for (size_t c = 0; c < n; ++c)
                if (c != j) row.push_back(m[i][c]);
            minor.push_back(std::move(row));
        }
        TauExpr t = m[0][j] * tau_determinant(minor);
        if (j % 2) t *= -1.0;
        r += t;
    }
    return r;
}

Taylor log_jet(const TauExpr& tau, const Point& pt, const std::vector<int>& vars, int order) {
    Taylor j = tau.jet(pt, vars, order);
    if (std::abs(j.value()) == 0) throw TauZero("tau vanishes at the evaluation point");
    return log(j);
}

cplx u_from_tau(const TauExpr& tau, const Point& pt) {
    Taylor f = log_jet(tau, pt, {1}, 2);
    return 2.0 * f.derivative({2});
}

// ---------------------------------------------------------------- solitons

namespace {
void validate(const SolitonSpec& s, bool need_q) {
    size_t N = s.p.size();
    if (N == 0) throw SpecDegenerate("no solitons given");
    for (size_t i = 0; i < N; ++i)
        for (size_t j = i + 1; j < N; ++j)
            if (s.p[i] == s.p[j]) throw SpecDegenerate("coincident momenta p");
    if (need_q) {
        if (s.q.size() != N) throw SpecDegenerate("q must have one entry per soliton");
        for (size_t i = 0; i < N; ++i)
            for (size_t j = 0; j < N; ++j) {
                if (s.p[i] == s.q[j]) throw SpecDegenerate("p_i = q_j makes a Cauchy denominator vanish");
                if (j > i && s.q[i] == s.q[j]) throw SpecDegenerate("coincident momenta q");
            }
    } else {
        for (size_t i = 0; i < N; ++i)
            for (size_t j = 0; j < N; ++j)
                if (s.p[i] == -s.p[j]) throw SpecDegenerate("p_i = -p_j");
    }
}

std::vector<cplx> effective_q(const SolitonSpec& s) {
    if (s.hierarchy == "kdv") {
        std::vector<cplx> q;
        for (auto p : s.p) q.push_back(-p);
        return q;
    }
    return s.q;
}

// exponent of the i-th soliton factor in Fredholm/expanded forms
Phase eta(const SolitonSpec& s, const std::vector<cplx>& q, size_t i) {
    Phase ph;
    ph.pieces = {{1, s.p[i], 1}, {1, q[i], -1}};
    if (s.hierarchy == "toda") {
        ph.pieces.push_back({-1, 1.0 / s.p[i], 1});
        ph.pieces.push_back({-1, 1.0 / q[i], -1});
        ph.pieces.push_back({0, s.p[i], 1});
        ph.pieces.push_back({0, q[i], -1});
    }
    ph.canonicalize();
    return ph;
}

const std::vector<cplx>& need(const std::vector<cplx>& v, size_t N, const char* what) {
    if (v.size() != N) throw SpecDegenerate(std::string(what) + " must have one entry per soliton");
    return v;
}

TauExpr direct(const SolitonSpec& s) {
    size_t N = s.p.size();
    auto q = effective_q(s);
    const auto& alpha = need(s.alpha, N, "alpha");
    std::vector<std::vector<TauExpr>> m(N, std::vector<TauExpr>(N));
    for (size_t i = 0; i < N; ++i)
        for (size_t j = 1; j <= N; ++j) {
            int jj = static_cast<int>(j);
            TauExpr& e = m[i][j - 1];
            if (s.hierarchy == "kdv") {
                Phase th;
                th.pieces = {{1, s.p[i], 0.5}, {1, -s.p[i], -0.5}};
                Phase mth;
                mth.pieces = {{1, s.p[i], -0.5}, {1, -s.p[i], 0.5}};
                e = TauExpr::exponential(th, std::pow(s.p[i], -jj)) -
                    TauExpr::exponential(mth, alpha[i] * std::pow(-s.p[i], -jj));
            } else if (s.hierarchy == "kp") {
                e = TauExpr::xi(1, s.p[i]) * std::pow(s.p[i], -jj) -
                    TauExpr::xi(1, q[i]) * (alpha[i] * std::pow(q[i], -jj));
            } else {
                auto wave = [&](cplx k) {
                    Phase ph;
                    ph.pieces = {{1, k, 1}, {-1, 1.0 / k, 1}, {0, k, 1}};
                    return TauExpr::exponential(ph, std::pow(k, -jj));
                };
                e = wave(q[i]) + wave(s.p[i]) * alpha[i];
            }
        }
    return tau_determinant(m);
}

TauExpr fredholm(const SolitonSpec& s) {
    size_t N = s.p.size();
    auto q = effective_q(s);
    const auto& beta = need(s.beta, N, "beta");
    std::vector<std::vector<TauExpr>> m(N, std::vector<TauExpr>(N));
    for (size_t i = 0; i < N; ++i)
        for (size_t j = 0; j < N; ++j) {
            TauExpr e(i == j ? 1.0 : 0.0);
            if (s.hierarchy == "toda") {
                Phase ph;
                ph.pieces = {{1, s.p[i], 1},      {1, q[j], -1}, {-1, 1.0 / s.p[i], 1},
                             {-1, 1.0 / q[j], -1}, {0, s.p[i], 1}, {0, q[j], -1}};
                e += TauExpr::exponential(ph, beta[j] * q[j] / (q[j] - s.p[i]));
            } else {
                e += TauExpr::exponential(eta(s, q, i), beta[i] * (s.p[i] - q[i]) / (s.p[i] - q[j]));
            }
            m[i][j] = e;
        }
    return tau_determinant(m);
}

TauExpr expanded(const SolitonSpec& s) {
    size_t N = s.p.size();
    auto q = effective_q(s);
    const auto& beta = need(s.beta, N, "beta");
    auto c = [&](size_t i, size_t j) {
        return (s.p[i] - s.p[j]) * (q[j] - q[i]) / ((s.p[i] - q[j]) * (s.p[j] - q[i]));
    };
    TauExpr r;
    for (unsigned mask = 0; mask < (1u << N); ++mask) {
        cplx coef = 1;
        Phase ph;
        for (size_t i = 0; i < N; ++i) {
            if (!(mask >> i & 1)) continue;
            cplx b = beta[i];
            if (s.hierarchy == "toda") b *= q[i] / (q[i] - s.p[i]);
            coef *= b;
            ph = ph + eta(s, q, i);
            for (size_t j = i + 1; j < N; ++j)
                if (mask >> j & 1) coef *= c(i, j);
        }
        r += TauExpr::exponential(ph, coef);
    }
    return r;
}
}  // namespace

TauExpr tau_soliton(const SolitonSpec& spec, Representation rep) {
    if (spec.hierarchy != "kdv" && spec.hierarchy != "kp" && spec.hierarchy != "toda")
        throw SpecDegenerate("unknown hierarchy '" + spec.hierarchy + "'");
    validate(spec, spec.hierarchy != "kdv");
    switch (rep) {
        case Representation::Direct: return direct(spec);
        case Representation::Fredholm: return fredholm(spec);
        case Representation::Expanded: return expanded(spec);
    }
    return {};
}

std::vector<cplx> matched_beta(const SolitonSpec& spec) {
    validate(spec, spec.hierarchy != "kdv");
    size_t N = spec.p.size();
    auto q = effective_q(spec);
    const auto& alpha = need(spec.alpha, N, "alpha");
    std::vector<cplx> beta(N);
    for (size_t i = 0; i < N; ++i) {
        cplx r = std::pow(q[i] / spec.p[i], static_cast<int>(N));
        for (size_t k = 0; k < N; ++k)
            if (k != i) r *= (q[k] - spec.p[i]) / (q[k] - q[i]);
        if (spec.hierarchy == "toda")
            beta[i] = alpha[i] * r * (q[i] - spec.p[i]) / q[i];
        else
            beta[i] = -r / alpha[i];
    }
    return beta;
}

// ---------------------------------------------------------------- polynomial taus

TauExpr from_times_poly(const DiffPoly& p) {
    TimePoly r;
    for (const auto& [m, c] : p.terms()) {
        TimePoly t(c.get_d());
        for (const auto& v : m) {
            if (v.kind != Var::Param) throw std::invalid_argument("expected a polynomial in the times");
            t = t * TimePoly::time(v.index + 1);
        }
        r += t;
    }
    return TauExpr(r);
}

TauExpr schur_tau(const std::vector<int>& lambda) {
    DiffPoly s = kp::schur_s(lambda);
    return from_times_poly(s);
}

TauExpr rational_tau(const std::vector<RationalCondition>& conds, int K) {
    const int Z = 1 << 20;  // auxiliary key for the spectral variable
    int N = static_cast<int>(conds.size());
    int mmax = 0;
    for (const auto& c : conds) mmax = std::max(mmax, static_cast<int>(c.a.size()) - 1);
    // B_r with d_z^r e^{xi(t,z)} = B_r e^{xi(t,z)}
    TimePoly dxi;
    for (int k = 1; k <= K; ++k) {
        TimePoly zk{cplx(k)};
        for (int i = 0; i < k - 1; ++i) zk = zk * TimePoly::time(Z);
        dxi += zk * TimePoly::time(k);
    }
    std::vector<TimePoly> B{TimePoly(1.0)};
    for (int r = 1; r <= mmax; ++r) B.push_back(B.back().derivative(Z) + dxi * B.back());

    std::vector<std::vector<TauExpr>> m(N, std::vector<TauExpr>(N));
    for (int i = 0; i < N; ++i) {
        const auto& c = conds[i];
        for (int j = 1; j <= N; ++j) {
            int n = N - j;
            TimePoly A;
            for (int mm = 0; mm < static_cast<int>(c.a.size()); ++mm) {
                if (c.a[mm] == cplx{}) continue;
                // d_z^mm (z^n e^xi) = e^xi sum_l C(mm,l) n!/(n-l)! z^{n-l} B_{mm-l}
                double binom = 1;
                for (int l = 0; l <= mm && l <= n; ++l) {
                    if (l) binom = binom * (mm - l + 1) / l;
                    double ff = 1;
                    for (int f = 0; f < l; ++f) ff *= (n - f);
                    TimePoly zp(1.0);
                    for (int e = 0; e < n - l; ++e) zp = zp * TimePoly::time(Z);
                    A += zp * B[mm - l] * (c.a[mm] * binom * ff);
                }
            }
            A = A.fixed(Z, c.p);
            m[i][j - 1] = TauExpr(A) * TauExpr::xi(1, c.p);
        }
    }
    TauExpr tau = tau_determinant(m);
    if (tau.is_zero()) throw DegenerateConditions("conditions give an identically vanishing determinant");
    return tau;
}

// ---------------------------------------------------------------- Calogero-Moser

static Eigen::MatrixXcd half_lax_power(const Eigen::MatrixXcd& L0, int e) {
    Eigen::MatrixXcd H = 0.5 * L0;
    Eigen::MatrixXcd r = Eigen::MatrixXcd::Identity(L0.rows(), L0.cols());
    for (int i = 0; i < e; ++i) r = r * H;
    return r;
}

TauExpr tau_cm(const Eigen::VectorXcd& x0, const Eigen::MatrixXcd& L0, int K) {
    int N = static_cast<int>(x0.size());
    std::vector<std::vector<TauExpr>> m(N, std::vector<TauExpr>(N));
    std::vector<Eigen::MatrixXcd> pw;
    for (int k = 2; k <= K; ++k) pw.push_back(half_lax_power(L0, k - 1));
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            TimePoly e;
            if (i == j) e = TimePoly::time(1) - TimePoly(x0[i]);
            for (int k = 2; k <= K; ++k) e += TimePoly::time(k) * (double(k) * pw[k - 2](i, j));
            m[i][j] = TauExpr(e);
        }
    return tau_determinant(m);
}

static Eigen::MatrixXcd cm_shift_matrix(const Eigen::VectorXcd& x0, const Eigen::MatrixXcd& L0,
                                        const std::map<int, cplx>& times) {
    Eigen::MatrixXcd M = x0.asDiagonal();
    for (const auto& [k, t] : times) {
        if (k < 2) continue;
        M -= double(k) * t * half_lax_power(L0, k - 1);
    }
    return M;
}

cplx tau_cm_value(const Eigen::VectorXcd& x0, const Eigen::MatrixXcd& L0, cplx x,
                  const std::map<int, cplx>& times) {
    Eigen::MatrixXcd M = cm_shift_matrix(x0, L0, times);
    Eigen::MatrixXcd A = x * Eigen::MatrixXcd::Identity(M.rows(), M.cols()) - M;
    return A.determinant();
}

std::vector<cplx> tau_cm_roots(const Eigen::VectorXcd& x0, const Eigen::MatrixXcd& L0,
                               const std::map<int, cplx>& times) {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(cm_shift_matrix(x0, L0, times), false);
    std::vector<cplx> r(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    return r;
}

// ---------------------------------------------------------------- equivalence

EquivalenceReport equivalence_witness(const TauExpr& a, const TauExpr& b, const std::vector<Point>& probes,
                                      const std::vector<int>& vars) {
    EquivalenceReport rep;
    std::vector<int> cont;
    bool site = false;
    for (int v : vars) (v == 0 ? site : (cont.push_back(v), site)) = site || v == 0;
    int nv = static_cast<int>(cont.size());
    for (const auto& pt : probes) {
        ++rep.probes;
        if (nv) {
            Taylor f = log_jet(a, pt, cont, 2) - log_jet(b, pt, cont, 2);
            for (int i = 0; i < nv; ++i)
                for (int j = i; j < nv; ++j) {
                    Taylor::Index idx(nv, 0);
                    idx[i] += 1;
                    idx[j] += 1;
                    rep.max_deviation = std::max(rep.max_deviation, std::abs(f.derivative(idx)));
                }
        }
        if (site) {
            auto ratio = [&](int m) {
                Point q = pt;
                q[0] = point_value(pt, 0) + double(m);
                cplx tb = b.eval(q);
                if (tb == cplx{}) throw TauZero("tau vanishes at a probe point");
                return a.eval(q) / tb;
            };
            cplx r0 = ratio(0), rp = ratio(1), rm = ratio(-1);
            rep.max_deviation = std::max(rep.max_deviation, std::abs(std::log(rp * rm / (r0 * r0))));
            for (int i = 0; i < nv; ++i) {
                // mixed: d/dt of log ratio at n+1 minus at n
                Taylor::Index idx(nv, 0);
                idx[i] = 1;
                auto dlog = [&](int m) {
                    Point q = pt;
                    q[0] = point_value(pt, 0) + double(m);
                    return (log_jet(a, q, cont, 1) - log_jet(b, q, cont, 1)).derivative(idx);
                };
                rep.max_deviation = std::max(rep.max_deviation, std::abs(dlog(1) - dlog(0)));
            }
        }
    }
    return rep;
}

}  // namespace hier
