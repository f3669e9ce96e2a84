#include "hier/fermion.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <set>

namespace hier::fermion {

namespace {

Mask low_bits(int b) {
    if (b <= 0) return 0;
    if (b >= 64) return ~Mask(0);
    return (Mask(1) << b) - 1;
}

cplx scaled(const cplx& c, long num, long den) { return c * (double(num) / double(den)); }
TimePoly scaled(const TimePoly& c, long num, long den) { return c * cplx(double(num) / double(den)); }
DiffPoly scaled(const DiffPoly& c, long num, long den) {
    Q q(num, den);
    q.canonicalize();
    return c * q;
}

bool zero(const cplx& c) { return c == cplx{}; }
bool zero(const TimePoly& c) { return c.is_zero(); }
bool zero(const DiffPoly& c) { return c.is_zero(); }

template <class C>
void accumulate(Vec<C>& acc, Mask s, const C& c, int sign) {
    auto [it, fresh] = acc.try_emplace(s, c);
    if (fresh) {
        if (sign < 0) it->second = scaled(c, -1, 1);
    } else if (sign > 0) {
        it->second += c;
    } else {
        it->second -= c;
    }
}

template <class C>
void drop_zeros(Vec<C>& v) {
    std::erase_if(v, [](const auto& kv) { return zero(kv.second); });
}

// J_k v
template <class C>
Vec<C> current(const Window& w, int k, const Vec<C>& v) {
    Vec<C> out;
    for (const auto& [s, c] : v) {
        for (int a = -w.M(); a < w.M(); ++a) {
            int j = a - k;
            if (!w.contains(j) || !w.occupied(s, a) || w.occupied(s, j)) continue;
            Mask above_a = low_bits(2 * w.M()) & ~low_bits(a + w.M() + 1);
            int sign = std::popcount(s & above_a) & 1;
            Mask t = s & ~(Mask(1) << (a + w.M()));
            Mask above_j = low_bits(2 * w.M()) & ~low_bits(j + w.M() + 1);
            sign ^= std::popcount(t & above_j) & 1;
            accumulate(out, t | (Mask(1) << (j + w.M())), c, sign ? -1 : 1);
        }
    }
    drop_zeros(out);
    return out;
}

// exp(sum_k t_k J_k) for commuting currents, graded by weighted degree:
// d E_d = sum_k |k| t_k J_k E_{d-|k|}
template <class C>
Vec<C> graded_exp(const Window& w, const std::vector<std::pair<int, C>>& terms, const Vec<C>& v) {
    std::vector<Vec<C>> E{v};
    Vec<C> total = v;
    for (int d = 1; d <= w.K(); ++d) {
        Vec<C> Ed;
        for (const auto& [k, t] : terms) {
            int a = std::abs(k);
            if (a > d || E[d - a].empty()) continue;
            for (auto& [s, c] : current(w, k, E[d - a])) accumulate(Ed, s, scaled(t * c, a, d), 1);
        }
        drop_zeros(Ed);
        for (const auto& [s, c] : Ed) accumulate(total, s, c, 1);
        E.push_back(std::move(Ed));
    }
    drop_zeros(total);
    return total;
}

std::vector<std::pair<int, cplx>> numeric_terms(const Point& times, int flip) {
    std::vector<std::pair<int, cplx>> terms;
    int sign = 0;
    for (const auto& [k, t] : times) {
        if (k == 0) throw std::invalid_argument("current flows take nonzero time keys");
        if (t == cplx{}) continue;
        int s = k > 0 ? 1 : -1;
        if (sign != 0 && s != sign) throw std::invalid_argument("current flows of both signs in one exponential");
        sign = s;
        terms.emplace_back(flip * k, t);
    }
    return terms;
}

template <class C>
Vec<C> dual_flow_generic(const Window& w, int n, const std::vector<std::pair<int, C>>& terms) {
    w.certify(n);
    Vec<C> v;
    v.emplace(w.vacuum(n), C(1));
    return graded_exp(w, terms, v);
}

// lower bound on the weight at charge n of anything reached from s by adding particles
int creation_bound(const Window& w, Mask s, int n) {
    int lb = 0, j = 0;
    for (int u = w.M() - 1; u >= -w.M(); --u) {
        if (!w.occupied(s, u)) continue;
        ++j;
        lb += std::max(0, u - n + j);
    }
    return lb;
}

void prune(const Window& w, FockVector& v, int n) {
    std::erase_if(v, [&](const auto& kv) { return creation_bound(w, kv.first, n) > w.K(); });
}

bool creation_only(const Clifford& g) {
    for (const auto& f : g.factors) {
        auto* lm = std::get_if<LinearMode>(&f);
        if (!lm || lm->star) return false;
    }
    return true;
}

cplx small_det(const Eigen::MatrixXcd& m) { return m.rows() == 0 ? cplx(1) : m.determinant(); }

Eigen::MatrixXcd dense(const Matrix& A, const std::vector<int>& idx) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(idx.size(), idx.size());
    auto pos = [&](int i) { return std::lower_bound(idx.begin(), idx.end(), i) - idx.begin(); };
    for (const auto& [ik, a] : A) m(pos(ik.first), pos(ik.second)) = a;
    return m;
}

std::vector<int> indices(const Matrix& A) {
    std::set<int> s;
    for (const auto& [ik, a] : A) {
        s.insert(ik.first);
        s.insert(ik.second);
    }
    return {s.begin(), s.end()};
}

Eigen::MatrixXcd positive_projector(const std::vector<int>& idx) {
    Eigen::MatrixXcd P = Eigen::MatrixXcd::Zero(idx.size(), idx.size());
    for (size_t i = 0; i < idx.size(); ++i)
        if (idx[i] >= 0) P(i, i) = 1;
    return P;
}

Matrix sparse(const Eigen::MatrixXcd& m, const std::vector<int>& idx) {
    Matrix out;
    double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    for (int i = 0; i < m.rows(); ++i)
        for (int k = 0; k < m.cols(); ++k)
            if (std::abs(m(i, k)) > 1e-15 * scale) out[{idx[i], idx[k]}] = m(i, k);
    return out;
}

}  // namespace

// ------------------------------------------------------------ window

Window::Window(int M, int K) : M_(M), K_(K) {
    if (M < 2 || M > 32) throw std::invalid_argument("window half-width must lie in [2, 32]");
    if (K < 0) throw std::invalid_argument("negative degree cap");
}

bool Window::occupied(Mask s, int k) const {
    if (k < -M_) return true;
    if (k >= M_) return false;
    return (s >> (k + M_)) & 1;
}

Mask Window::vacuum(int n) const {
    if (n < -M_ || n > M_) throw WindowExhausted("vacuum charge outside the window");
    return low_bits(n + M_);
}

Mask Window::filled() const { return low_bits(2 * M_); }

int Window::charge(Mask s) const { return std::popcount(s) - M_; }

kp::YoungDiagram Window::diagram(Mask s) const {
    int n = charge(s), i = 0;
    kp::YoungDiagram l;
    for (int u = M_ - 1; u >= -M_; --u) {
        if (!occupied(s, u)) continue;
        ++i;
        int li = u - n + i;
        if (li == 0) break;
        l.push_back(li);
    }
    return l;
}

int Window::weight(Mask s) const {
    int r = 0;
    for (int x : diagram(s)) r += x;
    return r;
}

Mask Window::basis_mask(const kp::YoungDiagram& l, int n) const {
    Mask s = 0;
    for (int i = 1; n - i >= -M_; ++i) {
        int li = i <= static_cast<int>(l.size()) ? l[i - 1] : 0;
        int site = n - i + li;
        if (!contains(site)) throw WindowExhausted("diagram does not fit the window");
        s |= Mask(1) << (site + M_);
    }
    if (static_cast<int>(l.size()) > n + M_) throw WindowExhausted("diagram does not fit the window");
    return s;
}

void Window::certify(int n, int extra) const {
    if (n + K_ + extra > M_ || n - K_ - extra < -M_)
        throw WindowExhausted("window too small for charge " + std::to_string(n) + " at degree " +
                              std::to_string(K_));
}

// ------------------------------------------------------------ vectors

FockVector ket(Mask s, cplx c) { return {{s, c}}; }

FockVector apply_mode(const Window& w, bool star, int k, const FockVector& v) {
    if (!w.contains(k)) throw WindowExhausted("mode " + std::to_string(k) + " outside the window");
    Mask b = Mask(1) << (k + w.M());
    Mask above = w.filled() & ~low_bits(k + w.M() + 1);
    FockVector out;
    for (const auto& [s, c] : v) {
        bool occ = s & b;
        if (occ != star) continue;
        int sign = std::popcount(s & above) & 1;
        accumulate(out, s ^ b, c, sign ? -1 : 1);
    }
    drop_zeros(out);
    return out;
}

cplx pairing(const FockVector& a, const FockVector& b) {
    cplx r{};
    const FockVector& small = a.size() <= b.size() ? a : b;
    const FockVector& big = a.size() <= b.size() ? b : a;
    for (const auto& [s, c] : small) {
        auto it = big.find(s);
        if (it != big.end()) r += c * it->second;
    }
    return r;
}

FockVector axpy(const FockVector& a, cplx s, const FockVector& b) {
    FockVector r = a;
    for (const auto& [m, c] : b) accumulate(r, m, s * c, 1);
    drop_zeros(r);
    return r;
}

double max_abs_diff(const FockVector& a, const FockVector& b) {
    double r = 0;
    for (const auto& [m, c] : axpy(a, -1, b)) r = std::max(r, std::abs(c));
    return r;
}

FockVector basis_state(const Window& w, const kp::YoungDiagram& l, int n) {
    kp::YoungDiagram lt = kp::transpose(l);
    int d = 0;
    while (d < static_cast<int>(l.size()) && l[d] >= d + 1) ++d;
    FockVector v = ket(w.vacuum(n));
    for (int i = 1; i <= d; ++i) v = apply_mode(w, false, n + l[i - 1] - i, v);
    for (int i = d; i >= 1; --i) v = apply_mode(w, true, n - (lt[i - 1] - i) - 1, v);
    return v;
}

// ------------------------------------------------------------ Clifford elements

LinearMode LinearMode::psi(const Window& w, cplx z) {
    LinearMode m;
    for (int k = -w.M(); k < w.M(); ++k) m.c[k] = std::pow(z, k);
    return m;
}

LinearMode LinearMode::psi_star(const Window& w, cplx z) {
    LinearMode m;
    m.star = true;
    for (int k = -w.M(); k < w.M(); ++k) m.c[k] = std::pow(z, -k);
    return m;
}

LinearMode LinearMode::mode(bool star, int k, cplx c) {
    LinearMode m;
    m.star = star;
    m.c[k] = c;
    return m;
}

Clifford Clifford::soliton_product(const Window& w, const std::vector<cplx>& p, const std::vector<cplx>& q,
                                   const std::vector<cplx>& b) {
    if (p.size() != q.size() || p.size() != b.size()) throw std::invalid_argument("soliton data of unequal length");
    Clifford g;
    for (size_t i = 0; i < p.size(); ++i) {
        LinearMode m;
        for (int k = -w.M(); k < w.M(); ++k) m.c[k] = std::pow(q[i], k) + b[i] * std::pow(p[i], k);
        g.factors.emplace_back(m);
    }
    return g;
}

Clifford& Clifford::operator*=(const Clifford& o) {
    factors.insert(factors.end(), o.factors.begin(), o.factors.end());
    return *this;
}

int Clifford::charge() const {
    int q = 0;
    for (const auto& f : factors)
        if (auto* lm = std::get_if<LinearMode>(&f)) q += lm->charge();
    return q;
}

Clifford Clifford::transposed() const {
    Clifford g;
    for (auto it = factors.rbegin(); it != factors.rend(); ++it) {
        if (auto* lm = std::get_if<LinearMode>(&*it)) {
            LinearMode t = *lm;
            t.star = !t.star;
            g.factors.emplace_back(t);
        } else {
            const auto& ne = std::get<NormalExp>(*it);
            NormalExp t;
            t.ordering = ne.ordering;
            for (const auto& [ik, b] : ne.B) t.B[{ik.second, ik.first}] = b;
            g.factors.emplace_back(t);
        }
    }
    return g;
}

FockVector apply(const Window& w, const LinearMode& f, const FockVector& v) {
    FockVector out;
    for (const auto& [k, c] : f.c) {
        if (c == cplx{}) continue;
        for (const auto& [s, x] : apply_mode(w, f.star, k, v)) accumulate(out, s, c * x, 1);
    }
    drop_zeros(out);
    return out;
}

FockVector apply(const Window& w, const NormalExp& f, const FockVector& v) {
    std::set<int> rs, cs;
    for (const auto& [ik, b] : f.B) {
        rs.insert(ik.first);
        cs.insert(ik.second);
    }
    std::vector<int> rows(rs.begin(), rs.end()), cols(cs.begin(), cs.end());
    if (rows.size() > 20 || cols.size() > 20) throw std::invalid_argument("normal exponent support too large");
    FockVector out = v;
    for (Mask I = 1; I < (Mask(1) << rows.size()); ++I) {
        int m = std::popcount(I);
        std::vector<int> ri;
        for (size_t a = 0; a < rows.size(); ++a)
            if (I >> a & 1) ri.push_back(rows[a]);
        for (Mask K = 1; K < (Mask(1) << cols.size()); ++K) {
            if (std::popcount(K) != m) continue;
            std::vector<int> ki;
            for (size_t a = 0; a < cols.size(); ++a)
                if (K >> a & 1) ki.push_back(cols[a]);
            Eigen::MatrixXcd sub(m, m);
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b) {
                    auto it = f.B.find({ri[a], ki[b]});
                    sub(a, b) = it == f.B.end() ? cplx{} : it->second;
                }
            cplx det = small_det(sub);
            if (det == cplx{}) continue;
            // psi*_{i1} ... psi*_{im} psi_{km} ... psi_{k1}, left to right
            std::vector<std::pair<bool, int>> ops;
            for (int a = 0; a < m; ++a) ops.emplace_back(true, ri[a]);
            for (int a = m - 1; a >= 0; --a) ops.emplace_back(false, ki[a]);
            if (f.ordering == Ordering::Dirac) {
                auto creates = [](const std::pair<bool, int>& o) { return o.first ? o.second < 0 : o.second >= 0; };
                int inv = 0, seen_ann = 0;
                std::vector<std::pair<bool, int>> cre, ann;
                for (const auto& o : ops) {
                    if (creates(o)) {
                        inv += seen_ann;
                        cre.push_back(o);
                    } else {
                        ++seen_ann;
                        ann.push_back(o);
                    }
                }
                ops = cre;
                ops.insert(ops.end(), ann.begin(), ann.end());
                if (inv & 1) det = -det;
            }
            FockVector r = v;
            for (auto it = ops.rbegin(); it != ops.rend() && !r.empty(); ++it) r = apply_mode(w, it->first, it->second, r);
            for (const auto& [s, c] : r) accumulate(out, s, det * c, 1);
        }
    }
    drop_zeros(out);
    return out;
}

FockVector apply(const Window& w, const Clifford& g, const FockVector& v) {
    FockVector r = v;
    for (auto it = g.factors.rbegin(); it != g.factors.rend(); ++it)
        r = std::visit([&](const auto& f) { return apply(w, f, r); }, *it);
    return r;
}

// ------------------------------------------------------------ currents

FockVector apply_current(const Window& w, int k, const FockVector& v) {
    if (k == 0) throw std::invalid_argument("J_0 is not used");
    return current(w, k, v);
}

FockVector exp_current(const Window& w, const Point& times, const FockVector& v) {
    return graded_exp(w, numeric_terms(times, 1), v);
}

FockVector dual_vacuum_flow(const Window& w, int n, const Point& t_plus) {
    return dual_flow_generic(w, n, numeric_terms(t_plus, -1));
}

Vec<TimePoly> dual_vacuum_flow_poly(const Window& w, int n) {
    std::vector<std::pair<int, TimePoly>> terms;
    for (int k = 1; k <= w.K(); ++k) terms.emplace_back(-k, TimePoly::time(k));
    return dual_flow_generic(w, n, terms);
}

Vec<DiffPoly> dual_vacuum_flow_exact(const Window& w, int n) {
    std::vector<std::pair<int, DiffPoly>> terms;
    for (int k = 1; k <= w.K(); ++k) terms.emplace_back(-k, DiffPoly::param(k - 1));
    return dual_flow_generic(w, n, terms);
}

FockVector j_plus_flow(const Window& w, const Point& t_plus, const FockVector& v, bool dual) {
    for (const auto& [k, t] : t_plus)
        if (k <= 0) throw std::invalid_argument("J_+ flow takes positive time keys");
    return graded_exp(w, numeric_terms(t_plus, dual ? -1 : 1), v);
}

// ------------------------------------------------------------ expectations

cplx expectation(const Window& w, int n, const std::vector<LinearMode>& ops) {
    FockVector v = ket(w.vacuum(n));
    for (auto it = ops.rbegin(); it != ops.rend(); ++it) v = apply(w, *it, v);
    auto f = v.find(w.vacuum(n));
    return f == v.end() ? cplx{} : f->second;
}

cplx wick_expectation(const Window& w, const std::vector<LinearMode>& v, const std::vector<LinearMode>& ws, int n) {
    if (v.size() != ws.size()) throw std::invalid_argument("wick lists of unequal length");
    int m = static_cast<int>(v.size());
    Eigen::MatrixXcd P(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) P(i, j) = expectation(w, n, {v[i], ws[j]});
    return small_det(P);
}

cplx generalized_wick(const Window& w, const Clifford& gp, const Clifford& g, const std::vector<LinearMode>& v,
                      const std::vector<LinearMode>& ws, int n) {
    if (v.size() != ws.size()) throw std::invalid_argument("wick lists of unequal length");
    FockVector bra = apply(w, gp.transposed(), ket(w.vacuum(n)));
    FockVector kt = apply(w, g, ket(w.vacuum(n)));
    cplx denom = pairing(bra, kt);
    if (std::abs(denom) < 1e-300) throw ZeroDenominator("<n|G'G|n> vanishes");
    int m = static_cast<int>(v.size());
    std::vector<FockVector> wk;
    for (const auto& x : ws) wk.push_back(apply(w, x, kt));
    Eigen::MatrixXcd P(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) P(i, j) = pairing(bra, apply(w, v[i], wk[j])) / denom;
    return small_det(P) * denom;
}

cplx brute_force_wick(const Window& w, const Clifford& gp, const Clifford& g, const std::vector<LinearMode>& v,
                      const std::vector<LinearMode>& ws, int n) {
    FockVector bra = apply(w, gp.transposed(), ket(w.vacuum(n)));
    FockVector kt = apply(w, g, ket(w.vacuum(n)));
    for (const auto& x : ws) kt = apply(w, x, kt);
    for (auto it = v.rbegin(); it != v.rend(); ++it) kt = apply(w, *it, kt);
    return pairing(bra, kt);
}

cplx vev_tau(const Window& w, const Clifford& g, const Point& t_plus, const Point& t_minus, int n,
             std::optional<int> ket_charge) {
    int q = g.charge();
    int m = ket_charge.value_or(n - q);
    if (n - m != q) return 0;
    w.certify(n);
    w.certify(m);
    Point neg;
    for (const auto& [k, t] : t_minus) {
        if (k >= 0) throw std::invalid_argument("negative times use keys -k");
        neg[k] = -t;
    }
    FockVector kt = exp_current(w, neg, ket(w.vacuum(m)));
    if (creation_only(g)) {
        prune(w, kt, n);
        for (auto it = g.factors.rbegin(); it != g.factors.rend(); ++it) {
            kt = apply(w, std::get<LinearMode>(*it), kt);
            prune(w, kt, n);
        }
    } else {
        kt = apply(w, g, kt);
    }
    return pairing(dual_vacuum_flow(w, n, t_plus), kt);
}

TimePoly vev_tau_poly(const Window& w, const Clifford& g, int n) {
    int m = n - g.charge();
    w.certify(m);
    FockVector kt = apply(w, g, ket(w.vacuum(m)));
    TimePoly r;
    for (const auto& [s, c] : dual_vacuum_flow_poly(w, n)) {
        auto it = kt.find(s);
        if (it != kt.end()) r += c * it->second;
    }
    return r;
}

Bosonization bosonization_check(const Window& w, int n, const Point& times, cplx z) {
    Point tp, tm;
    for (const auto& [k, t] : times) {
        if (k > 0) tp[k] = t;
        if (k < 0) tm[k] = t;
    }
    w.certify(n - 1);
    FockVector kt = exp_current(w, tm, ket(w.vacuum(n - 1)));
    prune(w, kt, n);
    kt = apply(w, LinearMode::psi(w, z), kt);
    prune(w, kt, n);
    Bosonization b;
    b.mode_sum = pairing(dual_vacuum_flow(w, n, tp), kt);
    // closed form as a series in (e, d) with t_k -> e^k t_k, t_{-k} -> d^k t_{-k},
    // kept to the bidegrees the mode sum retains
    int K = w.K();
    using Series = std::vector<std::vector<cplx>>;
    Series X(K + 1, std::vector<cplx>(K + 1));
    cplx full{};
    for (const auto& [k, t] : tp) {
        full += t * std::pow(z, k);
        if (k <= K) X[k][0] += t * std::pow(z, k);
        auto it = tm.find(-k);
        if (it == tm.end()) continue;
        full += double(k) * t * it->second;
        if (k <= K) X[k][k] += double(k) * t * it->second;
    }
    for (const auto& [k, t] : tm) {
        full -= t * std::pow(z, k);
        if (-k <= K) X[0][-k] -= t * std::pow(z, k);
    }
    auto mul = [&](const Series& a, const Series& c) {
        Series r(K + 1, std::vector<cplx>(K + 1));
        for (int i = 0; i <= K; ++i)
            for (int j = 0; j <= K; ++j)
                if (a[i][j] != cplx{})
                    for (int k = 0; i + k <= K; ++k)
                        for (int l = 0; j + l <= K; ++l) r[i + k][j + l] += a[i][j] * c[k][l];
        return r;
    };
    Series term(K + 1, std::vector<cplx>(K + 1)), E = term;
    term[0][0] = E[0][0] = 1;
    for (int m = 1; m <= 2 * K; ++m) {
        term = mul(term, X);
        for (auto& row : term)
            for (auto& x : row) x /= double(m);
        for (int i = 0; i <= K; ++i)
            for (int j = 0; j <= K; ++j) E[i][j] += term[i][j];
    }
    cplx trunc{};
    for (const auto& row : E)
        for (const auto& x : row) trunc += x;
    b.closed_form = std::pow(z, n - 1) * trunc;
    b.closed_form_full = std::pow(z, n - 1) * std::exp(full);
    b.residual = std::abs(b.mode_sum - b.closed_form) / std::max(std::abs(b.closed_form), 1e-300);
    return b;
}

double pair_vertex_check(const Window& w, int n, cplx zeta, cplx z, int depth) {
    if (depth > w.K()) throw std::invalid_argument("depth beyond the degree cap");
    Point t;
    for (int k = 1; k <= w.K(); ++k) t[k] = (std::pow(zeta, -k) - std::pow(z, -k)) / double(k);
    FockVector dual = dual_vacuum_flow(w, n, t);
    cplx pref = std::pow(z, n) * std::pow(zeta, 1 - n) / (zeta - z);
    LinearMode pz = LinearMode::psi(w, z), pzeta = LinearMode::psi_star(w, zeta);
    double worst = 0;
    for (int d = 0; d <= depth; ++d) {
        for (const auto& l : kp::partitions(d)) {
            Mask s = w.basis_mask(l, n);
            FockVector v = apply(w, pzeta, apply(w, pz, ket(s)));
            auto it = v.find(w.vacuum(n));
            cplx lhs = it == v.end() ? cplx{} : it->second;
            auto jt = dual.find(s);
            cplx rhs = pref * (jt == dual.end() ? cplx{} : jt->second);
            worst = std::max(worst, std::abs(lhs - rhs));
        }
    }
    return worst;
}

// ------------------------------------------------------------ normal ordering

Conversion dirac_to_empty(const Matrix& A) {
    if (A.empty()) return {{}, 1};
    auto idx = indices(A);
    Eigen::MatrixXcd a = dense(A, idx), P = positive_projector(idx);
    Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(idx.size(), idx.size());
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(I - a * P);
    if (!lu.isInvertible()) throw SingularConversion("I - A P+ is singular");
    return {sparse(lu.solve(a), idx), small_det(I - P * a)};
}

Conversion empty_to_dirac(const Matrix& B) {
    if (B.empty()) return {{}, 1};
    auto idx = indices(B);
    Eigen::MatrixXcd b = dense(B, idx), P = positive_projector(idx);
    Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(idx.size(), idx.size());
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(I + P * b);
    if (!lu.isInvertible()) throw SingularConversion("I + P+ B is singular");
    Eigen::MatrixXcd a = b * lu.inverse();
    return {sparse(a, idx), small_det(I + P * b)};
}

cplx bilinear_defect(const Window& w, const Clifford& g, const FockVector& u, const FockVector& v,
                     const FockVector& u2, const FockVector& v2) {
    FockVector gv = apply(w, g, v), gv2 = apply(w, g, v2);
    cplx lhs{}, rhs{};
    for (int k = -w.M(); k < w.M(); ++k) {
        lhs += pairing(u, apply_mode(w, false, k, gv)) * pairing(u2, apply_mode(w, true, k, gv2));
        rhs += pairing(u, apply(w, g, apply_mode(w, false, k, v))) *
               pairing(u2, apply(w, g, apply_mode(w, true, k, v2)));
    }
    return lhs - rhs;
}

}  // namespace hier::fermion
