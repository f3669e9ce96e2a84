#include "hier/psdo.hpp"

#include <algorithm>
#include <regex>

namespace hier {

Q binomial(int n, int k) {
    if (k < 0) return 0;
    Q r = 1;
    for (int i = 0; i < k; ++i) r = r * Q(n - i) / Q(i + 1);
    return r;
}

// ---------------------------------------------------------------- PsiDO

PsiDO::PsiDO(const DiffPoly& c) {
    if (!c.is_zero()) c_[0] = c;
}

PsiDO PsiDO::d(int k) { return term(DiffPoly(1), k); }

PsiDO PsiDO::term(const DiffPoly& c, int k) {
    PsiDO p;
    if (!c.is_zero()) p.c_[k] = c;
    return p;
}

int PsiDO::max_order() const {
    int t = c_.empty() ? INT_MIN / 2 : c_.rbegin()->first;
    if (!exact()) t = std::max(t, floor_ - 1);
    return t;
}

int PsiDO::min_stored_order() const { return c_.empty() ? 0 : c_.begin()->first; }

DiffPoly PsiDO::coeff(int k) const {
    if (k < floor_)
        throw DepthExhausted("coefficient of d^" + std::to_string(k) +
                             " requested below certified order " + std::to_string(floor_));
    auto it = c_.find(k);
    return it == c_.end() ? DiffPoly{} : it->second;
}

void PsiDO::prune() {
    for (auto it = c_.begin(); it != c_.end();) {
        if (it->second.is_zero() || it->first < floor_)
            it = c_.erase(it);
        else
            ++it;
    }
}

PsiDO& PsiDO::set_floor(int f) {
    floor_ = std::max(floor_, f);
    prune();
    return *this;
}

PsiDO& PsiDO::set_depth(int D) {
    depth_ = D;
    return *this;
}

void PsiDO::set(int k, const DiffPoly& v) {
    if (v.is_zero())
        c_.erase(k);
    else
        c_[k] = v;
}

PsiDO& PsiDO::operator+=(const PsiDO& o) {
    for (const auto& [k, v] : o.c_) c_[k] += v;
    floor_ = std::max(floor_, o.floor_);
    depth_ = std::min(depth_, o.depth_);
    prune();
    return *this;
}

PsiDO& PsiDO::operator-=(const PsiDO& o) {
    for (const auto& [k, v] : o.c_) c_[k] -= v;
    floor_ = std::max(floor_, o.floor_);
    depth_ = std::min(depth_, o.depth_);
    prune();
    return *this;
}

PsiDO PsiDO::operator-() const {
    PsiDO r = *this;
    for (auto& [k, v] : r.c_) v = -v;
    return r;
}

PsiDO operator*(const Q& s, PsiDO a) {
    for (auto& [k, v] : a.c_) v *= s;
    a.prune();
    return a;
}

bool PsiDO::agrees_with(const PsiDO& o) const {
    int f = std::max(floor_, o.floor_);
    std::vector<int> keys;
    for (const auto& [k, v] : c_) keys.push_back(k);
    for (const auto& [k, v] : o.c_) keys.push_back(k);
    for (int k : keys)
        if (k >= f && !(coeff(k) == o.coeff(k))) return false;
    return true;
}

PsiDO operator*(const PsiDO& a, const PsiDO& b) { return compose(a, b); }

PsiDO PsiDO::plus_part() const {
    PsiDO r;
    r.depth_ = depth_;
    if (floor_ > 0) throw DepthExhausted("differential part not certified");
    for (const auto& [k, v] : c_)
        if (k >= 0) r.c_[k] = v;
    return r;
}

PsiDO PsiDO::minus_part() const {
    PsiDO r = *this;
    for (auto it = r.c_.begin(); it != r.c_.end();)
        it = it->first >= 0 ? r.c_.erase(it) : std::next(it);
    return r;
}

PsiDO PsiDO::map_coeffs(const std::function<DiffPoly(const DiffPoly&)>& f) const {
    PsiDO r = *this;
    for (auto& [k, v] : r.c_) v = f(v);
    r.prune();
    return r;
}

static bool has_nonconstant(const PsiDO& P) {
    for (const auto& [k, v] : P.coeffs())
        if (!v.is_constant()) return true;
    return false;
}

PsiDO compose(const PsiDO& P, const PsiDO& Q) {
    PsiDO r;
    int D = std::min(P.depth(), Q.depth());
    r.set_depth(D);
    if ((P.is_zero() && P.exact()) || (Q.is_zero() && Q.exact())) return r;

    int tP = P.max_order(), tQ = Q.max_order();
    int top = tP + tQ;
    int f = PsiDO::kExactFloor;
    bool infinite = P.min_stored_order() < 0 && has_nonconstant(Q);
    if (!P.exact()) f = std::max(f, P.floor() + tQ);
    if (!Q.exact()) f = std::max(f, Q.floor() + tP);
    if (infinite || !P.exact() || !Q.exact()) f = std::max(f, top - D);

    std::map<int, DiffPoly> acc;
    for (const auto& [j, q] : Q.coeffs()) {
        std::vector<DiffPoly> dq{q};
        for (const auto& [i, p] : P.coeffs()) {
            for (int l = 0;; ++l) {
                if (i >= 0 && l > i) break;
                int k = i + j - l;
                if (k < f) break;
                while (static_cast<int>(dq.size()) <= l) dq.push_back(total_derivative(dq.back()));
                if (dq[l].is_zero()) break;
                acc[k] += binomial(i, l) * (p * dq[l]);
            }
        }
    }
    for (auto& [k, v] : acc) r.set(k, v);
    r.set_floor(f);
    return r;
}

PsiDO commutator(const PsiDO& P, const PsiDO& Q) { return compose(P, Q) - compose(Q, P); }

std::pair<PsiDO, PsiDO> split(const PsiDO& P) { return {P.plus_part(), P.minus_part()}; }

DiffPoly residue(const PsiDO& P) { return P.residue(); }

PsiDO adjoint(const PsiDO& P) {
    PsiDO r;
    r.set_depth(P.depth());
    int f = P.floor();
    if (P.exact() && P.min_stored_order() < 0 && has_nonconstant(P))
        f = P.max_order() - P.depth();
    std::map<int, DiffPoly> acc;
    for (const auto& [k, v] : P.coeffs()) {
        Q sign = (k % 2 == 0) ? 1 : -1;
        DiffPoly dv = v;
        for (int l = 0;; ++l) {
            if (k >= 0 && l > k) break;
            if (k - l < f) break;
            if (dv.is_zero()) break;
            acc[k - l] += sign * binomial(k, l) * dv;
            dv = total_derivative(dv);
        }
    }
    for (auto& [k, v] : acc) r.set(k, v);
    r.set_floor(f);
    return r;
}

PsiDO power(const PsiDO& P, int n) {
    if (n < 0) throw std::invalid_argument("power: negative exponent");
    PsiDO r(DiffPoly(1));
    r.set_depth(P.depth());
    for (int i = 0; i < n; ++i) r = compose(r, P);
    return r;
}

// Coefficient of d^k in P*Q, both treated as exact (caller guarantees the
// contributing coefficients are known).
static DiffPoly product_coeff(const PsiDO& P, const PsiDO& Q, int k) {
    DiffPoly acc;
    for (const auto& [i, p] : P.coeffs()) {
        for (const auto& [j, q] : Q.coeffs()) {
            int l = i + j - k;
            if (l < 0) continue;
            if (i >= 0 && l > i) continue;
            acc += binomial(i, l) * (p * total_derivative(q, l));
        }
    }
    return acc;
}

PsiDO fractional_power(const PsiDO& L, int num, int den) {
    if (den <= 0) throw std::invalid_argument("fractional_power: denominator must be positive");
    if (num < 0) throw std::invalid_argument("fractional_power: negative numerator");
    if (den == 1) return power(L, num);
    if (den != 2) throw std::invalid_argument("fractional_power: only den = 1, 2 supported");
    if (num % 2 == 0) return power(L, num / 2);

    if (L.max_order() != 2 || !(L.coeff(2) == DiffPoly(1)))
        throw NotMonic("fractional_power: operator must be d^2 + lower terms");
    int D = L.depth();
    PsiDO R = PsiDO::d(1);
    R.set_depth(D);
    for (int k = 0; k >= 1 - D; --k) {
        DiffPoly rk = (L.coeff(k + 1) - product_coeff(R, R, k + 1)) * Q(1, 2);
        R.set(k, rk);
    }
    R.set_floor(1 - D);
    if (num == 1) return R;
    return compose(power(L, (num - 1) / 2), R);
}

DiffPoly residue_pairing(const PsiDO& P, const PsiDO& Q) { return compose(P, adjoint(Q)).residue(); }

DiffPoly residue_pairing_zseries(const PsiDO& A, const PsiDO& B) {
    DiffPoly acc;
    for (const auto& [i, p] : A.coeffs()) {
        int j = -1 - i;
        DiffPoly q = B.coeff(j);
        acc += (j % 2 == 0 ? Q(1) : Q(-1)) * (p * q);
    }
    // orders of P that are not stored but certified contribute nothing;
    // uncertified orders of P would pair with stored orders of Q
    if (!A.exact())
        for (const auto& [j, q] : B.coeffs())
            if (-1 - j < A.floor() && !q.is_zero())
                throw DepthExhausted("residue pairing needs d^" + std::to_string(-1 - j));
    return acc;
}

// ---------------------------------------------------------------- printing

static std::string op_power(const char* sym, int k) {
    if (k == 1) return sym;
    return std::string(sym) + "^" + std::to_string(k);
}

template <class Map, class Fmt>
static std::string render_op(const Map& c, const char* sym, Fmt fmt) {
    if (c.empty()) return "0";
    std::string out;
    bool first = true;
    for (auto it = c.rbegin(); it != c.rend(); ++it) {
        int k = it->first;
        const DiffPoly& v = it->second;
        bool neg = false;
        std::string coef;
        if (v.size() == 1) {
            const auto& [m, q] = *v.terms().begin();
            neg = q < 0;
            DiffPoly a = neg ? -v : v;
            coef = (a == DiffPoly(1)) ? "" : fmt(a);
        } else {
            coef = "(" + fmt(v) + ")";
        }
        std::string t;
        if (k == 0)
            t = coef.empty() ? "1" : coef;
        else
            t = coef.empty() ? op_power(sym, k) : coef + " " + op_power(sym, k);
        if (first)
            out = (neg ? "-" : "") + t;
        else
            out += (neg ? " - " : " + ") + t;
        first = false;
    }
    return out;
}

std::string PsiDO::str(const Alphabet& a) const {
    std::string s = render_op(c_, "d", [&](const DiffPoly& p) { return p.str(a); });
    if (!exact()) s += " + O(d^" + std::to_string(floor_ - 1) + ")";
    return s;
}

std::string PsiDO::latex(const Alphabet& a) const {
    std::map<int, DiffPoly> c = c_;
    std::string s;
    bool first = true;
    if (c.empty()) return "0";
    for (auto it = c.rbegin(); it != c.rend(); ++it) {
        int k = it->first;
        const DiffPoly& v = it->second;
        std::string coef = v == DiffPoly(1) ? "" : (v.size() == 1 ? v.latex(a) : "(" + v.latex(a) + ")");
        std::string dp = k == 0 ? "" : (k == 1 ? "\\partial" : "\\partial^{" + std::to_string(k) + "}");
        std::string t = coef.empty() && dp.empty() ? "1" : coef + dp;
        if (!first && !t.empty() && t[0] != '-') s += " + ";
        else if (!first) s += " ";
        s += t;
        first = false;
    }
    if (!exact()) s += " + O(\\partial^{" + std::to_string(floor_ - 1) + "})";
    return s;
}

// Split at top-level + and - (outside parentheses, not right after '^').
static std::vector<std::pair<int, std::string>> split_terms(const std::string& s) {
    std::vector<std::pair<int, std::string>> out;
    int depth = 0, sign = 1;
    std::string cur;
    char prev = 0;
    auto flush = [&] {
        auto b = cur.find_first_not_of(' ');
        if (b != std::string::npos) out.emplace_back(sign, cur.substr(b, cur.find_last_not_of(' ') - b + 1));
        cur.clear();
    };
    for (char ch : s) {
        if (ch == '(') ++depth;
        if (ch == ')') --depth;
        if (depth == 0 && (ch == '+' || ch == '-') && prev != '^') {
            flush();
            sign = ch == '-' ? -1 : 1;
        } else {
            cur += ch;
        }
        if (ch != ' ') prev = ch;
    }
    flush();
    return out;
}

template <class Op>
static Op parse_op(const std::string& s, const Alphabet& a, char sym) {
    Op r;
    std::string text = s;
    int floor = Op::kExactFloor;
    std::regex big_o(std::string(R"(\+\s*O\()") + sym + R"((\^(-?\d+))?\)\s*$)");
    std::smatch m;
    if (std::regex_search(text, m, big_o)) {
        floor = (m[2].matched ? std::stoi(m[2].str()) : 1) + 1;
        text = text.substr(0, m.position(0));
    }
    std::regex tail(std::string(R"((^|\s|\))()") + sym + R"()(\^(-?\d+))?$)");
    for (auto& [sign, t] : split_terms(text)) {
        int k = 0;
        std::string coef = t;
        if (std::regex_search(t, m, tail)) {
            k = m[3].matched ? std::stoi(m[4].str()) : 1;
            coef = t.substr(0, m.position(2));
        }
        auto e = coef.find_last_not_of(' ');
        coef = e == std::string::npos ? "" : coef.substr(0, e + 1);
        DiffPoly c = coef.empty() ? DiffPoly(1) : parse_diffpoly(coef, a);
        r += Op::term(Q(sign) * c, k);
    }
    if (floor != Op::kExactFloor) r.set_floor(floor);
    return r;
}

PsiDO parse_psido(const std::string& s, const Alphabet& a) { return parse_op<PsiDO>(s, a, 'd'); }

// ---------------------------------------------------------------- PsDiffOp

PsDiffOp::PsDiffOp(const DiffPoly& c) {
    if (!c.is_zero()) c_[0] = c;
}

PsDiffOp PsDiffOp::S(int k) { return term(DiffPoly(1), k); }

PsDiffOp PsDiffOp::term(const DiffPoly& c, int k) {
    PsDiffOp p;
    if (!c.is_zero()) p.c_[k] = c;
    return p;
}

int PsDiffOp::max_shift() const {
    int t = c_.empty() ? INT_MIN / 2 : c_.rbegin()->first;
    if (floor_ != kExactFloor) t = std::max(t, floor_ - 1);
    return t;
}

DiffPoly PsDiffOp::coeff(int s) const {
    if (s < floor_) throw WindowExhausted("shift " + std::to_string(s) + " below certified window");
    auto it = c_.find(s);
    return it == c_.end() ? DiffPoly{} : it->second;
}

void PsDiffOp::set(int s, const DiffPoly& v) {
    if (v.is_zero())
        c_.erase(s);
    else
        c_[s] = v;
}

PsDiffOp& PsDiffOp::set_floor(int f) {
    floor_ = std::max(floor_, f);
    for (auto it = c_.begin(); it != c_.end();)
        it = it->first < floor_ ? c_.erase(it) : std::next(it);
    return *this;
}

PsDiffOp& PsDiffOp::operator+=(const PsDiffOp& o) {
    for (const auto& [k, v] : o.c_) set(k, coeff_or_zero(k) + v);
    return set_floor(o.floor_);
}

PsDiffOp& PsDiffOp::operator-=(const PsDiffOp& o) {
    for (const auto& [k, v] : o.c_) set(k, coeff_or_zero(k) - v);
    return set_floor(o.floor_);
}

PsDiffOp compose_shift(const PsDiffOp& P, const PsDiffOp& Q) {
    PsDiffOp r;
    int f = PsDiffOp::kExactFloor;
    if (P.floor() != PsDiffOp::kExactFloor) f = std::max(f, P.floor() + Q.max_shift());
    if (Q.floor() != PsDiffOp::kExactFloor) f = std::max(f, Q.floor() + P.max_shift());
    std::map<int, DiffPoly> acc;
    for (const auto& [s, a] : P.coeffs())
        for (const auto& [t, b] : Q.coeffs())
            if (s + t >= f) acc[s + t] += a * b.shift_sites(s);
    for (auto& [k, v] : acc) r.set(k, v);
    r.set_floor(f);
    return r;
}

DiffPoly residue_shift(const PsDiffOp& P) { return P.coeff(0); }

std::string PsDiffOp::str(const Alphabet& a) const {
    std::string s = render_op(c_, "S", [&](const DiffPoly& p) { return p.str(a); });
    if (floor_ != kExactFloor) s += " + O(S^" + std::to_string(floor_ - 1) + ")";
    return s;
}

PsDiffOp parse_psdiffop(const std::string& s, const Alphabet& a) { return parse_op<PsDiffOp>(s, a, 'S'); }

// ---------------------------------------------------------------- numeric

void PeriodicShiftOp::set(int s, std::vector<double> v) {
    if (static_cast<int>(v.size()) != N_) throw std::invalid_argument("coefficient length != period");
    c_[s] = std::move(v);
}

std::vector<double> PeriodicShiftOp::coeff(int s) const {
    if (s < floor_) throw WindowExhausted("shift " + std::to_string(s) + " below certified window");
    auto it = c_.find(s);
    return it == c_.end() ? std::vector<double>(N_, 0.0) : it->second;
}

PeriodicShiftOp operator*(const PeriodicShiftOp& a, const PeriodicShiftOp& b) {
    if (a.N_ != b.N_) throw std::invalid_argument("period mismatch");
    int N = a.N_;
    PeriodicShiftOp r(N);
    auto top = [](const PeriodicShiftOp& p) {
        int t = p.c_.empty() ? INT_MIN / 2 : p.c_.rbegin()->first;
        return p.floor_ == PsDiffOp::kExactFloor ? t : std::max(t, p.floor_ - 1);
    };
    int f = PsDiffOp::kExactFloor;
    if (a.floor_ != PsDiffOp::kExactFloor) f = std::max(f, a.floor_ + top(b));
    if (b.floor_ != PsDiffOp::kExactFloor) f = std::max(f, b.floor_ + top(a));
    for (const auto& [s, x] : a.c_)
        for (const auto& [t, y] : b.c_) {
            if (s + t < f) continue;
            auto& z = r.c_[s + t];
            z.resize(N, 0.0);
            for (int n = 0; n < N; ++n) z[n] += x[n] * y[((n + s) % N + N) % N];
        }
    r.floor_ = f;
    return r;
}

PeriodicShiftOp operator-(const PeriodicShiftOp& a, const PeriodicShiftOp& b) {
    PeriodicShiftOp r = a;
    for (const auto& [s, y] : b.c_) {
        auto& z = r.c_[s];
        z.resize(a.N_, 0.0);
        for (int n = 0; n < a.N_; ++n) z[n] -= y[n];
    }
    r.floor_ = std::max(a.floor_, b.floor_);
    return r;
}

std::vector<double> residue_shift(const PeriodicShiftOp& P) { return P.coeff(0); }

}  // namespace hier
