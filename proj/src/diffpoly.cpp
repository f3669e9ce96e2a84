#include "hier/diffpoly.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace hier {

std::string Alphabet::func_name(int i) const {
    if (func_namer) return func_namer(i);
    if (i >= 0 && i < static_cast<int>(funcs.size())) return funcs[i];
    return "f" + std::to_string(i);
}

std::string Alphabet::param_name(int i) const {
    if (i >= 0 && i < static_cast<int>(params.size())) return params[i];
    return "a" + std::to_string(i);
}

std::string Alphabet::site_name(int i) const {
    if (i >= 0 && i < static_cast<int>(sites.size())) return sites[i];
    return "s" + std::to_string(i);
}

// Larger degree first; then compare from the largest symbol down.
bool DiffPoly::TermOrder::operator()(const Monomial& a, const Monomial& b) const {
    if (a.size() != b.size()) return a.size() > b.size();
    return std::lexicographical_compare(a.rbegin(), a.rend(), b.rbegin(), b.rend());
}

DiffPoly::DiffPoly(const Q& c) {
    if (c != 0) terms_.emplace(Monomial{}, c);
}

DiffPoly DiffPoly::var(const Var& v) {
    DiffPoly p;
    p.terms_.emplace(Monomial{v}, Q(1));
    return p;
}

DiffPoly DiffPoly::jet(int func, int order) { return var({Var::Jet, func, order}); }
DiffPoly DiffPoly::param(int index) { return var({Var::Param, index, 0}); }
DiffPoly DiffPoly::site(int field, int shift) { return var({Var::Site, field, shift}); }

bool DiffPoly::is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty());
}

Q DiffPoly::constant_term() const {
    auto it = terms_.find(Monomial{});
    return it == terms_.end() ? Q(0) : it->second;
}

void DiffPoly::add_term(const Monomial& m, const Q& c) {
    if (c == 0) return;
    auto [it, fresh] = terms_.try_emplace(m, c);
    if (!fresh) {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

DiffPoly& DiffPoly::operator+=(const DiffPoly& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
}

DiffPoly& DiffPoly::operator-=(const DiffPoly& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
}

DiffPoly DiffPoly::operator-() const {
    DiffPoly r = *this;
    for (auto& [m, c] : r.terms_) c = -c;
    return r;
}

DiffPoly& DiffPoly::operator*=(const Q& c) {
    if (c == 0) {
        terms_.clear();
        return *this;
    }
    for (auto& [m, v] : terms_) v *= c;
    return *this;
}

static DiffPoly::Monomial merge(const DiffPoly::Monomial& a, const DiffPoly::Monomial& b) {
    DiffPoly::Monomial r;
    r.reserve(a.size() + b.size());
    std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(r));
    return r;
}

DiffPoly operator*(const DiffPoly& a, const DiffPoly& b) {
    DiffPoly r;
    for (const auto& [ma, ca] : a.terms_)
        for (const auto& [mb, cb] : b.terms_) r.add_term(merge(ma, mb), ca * cb);
    return r;
}

DiffPoly& DiffPoly::operator*=(const DiffPoly& o) {
    *this = *this * o;
    return *this;
}

DiffPoly DiffPoly::pow(int n) const {
    if (n < 0) throw std::invalid_argument("DiffPoly::pow: negative exponent");
    DiffPoly r(1), b = *this;
    while (n) {
        if (n & 1) r *= b;
        n >>= 1;
        if (n) b *= b;
    }
    return r;
}

std::vector<Var> DiffPoly::variables() const {
    std::vector<Var> vs;
    for (const auto& [m, c] : terms_) vs.insert(vs.end(), m.begin(), m.end());
    std::sort(vs.begin(), vs.end());
    vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
    return vs;
}

int DiffPoly::degree_in(const Var& v) const {
    int d = 0;
    for (const auto& [m, c] : terms_)
        d = std::max(d, static_cast<int>(std::count(m.begin(), m.end(), v)));
    return d;
}

DiffPoly DiffPoly::partial(const Var& v) const {
    DiffPoly r;
    for (const auto& [m, c] : terms_) {
        auto lo = std::lower_bound(m.begin(), m.end(), v);
        auto hi = std::upper_bound(lo, m.end(), v);
        long k = hi - lo;
        if (k == 0) continue;
        Monomial mm(m.begin(), lo);
        mm.insert(mm.end(), lo + 1, m.end());
        r.add_term(mm, c * k);
    }
    return r;
}

DiffPoly DiffPoly::coefficient_of(const Var& v, int k) const {
    DiffPoly r;
    for (const auto& [m, c] : terms_) {
        auto lo = std::lower_bound(m.begin(), m.end(), v);
        auto hi = std::upper_bound(lo, m.end(), v);
        if (hi - lo != k) continue;
        Monomial mm(m.begin(), lo);
        mm.insert(mm.end(), hi, m.end());
        r.add_term(mm, c);
    }
    return r;
}

DiffPoly DiffPoly::substitute(const std::function<std::optional<DiffPoly>(const Var&)>& f) const {
    std::map<Var, std::optional<DiffPoly>> cache;
    auto image = [&](const Var& v) -> const std::optional<DiffPoly>& {
        auto it = cache.find(v);
        if (it == cache.end()) it = cache.emplace(v, f(v)).first;
        return it->second;
    };
    DiffPoly r;
    for (const auto& [m, c] : terms_) {
        Monomial kept;
        DiffPoly prod(c);
        for (const auto& v : m) {
            const auto& im = image(v);
            if (im)
                prod *= *im;
            else
                kept.push_back(v);
        }
        if (kept.empty()) {
            r += prod;
        } else {
            DiffPoly k;
            k.terms_.emplace(kept, Q(1));
            r += prod * k;
        }
    }
    return r;
}

DiffPoly DiffPoly::apply_derivation(const std::function<DiffPoly(const Var&)>& image) const {
    DiffPoly r;
    for (const auto& v : variables()) {
        DiffPoly dv = image(v);
        if (dv.is_zero()) continue;
        r += partial(v) * dv;
    }
    return r;
}

DiffPoly DiffPoly::shift_sites(int k) const {
    DiffPoly r;
    for (const auto& [m, c] : terms_) {
        Monomial mm = m;
        for (auto& v : mm)
            if (v.kind == Var::Site) v.order += k;
        std::sort(mm.begin(), mm.end());
        r.add_term(mm, c);
    }
    return r;
}

DiffPoly total_derivative(const DiffPoly& p) {
    DiffPoly r;
    for (const auto& [m, c] : p.terms()) {
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (m[i].kind != Var::Jet) continue;
            if (i > 0 && m[i] == m[i - 1]) continue;  // handled with multiplicity below
            std::size_t j = i;
            while (j < m.size() && m[j] == m[i]) ++j;
            long mult = static_cast<long>(j - i);
            DiffPoly::Monomial mm(m.begin(), m.begin() + i);
            mm.insert(mm.end(), m.begin() + i + 1, m.end());
            Var up = m[i];
            up.order += 1;
            mm.insert(std::upper_bound(mm.begin(), mm.end(), up), up);
            r.add_term(mm, c * mult);
        }
    }
    return r;
}

DiffPoly total_derivative(const DiffPoly& p, int times) {
    DiffPoly r = p;
    for (int i = 0; i < times; ++i) r = total_derivative(r);
    return r;
}

int max_jet_order(const DiffPoly& p) {
    int k = -1;
    for (const auto& [m, c] : p.terms())
        for (const auto& v : m)
            if (v.kind == Var::Jet) k = std::max(k, v.order);
    return k;
}

DiffPoly variational_derivative(const DiffPoly& p, int func) {
    DiffPoly r;
    int top = max_jet_order(p);
    for (int k = 0; k <= top; ++k) {
        DiffPoly d = p.partial({Var::Jet, func, k});
        if (d.is_zero()) continue;
        d = total_derivative(d, k);
        if (k % 2) d = -d;
        r += d;
    }
    return r;
}

// Integration by parts, eliminating the top jet symbol each round.
std::variant<DiffPoly, NotTotalDerivative> antiderivative(const DiffPoly& p) {
    bool exact = true;
    for (const auto& v : p.variables())
        if (v.kind == Var::Jet && !variational_derivative(p, v.index).is_zero()) exact = false;
    DiffPoly rest = p, acc;
    for (int step = 0; !rest.is_zero(); ++step) {
        if (!exact && step >= 64) return NotTotalDerivative{rest};
        if (step > 100000) throw std::logic_error("antiderivative: no progress");
        std::optional<Var> top;
        for (const auto& v : rest.variables()) {
            if (v.kind != Var::Jet) continue;
            if (!top || v.order > top->order || (v.order == top->order && v.index < top->index))
                top = v;
        }
        if (!top || top->order == 0) return NotTotalDerivative{rest};
        if (rest.degree_in(*top) > 1) return NotTotalDerivative{rest};
        DiffPoly a = rest.coefficient_of(*top, 1);
        if (max_jet_order(a) >= top->order) return NotTotalDerivative{rest};
        Var below = *top;
        below.order -= 1;
        // Q = integral of a d(below)
        DiffPoly q;
        for (const auto& [m, c] : a.terms()) {
            long k = std::count(m.begin(), m.end(), below);
            DiffPoly::Monomial mm = m;
            mm.insert(std::upper_bound(mm.begin(), mm.end(), below), below);
            q.add_term(mm, c / Q(k + 1));
        }
        acc += q;
        rest -= total_derivative(q);
    }
    return acc;
}

DiffPoly integrate(const DiffPoly& p) {
    auto r = antiderivative(p);
    if (auto* q = std::get_if<DiffPoly>(&r)) return *q;
    throw std::domain_error("not a total derivative: remainder " +
                            std::get<NotTotalDerivative>(r).remainder.str());
}

bool is_total_derivative(const DiffPoly& p) {
    return std::holds_alternative<DiffPoly>(antiderivative(p));
}

// ---------------------------------------------------------------- printing

std::string rational_str(const Q& q) { return q.get_str(); }

static bool is_greek(const std::string& s) {
    static const char* g[] = {"alpha", "beta", "gamma", "delta", "epsilon", "zeta", "eta",
                              "theta", "lambda", "mu", "nu", "xi", "sigma", "tau", "phi"};
    for (auto* x : g)
        if (s == x) return true;
    return false;
}

std::string var_str(const Var& v, const Alphabet& a) {
    switch (v.kind) {
        case Var::Jet: {
            std::string n = a.func_name(v.index);
            if (v.order == 0) return n;
            if (n.find('_') == std::string::npos) n += '_';
            return n + std::string(v.order, 'x');
        }
        case Var::Param:
            return a.param_name(v.index);
        default: {
            std::string s = a.site_name(v.index) + "(n";
            if (v.order > 0) s += "+" + std::to_string(v.order);
            if (v.order < 0) s += std::to_string(v.order);
            return s + ")";
        }
    }
}

// "u1" -> u_{1}, "u1_y" -> u_{1,y}
static std::string latex_base(const std::string& n, const std::string& sub) {
    std::string head = n, tail;
    auto us = n.find('_');
    if (us != std::string::npos) {
        head = n.substr(0, us);
        tail = n.substr(us + 1);
    }
    std::size_t k = head.size();
    while (k > 0 && std::isdigit(static_cast<unsigned char>(head[k - 1]))) --k;
    std::string letters = head.substr(0, k), digits = head.substr(k);
    if (is_greek(letters)) letters = "\\" + letters;
    std::vector<std::string> parts;
    if (!digits.empty()) parts.push_back(digits);
    std::string s2 = tail + sub;
    if (!s2.empty()) parts.push_back(s2);
    if (parts.empty()) return letters;
    std::string r = letters + "_{";
    for (std::size_t i = 0; i < parts.size(); ++i) r += (i ? "," : "") + parts[i];
    return r + "}";
}

std::string var_latex(const Var& v, const Alphabet& a) {
    switch (v.kind) {
        case Var::Jet:
            return latex_base(a.func_name(v.index), std::string(v.order, 'x'));
        case Var::Param:
            return latex_base(a.param_name(v.index), "");
        default: {
            std::string s = latex_base(a.site_name(v.index), "") + "(n";
            if (v.order > 0) s += "+" + std::to_string(v.order);
            if (v.order < 0) s += std::to_string(v.order);
            return s + ")";
        }
    }
}

template <class VarFmt, class PowFmt, class CoefFmt>
static std::string render(const DiffPoly& p, VarFmt vf, PowFmt pf, CoefFmt cf) {
    if (p.is_zero()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [m, c] : p.terms()) {
        Q a = abs(c);
        std::string body;
        for (std::size_t i = 0; i < m.size();) {
            std::size_t j = i;
            while (j < m.size() && m[j] == m[i]) ++j;
            if (!body.empty()) body += ' ';
            body += vf(m[i]);
            if (j - i > 1) body += pf(static_cast<int>(j - i));
            i = j;
        }
        std::string coef = (a == 1 && !body.empty()) ? "" : cf(a);
        std::string t = coef.empty() ? body : (body.empty() ? coef : coef + " " + body);
        if (first)
            out = (c < 0 ? "-" : "") + t;
        else
            out += (c < 0 ? " - " : " + ") + t;
        first = false;
    }
    return out;
}

std::string DiffPoly::str(const Alphabet& a) const {
    return render(
        *this, [&](const Var& v) { return var_str(v, a); },
        [](int k) { return "^" + std::to_string(k); }, [](const Q& q) { return rational_str(q); });
}

std::string DiffPoly::latex(const Alphabet& a) const {
    return render(
        *this, [&](const Var& v) { return var_latex(v, a); },
        [](int k) { return "^{" + std::to_string(k) + "}"; },
        [](const Q& q) {
            if (q.get_den() == 1) return q.get_num().get_str();
            return "\\frac{" + q.get_num().get_str() + "}{" + q.get_den().get_str() + "}";
        });
}

// ---------------------------------------------------------------- parsing

namespace {

struct Parser {
    const std::string& s;
    const Alphabet& a;
    std::size_t pos = 0;

    void skip() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool peek(char c) {
        skip();
        return pos < s.size() && s[pos] == c;
    }
    bool eat(char c) {
        if (!peek(c)) return false;
        ++pos;
        return true;
    }
    [[noreturn]] void fail(const std::string& msg) {
        throw ParseError(msg + " at position " + std::to_string(pos) + " in '" + s + "'");
    }

    mpz_class integer() {
        skip();
        std::size_t b = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        if (b == pos) fail("expected integer");
        return mpz_class(s.substr(b, pos - b));
    }

    std::string ident() {
        skip();
        std::size_t b = pos;
        while (pos < s.size() &&
               (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
            ++pos;
        return s.substr(b, pos - b);
    }

    static int find(const std::vector<std::string>& v, const std::string& n) {
        for (std::size_t i = 0; i < v.size(); ++i)
            if (v[i] == n) return static_cast<int>(i);
        return -1;
    }

    Var resolve(const std::string& id) {
        if (int k = find(a.params, id); k >= 0) return {Var::Param, k, 0};
        if (int k = find(a.sites, id); k >= 0) {
            if (!eat('(')) fail("expected '(' after site symbol");
            if (ident() != "n") fail("expected n");
            int shift = 0;
            if (eat('+')) shift = static_cast<int>(integer().get_si());
            else if (eat('-')) shift = -static_cast<int>(integer().get_si());
            if (!eat(')')) fail("expected ')'");
            return {Var::Site, k, shift};
        }
        for (std::size_t strip = 0; strip < id.size(); ++strip) {
            std::string base = id.substr(0, id.size() - strip);
            if (strip > 0 && id[id.size() - strip] != 'x') break;
            std::string cand = base;
            if (strip > 0 && !cand.empty() && cand.back() == '_') cand.pop_back();
            if (int k = find(a.funcs, cand); k >= 0)
                return {Var::Jet, k, static_cast<int>(strip)};
        }
        fail("unknown symbol '" + id + "'");
    }

    DiffPoly factor() {
        skip();
        if (pos >= s.size()) fail("unexpected end");
        DiffPoly base;
        if (eat('(')) {
            base = expr();
            if (!eat(')')) fail("expected ')'");
        } else if (std::isdigit(static_cast<unsigned char>(s[pos]))) {
            mpz_class n = integer();
            Q q(n);
            if (peek('/')) {
                std::size_t save = pos;
                ++pos;
                skip();
                if (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos])))
                    q = Q(n, integer());
                else
                    pos = save;
                q.canonicalize();
            }
            base = DiffPoly(q);
        } else if (std::isalpha(static_cast<unsigned char>(s[pos]))) {
            base = DiffPoly::var(resolve(ident()));
        } else {
            fail("unexpected character");
        }
        if (eat('^')) base = base.pow(static_cast<int>(integer().get_si()));
        return base;
    }

    bool starts_factor() {
        skip();
        return pos < s.size() &&
               (s[pos] == '(' || std::isalnum(static_cast<unsigned char>(s[pos])));
    }

    DiffPoly term() {
        DiffPoly t = factor();
        for (;;) {
            if (eat('*')) {
                t *= factor();
            } else if (peek('/')) {
                ++pos;
                Q d(integer());
                t *= Q(1) / d;
            } else if (starts_factor()) {
                t *= factor();
            } else {
                break;
            }
        }
        return t;
    }

    DiffPoly expr() {
        DiffPoly r;
        bool neg = eat('-');
        if (!neg) eat('+');
        DiffPoly t = term();
        r = neg ? -t : t;
        for (;;) {
            if (eat('+'))
                r += term();
            else if (eat('-'))
                r -= term();
            else
                break;
        }
        return r;
    }
};

}  // namespace

DiffPoly parse_diffpoly(const std::string& s, const Alphabet& a) {
    Parser p{s, a};
    DiffPoly r = p.expr();
    p.skip();
    if (p.pos != s.size()) p.fail("trailing input");
    return r;
}

}  // namespace hier
