#include "hier/kp.hpp"

#include <algorithm>

namespace hier::kp {

namespace {
constexpr int kFieldSlots = 16;
constexpr int kBase = 8;

int encode(const std::array<int, kMaxTime + 1>& a) {
    int code = 0, w = 1;
    for (int k = 2; k <= kMaxTime; ++k) {
        if (a[k] >= kBase) throw std::out_of_range("time derivative order too large");
        code += a[k] * w;
        w *= kBase;
    }
    return code;
}

std::string time_suffix(const std::array<int, kMaxTime + 1>& a) {
    std::string s;
    s += std::string(a[2], 'y');
    s += std::string(a[3], 't');
    for (int k = 4; k <= kMaxTime; ++k)
        for (int i = 0; i < a[k]; ++i) s += "T" + std::to_string(k);
    return s;
}
}  // namespace

Var time_jet(int field, const std::array<int, kMaxTime + 1>& a, int xorder) {
    return {Var::Jet, field + kFieldSlots * encode(a), xorder};
}

int field_of(const Var& v) { return v.index % kFieldSlots; }

std::array<int, kMaxTime + 1> time_orders(const Var& v) {
    std::array<int, kMaxTime + 1> a{};
    int code = v.index / kFieldSlots;
    for (int k = 2; k <= kMaxTime; ++k) {
        a[k] = code % kBase;
        code /= kBase;
    }
    a[1] = v.order;
    return a;
}

DiffPoly d_t(const DiffPoly& p, int k) {
    if (k == 1) return total_derivative(p);
    if (k < 2 || k > kMaxTime) throw std::out_of_range("time index out of tracked range");
    return p.apply_derivation([k](const Var& v) {
        if (v.kind != Var::Jet) return DiffPoly{};
        auto a = time_orders(v);
        a[k] += 1;
        return DiffPoly::var(time_jet(field_of(v), a, v.order));
    });
}

Alphabet alphabet(const std::vector<std::string>& names) {
    std::vector<std::string> base = names;
    if (base.empty())
        for (int i = 1; i <= kFieldDepth; ++i) base.push_back("u" + std::to_string(i));
    Alphabet al;
    al.funcs.clear();
    for (int code = 0; code < kBase * kBase; ++code)
        for (int f = 0; f < kFieldSlots; ++f) {
            std::array<int, kMaxTime + 1> a{};
            a[2] = code % kBase;
            a[3] = code / kBase;
            std::string n = f < static_cast<int>(base.size()) ? base[f] : "f" + std::to_string(f);
            std::string suf = time_suffix(a);
            al.funcs.push_back(suf.empty() ? n : n + "_" + suf);
        }
    al.func_namer = [base](int index) {
        Var v{Var::Jet, index, 0};
        int f = field_of(v);
        std::string n = f < static_cast<int>(base.size()) ? base[f] : "f" + std::to_string(f);
        std::string suf = time_suffix(time_orders(v));
        return suf.empty() ? n : n + "_" + suf;
    };
    al.params = {"lambda", "z", "mu"};
    return al;
}

PsiDO lax_operator(int fields) {
    PsiDO L = PsiDO::d();
    for (int i = 1; i <= fields; ++i) L += PsiDO::term(DiffPoly::jet(i - 1), -i);
    L.set_floor(-fields);
    return L;
}

PsiDO a_operator(int j, int fields) { return power(lax_operator(fields), j).plus_part(); }

DiffPoly conserved_density(int j, int fields) { return residue(power(lax_operator(fields), j)); }

static PsiDO d_t_op(const PsiDO& A, int k) {
    return A.map_coeffs([k](const DiffPoly& p) { return d_t(p, k); });
}

std::vector<DiffPoly> kp_flow_system(int m, int n, int fields) {
    PsiDO Am = a_operator(m, fields), An = a_operator(n, fields);
    PsiDO Z = d_t_op(An, m) - d_t_op(Am, n) - commutator(Am, An);
    std::vector<DiffPoly> eqs;
    for (int k = n - 2; k >= 0; --k) eqs.push_back(Z.coeff(k));
    for (const auto& [k, v] : Z.coeffs())
        if (k > n - 2 || k < 0) throw std::logic_error("zero-curvature residual has unexpected order");
    return eqs;
}

DiffPoly to_u_w(const DiffPoly& p, WChoice choice) {
    return p.substitute([choice](const Var& v) -> std::optional<DiffPoly> {
        if (v.kind != Var::Jet) return std::nullopt;
        int f = field_of(v);
        auto a = time_orders(v);
        if (f == 0) return Q(1, 2) * DiffPoly::var(time_jet(0, a, v.order));
        if (f == 1) {
            DiffPoly w = DiffPoly::var(time_jet(1, a, v.order));
            if (choice == WChoice::U2) return w;
            return Q(1, 3) * w - Q(1, 2) * DiffPoly::var(time_jet(0, a, v.order + 1));
        }
        return std::nullopt;
    });
}

DiffPoly kp_equation() {
    std::array<int, kMaxTime + 1> none{}, t{}, yy{};
    t[3] = 1;
    yy[2] = 2;
    auto U = [&](int k) { return DiffPoly::var(time_jet(0, none, k)); };
    DiffPoly inner = Q(4) * DiffPoly::var(time_jet(0, t)) - Q(6) * U(0) * U(1) - U(3);
    return total_derivative(inner) - Q(3) * DiffPoly::var(time_jet(0, yy));
}

DiffPoly eliminate_w(const DiffPoly& r1, const DiffPoly& r2) {
    return Q(4) * d_t(r2, 1) + d_t(r1, 2) - total_derivative(r1, 2);
}

// ---------------------------------------------------------------- Schur

YoungDiagram transpose(const YoungDiagram& l) {
    YoungDiagram t;
    if (l.empty()) return t;
    for (int c = 0; c < l[0]; ++c) {
        int n = 0;
        for (int r : l)
            if (r > c) ++n;
        t.push_back(n);
    }
    return t;
}

int weight(const YoungDiagram& l) {
    int s = 0;
    for (int r : l) s += r;
    return s;
}

static void gen(int n, int maxpart, YoungDiagram& cur, std::vector<YoungDiagram>& out) {
    if (n == 0) {
        out.push_back(cur);
        return;
    }
    for (int p = std::min(n, maxpart); p >= 1; --p) {
        cur.push_back(p);
        gen(n - p, p, cur, out);
        cur.pop_back();
    }
}

std::vector<YoungDiagram> partitions(int n) {
    std::vector<YoungDiagram> out;
    YoungDiagram cur;
    gen(n, n, cur, out);
    return out;
}

DiffPoly schur_h(int k) {
    if (k < 0) return DiffPoly{};
    if (k == 0) return DiffPoly(1);
    // truncated exponential of xi(t, z) = sum t_j z^j
    std::vector<DiffPoly> xi(k + 1), term(k + 1), acc(k + 1);
    for (int j = 1; j <= k; ++j) xi[j] = DiffPoly::param(j - 1);
    term[0] = DiffPoly(1);
    acc[0] = DiffPoly(1);
    for (int m = 1; m <= k; ++m) {
        std::vector<DiffPoly> next(k + 1);
        for (int a = 0; a <= k; ++a) {
            if (term[a].is_zero()) continue;
            for (int b = 1; a + b <= k; ++b) next[a + b] += term[a] * xi[b];
        }
        for (auto& c : next) c *= Q(1, m);
        term = next;
        for (int a = 0; a <= k; ++a) acc[a] += term[a];
    }
    return acc[k];
}

DiffPoly determinant(const std::vector<std::vector<DiffPoly>>& m) {
    int n = static_cast<int>(m.size());
    if (n == 0) return DiffPoly(1);
    if (n == 1) return m[0][0];
    DiffPoly r;
    for (int j = 0; j < n; ++j) {
        if (m[0][j].is_zero()) continue;
        std::vector<std::vector<DiffPoly>> minor;
        for (int i = 1; i < n; ++i) {
            std::vector<DiffPoly> row;
            for (int c = 0; c < n; ++c)
                if (c != j) row.push_back(m[i][c]);
            minor.push_back(row);
        }
        DiffPoly t = m[0][j] * determinant(minor);
        r += (j % 2 == 0) ? t : -t;
    }
    return r;
}

DiffPoly schur_s(const YoungDiagram& l) {
    int n = static_cast<int>(l.size());
    std::vector<std::vector<DiffPoly>> m(n, std::vector<DiffPoly>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m[i][j] = schur_h(l[i] - i + j);
    return determinant(m);
}

Alphabet times_alphabet(int K) {
    Alphabet a;
    a.params.clear();
    for (int k = 1; k <= K; ++k) a.params.push_back("t" + std::to_string(k));
    return a;
}

std::complex<double> evaluate_times(const DiffPoly& p, const std::vector<std::complex<double>>& t) {
    return p.evaluate<std::complex<double>>([&](const Var& v) {
        if (v.kind != Var::Param) throw std::invalid_argument("expected a polynomial in times");
        return v.index < static_cast<int>(t.size()) ? t[v.index] : std::complex<double>(0);
    });
}

}  // namespace hier::kp
