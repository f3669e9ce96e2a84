#include "hier/kdv.hpp"

#include <numeric>

namespace hier::kdv {

namespace {
DiffPoly u(int k = 0) { return DiffPoly::jet(kU, k); }
DiffPoly lam() { return DiffPoly::param(kLambda); }

const GDTable& shared_table(int j_max) {
    static thread_local std::unique_ptr<GDTable> t;
    if (!t || t->j_max() < j_max) t = std::make_unique<GDTable>(std::max(j_max, 9));
    return *t;
}
}  // namespace

Alphabet alphabet() {
    Alphabet a;
    a.funcs = {"u", "w"};
    a.params = {"lambda", "z", "mu"};
    return a;
}

PsiDO lax_operator(int depth) {
    PsiDO L = PsiDO::d(2) + PsiDO(u());
    L.set_depth(depth);
    return L;
}

GDTable::GDTable(int j_max) : j_max_(j_max) {
    R_[-1] = DiffPoly(1);
    for (int j = -1; j + 2 <= j_max; j += 2) {
        const DiffPoly& Rj = R_[j];
        DiffPoly rhs = total_derivative(Rj, 3) + Q(4) * u() * total_derivative(Rj) +
                       Q(2) * u(1) * Rj;
        auto r = antiderivative(rhs);
        if (!std::holds_alternative<DiffPoly>(r))
            throw RecursionNotIntegrable("recursion for R_" + std::to_string(j + 2) +
                                         " is not a total derivative");
        R_[j + 2] = Q(1, 4) * std::get<DiffPoly>(r);
    }
}

DiffPoly GDTable::operator[](int j) const {
    if (j % 2 == 0) return DiffPoly{};
    auto it = R_.find(j);
    if (it == R_.end()) throw std::out_of_range("R_" + std::to_string(j) + " not in table");
    return it->second;
}

GDTable gd_coefficients(int j_max) {
    if (j_max < 1 || j_max % 2 == 0) throw std::invalid_argument("j_max must be odd and >= 1");
    return GDTable(j_max);
}

DiffPoly gd_via_residue(int j, int depth) {
    return residue(fractional_power(lax_operator(depth), j, 2));
}

DiffPoly flow_rhs(int m) {
    if (m < 1 || m % 2 == 0) throw std::invalid_argument("flow index must be odd and >= 1");
    return Q(2) * total_derivative(shared_table(m)[m]);
}

DiffPoly flow_rhs_via_residue(int m, int depth) {
    return Q(2) * total_derivative(gd_via_residue(m, depth));
}

static Q clearing_factor(const DiffPoly& p) {
    mpz_class l = 1, g = 0;
    for (const auto& [m, c] : p.terms()) l = lcm(l, c.get_den());
    for (const auto& [m, c] : p.terms()) {
        Q s = c * l;
        g = gcd(g, s.get_num());
    }
    if (g == 0) g = 1;
    return Q(l) / Q(g);
}

std::string hierarchy_equation(int m, bool latex) {
    DiffPoly rhs = flow_rhs(m);
    Q c = clearing_factor(rhs);
    std::string lhs_var = latex ? "u_{t_{" + std::to_string(m) + "}}" : "u_t" + std::to_string(m);
    std::string lhs = c == 1 ? lhs_var : rational_str(c) + " " + lhs_var;
    Alphabet a = alphabet();
    return lhs + " = " + (latex ? (c * rhs).latex(a) : (c * rhs).str(a));
}

PsiDO am_operator(int m) {
    if (m < 1 || m % 2 == 0) throw std::invalid_argument("m must be odd and >= 1");
    const GDTable& t = shared_table(m);
    PsiDO L = lax_operator();
    PsiDO A;
    for (int j = 0; j <= (m - 1) / 2; ++j) {
        DiffPoly R = t[2 * j - 1];
        PsiDO f = PsiDO::term(R, 1) + PsiDO(Q(-1, 2) * total_derivative(R));
        A += compose(f, power(L, (m - 1) / 2 - j));
    }
    return A;
}

PsiDO am_operator_direct(int m, int depth) {
    return fractional_power(lax_operator(depth), m, 2).plus_part();
}

DiffPoly FlowDerivation::image(const Var& v) const {
    if (v.kind != Var::Jet || v.index != func_) return DiffPoly{};
    if (cache_.empty()) cache_.push_back(rhs_);
    while (static_cast<int>(cache_.size()) <= v.order) cache_.push_back(total_derivative(cache_.back()));
    return cache_[v.order];
}

DiffPoly FlowDerivation::operator()(const DiffPoly& p) const {
    return p.apply_derivation([this](const Var& v) { return image(v); });
}

FlowDerivation flow(int m) { return FlowDerivation(flow_rhs(m)); }

BracketResult poisson_bracket(const DiffPoly& F, const DiffPoly& G, int which) {
    DiffPoly dF = variational_derivative(F, kU), dG = variational_derivative(G, kU);
    DiffPoly D;
    if (which == 1)
        D = total_derivative(dG);
    else if (which == 2)
        D = total_derivative(dG, 3) + Q(4) * u() * total_derivative(dG) + Q(2) * u(1) * dG;
    else
        throw std::invalid_argument("bracket must be 1 or 2");
    BracketResult r;
    r.integrand = dF * D;
    auto a = antiderivative(r.integrand);
    if (auto* q = std::get_if<DiffPoly>(&a)) {
        r.total_derivative = true;
        r.witness = *q;
    } else {
        r.remainder = std::get<NotTotalDerivative>(a).remainder;
    }
    return r;
}

DiffPoly recursion_operator_residual(int j) {
    const GDTable& t = shared_table(j + 2);
    DiffPoly Rj = t[j];
    DiffPoly inner = integrate(u() * total_derivative(Rj));
    DiffPoly lam_R = total_derivative(Rj, 2) + Q(2) * u() * Rj + Q(2) * inner;
    return Q(4) * t[j + 2] - lam_R;
}

DiffPoly miura_forward(const DiffPoly& v_poly, const DiffPoly& lambda) {
    return lambda - v_poly * v_poly - total_derivative(v_poly);
}

DiffPoly miura_residual(const DiffPoly& lambda) {
    DiffPoly v = DiffPoly::jet(0), w = DiffPoly::jet(1);
    auto vj = [](int k) { return DiffPoly::jet(0, k); };
    DiffPoly U = miura_forward(v, lambda);
    DiffPoly Ut = -(Q(2) * v * w + total_derivative(w));
    DiffPoly Ux = total_derivative(U), Uxxx = total_derivative(U, 3);
    DiffPoly lhs = -(Q(4) * Ut - Q(6) * U * Ux - Uxxx);
    DiffPoly m = Q(4) * w + Q(6) * v * v * vj(1) - vj(3) - Q(6) * lambda * vj(1);
    DiffPoly rhs = total_derivative(m) + Q(2) * v * m;
    return lhs - rhs;
}

Mat2 mat_mul(const Mat2& a, const Mat2& b) {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
    return r;
}

Mat2 mat_sub(const Mat2& a, const Mat2& b) {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r[i][j] = a[i][j] - b[i][j];
    return r;
}

Mat2 mat_add(const Mat2& a, const Mat2& b) {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r[i][j] = a[i][j] + b[i][j];
    return r;
}

Mat2 mat_apply(const Mat2& a, const std::function<DiffPoly(const DiffPoly&)>& f) {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r[i][j] = f(a[i][j]);
    return r;
}

bool mat_is_zero(const Mat2& a) {
    for (const auto& row : a)
        for (const auto& e : row)
            if (!e.is_zero()) return false;
    return true;
}

DiffPoly incomplete_generating(int m, const GDTable& t) {
    DiffPoly r;
    int top = (m + 1) / 2;
    for (int j = 0; j <= top; ++j) r += t[2 * j - 1] * lam().pow(top - j);
    return r;
}

Mat2 zc_matrix(int m, Gauge g) {
    if (m < 1 || m % 2 == 0) throw std::invalid_argument("m must be odd and >= 1");
    const GDTable& t = shared_table(m);
    DiffPoly R = incomplete_generating(m - 2, t);
    DiffPoly R1 = total_derivative(R), R2 = total_derivative(R, 2);
    Mat2 U;
    U[0][0] = Q(-1, 2) * R1;
    U[0][1] = R;
    U[1][0] = (lam() - u()) * R - Q(1, 2) * R2;
    U[1][1] = Q(1, 2) * R1;
    if (g == Gauge::Standard) return U;

    DiffPoly z = DiffPoly::param(kZ);
    auto sub = [&](const DiffPoly& p) {
        return p.substitute([&](const Var& v) -> std::optional<DiffPoly> {
            if (v.kind == Var::Param && v.index == kLambda) return z * z;
            return std::nullopt;
        });
    };
    Mat2 Uz = mat_apply(U, sub);
    Mat2 Gi{{{DiffPoly(1), DiffPoly{}}, {-z, DiffPoly(1)}}};
    Mat2 G{{{DiffPoly(1), DiffPoly{}}, {z, DiffPoly(1)}}};
    return mat_mul(mat_mul(Gi, Uz), G);
}

Mat2 zero_curvature_residual(int m, int n, Gauge g) {
    Mat2 Um = zc_matrix(m, g), Un = zc_matrix(n, g);
    FlowDerivation Dm = flow(m), Dn = flow(n);
    Mat2 a = mat_apply(Un, [&](const DiffPoly& p) { return Dm(p); });
    Mat2 b = mat_apply(Um, [&](const DiffPoly& p) { return Dn(p); });
    Mat2 c = mat_sub(mat_mul(Un, Um), mat_mul(Um, Un));
    return mat_add(mat_sub(a, b), c);
}

DiffPoly spectral_curve(const std::vector<std::pair<int, Q>>& coeffs) {
    Mat2 U;
    for (const auto& [m, c] : coeffs) {
        Mat2 Um = zc_matrix(m);
        U = mat_add(U, mat_apply(Um, [&](const DiffPoly& p) { return c * p; }));
    }
    DiffPoly mu = DiffPoly::param(kMu);
    return mu * mu + U[0][0] * U[1][1] - U[0][1] * U[1][0];
}

}  // namespace hier::kdv
