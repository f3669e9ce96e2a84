#pragma once

#include "hier/psdo.hpp"

#include <array>
#include <memory>
#include <optional>

namespace hier::kdv {

// Symbol indices used by this module.
constexpr int kU = 0;       // jet func u
constexpr int kLambda = 0;  // param lambda
constexpr int kZ = 1;       // param z
constexpr int kMu = 2;      // param mu

struct RecursionNotIntegrable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

PsiDO lax_operator(int depth = kDefaultDepth);  // d^2 + u

class GDTable {
public:
    explicit GDTable(int j_max);
    int j_max() const { return j_max_; }
    // R_j for odd j >= -1 (zero for even j)
    DiffPoly operator[](int j) const;

private:
    int j_max_;
    std::map<int, DiffPoly> R_;
};

GDTable gd_coefficients(int j_max);
DiffPoly gd_via_residue(int j, int depth = kDefaultDepth);

DiffPoly flow_rhs(int m);
DiffPoly flow_rhs_via_residue(int m, int depth = kDefaultDepth);

// "16 u_t5 = 30 u^2 u_x + ..." with denominators cleared
std::string hierarchy_equation(int m, bool latex = false);

PsiDO am_operator(int m);
PsiDO am_operator_direct(int m, int depth = kDefaultDepth);

// Derivation d/dt_m on the jet ring of u: u^(k) -> d^k(flow_rhs(m)).
class FlowDerivation {
public:
    explicit FlowDerivation(DiffPoly rhs, int func = kU) : rhs_(std::move(rhs)), func_(func) {}
    DiffPoly operator()(const DiffPoly& p) const;
    DiffPoly image(const Var& v) const;

private:
    DiffPoly rhs_;
    int func_;
    mutable std::vector<DiffPoly> cache_;
};

FlowDerivation flow(int m);

struct BracketResult {
    DiffPoly integrand;
    bool total_derivative = false;
    std::optional<DiffPoly> witness;  // q with dq/dx = integrand
    DiffPoly remainder;
};

BracketResult poisson_bracket(const DiffPoly& F, const DiffPoly& G, int which);

// 4R_{j+2} - (d^2 + 2u + 2 d^-1 u d) R_j
DiffPoly recursion_operator_residual(int j);

DiffPoly miura_forward(const DiffPoly& v_poly, const DiffPoly& lambda);
// residual of the Miura identity with v = func 0, v_t = func 1 (free),
// lambda as given (formal param by default)
DiffPoly miura_residual(const DiffPoly& lambda = DiffPoly::param(kLambda));

using Mat2 = std::array<std::array<DiffPoly, 2>, 2>;
Mat2 mat_mul(const Mat2& a, const Mat2& b);
Mat2 mat_sub(const Mat2& a, const Mat2& b);
Mat2 mat_add(const Mat2& a, const Mat2& b);
Mat2 mat_apply(const Mat2& a, const std::function<DiffPoly(const DiffPoly&)>& f);
bool mat_is_zero(const Mat2& a);

enum class Gauge { Standard, ZGauge };

// R_m(lambda) = sum_{j=0}^{(m+1)/2} R_{2j-1} lambda^{(m+1)/2 - j}
DiffPoly incomplete_generating(int m, const GDTable& t);
Mat2 zc_matrix(int m, Gauge g = Gauge::Standard);
Mat2 zero_curvature_residual(int m, int n, Gauge g = Gauge::Standard);
// mu^2 + det(sum c_m U_m(lambda))
DiffPoly spectral_curve(const std::vector<std::pair<int, Q>>& coeffs);

Alphabet alphabet();

}  // namespace hier::kdv
