#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "hier/diffpoly.hpp"
#include "hier/tau.hpp"

namespace hier::bilinear {

struct Residual {
    double abs = 0;
    double rel = 0;
};

struct ResidualReport {
    std::string check;
    std::uint64_t seed = 0;
    int probes = 0;
    int skipped = 0;  // probe points dropped because tau vanished there
    double max_abs = 0;
    double max_rel = 0;
    double tolerance = 1e-9;  // relative level above which a probe is listed as a failure
    std::vector<Point> failures;

    void add(const Residual& r, const Point& at);
    bool ok() const { return failures.empty() && probes > 0; }
};

// |value| together with |value| / scale (scale floored at the smallest normal)
Residual make_residual(cplx value, double scale);

// ------------------------------------------------------------ Hirota operators

// Hirota polynomials are DiffPolys in parameters; parameter k-1 stands for D_k.
DiffPoly hirota_D(int k);
Alphabet hirota_alphabet(int K = 8);
DiffPoly parse_hirota(const std::string& s);
// D1^4 + 3 D2^2 - 4 D1 D3
DiffPoly kp_hirota();
// remove monomials of odd total degree (they vanish on tau . tau)
DiffPoly drop_odd(const DiffPoly& P);

// P(d_X) f(t - X) g(t + X) at X = 0, exact derivatives through jets
cplx hirota_apply(const DiffPoly& P, const TauExpr& f, const TauExpr& g, const Point& pt);
// same for polynomial taus given as DiffPolys in the times (parameter k-1 = t_k)
DiffPoly hirota_apply_exact(const DiffPoly& P, const DiffPoly& f, const DiffPoly& g);

// Coefficient of T^a in sum_j h_j(-2T) h_{j+1}(D~) exp(sum_l T_l D_l), a given
// as exponents of T_1, T_2, ...
DiffPoly hirota_generating_coefficient(const std::vector<int>& a);

// ------------------------------------------------------------ difference identities

// tau(t - sum_i m_i [z_i^{-1}])
TauExpr miwa(const TauExpr& tau, const std::vector<cplx>& z, const std::vector<double>& m);

Residual hirota_miwa(const TauExpr& tau, const std::array<cplx, 3>& lam, const Point& pt);
Residual hirota_miwa_four(const TauExpr& tau, const std::array<cplx, 4>& lam, const Point& pt);
Residual hirota_miwa_log(const TauExpr& tau, const std::array<cplx, 2>& lam, const Point& pt);
Residual wronskian_identity(const TauExpr& tau, const std::vector<cplx>& lam, const Point& pt);

// Random lambdas on an annulus outside all momenta of tau; random probe points.
std::vector<cplx> random_lambdas(const TauExpr& tau, int count, std::uint64_t seed);
std::vector<Point> random_points(const std::vector<int>& keys, int count, std::uint64_t seed, double scale = 0.5);

ResidualReport check_hirota_miwa(const TauExpr& tau, int probes, std::uint64_t seed);
ResidualReport check_wronskian(const TauExpr& tau, int m, int probes, std::uint64_t seed);

// ------------------------------------------------------------ bilinear residue

struct ContourSpec {
    Point t;                      // point of the left tau
    std::map<int, cplx> dt;       // t - t' on finitely many positive times
    std::vector<cplx> miwa_at;    // t' also carries - sum_j miwa_mult_j [miwa_at_j^{-1}]
    std::vector<double> miwa_mult;
    int weight = 0;               // extra factor z^weight (n - n')
    double radius = 0;            // 0: chosen from the momenta
    int start_points = 64;
    int max_points = 4096;
    double stable = 1e-12;
};

struct ContourResult {
    cplx value;       // (1/2 pi i) times the contour integral
    int points = 0;   // quadrature size at which it stabilized
    double radius = 0;
    bool stabilized = false;
};

struct ContourTooSmall : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// oint e^{xi(t - t', z)} z^w tau_a(t - [z^{-1}]) tau_b(t' + [z^{-1}]) dz
ContourResult bilinear_residue(const TauExpr& tau_a, const TauExpr& tau_b, const ContourSpec& spec);

// ------------------------------------------------------------ T-system, Y-system

// tau(p) = tau(t - sum p_i [lam_i^{-1}]); residual of the three-term difference
// equation at p
Residual t_system(const TauExpr& tau, const std::array<cplx, 3>& lam, const Point& t, const std::array<double, 3>& p);

// T(x) = prod_i z_i^{x_i^2/2} tau(p(x)), z_i = lam_{i+1} - lam_{i+2}, solving
// sum_i T(x_i + 1) T(x_i - 1) = 0
cplx t_function(const TauExpr& tau, const std::array<cplx, 3>& lam, const Point& t, const std::array<double, 3>& x);
cplx y_function(const TauExpr& tau, const std::array<cplx, 3>& lam, const Point& t, const std::array<double, 3>& x);
Residual y_system(const TauExpr& tau, const std::array<cplx, 3>& lam, const Point& t, const std::array<double, 3>& x);

// ------------------------------------------------------------ linear problems

struct LinearProblemReport {
    std::array<Residual, 3> scalar;  // phi-form of the three linear problems
    Residual fourth;                 // the extra problem in tau-shifts of phi
    Residual determinant;            // det of the 4x4 matrix against (sum z tau tau)^2
    int rank = 0;
};

// phi(p) = prod_i (z - lam_i)^{p_i} e^{xi(t,z)} tau(t - sum p_i [lam_i^{-1}] - [z^{-1}])
cplx wave_phi(const TauExpr& tau, const std::array<cplx, 3>& lam, cplx z, const Point& t, const std::array<double, 3>& p);
LinearProblemReport linear_problems(const TauExpr& tau, const std::array<cplx, 3>& lam, cplx z, const Point& t,
                                    const std::array<double, 3>& p);

// ------------------------------------------------------------ PDE residuals

enum class Equation { KdV, KP, Toda2D };

struct Grid {
    double x0 = -5, x1 = 5;
    int nx = 100;
    double t0 = -1, t1 = 1;
    int nt = 50;
    Point base;  // values of the remaining times; for Toda2D key 0 is the site
};

// u = 2 d_x^2 log tau as a series in vars (vars[0] must be 1)
Taylor field_jet(const TauExpr& tau, const Point& pt, const std::vector<int>& vars, int order);

// KdV: 4u_t - 6uu_x - u_xxx with t = t_3; KP: 3u_yy - (4u_t - 6uu_x - u_xxx)_x;
// Toda2D: d_1 d_{-1} log tau_n - 1 + tau_{n+1} tau_{n-1}/tau_n^2 for the
// gauge-reduced tau (the full tau is exp(-sum k t_k t_{-k}) tau).
// The grid runs over (t_1, t_3) for KdV/KP and (t_1, t_{-1}) for Toda2D.
// max_rel is relative to the largest term magnitude over the whole grid.
ResidualReport pde_residual(Equation eq, const TauExpr& tau, const Grid& grid);

struct Transform {
    enum Kind { Galilean, KPScaling } kind = Galilean;
    double lambda = 1, a = 0, b = 0;
};
// residual of the transformed field; Galilean acts on KdV, KPScaling on KP
ResidualReport symmetry_check(const Transform& tr, const TauExpr& tau, const Grid& grid);

// Exact rational field in parameters x (index 0) and t (index 1).
struct RationalField {
    DiffPoly num, den;
};
RationalField rf_partial(const RationalField& f, int param);
// numerator of 4u_t - 6uu_x - u_xxx over a common denominator
DiffPoly kdv_residual_exact(const RationalField& u);

}  // namespace hier::bilinear
