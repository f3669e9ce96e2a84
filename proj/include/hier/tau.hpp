#pragma once

#include <Eigen/Dense>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "hier/kp.hpp"
#include "hier/taylor.hpp"

namespace hier {

// Values of the times at a point. Key k > 0 is t_k (t_1 = x), k < 0 is t_{-k}
// of the negative Toda family, key 0 is the lattice site n. Missing keys are 0.
using Point = std::map<int, cplx>;

struct TauZero : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SpecDegenerate : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DegenerateConditions : std::runtime_error {
    using std::runtime_error::runtime_error;
};
// a Miwa shift whose closed form leaves the disk of convergence on a branch cut
struct ShiftUncertified : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ------------------------------------------------------------ polynomials

using TimeMono = std::vector<std::pair<int, int>>;  // (time key, exponent), sorted

class TimePoly {
public:
    TimePoly() = default;
    TimePoly(cplx c);
    static TimePoly time(int k);

    const std::map<TimeMono, cplx>& terms() const { return t_; }
    bool is_zero() const { return t_.empty(); }
    bool is_constant() const;
    cplx constant_term() const;

    TimePoly& operator+=(const TimePoly& o);
    TimePoly& operator-=(const TimePoly& o);
    TimePoly& operator*=(cplx s);
    friend TimePoly operator+(TimePoly a, const TimePoly& b) { return a += b; }
    friend TimePoly operator-(TimePoly a, const TimePoly& b) { return a -= b; }
    friend TimePoly operator*(TimePoly a, cplx s) { return a *= s; }
    friend TimePoly operator*(cplx s, TimePoly a) { return a *= s; }
    friend TimePoly operator*(const TimePoly& a, const TimePoly& b);

    TimePoly derivative(int k) const;
    cplx eval(const Point& pt) const;
    // t_k -> t_k + delta_k
    TimePoly shifted(const std::map<int, cplx>& delta) const;
    // t_k -> value
    TimePoly fixed(int k, cplx value) const;
    Taylor jet(const Point& pt, const std::vector<int>& vars, int order) const;
    std::vector<int> times() const;

private:
    void add(const TimeMono& m, cplx c);
    std::map<TimeMono, cplx> t_;
};

// ------------------------------------------------------------ tau expressions

// Exponential building block. fam = +1: sum_{k>=1} s p^k t_k; fam = -1:
// sum_{k>=1} s p^k t_{-k}; fam = 0: s n log p (the factor p^{s n}).
struct Piece {
    int fam;
    cplx p;
    double s;
};

struct Phase {
    std::vector<Piece> pieces;
    std::map<int, cplx> lin;  // extra affine coefficients c_k t_k

    void canonicalize();
    cplx coeff(int k) const;  // d/dt_k of the exponent, k != 0
    cplx exponent(const Point& pt) const;
    Phase operator+(const Phase& o) const;
    bool operator<(const Phase& o) const;
    bool operator==(const Phase& o) const;
};

struct TauTerm {
    TimePoly poly;
    Phase phase;
};

// Finite sum of polynomial(times) * exp(affine phase). Closed under d/dt_k and
// under exact Miwa shifts of either time family.
class TauExpr {
public:
    TauExpr() = default;
    TauExpr(cplx c);
    TauExpr(const TimePoly& p);
    static TauExpr exponential(const Phase& ph, cplx coef = 1);
    // e^{s xi(t, p)} for fam = +-1, or p^{s n} for fam = 0
    static TauExpr xi(int fam, cplx p, double s = 1);
    static TauExpr time(int k) { return TauExpr(TimePoly::time(k)); }

    std::vector<TauTerm> terms() const;
    size_t size() const { return t_.size(); }
    bool is_zero() const { return t_.empty(); }

    TauExpr& operator+=(const TauExpr& o);
    TauExpr& operator-=(const TauExpr& o);
    TauExpr& operator*=(cplx s);
    friend TauExpr operator+(TauExpr a, const TauExpr& b) { return a += b; }
    friend TauExpr operator-(TauExpr a, const TauExpr& b) { return a -= b; }
    friend TauExpr operator*(TauExpr a, cplx s) { return a *= s; }
    friend TauExpr operator*(cplx s, TauExpr a) { return a *= s; }
    friend TauExpr operator*(const TauExpr& a, const TauExpr& b);

    TauExpr derivative(int k, int times = 1) const;
    cplx eval(const Point& pt) const;
    // Taylor coefficients in the listed time keys around pt
    Taylor jet(const Point& pt, const std::vector<int>& vars, int order) const;
    // t_{fam k} -> t_{fam k} + m z^{-k}/k for all k >= 1. Throws ShiftUncertified
    // when a non-integer power (1 - p/z)^{-s m} would be taken with |p| >= |z|.
    TauExpr shifted(int fam, cplx z, double m) const;
    // n -> n + m
    TauExpr site_shifted(int m) const;
    // t -> -t in all continuous times
    TauExpr reversed() const;
    // |p| of all exponential pieces of the given family
    std::vector<double> momenta(int fam) const;

private:
    void add(const Phase& ph, const TimePoly& p);
    std::map<Phase, TimePoly> t_;
};

TauExpr tau_determinant(const std::vector<std::vector<TauExpr>>& m);

// log tau as a Taylor series around pt in the given variables
Taylor log_jet(const TauExpr& tau, const Point& pt, const std::vector<int>& vars, int order);

// u = 2 d_x^2 log tau, exact derivatives
cplx u_from_tau(const TauExpr& tau, const Point& pt);

// ------------------------------------------------------------ builders

enum class Representation { Direct, Fredholm, Expanded };

struct SolitonSpec {
    std::string hierarchy = "kp";  // kdv | kp | toda
    std::vector<cplx> p, q;        // q ignored for kdv (q = -p)
    std::vector<cplx> alpha;       // direct form constants (b_i for toda)
    std::vector<cplx> beta;        // Fredholm / expanded constants (a_i for toda)
};

TauExpr tau_soliton(const SolitonSpec& spec, Representation rep);
// Fredholm constants making the Fredholm form equivalent to the direct form
// with the given alpha.
std::vector<cplx> matched_beta(const SolitonSpec& spec);

// Schur polynomial s_lambda as a tau expression in t_1..t_|lambda|
TauExpr schur_tau(const std::vector<int>& lambda);
TauExpr from_times_poly(const DiffPoly& p);  // params t_k (index k-1) -> times

struct RationalCondition {
    cplx p;
    std::vector<cplx> a;  // sum_m a_m d_z^m (...) at z = p
};
// det A_i(N-j, t), polynomial parts truncated to t_1..t_K
TauExpr rational_tau(const std::vector<RationalCondition>& conds, int K = 6);

// det(x I - X0 + sum_{k>=2} k t_k (L0/2)^{k-1}), polynomial in x = t_1 and t_2..t_K
TauExpr tau_cm(const Eigen::VectorXcd& x0, const Eigen::MatrixXcd& L0, int K = 3);
cplx tau_cm_value(const Eigen::VectorXcd& x0, const Eigen::MatrixXcd& L0, cplx x,
                  const std::map<int, cplx>& times);
// zeros in x: eigenvalues of X0 - sum_{k>=2} k t_k (L0/2)^{k-1}
std::vector<cplx> tau_cm_roots(const Eigen::VectorXcd& x0, const Eigen::MatrixXcd& L0,
                               const std::map<int, cplx>& times);

struct EquivalenceReport {
    double max_deviation = 0;
    int probes = 0;
};
// Second derivatives (second differences in the site n) of log(tau_a/tau_b)
// over the probe points; zero iff the ratio is exp(affine) on the probe set.
EquivalenceReport equivalence_witness(const TauExpr& a, const TauExpr& b, const std::vector<Point>& probes,
                                      const std::vector<int>& vars);

}  // namespace hier
