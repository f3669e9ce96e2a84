#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

#include "hier/kp.hpp"
#include "hier/tau.hpp"

namespace hier::fermion {

using Mask = std::uint64_t;

struct WindowExhausted : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ZeroDenominator : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SingularConversion : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Modes k in [-M, M); sites below -M are permanently filled, sites >= M empty.
// psi_k fills site k, psi*_k empties it; both carry the sign (-1)^(occupied sites above k).
// |n> has exactly the sites k < n filled. K caps the weighted degree in the times.
class Window {
public:
    explicit Window(int M = 16, int K = 8);

    int M() const { return M_; }
    int K() const { return K_; }
    bool contains(int k) const { return k >= -M_ && k < M_; }
    bool occupied(Mask s, int k) const;

    Mask vacuum(int n) const;
    // the fully filled window, standing in for the empty vacuum |infinity>
    Mask filled() const;
    int charge(Mask s) const;
    kp::YoungDiagram diagram(Mask s) const;
    int weight(Mask s) const;  // |lambda|
    Mask basis_mask(const kp::YoungDiagram& l, int n) const;
    // every basis state of charge n and weight <= K fits with room for `extra`
    // further modes on each side; throws WindowExhausted otherwise
    void certify(int n, int extra = 0) const;

private:
    int M_, K_;
};

template <class C>
using Vec = std::map<Mask, C>;
using FockVector = Vec<cplx>;

FockVector ket(Mask s, cplx c = 1);
FockVector apply_mode(const Window& w, bool star, int k, const FockVector& v);
// sum_S a_S b_S
cplx pairing(const FockVector& a, const FockVector& b);
FockVector axpy(const FockVector& a, cplx s, const FockVector& b);  // a + s b
double max_abs_diff(const FockVector& a, const FockVector& b);

// psi*_{n-b_1-1} ... psi*_{n-b_d-1} psi_{n+a_d} ... psi_{n+a_1} |n> in Frobenius coordinates
FockVector basis_state(const Window& w, const kp::YoungDiagram& l, int n);

// ------------------------------------------------------------ Clifford elements

// sum_k c_k psi_k, or sum_k c_k psi*_k when star
struct LinearMode {
    bool star = false;
    std::map<int, cplx> c;

    // psi(z) = sum_k psi_k z^k, psi*(z) = sum_k psi*_k z^{-k}, over the window
    static LinearMode psi(const Window& w, cplx z);
    static LinearMode psi_star(const Window& w, cplx z);
    static LinearMode mode(bool star, int k, cplx c = 1);
    int charge() const { return star ? -1 : 1; }
};

enum class Ordering { Empty, Dirac };

// Normally ordered exp(sum B_ik psi*_i psi_k). Empty: all psi* to the left
// (the empty vacuum); Dirac: creation operators of |0> to the left.
struct NormalExp {
    std::map<std::pair<int, int>, cplx> B;
    Ordering ordering = Ordering::Empty;
};

struct Clifford {
    using Factor = std::variant<LinearMode, NormalExp>;
    std::vector<Factor> factors;  // left to right

    static Clifford identity() { return {}; }
    // prod_i (psi(q_i) + b_i psi(p_i))
    static Clifford soliton_product(const Window& w, const std::vector<cplx>& p, const std::vector<cplx>& q,
                                    const std::vector<cplx>& b);
    Clifford& operator*=(const Clifford& o);
    int charge() const;
    // matrix transpose in the occupation basis: <v| G = (G^T |v>)^T
    Clifford transposed() const;
};

FockVector apply(const Window& w, const LinearMode& f, const FockVector& v);
FockVector apply(const Window& w, const NormalExp& f, const FockVector& v);
FockVector apply(const Window& w, const Clifford& g, const FockVector& v);

// ------------------------------------------------------------ currents

// J_k = sum_j psi_j psi*_{j+k}, k != 0
FockVector apply_current(const Window& w, int k, const FockVector& v);

// exp(sum_k t_k J_k) with all keys of one sign; terms of weighted degree > K dropped
FockVector exp_current(const Window& w, const Point& times, const FockVector& v);

// <n| e^{J_+(t)} as a covector: exact to degree K. The polynomial versions use
// times t_k (TimePoly key k, DiffPoly parameter k-1).
FockVector dual_vacuum_flow(const Window& w, int n, const Point& t_plus);
Vec<TimePoly> dual_vacuum_flow_poly(const Window& w, int n);
Vec<DiffPoly> dual_vacuum_flow_exact(const Window& w, int n);

// <v| e^{J_+(t)} for a covector v (dual) or e^{J_+(t)} |v> for a ket
FockVector j_plus_flow(const Window& w, const Point& t_plus, const FockVector& v, bool dual);

// ------------------------------------------------------------ expectations

cplx expectation(const Window& w, int n, const std::vector<LinearMode>& ops);

// <n| v_1 ... v_m w*_m ... w*_1 |n> as det <n| v_i w*_j |n>
cplx wick_expectation(const Window& w, const std::vector<LinearMode>& v, const std::vector<LinearMode>& ws, int n);
// <n|G' v_1 ... v_m w*_m ... w*_1 G|n> / <n|G'G|n> as the determinant of normalized pairs
cplx generalized_wick(const Window& w, const Clifford& gp, const Clifford& g, const std::vector<LinearMode>& v,
                      const std::vector<LinearMode>& ws, int n);
// the left side of the same identity by direct mode action
cplx brute_force_wick(const Window& w, const Clifford& gp, const Clifford& g, const std::vector<LinearMode>& v,
                      const std::vector<LinearMode>& ws, int n);

// <n| e^{J_+(t+)} G e^{-J_-(t-)} |m>, m = n - charge(G) unless given; 0 when the
// charges do not balance. Exact to degree K in t+ and in t-.
cplx vev_tau(const Window& w, const Clifford& g, const Point& t_plus, const Point& t_minus, int n,
             std::optional<int> ket_charge = std::nullopt);
TimePoly vev_tau_poly(const Window& w, const Clifford& g, int n = 0);

struct Bosonization {
    cplx mode_sum;
    cplx closed_form;       // truncated to degree K in t+ and in t-
    cplx closed_form_full;
    double residual = 0;    // relative, mode sum against the truncated closed form
};
// <n| e^{J_+} psi(z) e^{J_-} |n-1> against z^{n-1} exp(xi(t+, z) - xi(t-, 1/z) + sum k t_k t_{-k})
Bosonization bosonization_check(const Window& w, int n, const Point& times, cplx z);

// max over basis covectors <S| of charge n and weight <= depth of
// |<n|psi*(zeta)psi(z)|S> - zeta^{1-n} z^n/(zeta - z) <n|e^{J_+([1/zeta] - [1/z])}|S>|
double pair_vertex_check(const Window& w, int n, cplx zeta, cplx z, int depth);

// ------------------------------------------------------------ normal ordering

using Matrix = std::map<std::pair<int, int>, cplx>;

struct Conversion {
    Matrix result;
    cplx scalar;
};
// Dirac A to empty-vacuum B: B = (I - A P+)^{-1} A, :e^A: = det(I - P+ A) x e^B x
Conversion dirac_to_empty(const Matrix& A);
// B to A: A = B (I + P+ B)^{-1}, x e^B x = det(I + P+ B) :e^A:
Conversion empty_to_dirac(const Matrix& B);

// sum_k <u|psi_k G|v><u'|psi*_k G|v'> - sum_k <u|G psi_k|v><u'|G psi*_k|v'>
cplx bilinear_defect(const Window& w, const Clifford& g, const FockVector& u, const FockVector& v,
                     const FockVector& u2, const FockVector& v2);

}  // namespace hier::fermion
