#pragma once

#include <vector>

#include "hier/psdo.hpp"
#include "hier/tau.hpp"

namespace hier::toda {

// Periodic Toda data: c(n), u_0(n), n = 0..N-1.
struct TodaField {
    std::vector<double> c, u0;
    int period() const { return static_cast<int>(c.size()); }
    // c(n) = e^{phi_n - phi_{n-1}}
    static TodaField from_phi(const std::vector<double>& phi, const std::vector<double>& u0);
};

// d_{t_1} log c(n) and d_{t_{-1}} u_0(n)
struct TodaRates {
    std::vector<double> dlogc_t1, du0_tm1;
};
TodaRates flow_rhs(const TodaField& f);

// The 1D reduction (d_{t_1} + d_{t_{-1}}) = 0 on fields: time derivative of
// (c, u_0) along t = t_1.
TodaField chain_rhs(const TodaField& f);
TodaField rk4_step(const TodaField& f, double dt);
struct Snapshot {
    double t;
    TodaField field;
};
std::vector<Snapshot> integrate_chain(const TodaField& f, double T, int steps, int every = 1);

// L = S + u_0 + c S^{-1}, normal form with u_2 = u_3 = ... = 0 (window 3).
PeriodicShiftOp lax(const TodaField& f);
// sum over a period of res L^k; k <= 3, k < N
double conserved_J(int k, const TodaField& f);
// G^{-1} L G with G(n) = e^{alpha phi_n}
PeriodicShiftOp gauge_transform(const PeriodicShiftOp& L, const std::vector<double>& phi, double alpha);

// Symbolic zero curvature d_1 B_{-1} - d_{-1} B_1 - [B_1, B_{-1}] with
// B_1 = S + u_0, B_{-1} = c S^{-1}. Site fields: 0 = c, 1 = u_0, 2 = d_1 c,
// 3 = d_{-1} u_0. Returns the coefficients of S^0 and S^{-1}.
std::pair<DiffPoly, DiffPoly> zero_curvature();
Alphabet site_alphabet();

// ------------------------------------------------------------ tau form
// Taus here are the gauge-reduced tau' with tau = exp(-sum k t_k t_{-k}) tau'.

struct TauResidual {
    cplx value;
    double scale;  // largest term magnitude
};

// d_1 d_{-1} log tau_n = -tau_{n+1} tau_{n-1}/tau_n^2 for the full tau
TauResidual tau_equation(const TauExpr& tau, const Point& pt);
// d_1 d_{-1} log c(n) = 2c(n) - c(n+1) - c(n-1), c from the tau ratio
TauResidual c_equation(const TauExpr& tau, const Point& pt);
// shifted-argument identity with t_+ -> t_+ - [a^{-1}], t_- -> t_- - [b^{-1}]
TauResidual shifted_identity(const TauExpr& tau, const Point& pt, cplx a, cplx b);

// c(n) and u_0(n) read off from tau
double c_from_tau(const TauExpr& tau, const Point& pt);
cplx u0_from_tau(const TauExpr& tau, const Point& pt);

// (d_1 + d_{-1}) c(n): vanishes on the Toda chain reduction
TauResidual chain_constraint(const TauExpr& tau, const Point& pt);
// For 2-periodic families, phi = i(phi_0 - phi_1) with phi_n = log(tau_{n+1}/tau_n)
// obeys d_1 d_{-1} phi = 4 sin phi; returns that residual (periodicity defect
// folded into the scale check by the caller).
TauResidual sine_gordon(const TauExpr& tau, const Point& pt);

}  // namespace hier::toda
