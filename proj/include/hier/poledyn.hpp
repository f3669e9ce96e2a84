#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <utility>
#include <vector>

namespace hier::poledyn {

using cplx = std::complex<double>;

struct LatticePoint : std::domain_error {
    using std::domain_error::domain_error;
};
struct CollisionTooClose : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct CollisionDetected : std::runtime_error {
    CollisionDetected(double lo, double hi);
    double t_lo, t_hi;
};
struct StepUnstable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Weierstrass functions for the lattice 2m omega + 2m' omega', Im(omega'/omega) > 0,
// evaluated through the theta series in the nome q = exp(i pi omega'/omega).
class Lattice {
public:
    Lattice(cplx omega, cplx omega_prime);

    cplx omega() const { return w_; }
    cplx omega_prime() const { return wp_; }
    cplx nome() const { return q_; }
    cplx eta() const { return eta_; }              // zeta(omega)
    cplx eta_prime() const { return eta_prime_; }  // zeta(omega')
    cplx g2() const;
    cplx g3() const;

    cplx wp(cplx x) const;
    cplx wp_prime(cplx x) const;
    cplx zeta(cplx x) const;
    cplx sigma(cplx x) const;

    // x minus the nearest lattice point
    cplx reduce(cplx x) const;

private:
    struct Theta {
        cplx t0, t1, t2, t3;  // theta_1 and its first three v-derivatives
    };
    Theta theta1(cplx v) const;
    // x = y + 2m omega + 2m' omega' with y near the origin
    std::pair<cplx, std::pair<long, long>> split(cplx x) const;
    void check(cplx y) const;

    cplx w_, wp_, tau_, q_, eta_, eta_prime_, theta1_d1_;
};

// Slow oracle for wp: the lattice sum over omega-rows in closed form,
//   (pi/2w)^2 [csc^2(pi x/2w) - 1/3 + sum_{m' != 0} (csc^2(pi (x - 2m'w')/2w) - csc^2(pi m'w'/w))]
cplx wp_row_sum(const Lattice& lat, cplx x, int rows = 40);
// direct box sum 1/x^2 + sum' (1/(x-s)^2 - 1/s^2) over |m|, |m'| <= R
cplx wp_box_sum(const Lattice& lat, cplx x, int R);

enum class Kind { Rational, Trig, Elliptic };

// Pair potential family. Trig is the omega' -> i infinity limit with imaginary
// period iL: wp = (pi/L)^2 / sinh^2(pi x/L) + (pi/L)^2/3.
class Kernel {
public:
    static Kernel rational();
    static Kernel trig(double L);
    static Kernel elliptic(cplx omega, cplx omega_prime);

    Kind kind() const { return kind_; }
    double period() const { return L_; }
    const Lattice& lattice() const { return lat_; }

    cplx wp(cplx x) const;
    cplx wp_prime(cplx x) const;
    cplx zeta(cplx x) const;
    cplx sigma(cplx x) const;
    // sigma(x + lam) / (sigma(lam) sigma(x)) e^{-zeta(lam) x}
    cplx phi(cplx x, cplx lam) const;
    cplx phi_prime(cplx x, cplx lam) const;
    // separation to the nearest image under the periods
    cplx reduce(cplx x) const;
    // default spectral parameter
    cplx default_lambda() const;

private:
    Kernel(Kind k, double L, Lattice lat) : kind_(k), L_(L), lat_(lat) {}
    Kind kind_;
    double L_;
    Lattice lat_;
};

enum class Flow { CM, RS };  // t_2 flow of Calogero-Moser, t_1 flow of Ruijsenaars-Schneider

// For CM, p_i = xdot_i / 2; for RS, p_i = xdot_i.
struct ParticleState {
    std::vector<cplx> x, p;
    double t = 0;
    int size() const { return static_cast<int>(x.size()); }
};

struct System {
    Kernel kernel = Kernel::rational();
    Flow flow = Flow::CM;
    cplx eta = 0.3;       // RS shift
    cplx lambda = 0;      // spectral parameter; 0 picks kernel.default_lambda()
    double c = 0;         // constant in u = -2 sum wp(x - x_i) + 4c
    double collision_eps = 1e-6;
    cplx spectral() const { return lambda == cplx{} ? kernel.default_lambda() : lambda; }
};

std::vector<cplx> velocities(const System& sys, const ParticleState& s);
std::vector<cplx> accelerations(const System& sys, const ParticleState& s);

// CM: sum p^2 - 2 sum_{i<j} wp(x_ij); RS: sum xdot_i
cplx hamiltonian(const System& sys, const ParticleState& s);

// (L, M) with Ldot = [M, L]. Rational CM uses the pole form 1/(x_i - x_k); trig and
// elliptic CM use Phi(., lambda); RS uses L = Xdot A^-.
std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd> lax_pair(const System& sys, const ParticleState& s);

// Coefficients J_0..J_N of det(2z - L) (CM) or det(z - L) (RS) in descending powers.
std::vector<cplx> spectral_invariants(const System& sys, const ParticleState& s);
std::vector<cplx> char_poly(const Eigen::MatrixXcd& A);

// smallest pairwise separation (under the periods)
double min_separation(const System& sys, const ParticleState& s);

struct Trajectory {
    std::vector<ParticleState> states;
    double max_step_error = 0;  // full step against two half steps
    double min_separation = 0;
};

Trajectory integrate(const System& sys, const ParticleState& s0, double t_end, double dt, int every = 1);

struct DriftReport {
    std::vector<double> invariant_drift;  // |J_k(t) - J_k(0)| / max(1, |J_k(0)|)
    double max_drift = 0;
    double hamiltonian_drift = 0;
};
DriftReport spectrum_drift(const System& sys, const Trajectory& tr);

// ||Ldot - [M, L]|| with Ldot by centred differences of L at states obtained by
// integrating the flow
double lax_consistency(const System& sys, const ParticleState& s, double h = 1e-3);

// optimal assignment: row i goes to column result[i]
std::vector<int> hungarian(const Eigen::MatrixXd& cost);
// max |a_i - b_{sigma(i)}| for the optimal sigma
double matched_distance(const std::vector<cplx>& a, const std::vector<cplx>& b);

// Rational CM along the t_2 flow against the zeros of det(x - X0 + t L0)
struct RootCheck {
    double max_deviation = 0;
    int times = 0;
};
RootCheck tau_root_crosscheck(const Trajectory& tr);

// N = 3 equilibrium: the cube roots of c with zero momenta
ParticleState locus3(cplx c);

}  // namespace hier::poledyn
