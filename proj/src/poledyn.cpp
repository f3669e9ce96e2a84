#include "hier/poledyn.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "hier/tau.hpp"

namespace hier::poledyn {

namespace {
constexpr double kPi = 3.14159265358979323846;
const cplx I(0, 1);
}  // namespace

CollisionDetected::CollisionDetected(double lo, double hi)
    : std::runtime_error("particles collided between t = " + std::to_string(lo) + " and " + std::to_string(hi)),
      t_lo(lo),
      t_hi(hi) {}

// ---------------------------------------------------------------- lattice

Lattice::Lattice(cplx omega, cplx omega_prime) : w_(omega), wp_(omega_prime) {
    tau_ = wp_ / w_;
    if (tau_.imag() <= 0) throw std::invalid_argument("lattice needs Im(omega'/omega) > 0");
    q_ = std::exp(I * kPi * tau_);
    Theta z = theta1(0);
    theta1_d1_ = z.t1;
    eta_ = -(kPi * kPi / (12.0 * w_)) * z.t3 / z.t1;
    eta_prime_ = (eta_ * wp_ - I * kPi / 2.0) / w_;
}

Lattice::Theta Lattice::theta1(cplx v) const {
    Theta r{0, 0, 0, 0};
    for (int n = 0; n < 200; ++n) {
        double k = 2 * n + 1;
        cplx c = 2.0 * (n % 2 ? -1.0 : 1.0) * std::exp(I * kPi * tau_ * ((n + 0.5) * (n + 0.5)));
        cplx s = std::sin(k * v), co = std::cos(k * v);
        cplx d0 = c * s, d1 = c * k * co, d2 = -c * k * k * s, d3 = -c * k * k * k * co;
        r.t0 += d0;
        r.t1 += d1;
        r.t2 += d2;
        r.t3 += d3;
        double lead = std::max({std::abs(r.t0), std::abs(r.t1), std::abs(r.t2), std::abs(r.t3)});
        double step = std::max({std::abs(d0), std::abs(d1), std::abs(d2), std::abs(d3)});
        if (n >= 1 && step < 1e-17 * lead) break;
    }
    return r;
}

std::pair<cplx, std::pair<long, long>> Lattice::split(cplx x) const {
    cplx a = 2.0 * w_, b = 2.0 * wp_;
    double det = a.real() * b.imag() - b.real() * a.imag();
    double s = (x.real() * b.imag() - b.real() * x.imag()) / det;
    double t = (a.real() * x.imag() - x.real() * a.imag()) / det;
    long m = std::lround(s), mp = std::lround(t);
    return {x - double(m) * a - double(mp) * b, {m, mp}};
}

cplx Lattice::reduce(cplx x) const {
    auto [y, mm] = split(x);
    cplx best = y;
    for (int i = -1; i <= 1; ++i)
        for (int j = -1; j <= 1; ++j) {
            cplx c = y - 2.0 * double(i) * w_ - 2.0 * double(j) * wp_;
            if (std::abs(c) < std::abs(best)) best = c;
        }
    return best;
}

void Lattice::check(cplx y) const {
    if (std::abs(y) < 1e-15 * std::abs(w_)) throw LatticePoint("argument on the period lattice");
}

cplx Lattice::wp(cplx x) const {
    cplx y = split(x).first;
    check(y);
    cplx k = kPi / (2.0 * w_);
    Theta th = theta1(k * y);
    cplx r1 = th.t1 / th.t0;
    return -eta_ / w_ - k * k * (th.t2 / th.t0 - r1 * r1);
}

cplx Lattice::wp_prime(cplx x) const {
    cplx y = split(x).first;
    check(y);
    cplx k = kPi / (2.0 * w_);
    Theta th = theta1(k * y);
    cplx r1 = th.t1 / th.t0, r2 = th.t2 / th.t0, r3 = th.t3 / th.t0;
    return -k * k * k * (r3 - 3.0 * r2 * r1 + 2.0 * r1 * r1 * r1);
}

cplx Lattice::zeta(cplx x) const {
    auto [y, mm] = split(x);
    check(y);
    cplx k = kPi / (2.0 * w_);
    Theta th = theta1(k * y);
    return eta_ * y / w_ + k * th.t1 / th.t0 + 2.0 * double(mm.first) * eta_ + 2.0 * double(mm.second) * eta_prime_;
}

cplx Lattice::sigma(cplx x) const {
    cplx k = kPi / (2.0 * w_);
    return std::exp(eta_ * x * x / (2.0 * w_)) * theta1(k * x).t0 / (k * theta1_d1_);
}

cplx Lattice::g2() const {
    cplx e1 = wp(w_), e2 = wp(wp_), e3 = wp(w_ + wp_);
    return 2.0 * (e1 * e1 + e2 * e2 + e3 * e3);
}

cplx Lattice::g3() const { return 4.0 * wp(w_) * wp(wp_) * wp(w_ + wp_); }

cplx wp_row_sum(const Lattice& lat, cplx x, int rows) {
    cplx w = lat.omega(), w2 = lat.omega_prime();
    cplx k = kPi / (2.0 * w);
    auto csc2 = [](cplx z) {
        cplx s = std::sin(z);
        return 1.0 / (s * s);
    };
    cplx s = csc2(k * x) - 1.0 / 3.0;
    for (int m = 1; m <= rows; ++m)
        for (int sg : {-1, 1}) {
            cplx sh = 2.0 * double(sg * m) * w2;
            s += csc2(k * (x - sh)) - csc2(k * sh);
        }
    return k * k * s;
}

cplx wp_box_sum(const Lattice& lat, cplx x, int R) {
    cplx s = 1.0 / (x * x);
    for (int m = -R; m <= R; ++m)
        for (int mp = -R; mp <= R; ++mp) {
            if (m == 0 && mp == 0) continue;
            cplx l = 2.0 * double(m) * lat.omega() + 2.0 * double(mp) * lat.omega_prime();
            s += 1.0 / ((x - l) * (x - l)) - 1.0 / (l * l);
        }
    return s;
}

// ---------------------------------------------------------------- kernels

Kernel Kernel::rational() { return Kernel(Kind::Rational, 0, Lattice(1.0, I)); }
Kernel Kernel::trig(double L) {
    if (!(L > 0)) throw std::invalid_argument("trigonometric period must be positive");
    return Kernel(Kind::Trig, L, Lattice(1.0, I));
}
Kernel Kernel::elliptic(cplx omega, cplx omega_prime) {
    return Kernel(Kind::Elliptic, 0, Lattice(omega, omega_prime));
}

cplx Kernel::wp(cplx x) const {
    switch (kind_) {
        case Kind::Rational:
            if (x == cplx{}) throw LatticePoint("wp at 0");
            return 1.0 / (x * x);
        case Kind::Trig: {
            double k = kPi / L_;
            cplx s = std::sinh(k * x);
            if (s == cplx{}) throw LatticePoint("wp at a period");
            return k * k / (s * s) + k * k / 3.0;
        }
        default:
            return lat_.wp(x);
    }
}

cplx Kernel::wp_prime(cplx x) const {
    switch (kind_) {
        case Kind::Rational:
            if (x == cplx{}) throw LatticePoint("wp' at 0");
            return -2.0 / (x * x * x);
        case Kind::Trig: {
            double k = kPi / L_;
            cplx s = std::sinh(k * x);
            if (s == cplx{}) throw LatticePoint("wp' at a period");
            return -2.0 * k * k * k * std::cosh(k * x) / (s * s * s);
        }
        default:
            return lat_.wp_prime(x);
    }
}

cplx Kernel::zeta(cplx x) const {
    switch (kind_) {
        case Kind::Rational:
            if (x == cplx{}) throw LatticePoint("zeta at 0");
            return 1.0 / x;
        case Kind::Trig: {
            double k = kPi / L_;
            cplx s = std::sinh(k * x);
            if (s == cplx{}) throw LatticePoint("zeta at a period");
            return k * std::cosh(k * x) / s - k * k * x / 3.0;
        }
        default:
            return lat_.zeta(x);
    }
}

cplx Kernel::sigma(cplx x) const {
    switch (kind_) {
        case Kind::Rational:
            return x;
        case Kind::Trig: {
            double k = kPi / L_;
            return std::sinh(k * x) / k * std::exp(-k * k * x * x / 6.0);
        }
        default:
            return lat_.sigma(x);
    }
}

cplx Kernel::phi(cplx x, cplx lam) const {
    return sigma(x + lam) / (sigma(lam) * sigma(x)) * std::exp(-zeta(lam) * x);
}

cplx Kernel::phi_prime(cplx x, cplx lam) const { return phi(x, lam) * (zeta(x + lam) - zeta(x) - zeta(lam)); }

cplx Kernel::reduce(cplx x) const {
    switch (kind_) {
        case Kind::Rational:
            return x;
        case Kind::Trig:
            return x - I * L_ * std::round(x.imag() / L_);
        default:
            return lat_.reduce(x);
    }
}

cplx Kernel::default_lambda() const {
    cplx base(0.31, 0.17);
    switch (kind_) {
        case Kind::Rational:
            return base;
        case Kind::Trig:
            return base * (I * L_ / 2.0);
        default:
            return base * lat_.omega();
    }
}

// ---------------------------------------------------------------- dynamics

std::vector<cplx> velocities(const System& sys, const ParticleState& s) {
    std::vector<cplx> v = s.p;
    if (sys.flow == Flow::CM)
        for (auto& x : v) x *= 2.0;
    return v;
}

std::vector<cplx> accelerations(const System& sys, const ParticleState& s) {
    int N = s.size();
    std::vector<cplx> a(N), v = velocities(sys, s);
    cplx wpe = sys.flow == Flow::RS ? sys.kernel.wp(sys.eta) : cplx{};
    for (int i = 0; i < N; ++i)
        for (int k = 0; k < N; ++k) {
            if (k == i) continue;
            cplx d = s.x[i] - s.x[k];
            if (sys.flow == Flow::CM)
                a[i] += 4.0 * sys.kernel.wp_prime(d);
            else
                a[i] += v[i] * v[k] * sys.kernel.wp_prime(d) / (wpe - sys.kernel.wp(d));
        }
    return a;
}

cplx hamiltonian(const System& sys, const ParticleState& s) {
    cplx h{};
    int N = s.size();
    if (sys.flow == Flow::RS) {
        for (auto v : velocities(sys, s)) h += v;
        return h;
    }
    for (int i = 0; i < N; ++i) {
        h += s.p[i] * s.p[i];
        for (int j = i + 1; j < N; ++j) h -= 2.0 * sys.kernel.wp(s.x[i] - s.x[j]);
    }
    return h;
}

double min_separation(const System& sys, const ParticleState& s) {
    double m = std::numeric_limits<double>::infinity();
    for (int i = 0; i < s.size(); ++i)
        for (int j = i + 1; j < s.size(); ++j) m = std::min(m, std::abs(sys.kernel.reduce(s.x[i] - s.x[j])));
    return m;
}

namespace {
double position_scale(const ParticleState& s) {
    double m = 1;
    for (auto x : s.x) m = std::max(m, std::abs(x));
    return m;
}

void guard(const System& sys, const ParticleState& s) {
    if (min_separation(sys, s) < sys.collision_eps * position_scale(s))
        throw CollisionTooClose("particles closer than the collision threshold");
}
}  // namespace

std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd> lax_pair(const System& sys, const ParticleState& s) {
    guard(sys, s);
    int N = s.size();
    const Kernel& K = sys.kernel;
    Eigen::MatrixXcd L = Eigen::MatrixXcd::Zero(N, N), M = Eigen::MatrixXcd::Zero(N, N);
    std::vector<cplx> v = velocities(sys, s);
    cplx lam = sys.spectral();
    if (sys.flow == Flow::CM && K.kind() == Kind::Rational) {
        for (int i = 0; i < N; ++i) {
            L(i, i) = -2.0 * s.p[i];
            for (int k = 0; k < N; ++k) {
                if (k == i) continue;
                cplx d = s.x[i] - s.x[k];
                L(i, k) = -2.0 / d;
                M(i, k) = 2.0 / (d * d);
                M(i, i) -= 2.0 / (d * d);
            }
        }
    } else if (sys.flow == Flow::CM) {
        for (int i = 0; i < N; ++i) {
            L(i, i) = -v[i];
            M(i, i) = K.wp(lam) + 4.0 * sys.c;
            for (int k = 0; k < N; ++k) {
                if (k == i) continue;
                cplx d = s.x[i] - s.x[k];
                L(i, k) = -2.0 * K.phi(d, lam);
                M(i, k) = -2.0 * K.phi_prime(d, lam);
                M(i, i) -= 2.0 * K.wp(d);
            }
        }
    } else {
        Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(N, N), Am(N, N);
        Eigen::VectorXcd D0 = Eigen::VectorXcd::Zero(N), Dp = Eigen::VectorXcd::Zero(N);
        for (int i = 0; i < N; ++i)
            for (int k = 0; k < N; ++k) {
                cplx d = s.x[i] - s.x[k];
                Am(i, k) = K.phi(d - sys.eta, lam);
                if (k == i) continue;
                A(i, k) = K.phi(d, lam);
                D0(i) += v[k] * K.zeta(d);
                Dp(i) += v[k] * K.zeta(d + sys.eta);
            }
        Eigen::VectorXcd vv = Eigen::Map<const Eigen::VectorXcd>(v.data(), N);
        L = vv.asDiagonal() * Am;
        M = vv.asDiagonal() * (A - Am);
        // the residue of u_0 psi at x_i also carries -xdot_i zeta(eta) c_i
        M.diagonal() += D0 - Dp - K.zeta(sys.eta) * vv;
    }
    return {L, M};
}

std::vector<cplx> char_poly(const Eigen::MatrixXcd& A) {
    int n = static_cast<int>(A.rows());
    std::vector<cplx> c{1.0};
    Eigen::MatrixXcd Mk = Eigen::MatrixXcd::Zero(n, n), Id = Eigen::MatrixXcd::Identity(n, n);
    for (int k = 1; k <= n; ++k) {
        Mk = A * Mk + c.back() * Id;
        c.push_back(-(A * Mk).trace() / double(k));
    }
    return c;
}

std::vector<cplx> spectral_invariants(const System& sys, const ParticleState& s) {
    Eigen::MatrixXcd L = lax_pair(sys, s).first;
    if (sys.flow == Flow::RS) return char_poly(L);
    std::vector<cplx> c = char_poly(0.5 * L);
    double f = std::pow(2.0, s.size());
    for (auto& x : c) x *= f;
    return c;
}

namespace {
using Vec = std::vector<cplx>;

Vec pack(const ParticleState& s) {
    Vec y = s.x;
    y.insert(y.end(), s.p.begin(), s.p.end());
    return y;
}

ParticleState unpack(const Vec& y, double t) {
    ParticleState s;
    size_t N = y.size() / 2;
    s.x.assign(y.begin(), y.begin() + N);
    s.p.assign(y.begin() + N, y.end());
    s.t = t;
    return s;
}

Vec rhs(const System& sys, const Vec& y) {
    ParticleState s = unpack(y, 0);
    Vec d = velocities(sys, s), a = accelerations(sys, s);
    if (sys.flow == Flow::CM)
        for (auto& x : a) x *= 0.5;
    d.insert(d.end(), a.begin(), a.end());
    return d;
}

Vec axpy(const Vec& x, cplx a, const Vec& y) {
    Vec r = x;
    for (size_t i = 0; i < r.size(); ++i) r[i] += a * y[i];
    return r;
}

Vec rk4(const System& sys, const Vec& y, double h) {
    Vec k1 = rhs(sys, y);
    Vec k2 = rhs(sys, axpy(y, h / 2, k1));
    Vec k3 = rhs(sys, axpy(y, h / 2, k2));
    Vec k4 = rhs(sys, axpy(y, h, k3));
    Vec r = y;
    for (size_t i = 0; i < r.size(); ++i) r[i] += h / 6 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return r;
}
}  // namespace

Trajectory integrate(const System& sys, const ParticleState& s0, double t_end, double dt, int every) {
    guard(sys, s0);
    if (!(dt > 0)) throw std::invalid_argument("dt must be positive");
    long n = std::max(1L, static_cast<long>(std::ceil(std::abs(t_end) / dt - 1e-9)));
    double h = t_end / double(n);
    Trajectory tr;
    tr.states.push_back(s0);
    tr.min_separation = min_separation(sys, s0);

    // one step of size h, split in halves while the half-step estimate is too large
    std::function<Vec(const Vec&, double, double, int)> advance = [&](const Vec& y, double t, double hh,
                                                                        int depth) -> Vec {
        Vec full = rk4(sys, y, hh);
        Vec half = rk4(sys, rk4(sys, y, hh / 2), hh / 2);
        double err = 0, mag = 1;
        bool finite = true;
        for (size_t j = 0; j < y.size(); ++j) {
            finite = finite && std::isfinite(half[j].real()) && std::isfinite(half[j].imag()) &&
                     std::isfinite(full[j].real()) && std::isfinite(full[j].imag());
            err = std::max(err, std::abs(full[j] - half[j]));
            mag = std::max(mag, std::abs(half[j]));
        }
        if (!finite || err > 1e-9 * mag) {
            if (depth >= 48) throw StepUnstable("step error estimate too large at t = " + std::to_string(t));
            Vec mid = advance(y, t, hh / 2, depth + 1);
            return advance(mid, t + hh / 2, hh / 2, depth + 1);
        }
        ParticleState s = unpack(half, t + hh);
        double sep = min_separation(sys, s);
        if (sep < sys.collision_eps * position_scale(s)) throw CollisionDetected(t, t + hh);
        tr.min_separation = std::min(tr.min_separation, sep);
        tr.max_step_error = std::max(tr.max_step_error, err);
        return half;
    };

    Vec y = pack(s0);
    for (long i = 1; i <= n; ++i) {
        y = advance(y, s0.t + double(i - 1) * h, h, 0);
        if (i % every == 0 || i == n) tr.states.push_back(unpack(y, s0.t + double(i) * h));
    }
    return tr;
}

DriftReport spectrum_drift(const System& sys, const Trajectory& tr) {
    DriftReport r;
    std::vector<cplx> J0 = spectral_invariants(sys, tr.states.front());
    cplx H0 = hamiltonian(sys, tr.states.front());
    r.invariant_drift.assign(J0.size(), 0.0);
    for (const auto& s : tr.states) {
        std::vector<cplx> J = spectral_invariants(sys, s);
        for (size_t k = 0; k < J.size(); ++k) {
            double d = std::abs(J[k] - J0[k]) / std::max(1.0, std::abs(J0[k]));
            r.invariant_drift[k] = std::max(r.invariant_drift[k], d);
            r.max_drift = std::max(r.max_drift, d);
        }
        r.hamiltonian_drift =
            std::max(r.hamiltonian_drift, std::abs(hamiltonian(sys, s) - H0) / std::max(1.0, std::abs(H0)));
    }
    return r;
}

double lax_consistency(const System& sys, const ParticleState& s, double h) {
    // fourth-order centred difference of L along the integrated flow
    auto L_at = [&](double dt) {
        return lax_pair(sys, integrate(sys, s, dt, std::abs(dt) / 4).states.back()).first;
    };
    auto [L, M] = lax_pair(sys, s);
    Eigen::MatrixXcd Ld = (L_at(-2 * h) - 8.0 * L_at(-h) + 8.0 * L_at(h) - L_at(2 * h)) / (12 * h);
    return (Ld - (M * L - L * M)).cwiseAbs().maxCoeff();
}

std::vector<int> hungarian(const Eigen::MatrixXd& cost) {
    int n = static_cast<int>(cost.rows());
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1), v(n + 1), minv(n + 1);
    std::vector<int> p(n + 1), way(n + 1);
    std::vector<char> used(n + 1);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::fill(minv.begin(), minv.end(), inf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[j0] = 1;
            int i0 = p[j0], j1 = 0;
            double delta = inf;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> r(n);
    for (int j = 1; j <= n; ++j) r[p[j] - 1] = j - 1;
    return r;
}

double matched_distance(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    int n = static_cast<int>(a.size());
    if (b.size() != a.size()) throw std::invalid_argument("matched_distance needs equal sizes");
    Eigen::MatrixXd c(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) c(i, j) = std::abs(a[i] - b[j]);
    auto as = hungarian(c);
    double m = 0;
    for (int i = 0; i < n; ++i) m = std::max(m, c(i, as[i]));
    return m;
}

RootCheck tau_root_crosscheck(const Trajectory& tr) {
    const ParticleState& s0 = tr.states.front();
    System sys;
    Eigen::MatrixXcd L0 = lax_pair(sys, s0).first;
    Eigen::VectorXcd x0 = Eigen::Map<const Eigen::VectorXcd>(s0.x.data(), s0.size());
    RootCheck r;
    for (const auto& s : tr.states) {
        auto roots = tau_cm_roots(x0, L0, {{2, cplx(s.t - s0.t)}});
        r.max_deviation = std::max(r.max_deviation, matched_distance(roots, s.x));
        ++r.times;
    }
    return r;
}

ParticleState locus3(cplx c) {
    ParticleState s;
    cplx r = std::pow(c, 1.0 / 3.0);
    for (int k = 0; k < 3; ++k) {
        s.x.push_back(r * std::exp(2.0 * kPi * I * double(k) / 3.0));
        s.p.push_back(0);
    }
    return s;
}

}  // namespace hier::poledyn
