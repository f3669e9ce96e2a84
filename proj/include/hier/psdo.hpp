#pragma once

#include "hier/diffpoly.hpp"

#include <climits>
#include <map>
#include <vector>

namespace hier {

struct DepthExhausted : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NotMonic : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct WindowExhausted : std::runtime_error {
    using std::runtime_error::runtime_error;
};

constexpr int kDefaultDepth = 12;

// Pseudo-differential operator sum_k v_k d^k, coefficients on the left.
// Coefficients at orders below floor() are unknown; an exact operator has
// floor() == kExactFloor.
class PsiDO {
public:
    static constexpr int kExactFloor = INT_MIN / 4;

    PsiDO() = default;
    PsiDO(const DiffPoly& c);
    static PsiDO d(int k = 1);
    static PsiDO term(const DiffPoly& c, int k);

    const std::map<int, DiffPoly>& coeffs() const { return c_; }
    int floor() const { return floor_; }
    bool exact() const { return floor_ == kExactFloor; }
    int depth() const { return depth_; }
    int max_order() const;
    int min_stored_order() const;
    bool is_zero() const { return c_.empty(); }

    // Throws DepthExhausted below the certified floor.
    DiffPoly coeff(int k) const;
    DiffPoly residue() const { return coeff(-1); }

    PsiDO& set_floor(int f);
    PsiDO& set_depth(int D);
    void set(int k, const DiffPoly& v);

    PsiDO& operator+=(const PsiDO& o);
    PsiDO& operator-=(const PsiDO& o);
    PsiDO operator-() const;
    friend PsiDO operator+(PsiDO a, const PsiDO& b) { return a += b; }
    friend PsiDO operator-(PsiDO a, const PsiDO& b) { return a -= b; }
    friend PsiDO operator*(const PsiDO& a, const PsiDO& b);
    friend PsiDO operator*(const Q& s, PsiDO a);

    // Equal on all orders certified in both.
    bool agrees_with(const PsiDO& o) const;
    friend bool operator==(const PsiDO& a, const PsiDO& b) {
        return a.floor_ == b.floor_ && a.c_ == b.c_;
    }

    PsiDO plus_part() const;
    PsiDO minus_part() const;

    // Coefficients transformed by f (e.g. substitution); floor kept.
    PsiDO map_coeffs(const std::function<DiffPoly(const DiffPoly&)>& f) const;

    std::string str(const Alphabet& a = Alphabet{}) const;
    std::string latex(const Alphabet& a = Alphabet{}) const;

private:
    std::map<int, DiffPoly> c_;
    int floor_ = kExactFloor;
    int depth_ = kDefaultDepth;
    void prune();
};

PsiDO compose(const PsiDO& P, const PsiDO& Q);
PsiDO commutator(const PsiDO& P, const PsiDO& Q);
std::pair<PsiDO, PsiDO> split(const PsiDO& P);
DiffPoly residue(const PsiDO& P);
PsiDO adjoint(const PsiDO& P);
PsiDO power(const PsiDO& P, int n);
PsiDO fractional_power(const PsiDO& L, int num, int den);
DiffPoly residue_pairing(const PsiDO& P, const PsiDO& Q);
// sum over i + j = -1 of (-1)^j p_i q_j, from the z-series side
DiffPoly residue_pairing_zseries(const PsiDO& P, const PsiDO& Q);

// Generalized binomial n(n-1)...(n-k+1)/k!
Q binomial(int n, int k);

PsiDO parse_psido(const std::string& s, const Alphabet& a = Alphabet{});

// Pseudo-difference operator sum_s a_s S^s with S f(n) = f(n+1) S, symbolic
// coefficients in lattice-site symbols. Shifts below floor() are unknown.
class PsDiffOp {
public:
    static constexpr int kExactFloor = INT_MIN / 4;

    PsDiffOp() = default;
    PsDiffOp(const DiffPoly& c);
    static PsDiffOp S(int k = 1);
    static PsDiffOp term(const DiffPoly& c, int k);

    const std::map<int, DiffPoly>& coeffs() const { return c_; }
    int floor() const { return floor_; }
    int max_shift() const;
    DiffPoly coeff(int s) const;
    void set(int s, const DiffPoly& v);
    PsDiffOp& set_floor(int f);

    PsDiffOp& operator+=(const PsDiffOp& o);
    PsDiffOp& operator-=(const PsDiffOp& o);
    friend PsDiffOp operator+(PsDiffOp a, const PsDiffOp& b) { return a += b; }
    friend PsDiffOp operator-(PsDiffOp a, const PsDiffOp& b) { return a -= b; }
    friend bool operator==(const PsDiffOp& a, const PsDiffOp& b) {
        return a.floor_ == b.floor_ && a.c_ == b.c_;
    }

    std::string str(const Alphabet& a = Alphabet{}) const;

private:
    std::map<int, DiffPoly> c_;
    int floor_ = kExactFloor;
    DiffPoly coeff_or_zero(int s) const {
        auto it = c_.find(s);
        return it == c_.end() ? DiffPoly{} : it->second;
    }
};

PsDiffOp compose_shift(const PsDiffOp& P, const PsDiffOp& Q);
DiffPoly residue_shift(const PsDiffOp& P);
PsDiffOp parse_psdiffop(const std::string& s, const Alphabet& a = Alphabet{});

// Numeric pseudo-difference operator on an N-periodic lattice.
class PeriodicShiftOp {
public:
    explicit PeriodicShiftOp(int period) : N_(period) {}
    int period() const { return N_; }
    const std::map<int, std::vector<double>>& coeffs() const { return c_; }
    void set(int s, std::vector<double> v);
    std::vector<double> coeff(int s) const;
    int floor() const { return floor_; }
    void set_floor(int f) { floor_ = f; }

    friend PeriodicShiftOp operator*(const PeriodicShiftOp& a, const PeriodicShiftOp& b);
    friend PeriodicShiftOp operator-(const PeriodicShiftOp& a, const PeriodicShiftOp& b);

private:
    int N_;
    std::map<int, std::vector<double>> c_;
    int floor_ = PsDiffOp::kExactFloor;
};

std::vector<double> residue_shift(const PeriodicShiftOp& P);

}  // namespace hier
