#pragma once

#include <gmpxx.h>

#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace hier {

using Q = mpq_class;

// A commuting symbol of the ring.
//   Jet:   u_f^(k), k-th x-derivative of dependent function f
//   Param: formal scalar (lambda, z, mu, t_k, ...)
//   Site:  lattice field f evaluated at n + k (k may be negative)
// Params sort first so they print in front of jets.
struct Var {
    enum Kind : int { Param = 0, Jet = 1, Site = 2 };
    int kind = Jet;
    int index = 0;
    int order = 0;

    auto operator<=>(const Var&) const = default;
};

struct Alphabet {
    std::vector<std::string> funcs{"u", "v", "w"};
    std::vector<std::string> params{"lambda", "z", "mu"};
    std::vector<std::string> sites{"c", "u0"};
    // overrides funcs for printing when set
    std::function<std::string(int)> func_namer;

    std::string func_name(int i) const;
    std::string param_name(int i) const;
    std::string site_name(int i) const;
};

class DiffPoly {
public:
    using Monomial = std::vector<Var>;  // sorted multiset

    struct TermOrder {
        bool operator()(const Monomial& a, const Monomial& b) const;
    };
    using Terms = std::map<Monomial, Q, TermOrder>;

    DiffPoly() = default;
    DiffPoly(const Q& c);
    DiffPoly(long c) : DiffPoly(Q(c)) {}
    DiffPoly(int c) : DiffPoly(Q(c)) {}

    static DiffPoly jet(int func, int order = 0);
    static DiffPoly param(int index);
    static DiffPoly site(int field, int shift);
    static DiffPoly var(const Var& v);

    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    Q constant_term() const;
    std::size_t size() const { return terms_.size(); }

    DiffPoly& operator+=(const DiffPoly& o);
    DiffPoly& operator-=(const DiffPoly& o);
    DiffPoly& operator*=(const DiffPoly& o);
    DiffPoly& operator*=(const Q& c);
    DiffPoly operator-() const;

    friend DiffPoly operator+(DiffPoly a, const DiffPoly& b) { return a += b; }
    friend DiffPoly operator-(DiffPoly a, const DiffPoly& b) { return a -= b; }
    friend DiffPoly operator*(const DiffPoly& a, const DiffPoly& b);
    friend DiffPoly operator*(DiffPoly a, const Q& c) { return a *= c; }
    friend DiffPoly operator*(const Q& c, DiffPoly a) { return a *= c; }
    friend bool operator==(const DiffPoly& a, const DiffPoly& b) { return a.terms_ == b.terms_; }

    DiffPoly pow(int n) const;

    void add_term(const Monomial& m, const Q& c);

    // all symbols occurring
    std::vector<Var> variables() const;
    int degree_in(const Var& v) const;
    DiffPoly partial(const Var& v) const;

    // coefficient of param^k
    DiffPoly coefficient_of(const Var& v, int k) const;

    // Generic substitution: symbols mapped to nullopt are kept.
    DiffPoly substitute(const std::function<std::optional<DiffPoly>(const Var&)>& f) const;

    // Derivation D with D(v) given for every symbol (zero image allowed).
    DiffPoly apply_derivation(const std::function<DiffPoly(const Var&)>& image) const;

    // Shift every lattice-site symbol by k.
    DiffPoly shift_sites(int k) const;

    template <class T>
    T evaluate(const std::function<T(const Var&)>& value) const {
        T acc = T(0);
        for (const auto& [m, c] : terms_) {
            T t = T(c.get_d());
            for (const auto& v : m) t *= value(v);
            acc += t;
        }
        return acc;
    }

    std::string str(const Alphabet& a = Alphabet{}) const;
    std::string latex(const Alphabet& a = Alphabet{}) const;

private:
    Terms terms_;
};

DiffPoly total_derivative(const DiffPoly& p);
DiffPoly total_derivative(const DiffPoly& p, int times);
DiffPoly variational_derivative(const DiffPoly& p, int func);

struct NotTotalDerivative {
    DiffPoly remainder;
};

std::variant<DiffPoly, NotTotalDerivative> antiderivative(const DiffPoly& p);

// Throws std::domain_error when p is not a total derivative.
DiffPoly integrate(const DiffPoly& p);

bool is_total_derivative(const DiffPoly& p);

// Largest derivative order of jet symbols of any function (-1 if none).
int max_jet_order(const DiffPoly& p);

DiffPoly parse_diffpoly(const std::string& s, const Alphabet& a = Alphabet{});

std::string var_str(const Var& v, const Alphabet& a);
std::string var_latex(const Var& v, const Alphabet& a);
std::string rational_str(const Q& q);

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace hier
