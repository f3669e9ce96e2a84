#include "hier/spec.hpp"

#include <algorithm>
#include <cstdio>
#include <random>
#include <set>

namespace hier::spec {

namespace {

void allow(const json& j, const std::set<std::string>& keys, const std::string& what) {
    if (!j.is_object()) throw SpecError(what + " must be an object");
    for (const auto& [k, v] : j.items())
        if (!keys.count(k)) throw SpecError("unknown key '" + k + "' in " + what);
}

template <class T>
T get(const json& j, const std::string& key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw SpecError("bad value for '" + key + "': " + e.what());
    }
}

std::vector<cplx> complex_list(const json& j, const std::string& key) {
    std::vector<cplx> r;
    if (!j.contains(key)) return r;
    if (!j.at(key).is_array()) throw SpecError("'" + key + "' must be a list");
    for (const auto& x : j.at(key)) r.push_back(complex_from(x));
    return r;
}

json complex_list_to(const std::vector<cplx>& v) {
    json a = json::array();
    for (cplx z : v) a.push_back(complex_to(z));
    return a;
}

std::vector<int> int_list(const json& j, const std::string& key) { return get<std::vector<int>>(j, key, {}); }

bilinear::Grid grid_from(const json& j) {
    allow(j, {"x", "t", "base"}, "grid");
    bilinear::Grid g;
    auto axis = [&](const char* key, double& a, double& b, int& n) {
        if (!j.contains(key)) return;
        const json& v = j.at(key);
        if (!v.is_array() || v.size() != 3) throw SpecError(std::string("grid axis '") + key + "' must be [from, to, count]");
        a = v[0].get<double>();
        b = v[1].get<double>();
        n = v[2].get<int>();
        if (n < 1) throw SpecError("grid count must be positive");
    };
    axis("x", g.x0, g.x1, g.nx);
    axis("t", g.t0, g.t1, g.nt);
    if (j.contains("base")) g.base = point_from(j.at("base"));
    return g;
}

json grid_to(const bilinear::Grid& g) {
    json j{{"x", {g.x0, g.x1, g.nx}}, {"t", {g.t0, g.t1, g.nt}}};
    if (!g.base.empty()) j["base"] = point_to(g.base);
    return j;
}

std::vector<Point> points_from(const json& j, const std::string& key) {
    std::vector<Point> r;
    if (!j.contains(key)) return r;
    for (const auto& p : j.at(key)) r.push_back(point_from(p));
    return r;
}

json points_to(const std::vector<Point>& ps) {
    json a = json::array();
    for (const auto& p : ps) a.push_back(point_to(p));
    return a;
}

void one_of(const std::string& v, const std::set<std::string>& opts, const std::string& what) {
    if (!opts.count(v)) throw SpecError("unknown " + what + " '" + v + "'");
}

}  // namespace

cplx complex_from(const json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    throw SpecError("expected a number or [re, im], got " + j.dump());
}

json complex_to(cplx z) {
    if (z.imag() == 0) return z.real();
    return json::array({z.real(), z.imag()});
}

Point point_from(const json& j) {
    if (!j.is_object()) throw SpecError("a point must be an object keyed by time index");
    Point p;
    for (const auto& [k, v] : j.items()) {
        size_t used = 0;
        int key = 0;
        try {
            key = std::stoi(k, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != k.size()) throw SpecError("bad time index '" + k + "'");
        p[key] = complex_from(v);
    }
    return p;
}

json point_to(const Point& p) {
    json j = json::object();
    for (const auto& [k, v] : p) j[std::to_string(k)] = complex_to(v);
    return j;
}

std::string digest(const json& j) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : j.dump()) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// ------------------------------------------------------------ solutions

SolutionSpec parse_solution(const json& j) {
    allow(j, {"hierarchy", "family", "representation", "p", "q", "alpha", "beta", "lambda", "conditions", "x0", "L0",
              "K", "grid", "points", "probes"},
          "solution spec");
    SolutionSpec s;
    s.hierarchy = get<std::string>(j, "hierarchy", s.hierarchy);
    one_of(s.hierarchy, {"kdv", "kp", "toda"}, "hierarchy");
    s.family = get<std::string>(j, "family", s.family);
    one_of(s.family, {"soliton", "schur", "rational", "cm", "one"}, "family");
    s.representation = get<std::string>(j, "representation", s.representation);
    one_of(s.representation, {"direct", "fredholm", "expanded"}, "representation");
    s.p = complex_list(j, "p");
    s.q = complex_list(j, "q");
    s.alpha = complex_list(j, "alpha");
    s.beta = complex_list(j, "beta");
    s.lambda = int_list(j, "lambda");
    if (j.contains("conditions"))
        for (const auto& c : j.at("conditions")) {
            allow(c, {"p", "a"}, "condition");
            if (!c.contains("p")) throw SpecError("condition without p");
            s.conditions.push_back({complex_from(c.at("p")), complex_list(c, "a")});
        }
    s.x0 = complex_list(j, "x0");
    if (j.contains("L0"))
        for (const auto& row : j.at("L0")) {
            std::vector<cplx> r;
            for (const auto& x : row) r.push_back(complex_from(x));
            s.L0.push_back(r);
        }
    s.K = get<int>(j, "K", s.K);
    if (j.contains("grid")) s.grid = grid_from(j.at("grid"));
    s.points = points_from(j, "points");
    s.probes = get<int>(j, "probes", s.probes);
    if (s.probes < 1) throw SpecError("probes must be positive");
    return s;
}

json to_json(const SolutionSpec& s) {
    json j{{"hierarchy", s.hierarchy}, {"family", s.family}, {"representation", s.representation}};
    if (!s.p.empty()) j["p"] = complex_list_to(s.p);
    if (!s.q.empty()) j["q"] = complex_list_to(s.q);
    if (!s.alpha.empty()) j["alpha"] = complex_list_to(s.alpha);
    if (!s.beta.empty()) j["beta"] = complex_list_to(s.beta);
    if (!s.lambda.empty()) j["lambda"] = s.lambda;
    if (!s.conditions.empty()) {
        json a = json::array();
        for (const auto& c : s.conditions) a.push_back({{"p", complex_to(c.p)}, {"a", complex_list_to(c.a)}});
        j["conditions"] = a;
    }
    if (!s.x0.empty()) j["x0"] = complex_list_to(s.x0);
    if (!s.L0.empty()) {
        json a = json::array();
        for (const auto& r : s.L0) a.push_back(complex_list_to(r));
        j["L0"] = a;
    }
    j["K"] = s.K;
    if (s.grid) j["grid"] = grid_to(*s.grid);
    if (!s.points.empty()) j["points"] = points_to(s.points);
    j["probes"] = s.probes;
    return j;
}

TauExpr build_tau(const SolutionSpec& s) {
    try {
        if (s.family == "one") return TauExpr(1.0);
        if (s.family == "schur") {
            for (size_t i = 0; i < s.lambda.size(); ++i)
                if (s.lambda[i] < 1 || (i > 0 && s.lambda[i] > s.lambda[i - 1]))
                    throw SpecError("lambda must be a nonincreasing list of positive parts");
            return schur_tau(s.lambda);
        }
        if (s.family == "rational") {
            if (s.conditions.empty()) throw SpecError("rational family needs conditions");
            return rational_tau(s.conditions, s.K);
        }
        if (s.family == "cm") {
            int N = static_cast<int>(s.x0.size());
            if (N == 0 || static_cast<int>(s.L0.size()) != N) throw SpecError("cm family needs x0 and an N x N L0");
            Eigen::VectorXcd x(N);
            Eigen::MatrixXcd L(N, N);
            for (int i = 0; i < N; ++i) {
                x(i) = s.x0[i];
                if (static_cast<int>(s.L0[i].size()) != N) throw SpecError("L0 must be square");
                for (int k = 0; k < N; ++k) L(i, k) = s.L0[i][k];
            }
            return tau_cm(x, L, s.K);
        }
        SolitonSpec so;
        so.hierarchy = s.hierarchy;
        so.p = s.p;
        so.q = s.q;
        Representation rep = s.representation == "direct"     ? Representation::Direct
                             : s.representation == "expanded" ? Representation::Expanded
                                                              : Representation::Fredholm;
        so.alpha = s.alpha.empty() ? std::vector<cplx>(s.p.size(), 1.0) : s.alpha;
        so.beta = s.beta.empty() ? std::vector<cplx>(s.p.size(), 1.0) : s.beta;
        return tau_soliton(so, rep);
    } catch (const SpecDegenerate& e) {
        throw SpecError(e.what());
    } catch (const DegenerateConditions& e) {
        throw SpecError(e.what());
    }
}

bilinear::Grid grid_or_default(const SolutionSpec& s) { return s.grid.value_or(bilinear::Grid{}); }

// ------------------------------------------------------------ fermions

FermionSpec parse_fermion(const json& j) {
    allow(j, {"type", "pairs", "entries", "ordering", "lambda", "window", "n", "points"}, "fermion spec");
    FermionSpec s;
    s.type = get<std::string>(j, "type", s.type);
    one_of(s.type, {"soliton_product", "normal_exponent", "schur"}, "fermion type");
    if (j.contains("pairs"))
        for (const auto& pr : j.at("pairs")) {
            allow(pr, {"p", "q", "b"}, "pair");
            if (!pr.contains("p") || !pr.contains("q")) throw SpecError("pair needs p and q");
            s.p.push_back(complex_from(pr.at("p")));
            s.q.push_back(complex_from(pr.at("q")));
            s.b.push_back(pr.contains("b") ? complex_from(pr.at("b")) : cplx(1));
        }
    if (j.contains("entries"))
        for (const auto& e : j.at("entries")) {
            allow(e, {"i", "k", "B"}, "entry");
            if (!e.contains("i") || !e.contains("k") || !e.contains("B")) throw SpecError("entry needs i, k and B");
            s.entries.emplace_back(e.at("i").get<int>(), e.at("k").get<int>(), complex_from(e.at("B")));
        }
    s.ordering = get<std::string>(j, "ordering", s.ordering);
    one_of(s.ordering, {"empty", "dirac"}, "ordering");
    s.lambda = int_list(j, "lambda");
    if (j.contains("window")) {
        allow(j.at("window"), {"M", "K"}, "window");
        s.M = get<int>(j.at("window"), "M", s.M);
        s.K = get<int>(j.at("window"), "K", s.K);
    }
    s.n = get<int>(j, "n", s.n);
    s.points = points_from(j, "points");
    if (s.type == "soliton_product" && s.p.empty()) throw SpecError("soliton_product needs pairs");
    if (s.type == "normal_exponent" && s.entries.empty()) throw SpecError("normal_exponent needs entries");
    return s;
}

json to_json(const FermionSpec& s) {
    json j{{"type", s.type}, {"window", {{"M", s.M}, {"K", s.K}}}, {"n", s.n}};
    if (!s.p.empty()) {
        json a = json::array();
        for (size_t i = 0; i < s.p.size(); ++i)
            a.push_back({{"p", complex_to(s.p[i])}, {"q", complex_to(s.q[i])}, {"b", complex_to(s.b[i])}});
        j["pairs"] = a;
    }
    if (!s.entries.empty()) {
        json a = json::array();
        for (const auto& [i, k, B] : s.entries) a.push_back({{"i", i}, {"k", k}, {"B", complex_to(B)}});
        j["entries"] = a;
        j["ordering"] = s.ordering;
    }
    if (!s.lambda.empty()) j["lambda"] = s.lambda;
    if (!s.points.empty()) j["points"] = points_to(s.points);
    return j;
}

fermion::Clifford build_clifford(const FermionSpec& s, const fermion::Window& w) {
    using namespace fermion;
    if (s.type == "soliton_product") return Clifford::soliton_product(w, s.p, s.q, s.b);
    if (s.type == "normal_exponent") {
        NormalExp e;
        e.ordering = s.ordering == "dirac" ? Ordering::Dirac : Ordering::Empty;
        for (const auto& [i, k, B] : s.entries) {
            if (!w.contains(i) || !w.contains(k)) throw SpecError("entry outside the window");
            e.B[{i, k}] += B;
        }
        Clifford g;
        g.factors.emplace_back(e);
        return g;
    }
    // the occupation state of lambda at charge 0: psi* and psi modes of the
    // Frobenius product, with the sign making it the descending-ordered state
    const auto& l = s.lambda;
    for (size_t i = 0; i < l.size(); ++i)
        if (l[i] < 1 || (i > 0 && l[i] > l[i - 1])) throw SpecError("lambda must be a nonincreasing list of positive parts");
    kp::YoungDiagram lt = kp::transpose(l);
    int d = 0, b = 0;
    while (d < static_cast<int>(l.size()) && l[d] >= d + 1) ++d;
    Clifford g;
    for (int i = 1; i <= d; ++i) {
        g.factors.emplace_back(LinearMode::mode(true, -(lt[i - 1] - i) - 1));
        b += lt[i - 1] - i + 1;
    }
    for (int i = d; i >= 1; --i) g.factors.emplace_back(LinearMode::mode(false, l[i - 1] - i));
    if (b % 2 && !g.factors.empty()) std::get<LinearMode>(g.factors.front()).c.begin()->second = -1.0;
    return g;
}

// ------------------------------------------------------------ pole dynamics

PoledynConfig parse_poledyn(const json& j) {
    allow(j, {"kind", "flow", "n", "x", "p", "omega", "omega_prime", "L", "eta", "c", "t_end", "dt", "every"},
          "poledyn config");
    PoledynConfig c;
    c.kind = get<std::string>(j, "kind", c.kind);
    one_of(c.kind, {"rational", "trig", "elliptic"}, "kind");
    c.flow = get<std::string>(j, "flow", c.flow);
    one_of(c.flow, {"cm", "rs"}, "flow");
    c.n = get<int>(j, "n", c.n);
    c.x = complex_list(j, "x");
    c.p = complex_list(j, "p");
    if (j.contains("omega")) c.omega = complex_from(j.at("omega"));
    if (j.contains("omega_prime")) c.omega_prime = complex_from(j.at("omega_prime"));
    c.L = get<double>(j, "L", c.L);
    if (j.contains("eta")) c.eta = complex_from(j.at("eta"));
    c.c = get<double>(j, "c", c.c);
    c.t_end = get<double>(j, "t_end", c.t_end);
    c.dt = get<double>(j, "dt", c.dt);
    c.every = get<int>(j, "every", c.every);
    if (!c.x.empty()) c.n = static_cast<int>(c.x.size());
    if (c.x.size() != c.p.size()) throw SpecError("x and p must have the same length");
    if (c.n < 1) throw SpecError("need at least one particle");
    if (c.dt <= 0 || c.every < 1) throw SpecError("dt and every must be positive");
    return c;
}

json to_json(const PoledynConfig& c) {
    json j{{"kind", c.kind}, {"flow", c.flow}, {"n", c.n}, {"t_end", c.t_end}, {"dt", c.dt}, {"every", c.every}};
    if (!c.x.empty()) {
        j["x"] = complex_list_to(c.x);
        j["p"] = complex_list_to(c.p);
    }
    if (c.kind == "elliptic") {
        j["omega"] = complex_to(c.omega);
        j["omega_prime"] = complex_to(c.omega_prime);
    }
    if (c.kind == "trig") j["L"] = c.L;
    if (c.flow == "rs") j["eta"] = complex_to(c.eta);
    if (c.c != 0) j["c"] = c.c;
    return j;
}

poledyn::System build_system(const PoledynConfig& c) {
    using namespace poledyn;
    System sys;
    try {
        sys.kernel = c.kind == "rational" ? Kernel::rational()
                     : c.kind == "trig"   ? Kernel::trig(c.L)
                                          : Kernel::elliptic(c.omega, c.omega_prime);
    } catch (const std::exception& e) {
        throw SpecError(std::string("bad kernel: ") + e.what());
    }
    sys.flow = c.flow == "rs" ? Flow::RS : Flow::CM;
    sys.eta = c.eta;
    sys.c = c.c;
    return sys;
}

poledyn::ParticleState initial_state(const PoledynConfig& c, std::uint64_t seed) {
    poledyn::ParticleState s;
    if (!c.x.empty()) {
        s.x = c.x;
        s.p = c.p;
        return s;
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> d(-1, 1);
    int N = c.n;
    for (int i = 0; i < N; ++i) {
        s.x.push_back(cplx(1.5 * (i - (N - 1) / 2.0) + 0.2 * d(rng), 0.3 * d(rng) + 0.4 * (i % 2)));
        s.p.push_back(cplx(0.4 * d(rng), 0.1 * d(rng)));
    }
    return s;
}

// ------------------------------------------------------------ Toda chain

TodaConfig parse_toda(const json& j) {
    allow(j, {"phi", "u0", "T", "steps", "every"}, "toda config");
    TodaConfig c;
    c.phi = get<std::vector<double>>(j, "phi", {});
    c.u0 = get<std::vector<double>>(j, "u0", {});
    c.T = get<double>(j, "T", c.T);
    c.steps = get<int>(j, "steps", c.steps);
    c.every = get<int>(j, "every", c.every);
    if (c.phi.size() < 3 || c.phi.size() != c.u0.size()) throw SpecError("toda config needs phi and u0 of equal length >= 3");
    if (c.steps < 1 || c.every < 1) throw SpecError("steps and every must be positive");
    return c;
}

json to_json(const TodaConfig& c) {
    return {{"phi", c.phi}, {"u0", c.u0}, {"T", c.T}, {"steps", c.steps}, {"every", c.every}};
}

}  // namespace hier::spec
