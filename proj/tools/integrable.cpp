// integrable: command-line front end for the hierarchy library.
//
// exit codes: 0 ok, 1 a check exceeded its tolerance, 2 bad configuration

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "hier/bilinear.hpp"
#include "hier/kdv.hpp"
#include "hier/kp.hpp"
#include "hier/spec.hpp"

using namespace hier;
using spec::json;

namespace {

struct Global {
    std::string format = "text";
    std::uint64_t seed = 1;
    std::string out;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

json load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

// the primary data goes to --out when given, otherwise to stdout
class Sink {
public:
    explicit Sink(const std::string& path) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw ConfigError("cannot write " + path);
        }
    }
    std::ostream& data() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }
    // summaries go to stdout, or to stderr when stdout carries the data
    std::ostream& summary() { return file_.is_open() ? std::cout : std::cerr; }

private:
    std::ofstream file_;
};

std::string num(double v) {
    std::ostringstream s;
    s << std::setprecision(17) << v;
    return s.str();
}

json report_json(const bilinear::ResidualReport& r) {
    json f = json::array();
    for (const auto& p : r.failures) f.push_back(spec::point_to(p));
    return {{"check", r.check},     {"seed", r.seed},       {"probes", r.probes},       {"skipped", r.skipped},
            {"max_abs", r.max_abs}, {"max_rel", r.max_rel}, {"tolerance", r.tolerance}, {"failures", f},
            {"ok", r.ok()}};
}

struct RunReport {
    std::string command;
    json config;
    std::uint64_t seed;
    std::vector<bilinear::ResidualReport> checks;
    json extra = json::object();
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    bool ok() const {
        for (const auto& c : checks)
            if (!c.ok()) return false;
        return true;
    }
    json to_json() const {
        json cs = json::array();
        for (const auto& c : checks) cs.push_back(report_json(c));
        double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        json j{{"command", command}, {"config_digest", spec::digest(config)}, {"seed", seed}, {"checks", cs},
               {"ok", ok()},         {"wall_time_s", wall}};
        for (const auto& [k, v] : extra.items()) j[k] = v;
        return j;
    }
    void print(std::ostream& os, const std::string& format) const {
        if (format == "json") {
            os << to_json().dump(2) << "\n";
            return;
        }
        json j = to_json();
        os << "command " << command << "  digest " << j["config_digest"].get<std::string>() << "  seed " << seed
           << "\n";
        for (const auto& c : checks)
            os << (c.ok() ? "ok   " : "FAIL ") << std::left << std::setw(22) << c.check << " probes " << c.probes
               << "  max_abs " << num(c.max_abs) << "  max_rel " << num(c.max_rel) << "  failures "
               << c.failures.size() << "\n";
        for (const auto& [k, v] : extra.items()) os << k << " " << v.dump() << "\n";
        os << "wall " << num(j["wall_time_s"].get<double>()) << " s\n";
    }
};

// a scalar measurement as a one-probe report
bilinear::ResidualReport scalar_report(const std::string& name, double value, double tol) {
    bilinear::ResidualReport r;
    r.check = name;
    r.tolerance = tol;
    r.add({value, value}, {});
    return r;
}

// ------------------------------------------------------------ hierarchy

int cmd_hierarchy(const Global& g, const std::string& target, int order, const std::vector<int>& mn) {
    Sink sink(g.out);
    std::ostream& os = sink.data();
    bool latex = g.format == "latex";
    std::vector<std::string> lines;
    if (target == "kdv") {
        if (order < 1 || order > 15) throw ConfigError("order must be in 1..15");
        if (order % 2 == 0)
            lines.push_back("R_" + std::to_string(order) + " = 0");
        else
            lines.push_back(kdv::hierarchy_equation(order, latex));
    } else if (target == "kp") {
        if (mn.size() != 2) throw ConfigError("--mn needs two integers");
        int m = mn[0], n = mn[1];
        if (m < 2 || n <= m || n > 5) throw ConfigError("need 2 <= m < n <= 5");
        Alphabet al = kp::alphabet({"u", "w"});
        auto eqs = kp::kp_flow_system(m, n);
        std::vector<DiffPoly> uw;
        for (const auto& e : eqs) uw.push_back(kp::to_u_w(e));
        for (size_t i = 0; i < uw.size(); ++i)
            lines.push_back("E" + std::to_string(uw.size() - 1 - i) + ": 0 = " + (latex ? uw[i].latex(al) : uw[i].str(al)));
        if (m == 2 && n == 3) {
            // normalize to r1 = 4w_x - ..., r2 = u_t - ...
            DiffPoly r1 = Q(-2) * uw[0], r2 = Q(-1) * uw[1];
            DiffPoly e = kp::eliminate_w(r1, r2);
            lines.push_back("eliminating w: 0 = " + (latex ? e.latex(al) : e.str(al)));
        }
    } else {
        throw ConfigError("unknown target " + target);
    }
    if (g.format == "json")
        os << json{{"target", target}, {"equations", lines}}.dump(2) << "\n";
    else
        for (const auto& l : lines) os << l << "\n";
    return 0;
}

// ------------------------------------------------------------ evaluate

int cmd_evaluate(const Global& g, const std::string& path) {
    json cfg = load(path);
    spec::SolutionSpec s = spec::parse_solution(cfg);
    TauExpr tau = spec::build_tau(s);
    bool toda = s.hierarchy == "toda";
    int tkey = toda ? -1 : 3;

    std::vector<Point> pts = s.points;
    bilinear::Grid grid = spec::grid_or_default(s);
    if (pts.empty())
        for (int it = 0; it < grid.nt; ++it)
            for (int ix = 0; ix < grid.nx; ++ix) {
                Point p = grid.base;
                p[1] = grid.nx == 1 ? grid.x0 : grid.x0 + (grid.x1 - grid.x0) * ix / (grid.nx - 1);
                p[tkey] = grid.nt == 1 ? grid.t0 : grid.t0 + (grid.t1 - grid.t0) * it / (grid.nt - 1);
                pts.push_back(p);
            }
    std::vector<int> keys;
    for (const auto& p : pts)
        for (const auto& [k, v] : p)
            if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
    std::sort(keys.begin(), keys.end());
    std::set<int> complex_keys;
    for (const auto& p : pts)
        for (const auto& [k, v] : p)
            if (v.imag() != 0) complex_keys.insert(k);

    Sink sink(g.out);
    std::ostream& os = sink.data();
    json rows = json::array();
    int poles = 0;
    if (g.format != "json") {
        for (int k : keys) {
            std::string name = k == 0 ? "n" : "t" + std::to_string(k);
            os << (complex_keys.count(k) ? name + "_re," + name + "_im," : name + ",");
        }
        os << "tau_re,tau_im,u_re,u_im,pole\n";
    }
    for (const auto& p : pts) {
        cplx t = tau.eval(p);
        cplx u{NAN, NAN};
        bool pole = !(std::abs(t) > 1e-300);
        if (!pole) {
            try {
                u = toda ? toda::u0_from_tau(tau, p) : u_from_tau(tau, p);
            } catch (const std::exception&) {
                pole = true;
            }
            if (!std::isfinite(std::abs(u)) || std::abs(u) > 1e12) pole = true;
        }
        if (pole) {
            ++poles;
            u = {NAN, NAN};
        }
        if (g.format == "json") {
            rows.push_back({{"at", spec::point_to(p)}, {"tau", spec::complex_to(t)},
                            {"u", pole ? json(nullptr) : spec::complex_to(u)}, {"pole", pole}});
        } else {
            for (int k : keys) {
                cplx v = p.count(k) ? p.at(k) : cplx{};
                os << num(v.real()) << ",";
                if (complex_keys.count(k)) os << num(v.imag()) << ",";
            }
            os << num(t.real()) << "," << num(t.imag()) << "," << num(u.real()) << "," << num(u.imag()) << ","
               << (pole ? 1 : 0) << "\n";
        }
    }
    if (g.format == "json") os << json{{"digest", spec::digest(cfg)}, {"rows", rows}}.dump(2) << "\n";
    sink.summary() << pts.size() << " points, " << poles << " flagged as poles\n";
    return 0;
}

// ------------------------------------------------------------ verify

std::vector<std::string> split(const std::string& s) {
    std::vector<std::string> r;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) r.push_back(item);
    return r;
}

int cmd_verify(const Global& g, const std::string& path, const std::string& checks) {
    json cfg = load(path);
    spec::SolutionSpec s = spec::parse_solution(cfg);
    TauExpr tau = spec::build_tau(s);
    RunReport rep{"verify", cfg, g.seed, {}};
    for (const auto& c : split(checks)) {
        if (c == "hirota-miwa") {
            if (s.hierarchy == "toda") throw ConfigError("hirota-miwa applies to kdv/kp taus");
            rep.checks.push_back(bilinear::check_hirota_miwa(tau, s.probes, g.seed));
        } else if (c == "wronskian") {
            if (s.hierarchy == "toda") throw ConfigError("wronskian applies to kdv/kp taus");
            for (int m = 1; m <= 3; ++m) rep.checks.push_back(bilinear::check_wronskian(tau, m, s.probes, g.seed));
        } else if (c == "pde") {
            auto eq = s.hierarchy == "kdv" ? bilinear::Equation::KdV
                      : s.hierarchy == "kp" ? bilinear::Equation::KP
                                            : bilinear::Equation::Toda2D;
            rep.checks.push_back(bilinear::pde_residual(eq, tau, spec::grid_or_default(s)));
        } else {
            throw ConfigError("unknown check " + c + " (hirota-miwa, wronskian, pde)");
        }
    }
    Sink sink(g.out);
    rep.print(sink.data(), g.format);
    return rep.ok() ? 0 : 1;
}

// ------------------------------------------------------------ poledyn

int cmd_poledyn(const Global& g, spec::PoledynConfig c) {
    poledyn::System sys = spec::build_system(c);
    poledyn::ParticleState s0 = spec::initial_state(c, g.seed);
    auto tr = poledyn::integrate(sys, s0, c.t_end, c.dt, c.every);
    auto drift = poledyn::spectrum_drift(sys, tr);

    RunReport rep{"poledyn", spec::to_json(c), g.seed, {}};
    rep.checks.push_back(scalar_report("spectrum-drift", drift.max_drift, 1e-8));
    rep.extra["hamiltonian_drift"] = drift.hamiltonian_drift;
    rep.extra["invariant_drift"] = drift.invariant_drift;
    rep.extra["min_separation"] = tr.min_separation;
    rep.extra["max_step_error"] = tr.max_step_error;

    Sink sink(g.out);
    if (g.format == "csv" || !g.out.empty()) {
        std::ostream& os = sink.data();
        os << "t,i,x_re,x_im,p_re,p_im\n";
        for (const auto& st : tr.states)
            for (int i = 0; i < st.size(); ++i)
                os << num(st.t) << "," << i << "," << num(st.x[i].real()) << "," << num(st.x[i].imag()) << ","
                   << num(st.p[i].real()) << "," << num(st.p[i].imag()) << "\n";
        rep.print(sink.summary(), g.format == "json" ? "json" : "text");
    } else {
        rep.print(std::cout, g.format);
    }
    return rep.ok() ? 0 : 1;
}

// ------------------------------------------------------------ toda chain

int cmd_toda(const Global& g, spec::TodaConfig c) {
    toda::TodaField f = toda::TodaField::from_phi(c.phi, c.u0);
    auto snaps = toda::integrate_chain(f, c.T, c.steps, c.every);
    RunReport rep{"toda", spec::to_json(c), g.seed, {}};
    for (int k = 1; k <= 2; ++k) {
        double J0 = toda::conserved_J(k, f), d = 0;
        for (const auto& sn : snaps) d = std::max(d, std::abs(toda::conserved_J(k, sn.field) - J0) / std::max(1.0, std::abs(J0)));
        rep.checks.push_back(scalar_report("J" + std::to_string(k) + "-drift", d, 1e-8));
    }
    Sink sink(g.out);
    if (g.format == "csv" || !g.out.empty()) {
        std::ostream& os = sink.data();
        os << "t,n,c,u0\n";
        for (const auto& sn : snaps)
            for (int n = 0; n < sn.field.period(); ++n)
                os << num(sn.t) << "," << n << "," << num(sn.field.c[n]) << "," << num(sn.field.u0[n]) << "\n";
        rep.print(sink.summary(), g.format == "json" ? "json" : "text");
    } else {
        rep.print(std::cout, g.format);
    }
    return rep.ok() ? 0 : 1;
}

// ------------------------------------------------------------ fermion

std::string coefficient_str(cplx c) {
    auto rat = [](double v) -> std::string {
        for (int d = 1; d <= 5040; ++d) {
            double n = std::round(v * d);
            if (std::abs(v * d - n) < 1e-9 * d) {
                long long ni = static_cast<long long>(n);
                return d == 1 ? std::to_string(ni) : std::to_string(ni) + "/" + std::to_string(d);
            }
        }
        return num(v);
    };
    if (std::abs(c.imag()) < 1e-14) return rat(c.real());
    return "(" + num(c.real()) + (c.imag() < 0 ? "-" : "+") + num(std::abs(c.imag())) + "i)";
}

// terms by increasing weight, coefficients rationalized where they are
std::string poly_str(const TimePoly& p) {
    std::vector<std::pair<TimeMono, cplx>> terms(p.terms().begin(), p.terms().end());
    auto weight = [](const TimeMono& m) {
        int w = 0;
        for (auto [k, e] : m) w += std::abs(k) * e;
        return w;
    };
    std::stable_sort(terms.begin(), terms.end(), [&](const auto& a, const auto& b) { return weight(a.first) < weight(b.first); });
    std::string r;
    for (const auto& [m, c] : terms) {
        if (std::abs(c) < 1e-14) continue;
        std::string mono;
        for (auto [k, e] : m) {
            if (!mono.empty()) mono += " ";
            mono += "t" + std::to_string(k) + (e > 1 ? "^" + std::to_string(e) : "");
        }
        std::string cs = coefficient_str(c);
        bool neg = c.imag() == 0 || std::abs(c.imag()) < 1e-14 ? c.real() < 0 : false;
        if (neg) cs = cs.substr(1);
        if (r.empty())
            r = neg ? "-" : "";
        else
            r += neg ? " - " : " + ";
        if (mono.empty())
            r += cs;
        else
            r += (cs == "1" ? "" : cs + " ") + mono;
    }
    return r.empty() ? "0" : r;
}

int cmd_fermion(const Global& g, const std::string& path) {
    json cfg = load(path);
    spec::FermionSpec s = spec::parse_fermion(cfg);
    fermion::Window w(s.M, s.K);
    fermion::Clifford G = spec::build_clifford(s, w);
    RunReport rep{"fermion", cfg, g.seed, {}};

    auto probe_points = bilinear::random_points({1, 2, 3}, 20, g.seed, 0.1);
    if (s.type == "soliton_product") {
        // against the determinant formula with the exp(-sum k t_k t_-k) gauge
        SolitonSpec so{"toda", s.p, s.q, s.b, {}};
        TauExpr det;
        try {
            det = tau_soliton(so, Representation::Direct);
        } catch (const SpecDegenerate& e) {
            throw ConfigError(e.what());
        }
        bilinear::ResidualReport r;
        r.check = "soliton-determinant";
        r.seed = g.seed;
        r.tolerance = 1e-10;
        auto mixed = bilinear::random_points({1, 2, -1, -2}, 20, g.seed, 0.05);
        for (auto pt : mixed) {
            // higher times are kept smaller: truncation is by weighted degree
            pt[2] *= 0.2;
            pt[-2] *= 0.2;
            Point tp, tm;
            cplx gauge{};
            for (const auto& [k, t] : pt) (k > 0 ? tp : tm)[k] = t;
            for (const auto& [k, t] : tp)
                if (pt.count(-k)) gauge += double(k) * t * pt.at(-k);
            pt[0] = s.n;
            cplx exact = std::exp(-gauge) * det.eval(pt);
            cplx ferm = fermion::vev_tau(w, G, tp, tm, s.n);
            r.add({std::abs(ferm - exact), std::abs(ferm - exact) / std::max(std::abs(exact), 1e-300)}, pt);
        }
        rep.checks.push_back(r);
        std::vector<json> vals;
        for (const auto& pt : s.points) {
            Point tp, tm;
            for (const auto& [k, t] : pt) (k > 0 ? tp : tm)[k] = t;
            vals.push_back({{"at", spec::point_to(pt)}, {"tau", spec::complex_to(fermion::vev_tau(w, G, tp, tm, s.n))}});
        }
        if (!vals.empty()) rep.extra["values"] = vals;
    } else {
        TimePoly poly = fermion::vev_tau_poly(w, G, s.n);
        rep.extra["tau"] = poly_str(poly);
        if (s.type == "schur") {
            DiffPoly ref = kp::schur_s(s.lambda);
            bilinear::ResidualReport r;
            r.check = "schur-s";
            r.seed = g.seed;
            r.tolerance = 1e-12;
            for (const auto& pt : probe_points) {
                std::vector<cplx> tv{pt.at(1), pt.at(2), pt.at(3)};
                for (int k = 4; k <= kp::weight(s.lambda); ++k) tv.push_back(0.0);
                cplx a = poly.eval(pt), b = kp::evaluate_times(ref, tv);
                r.add({std::abs(a - b), std::abs(a - b) / std::max(std::abs(b), 1e-300)}, pt);
            }
            rep.checks.push_back(r);
        }
        if (!poly.is_constant()) rep.checks.push_back(bilinear::check_hirota_miwa(TauExpr(poly), 50, g.seed));
        std::vector<json> vals;
        for (const auto& pt : s.points) vals.push_back({{"at", spec::point_to(pt)}, {"tau", spec::complex_to(poly.eval(pt))}});
        if (!vals.empty()) rep.extra["values"] = vals;
    }
    Sink sink(g.out);
    rep.print(sink.data(), g.format);
    return rep.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"integrable: hierarchies, tau functions and their checks"};
    app.require_subcommand(1);
    app.fallthrough();
    Global g;
    app.add_option("--format", g.format, "text|latex|json|csv")
        ->check(CLI::IsMember({"text", "latex", "json", "csv"}))
        ->capture_default_str();
    app.add_option("--seed", g.seed, "seed for probe points and random states")->capture_default_str();
    app.add_option("--out", g.out, "write the primary output here");

    std::string target = "kdv";
    int order = 3;
    std::vector<int> mn;
    auto* hier_cmd = app.add_subcommand("hierarchy", "print flow equations");
    hier_cmd->add_option("--target", target)->check(CLI::IsMember({"kdv", "kp"}));
    hier_cmd->add_option("--order", order);
    hier_cmd->add_option("--mn", mn)->expected(2);

    std::string spec_path;
    auto* eval_cmd = app.add_subcommand("evaluate", "tau and u on a grid");
    eval_cmd->add_option("--spec", spec_path)->required();

    std::string checks = "hirota-miwa,pde";
    auto* verify_cmd = app.add_subcommand("verify", "bilinear and PDE checks of a solution");
    verify_cmd->add_option("--spec", spec_path)->required();
    verify_cmd->add_option("--checks", checks)->capture_default_str();

    spec::PoledynConfig pc;
    std::string pconf;
    auto* pole_cmd = app.add_subcommand("poledyn", "pole dynamics and spectral invariants");
    pole_cmd->add_option("--config", pconf);
    pole_cmd->add_option("--kind", pc.kind)->check(CLI::IsMember({"rational", "trig", "elliptic"}));
    pole_cmd->add_option("--flow", pc.flow)->check(CLI::IsMember({"cm", "rs"}));
    pole_cmd->add_option("--n", pc.n);
    pole_cmd->add_option("--t-end", pc.t_end);
    pole_cmd->add_option("--dt", pc.dt);

    std::string tconf;
    auto* toda_cmd = app.add_subcommand("toda", "periodic Toda chain and its conserved quantities");
    toda_cmd->add_option("--config", tconf);
    int toda_n = 6;
    toda_cmd->add_option("--n", toda_n, "period when no config is given");

    auto* ferm_cmd = app.add_subcommand("fermion", "vacuum expectations in the fermionic Fock space");
    ferm_cmd->add_option("--spec", spec_path)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*hier_cmd) return cmd_hierarchy(g, target, order, mn);
        if (*eval_cmd) return cmd_evaluate(g, spec_path);
        if (*verify_cmd) return cmd_verify(g, spec_path, checks);
        if (*pole_cmd) {
            if (!pconf.empty()) pc = spec::parse_poledyn(load(pconf));
            pc = spec::parse_poledyn(spec::to_json(pc));
            return cmd_poledyn(g, pc);
        }
        if (*toda_cmd) {
            spec::TodaConfig tc;
            if (!tconf.empty()) {
                tc = spec::parse_toda(load(tconf));
            } else {
                if (toda_n < 3) throw ConfigError("--n must be at least 3");
                std::mt19937_64 rng(g.seed);
                std::uniform_real_distribution<double> U(-0.5, 0.5);
                for (int i = 0; i < toda_n; ++i) {
                    tc.phi.push_back(U(rng));
                    tc.u0.push_back(U(rng));
                }
            }
            return cmd_toda(g, tc);
        }
        if (*ferm_cmd) return cmd_fermion(g, spec_path);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const spec::SpecError& e) {
        std::cerr << "spec error: " << e.what() << "\n";
        return 2;
    } catch (const DepthExhausted& e) {
        std::cerr << "depth exhausted: " << e.what() << "\n";
        return 2;
    } catch (const fermion::WindowExhausted& e) {
        std::cerr << "window exhausted: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
