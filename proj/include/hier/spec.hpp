#pragma once

#include <json.hpp>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "hier/bilinear.hpp"
#include "hier/fermion.hpp"
#include "hier/poledyn.hpp"
#include "hier/toda.hpp"

namespace hier::spec {

using json = nlohmann::json;

struct SpecError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Complex numbers are written as a number or [re, im]; points as objects keyed
// by the time index ("1", "-1", "0" for the site).
cplx complex_from(const json& j);
json complex_to(cplx z);
Point point_from(const json& j);
json point_to(const Point& p);

// FNV-1a of the compact dump
std::string digest(const json& j);

struct SolutionSpec {
    std::string hierarchy = "kp";              // kdv | kp | toda
    std::string family = "soliton";            // soliton | schur | rational | cm | one
    std::string representation = "fredholm";  // direct | fredholm | expanded
    std::vector<cplx> p, q, alpha, beta;
    std::vector<int> lambda;
    std::vector<RationalCondition> conditions;
    std::vector<cplx> x0;
    std::vector<std::vector<cplx>> L0;
    int K = 6;
    std::optional<bilinear::Grid> grid;
    std::vector<Point> points;
    int probes = 100;
};

SolutionSpec parse_solution(const json& j);
json to_json(const SolutionSpec& s);
TauExpr build_tau(const SolutionSpec& s);
// (t_1, t_3) grid for kdv/kp, (t_1, t_{-1}) for toda
bilinear::Grid grid_or_default(const SolutionSpec& s);

struct FermionSpec {
    std::string type = "soliton_product";  // soliton_product | normal_exponent | schur
    std::vector<cplx> p, q, b;
    std::vector<std::tuple<int, int, cplx>> entries;
    std::string ordering = "empty";  // empty | dirac
    std::vector<int> lambda;
    int M = 16, K = 8;
    int n = 0;
    std::vector<Point> points;
};

FermionSpec parse_fermion(const json& j);
json to_json(const FermionSpec& s);
fermion::Clifford build_clifford(const FermionSpec& s, const fermion::Window& w);

struct PoledynConfig {
    std::string kind = "rational";  // rational | trig | elliptic
    std::string flow = "cm";        // cm | rs
    int n = 2;
    std::vector<cplx> x, p;  // empty: drawn from the seed
    cplx omega{1.0, 0.0}, omega_prime{0.2, 1.3};
    double L = 6.0;
    cplx eta{0.3, 0.0};
    double c = 0;
    double t_end = 1, dt = 1e-3;
    int every = 10;
};

PoledynConfig parse_poledyn(const json& j);
json to_json(const PoledynConfig& c);
poledyn::System build_system(const PoledynConfig& c);
poledyn::ParticleState initial_state(const PoledynConfig& c, std::uint64_t seed);

struct TodaConfig {
    std::vector<double> phi, u0;
    double T = 10;
    int steps = 10000, every = 100;
};

TodaConfig parse_toda(const json& j);
json to_json(const TodaConfig& c);

}  // namespace hier::spec
