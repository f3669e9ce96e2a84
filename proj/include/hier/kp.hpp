#pragma once

#include "hier/psdo.hpp"

#include <array>
#include <complex>

namespace hier::kp {

constexpr int kFieldDepth = 8;
constexpr int kMaxTime = 5;  // t_2..t_5 tracked in time jets

// Jet symbol of field f differentiated a_k times in t_k (k = 2..5) and
// xorder times in x = t_1.
Var time_jet(int field, const std::array<int, kMaxTime + 1>& a, int xorder = 0);
int field_of(const Var& v);
std::array<int, kMaxTime + 1> time_orders(const Var& v);

// d/dt_k on time-jet polynomials; k = 1 is d/dx.
DiffPoly d_t(const DiffPoly& p, int k);

// printing/parsing alphabet for fields named by `names` (default u1..u8)
Alphabet alphabet(const std::vector<std::string>& names = {});

PsiDO lax_operator(int fields = kFieldDepth);
PsiDO a_operator(int j, int fields = kFieldDepth);
DiffPoly conserved_density(int j, int fields = kFieldDepth);

// Coefficients (orders n-2 .. 0) of d_{t_m}A_n - d_{t_n}A_m - [A_m, A_n].
std::vector<DiffPoly> kp_flow_system(int m, int n, int fields = kFieldDepth);

// u1 -> u/2 (field 0); field 1 is w = u2 (U2) or w = 3u2 + 3u1_x, the free
// term of A_3 (FreeTermA3)
enum class WChoice { U2, FreeTermA3 };
DiffPoly to_u_w(const DiffPoly& p, WChoice choice = WChoice::FreeTermA3);

// The KP equation (4u_t - 6uu_x - u_xxx)_x - 3u_yy in the u, w alphabet.
DiffPoly kp_equation();

// 4 d_x r2 + d_y r1 - d_x^2 r1 for the two (2,3) equations.
DiffPoly eliminate_w(const DiffPoly& r1, const DiffPoly& r2);

// ---------------------------------------------------------------- Schur

using YoungDiagram = std::vector<int>;

YoungDiagram transpose(const YoungDiagram& l);
std::vector<YoungDiagram> partitions(int n);
int weight(const YoungDiagram& l);

// Polynomials in params t1..tK (param index k-1).
DiffPoly schur_h(int k);
DiffPoly schur_s(const YoungDiagram& l);
Alphabet times_alphabet(int K = 12);

std::complex<double> evaluate_times(const DiffPoly& p, const std::vector<std::complex<double>>& t);

// exact determinant by cofactor expansion
DiffPoly determinant(const std::vector<std::vector<DiffPoly>>& m);

}  // namespace hier::kp
