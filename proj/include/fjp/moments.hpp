// Special functions and the explicit moment formulas.
//
// c_n(kappa,t) are the Taylor coefficients of the local inverse of
// phi_{kappa,t} about 0 (c_0 = 1), given by a triple alternating sum over
// binomials, Laguerre polynomials L_{j-m-1}^{(m+1)}(2jt) and the polynomials
//
//   P_k^(m)(e) = (-2)^m/m! sum_{j=0..k} C(k,j) (-e)^j (2j)_m,
//   (0)_m = delta_{m0},  (2j)_m = Gamma(2j+m)/Gamma(2j),
//
// evaluated at e = kappa^2.  With b_n = c_n/2, b_0 = 1, the unitary moments
// solve tau(U_t^n) = 1 - n int_0^t sum_{k=1..n} b_k b_{n-k} ds and the Jacobi
// moments follow from the binomial expansion over tau(P) = (1+kappa)/2.
//
// The triple sum cancels catastrophically (condition ~1e9 at n = 12), so all
// accumulation is done in long double with exact 128-bit binomials.
#pragma once

#include <cstdint>
#include <vector>

#include "fjp/flow.hpp"

namespace fjp {

enum class MomentSource { formula, reversion_oracle, ode_oracle, monte_carlo };

struct MomentTable {
    FlowParams params;
    int n_max = 0;
    std::vector<double> u_moments;  // tau(U_t^n), n = 1..n_max
    std::vector<double> j_moments;  // tau(J_t^n)/tau(P), n = 1..n_max
    std::vector<double> u_stderr;   // Monte Carlo only, else empty
    std::vector<double> j_stderr;
    MomentSource source = MomentSource::formula;
};

// invariant violations (|u_n| > 1 + slack, j_n outside [0,1] or increasing)
std::vector<std::string> moment_table_violations(const MomentTable& table, double slack = 1e-9);

double laguerre(int k, double gamma, double x);

// P_k^(m)(eps) with the Pochhammer conventions above
double p_poly(int k, int m, double eps);

// c_n(kappa,t); exact integer combinatorics for n <= 30, lgamma-based
// binomials with compensated accumulation beyond (throws past n = 64).
// Where the alternating sum cancels beyond what __float128 absorbs
// (condition > 1e16, reached for n >~ 20 at small t) the engine substitutes
// the quad-precision series-reversion route; flow_coeff_info reports the
// condition number and whether the substitution happened.
double flow_coeff(int n, const FlowParams& p);

struct FlowCoeffInfo {
    double value = 0.0;
    double condition = 0.0;      // largest contribution / |result|
    bool oracle_fallback = false;
};
FlowCoeffInfo flow_coeff_info(int n, const FlowParams& p);

// Independent oracle: Taylor coefficients c^_1..c^_n_max of the compositional
// inverse of phi_{kappa,t} about a = 1, by truncated-series arithmetic on the
// defining maps (no use of the closed formula).
std::vector<double> series_reversion_oracle(const FlowParams& p, int n_max);

double unitary_moment(int n, const FlowParams& p);
double jacobi_moment(int n, const FlowParams& p);

// all moments 1..n_max in one pass (shared quadrature panels)
std::vector<double> unitary_moments(const FlowParams& p, int n_max);
std::vector<double> jacobi_moments(const FlowParams& p, int n_max);

// same integrals with b_k supplied by the reversion oracle instead of the
// closed formula (drives the "reversion" source of the moments command)
std::vector<double> unitary_moments_reversion(const FlowParams& p, int n_max);

MomentTable moment_table_formula(const FlowParams& p, int n_max);
MomentTable moment_table_reversion(const FlowParams& p, int n_max);

// exact binomial identity C(2n,n) + 2 sum_{k=1..n} C(2n,n-k) = 4^n
bool binomial_identity_holds(int n);

// jacobi moment from precomputed unitary moments (also used by the Monte
// Carlo module, where it is an exact algebraic identity at finite N)
double jacobi_from_unitary(int n, double kappa, const std::vector<double>& u_moments);

// quadrature knobs: absolute tolerance (default 1e-10, env FJP_QUAD_TOL) and
// a fixed 64-node fallback for reproducibility runs
struct QuadratureOptions {
    double abs_tol = 1e-10;
    bool fixed_64 = false;
};
std::vector<double> unitary_moments_opt(const FlowParams& p, int n_max, const QuadratureOptions& q);

}  // namespace fjp
