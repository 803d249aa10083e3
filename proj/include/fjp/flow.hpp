// The characteristic flow psi_{kappa,t}, its univalence domain, its numerical
// inverse, and the boundary-equation solvers.
//
// In the a-variable (a = a(H_0(z)), right half-plane):
//
//   g_{kappa,t}(a)   = a^2/(a^2-kappa^2) * alpha^-1(xi_2t(a))
//   phi_{kappa,t}(a) = alpha(g_{kappa,t}(a))
//   psi_{kappa,t}(z) = phi_{kappa,t}(a(H_0(z)))
//
// psi is univalent on the connected component Lambda_{kappa,t} of its
// analyticity region containing 0 and maps it onto the unit disc; the right
// real boundary z_{kappa,t} solves xi_2t(a) = (a-|kappa|)/(a+|kappa|).
#pragma once

#include <optional>
#include <vector>

#include "fjp/maps.hpp"

namespace fjp {

struct FlowParams {
    double kappa = 0.0;  // trace of the symmetry, in (-1,1)
    double t = 0.0;      // process time, >= 0

    void validate() const;
};

struct DomainProbe {
    Complex point;
    bool inside = false;
    int path_samples = 0;  // homotopy steps used along [0, point]
};

struct flow_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct convergence_error : flow_error {
    convergence_error(const std::string& msg, double residual)
        : flow_error(msg), last_residual(residual) {}
    double last_residual;
};
struct resolution_error : flow_error {
    using flow_error::flow_error;
};

Complex g_map(Complex a, const FlowParams& p);
Complex phi_map(Complex a, const FlowParams& p);
Complex psi(Complex z, const FlowParams& p);

// Straight-segment homotopy from 0: inside iff every sample keeps g off the
// ray [1,oo) (no crossing either) and |psi| < 1.
DomainProbe in_domain(Complex z, const FlowParams& p, int steps = 10000);

struct InversionOptions {
    int path_steps = 100;       // continuation nodes along r*z, r: 0 -> 1
    double tol = 1e-12;         // |phi(a) - z| target (contract is 1e-10)
    int max_newton = 60;
    int max_refine = 14;        // continuation step halvings when stuck
};

// Lambda-valued solution of psi(w) = z, by damped Newton on phi in the
// a-variable with path continuation in the target; real targets fall back to
// bisection on the monotone real slice (Lemma-2 interval).
Complex psi_inverse(Complex z, const FlowParams& p, const InversionOptions& opt = {});

// Right real boundary point z_{kappa,t} of Lambda_{kappa,t}; for kappa = 0
// solves the continuous limit xi_2t(H_0(z)) = 1.  Strictly decreasing in t.
double solve_z_right(const FlowParams& p);

// Unique b > 1 with xi_2t(b) = 1; equals H_0(z_{0,t}).
double solve_b(double t);

// Unique d in (sqrt((t-2)/t), 1) with xi_2t(d) = -1; requires t > 2.
double solve_d(double t);

// Smallest grid-refined A > b_2t with 8 e^{tx}/(xi_2t(x)-1)^2 < 1 for all
// sampled x >= A; certifies |g| < 1 on {Re(a) >= A} for every kappa.
double strip_bound(double t);

// Right-hand side of the expanded boundary equation Im(g) = 0 on
// {x > 0, u > 0}; vanishes iff Im(g_{kappa,t}(x+iu)) = 0 there.
double eq2_residual(double x, double u, const FlowParams& p);

// Factors of the x -> 0+ limit of the boundary equation.  The raw limit
// expression equals -4 * oscillatory * polynomial; the constructor verifies
// that identity to 1e-10 relative and throws otherwise.
struct Eq2Factors {
    double oscillatory;  // u cos(tu/2) - sin(tu/2), zero iff tan(tu/2) = u
    double polynomial;   // the bracketed trigonometric polynomial
};
Eq2Factors eq2_limit_factored(double u, const FlowParams& p);

// x -> 0+ limit expression itself (exposed for the identity tests).
double eq2_limit(double u, const FlowParams& p);

// Parametrized curve C_kappa = |kappa| sqrt(k(1+i tan b)/(k(1+i tan b)-2)).
Complex curve_c_kappa(double k, double beta, double kappa);

// Radial probe of the boundary of Lambda_{kappa,t}: for n_rays directions,
// bisect the exit radius and return the certified boundary points.
std::vector<Complex> trace_boundary(const FlowParams& p, int n_rays = 64, int probe_steps = 2000);

// a <-> z changes of variable (principal branches, right half-plane side).
Complex a_from_z(Complex z, double kappa);
Complex z_from_a(Complex a, double kappa);

// unique a > max(1,|kappa|) with xi_2t(a) = (a-|kappa|)/(a+|kappa|)
double solve_a_right(const FlowParams& p);

// derivative of phi in the a-variable (analytic formula; used by the Newton
// inversion and exposed for tests)
Complex phi_map_derivative(Complex a, const FlowParams& p);

}  // namespace fjp
