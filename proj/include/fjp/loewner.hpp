// Independent verification channel: the radial Loewner pair
//
//   d/dt psi = psi * h,        psi(0) = z0
//   d/dt h   = 2 kappa^2 psi (1 + psi)/(1 - psi)^3,   h(0) = H_0(z0)
//
// where h tracks H_{kappa,t}(psi_{kappa,t}(z0)).  The companion equation
// closes the system, so trajectories never consult the Herglotz module; the
// characteristics pipeline is tested against them, not the other way round.
#pragma once

#include <vector>

#include "fjp/flow.hpp"

namespace fjp {

struct OdeTrajectory {
    Complex z0;
    std::vector<double> times;
    std::vector<Complex> psi_values;
    std::vector<Complex> h_along;
    double step = 0.0;      // base step size
    double lifespan = 0.0;  // time reached before |psi| hit 1 - blow_tol
    bool truncated = false; // true if the trajectory exited before t
};

struct loewner_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Classical RK4 with step halving near |psi| = 1 (blow-up tolerance 1e-6);
// records every accepted step.
OdeTrajectory integrate_flow(Complex z0, const FlowParams& p, int steps = 4000);

// min(T_{z0}, t_max) where T_{z0} is the exit time of |psi| from the disc
double lifespan(Complex z0, double kappa, double t_max, int steps = 4000);

// |d/dt tau(U_t^n) (central difference, h = 1e-4) + n sum b_k b_{n-k}|
std::vector<double> pde_coefficient_residual(const FlowParams& p, int n_max);

// H_{kappa,t}(z) through the ODE alone: backward shooting on the pair from
// (z, h_T) to match h(0) = H_0(psi(0)).  No psi_inverse, no moment formula.
Complex h_eval_ode(Complex z, const FlowParams& p, int steps = 2000);

// tau(U_t^n) from trapezoidal Cauchy coefficients of h_eval_ode on |z| = rho
std::vector<double> unitary_moments_ode(const FlowParams& p, int n_max, double rho = 0.4,
                                        int circle_points = 64);

}  // namespace fjp
