// Herglotz transforms of the spectral measures and their boundary data.
//
//   H_{kappa,t}(z) = sqrt((1-kappa^2) H_0(psi^-1(z))^2 + kappa^2 H_0(z)^2)
//   K_{kappa,2t}(z) = sqrt(H^2 + kappa^2 (1 - H_0^2)) = a(H_0(psi^-1(z)))
//
// Densities are recovered from Poisson boundary values at radius r, atoms
// from the radial-limit functional (1-r)/2 * H(r zeta) with Richardson
// extrapolation in (1-r).
#pragma once

#include <vector>

#include "fjp/flow.hpp"

namespace fjp {

struct TruncatedSeries {
    std::vector<double> coefficients;  // c_0..c_N about 0, c_0 = 1
    int order = 0;
};

struct SpectralMeasureEstimate {
    double atom_at_one = 0.0;
    double atom_at_minus_one = 0.0;
    std::vector<double> grid;     // theta_i in (-pi, pi], midpoint grid
    std::vector<double> density;  // w.r.t. dtheta/(2pi), >= 0
    double radius_used = 0.0;

    // atom_at_one + atom_at_minus_one + mean(density); should be ~1
    double total_mass() const;
};

struct herglotz_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Taylor coefficients (1, 2 tau(U_t), ..., 2 tau(U_t^n_max)) of H_{kappa,t}
TruncatedSeries h_series(const FlowParams& p, int n_max);

// H_{kappa,t}(z) through the characteristics identity; Re >= 0 is verified
// (a branch flip is an error, the factored form cannot take negative values)
Complex h_eval(Complex z, const FlowParams& p);

// K_{kappa,2t}(z) via sqrt(H^2 + kappa^2(1 - H_0^2)); k_eval_flow_route is
// the second, independent evaluation a(H_0(psi^-1(z)))
Complex k_eval(Complex z, const FlowParams& p);
Complex k_eval_flow_route(Complex z, const FlowParams& p);

// |xi_2t(K) - (H_0 K - H)/(H_0 K + H)|
double clark_identity_residual(Complex z, const FlowParams& p);

// |[H_0(z)^2 - H_inf(z)^2] - [H(psi(z))^2 - H_inf(psi(z))^2]|, z in Lambda
double characteristics_residual(Complex z, const FlowParams& p);

// spectral measure of U_t: density Re H - |kappa| * Poisson kernel, atom at 1
SpectralMeasureEstimate density_nu(const FlowParams& p, int grid_size, double r);

// Aleksandrov-Clark family: density Re[(zeta + psi^-1)/(zeta - psi^-1)]
SpectralMeasureEstimate density_clark(const FlowParams& p, Complex zeta, int grid_size, double r);

// stationary measure |kappa| delta_1 + sqrt(1 - kappa^2/sin^2(theta/2)) on
// {|sin(theta/2)| >= |kappa|}, w.r.t. dtheta/(2pi)
SpectralMeasureEstimate stationary_measure(double kappa, int grid_size);

// radial-limit atom functional lim (1-r)/2 H(r zeta), Richardson-extrapolated
// over {r, 1-(1-r)/10, 1-(1-r)/100}
double atom_weight(const FlowParams& p, double direction, double r);

}  // namespace fjp
