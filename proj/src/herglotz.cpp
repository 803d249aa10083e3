#include "fjp/herglotz.hpp"

#include <cmath>

#include "fjp/moments.hpp"

namespace fjp {

double SpectralMeasureEstimate::total_mass() const {
    double s = 0.0;
    for (double d : density) s += d;
    if (!density.empty()) s /= (double)density.size();
    return s + atom_at_one + atom_at_minus_one;
}

TruncatedSeries h_series(const FlowParams& p, int n_max) {
    p.validate();
    if (n_max < 1 || n_max > 64) throw herglotz_error("h_series: n_max must lie in [1,64]");
    TruncatedSeries s;
    s.order = n_max;
    s.coefficients.resize(n_max + 1);
    s.coefficients[0] = 1.0;
    std::vector<double> u = unitary_moments(p, n_max);
    for (int n = 1; n <= n_max; ++n) s.coefficients[n] = 2.0 * u[n - 1];
    return s;
}

Complex h_eval(Complex z, const FlowParams& p) {
    p.validate();
    if (std::abs(z) >= 1.0) throw herglotz_error("h_eval: z must lie in the open unit disc");
    Complex w = psi_inverse(z, p);
    Complex h0w = herglotz_h0(w);
    Complex h0z = herglotz_h0(z);
    double k2 = p.kappa * p.kappa;
    Complex h = std::sqrt((1.0 - k2) * h0w * h0w + k2 * h0z * h0z);
    if (h.real() < -1e-9)
        throw herglotz_error("h_eval: branch flip (negative real part), should be impossible");
    return h;
}

Complex k_eval(Complex z, const FlowParams& p) {
    p.validate();
    if (std::abs(z) >= 1.0) throw herglotz_error("k_eval: z must lie in the open unit disc");
    Complex h = h_eval(z, p);
    Complex h0z = herglotz_h0(z);
    double k2 = p.kappa * p.kappa;
    Complex k = std::sqrt(h * h + k2 * (1.0 - h0z * h0z));
    if (k.real() < -1e-9) throw herglotz_error("k_eval: branch flip, should be impossible");
    return k;
}

Complex k_eval_flow_route(Complex z, const FlowParams& p) {
    p.validate();
    Complex w = psi_inverse(z, p);
    return radial_a(herglotz_h0(w), p.kappa);
}

double clark_identity_residual(Complex z, const FlowParams& p) {
    Complex K = k_eval(z, p);
    Complex H = h_eval(z, p);
    Complex h0 = herglotz_h0(z);
    Complex den = h0 * K + H;
    if (std::abs(den) < 1e-14)
        throw herglotz_error("clark_identity_residual: H_0 K + H = 0, impossible per the identity");
    Complex lhs = xi(K, p.t);
    Complex rhs = (h0 * K - H) / den;
    return std::abs(lhs - rhs);
}

double characteristics_residual(Complex z, const FlowParams& p) {
    Complex h0 = herglotz_h0(z);
    Complex hinf = herglotz_h_inf(z, p.kappa);
    Complex pz = psi(z, p);
    Complex hinf_p = herglotz_h_inf(pz, p.kappa);
    Complex h_p = h_eval(pz, p);
    Complex lhs = h0 * h0 - hinf * hinf;
    Complex rhs = h_p * h_p - hinf_p * hinf_p;
    return std::abs(lhs - rhs);
}

double atom_weight(const FlowParams& p, double direction, double r) {
    if (!(r > 0.9 && r < 1.0)) throw herglotz_error("atom_weight: r must lie in (0.9, 1)");
    // f(r) = (1-r)/2 Re H(r zeta) = atom + O(1-r); linear extrapolation in
    // (1-r) from the two finest radii of the schedule {r, 1-(1-r)/10, ...}
    double e0 = 1.0 - r;
    double e[3] = {e0, e0 / 10.0, e0 / 100.0};
    double f[3];
    for (int i = 0; i < 3; ++i) {
        double ri = 1.0 - e[i];
        f[i] = 0.5 * e[i] * h_eval(Complex(direction * ri, 0.0), p).real();
    }
    return (f[2] * e[1] - f[1] * e[2]) / (e[1] - e[2]);
}

namespace {

std::vector<double> midpoint_grid(int m) {
    std::vector<double> g(m);
    for (int i = 0; i < m; ++i) g[i] = -M_PI + (i + 0.5) * 2.0 * M_PI / m;
    return g;
}

void check_density_sign(std::vector<double>& density) {
    for (double& d : density) {
        if (d < -1e-6)
            throw herglotz_error("density: negative value " + std::to_string(d) +
                                 " beyond discretization tolerance");
        if (d < 0.0) d = 0.0;
    }
}

}  // namespace

SpectralMeasureEstimate density_nu(const FlowParams& p, int grid_size, double r) {
    p.validate();
    if (grid_size < 64) throw herglotz_error("density_nu: grid_size must be >= 64");
    if (!(r > 0.9 && r < 1.0)) throw herglotz_error("density_nu: r must lie in (0.9, 1)");
    SpectralMeasureEstimate est;
    est.radius_used = r;
    est.grid = midpoint_grid(grid_size);
    est.density.resize(grid_size);
    const double ak = std::abs(p.kappa);
    for (int i = 0; i < grid_size; ++i) {
        Complex z = std::polar(r, est.grid[i]);
        double re_h = h_eval(z, p).real();
        double poisson_atom = ak * herglotz_h0(z).real();  // Re H_0 = Poisson kernel at 1
        est.density[i] = re_h - poisson_atom;
    }
    check_density_sign(est.density);
    est.atom_at_one = atom_weight(p, +1.0, r);
    est.atom_at_minus_one = atom_weight(p, -1.0, r);
    return est;
}

SpectralMeasureEstimate density_clark(const FlowParams& p, Complex zeta, int grid_size, double r) {
    p.validate();
    if (std::abs(std::abs(zeta) - 1.0) > 1e-12)
        throw herglotz_error("density_clark: zeta must lie on the unit circle");
    if (grid_size < 64) throw herglotz_error("density_clark: grid_size must be >= 64");
    if (!(r > 0.9 && r < 1.0)) throw herglotz_error("density_clark: r must lie in (0.9, 1)");
    SpectralMeasureEstimate est;
    est.radius_used = r;
    est.grid = midpoint_grid(grid_size);
    est.density.resize(grid_size);
    auto clark = [&](Complex z) {
        Complex w = psi_inverse(z, p);
        Complex den = zeta - w;
        if (std::abs(den) < 1e-14) throw herglotz_error("density_clark: psi^-1(z) hit zeta");
        return (zeta + w) / den;
    };
    for (int i = 0; i < grid_size; ++i)
        est.density[i] = clark(std::polar(r, est.grid[i])).real();
    check_density_sign(est.density);
    // atom of N_{kappa,t,zeta} at zeta by the same radial functional
    double e[3] = {1.0 - r, (1.0 - r) / 10.0, (1.0 - r) / 100.0};
    double f[3];
    for (int i = 0; i < 3; ++i) f[i] = 0.5 * e[i] * clark((1.0 - e[i]) * zeta).real();
    est.atom_at_one = (f[2] * e[1] - f[1] * e[2]) / (e[1] - e[2]);
    double g[3];
    for (int i = 0; i < 3; ++i) g[i] = 0.5 * e[i] * clark(-(1.0 - e[i]) * zeta).real();
    est.atom_at_minus_one = (g[2] * e[1] - g[1] * e[2]) / (e[1] - e[2]);
    return est;
}

SpectralMeasureEstimate stationary_measure(double kappa, int grid_size) {
    detail::check_kappa(kappa);
    if (grid_size < 64) throw herglotz_error("stationary_measure: grid_size must be >= 64");
    SpectralMeasureEstimate est;
    est.radius_used = 1.0;
    est.grid = midpoint_grid(grid_size);
    est.density.resize(grid_size);
    const double ak = std::abs(kappa);
    for (int i = 0; i < grid_size; ++i) {
        double s = std::sin(est.grid[i] / 2.0);
        double rad = 1.0 - kappa * kappa / (s * s);
        est.density[i] = (std::abs(s) >= ak && rad > 0.0) ? std::sqrt(rad) : 0.0;
    }
    est.atom_at_one = ak;
    est.atom_at_minus_one = 0.0;
    return est;
}

}  // namespace fjp
