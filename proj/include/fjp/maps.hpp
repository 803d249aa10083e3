// Conformal and Herglotz building blocks shared by every other module.
//
//   szego_alpha      alpha(z)  = z/(1+sqrt(1-z))^2,  cut plane C\[1,oo) -> D
//   szego_alpha_inv  alpha^-1(z) = 4z/(1+z)^2
//   herglotz_h0      H_0(z)    = (1+z)/(1-z),        D -> right half-plane
//   radial_a         a(y)      = sqrt(kappa^2 + (1-kappa^2) y^2)
//   xi               xi_2t(u)  = (u-1)/(u+1) e^{tu}
//   herglotz_h_inf   H_inf(z)  = sqrt(1 + 4 kappa^2 z/(1-z)^2)
//
// All square roots are principal (cut along the negative real axis).
// Branch-sensitive composites are evaluated from factored forms; no value
// with a NaN/Inf component ever escapes, errors are thrown instead.
#pragma once

#include <complex>
#include <stdexcept>

namespace fjp {

using Complex = std::complex<double>;

struct map_domain_error : std::domain_error {
    using std::domain_error::domain_error;
};
struct map_overflow_error : std::overflow_error {
    using std::overflow_error::overflow_error;
};

// alpha(1) := 1 by continuity so the closed-disc boundary map is total; the
// open ray (1,oo) on the real axis is a hard error.  Real arguments within
// 1e-14 of 1 are snapped to the continuous limit: psi has a square-root
// branch point at z_{kappa,t}, so solver outputs land in that band.
Complex szego_alpha(Complex z);
Complex szego_alpha_inv(Complex z);
Complex herglotz_h0(Complex z);
Complex radial_a(Complex y, double kappa);
Complex xi(Complex a, double t);
Complex herglotz_h_inf(Complex z, double kappa);

namespace detail {

// Long-double evaluations used by the flow pipeline, where the square-root
// branch point at the domain edge amplifies rounding (see flow.cpp).
template <class T>
std::complex<T> szego_alpha_t(std::complex<T> z);
template <class T>
std::complex<T> szego_alpha_inv_t(std::complex<T> z);
template <class T>
std::complex<T> herglotz_h0_t(std::complex<T> z);
template <class T>
std::complex<T> radial_a_t(std::complex<T> y, T kappa);
template <class T>
std::complex<T> xi_t(std::complex<T> a, T t);

void check_kappa(double kappa);

}  // namespace detail

}  // namespace fjp
