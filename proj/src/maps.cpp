#include "fjp/maps.hpp"

#include <cmath>
#include <limits>

namespace fjp {
namespace detail {

void check_kappa(double kappa) {
    if (!(kappa > -1.0 && kappa < 1.0))
        throw map_domain_error("kappa must lie in (-1,1)");
}

template <class T>
static void check_finite(std::complex<T> v, const char* who) {
    if (!std::isfinite((double)v.real()) || !std::isfinite((double)v.imag()))
        throw map_overflow_error(std::string(who) + ": non-finite result");
}

template <class T>
std::complex<T> szego_alpha_t(std::complex<T> z) {
    if (z.imag() == T(0)) {
        // continuous limit on the closed boundary; (1,oo) stays a hard error
        if (std::abs(z.real() - T(1)) <= T(1e-14)) return {T(1), T(0)};
        if (z.real() > T(1)) throw map_domain_error("szego_alpha: argument on the cut [1,oo)");
    }
    std::complex<T> s = std::sqrt(T(1) - z);
    std::complex<T> r = z / ((T(1) + s) * (T(1) + s));
    check_finite(r, "szego_alpha");
    return r;
}

template <class T>
std::complex<T> szego_alpha_inv_t(std::complex<T> z) {
    std::complex<T> w = T(1) + z;
    if (std::abs(w) < T(1e-300)) throw map_domain_error("szego_alpha_inv: pole at z = -1");
    std::complex<T> r = T(4) * z / (w * w);
    check_finite(r, "szego_alpha_inv");
    return r;
}

template <class T>
std::complex<T> herglotz_h0_t(std::complex<T> z) {
    std::complex<T> w = T(1) - z;
    if (std::abs(w) < T(1e-300)) throw map_domain_error("herglotz_h0: pole at z = 1");
    std::complex<T> r = (T(1) + z) / w;
    check_finite(r, "herglotz_h0");
    return r;
}

template <class T>
std::complex<T> radial_a_t(std::complex<T> y, T kappa) {
    std::complex<T> r = std::sqrt(kappa * kappa + (T(1) - kappa * kappa) * y * y);
    check_finite(r, "radial_a");
    return r;
}

template <class T>
std::complex<T> xi_t(std::complex<T> a, T t) {
    std::complex<T> w = a + T(1);
    if (std::abs(w) < T(1e-300)) throw map_domain_error("xi: pole at a = -1");
    // exp overflows around Re(t*a) ~ 709; callers reason about magnitudes
    // analytically, so report instead of returning Inf
    if (t * a.real() > T(700)) throw map_overflow_error("xi: exp(t*a) overflow");
    std::complex<T> r = (a - T(1)) / w * std::exp(t * a);
    check_finite(r, "xi");
    return r;
}

template std::complex<double> szego_alpha_t<double>(std::complex<double>);
template std::complex<long double> szego_alpha_t<long double>(std::complex<long double>);
template std::complex<double> szego_alpha_inv_t<double>(std::complex<double>);
template std::complex<long double> szego_alpha_inv_t<long double>(std::complex<long double>);
template std::complex<double> herglotz_h0_t<double>(std::complex<double>);
template std::complex<long double> herglotz_h0_t<long double>(std::complex<long double>);
template std::complex<double> radial_a_t<double>(std::complex<double>, double);
template std::complex<long double> radial_a_t<long double>(std::complex<long double>, long double);
template std::complex<double> xi_t<double>(std::complex<double>, double);
template std::complex<long double> xi_t<long double>(std::complex<long double>, long double);

}  // namespace detail

Complex szego_alpha(Complex z) { return detail::szego_alpha_t(z); }

Complex szego_alpha_inv(Complex z) { return detail::szego_alpha_inv_t(z); }

Complex herglotz_h0(Complex z) { return detail::herglotz_h0_t(z); }

Complex radial_a(Complex y, double kappa) {
    detail::check_kappa(kappa);
    return detail::radial_a_t(y, kappa);
}

Complex xi(Complex a, double t) {
    if (t < 0.0) throw map_domain_error("xi: t must be >= 0");
    return detail::xi_t(a, t);
}

// H_inf(z) = sqrt(1 + 4 kappa^2 z/(1-z)^2).  The radicand is 1 plus a Koebe
// image, so it misses the ray (-oo, 1-kappa^2]; the principal root is the
// analytic branch with H_inf(0) = 1 and Re >= 0 on D.
Complex herglotz_h_inf(Complex z, double kappa) {
    detail::check_kappa(kappa);
    Complex w = 1.0 - z;
    if (std::abs(w) < 1e-300) throw map_domain_error("herglotz_h_inf: pole at z = 1");
    Complex r = std::sqrt(1.0 + 4.0 * kappa * kappa * z / (w * w));
    if (!std::isfinite(r.real()) || !std::isfinite(r.imag()))
        throw map_overflow_error("herglotz_h_inf: non-finite result");
    return r;
}

}  // namespace fjp
