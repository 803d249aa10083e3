#include "fjp/flow.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <string>

namespace fjp {

namespace {

using CL = std::complex<long double>;

CL to_l(Complex z) { return {(long double)z.real(), (long double)z.imag()}; }
Complex to_d(CL z) { return {(double)z.real(), (double)z.imag()}; }

// full long-double chain g(a) = a^2/(a^2-k^2) alpha^-1(xi_2t(a))
CL g_chain(CL a, long double kappa, long double t) {
    CL x = detail::xi_t(a, t);
    CL m = detail::szego_alpha_inv_t(x);
    CL a2 = a * a;
    CL den = a2 - kappa * kappa;
    if (std::abs(den) < 1e-300L) throw map_domain_error("g_map: pole at a^2 = kappa^2");
    return a2 / den * m;
}

CL psi_chain(CL z, long double kappa, long double t) {
    CL y = detail::herglotz_h0_t(z);
    CL a = detail::radial_a_t(y, kappa);
    return detail::szego_alpha_t(g_chain(a, kappa, t));
}

// long-double scalar bisection on a strictly increasing function
long double bisect_increasing(const std::function<long double(long double)>& f, long double lo,
                              long double hi, int iters = 180) {
    for (int i = 0; i < iters; ++i) {
        long double m = 0.5L * (lo + hi);
        if (m == lo || m == hi) break;
        (f(m) < 0.0L ? lo : hi) = m;
    }
    return 0.5L * (lo + hi);
}

long double left_real_a_limit(long double kappa, long double t) {
    long double ak = std::abs((double)kappa);
    if (t > 2.0L) {
        long double d = (long double)solve_d((double)t);
        return std::max(ak, d);
    }
    return ak;
}

}  // namespace

void FlowParams::validate() const {
    detail::check_kappa(kappa);
    if (!(t >= 0.0) || !std::isfinite(t)) throw map_domain_error("FlowParams: t must be finite and >= 0");
}

Complex g_map(Complex a, const FlowParams& p) {
    p.validate();
    return to_d(g_chain(to_l(a), (long double)p.kappa, (long double)p.t));
}

Complex phi_map(Complex a, const FlowParams& p) {
    p.validate();
    return to_d(detail::szego_alpha_t(g_chain(to_l(a), (long double)p.kappa, (long double)p.t)));
}

Complex psi(Complex z, const FlowParams& p) {
    p.validate();
    if (z == Complex(1.0, 0.0)) throw map_domain_error("psi: z = 1 is outside the domain");
    return to_d(psi_chain(to_l(z), (long double)p.kappa, (long double)p.t));
}

Complex a_from_z(Complex z, double kappa) {
    return to_d(detail::radial_a_t(detail::herglotz_h0_t(to_l(z)), (long double)kappa));
}

Complex z_from_a(Complex a, double kappa) {
    long double k = kappa;
    CL al = to_l(a);
    CL y = std::sqrt((al * al - k * k) / (1.0L - k * k));
    CL w = (y - 1.0L) / (y + 1.0L);
    return to_d(w);
}

// xi'(a) = e^{ta} (t(a^2-1)+2)/(a+1)^2
static CL xi_derivative(CL a, long double t) {
    CL ap1 = a + 1.0L;
    return std::exp(t * a) * (t * (a * a - 1.0L) + 2.0L) / (ap1 * ap1);
}

Complex phi_map_derivative(Complex a, const FlowParams& p) {
    p.validate();
    long double k = p.kappa, t = p.t;
    CL al = to_l(a);
    CL x = detail::xi_t(al, t);
    CL a2 = al * al;
    CL den = a2 - k * k;
    CL m = detail::szego_alpha_inv_t(x);               // alpha^-1(xi)
    CL onepx = 1.0L + x;
    CL mprime = 4.0L * (1.0L - x) / (onepx * onepx * onepx);
    CL gprime = -2.0L * al * (k * k) / (den * den) * m + a2 / den * mprime * xi_derivative(al, t);
    CL g = a2 / den * m;
    CL s = std::sqrt(1.0L - g);
    CL onep = 1.0L + s;
    CL aprime = 1.0L / (s * onep * onep);              // alpha'(g)
    return to_d(aprime * gprime);
}

namespace {

// g landed on the cut [1,oo) (exact real hits included)
bool on_cut(CL g) { return g.imag() == 0.0L && g.real() >= 1.0L; }

// ambiguous: off-axis but too close to the cut to certify a side
bool cut_ambiguous(CL g) {
    return g.imag() != 0.0L && std::abs(g.imag()) < 1e-13L && g.real() >= 1.0L - 1e-13L;
}

// the straight segment from g_prev to g crosses the ray [1,oo)
bool crosses_cut(CL g_prev, CL g) {
    if (g_prev.imag() == 0.0L || g.imag() == 0.0L) return false;  // endpoints handled separately
    if ((g_prev.imag() < 0.0L) == (g.imag() < 0.0L)) return false;
    long double s = -g_prev.imag() / (g.imag() - g_prev.imag());
    long double xc = g_prev.real() + s * (g.real() - g_prev.real());
    return xc >= 1.0L - 1e-13L;
}

}  // namespace

DomainProbe in_domain(Complex z, const FlowParams& p, int steps) {
    p.validate();
    if (steps < 2) throw resolution_error("in_domain: need at least 2 homotopy steps");
    DomainProbe probe{z, true, steps};
    if (std::abs(z) >= 1.0) {
        probe.inside = false;
        return probe;
    }
    long double k = p.kappa, t = p.t;
    CL zl = to_l(z);
    CL g_prev{0.0L, 0.0L};  // g at the origin is exactly 0
    for (int i = 1; i <= steps; ++i) {
        CL w = zl * (long double)i / (long double)steps;
        CL y = detail::herglotz_h0_t(w);
        CL a = detail::radial_a_t(y, k);
        CL g;
        try {
            g = g_chain(a, k, t);
        } catch (const map_domain_error&) {
            probe.inside = false;  // pole of the chain on the path
            return probe;
        }
        if (cut_ambiguous(g))
            throw resolution_error("in_domain: path sample within 1e-13 of the cut, cannot certify");
        if (on_cut(g) || crosses_cut(g_prev, g)) {
            probe.inside = false;
            return probe;
        }
        g_prev = g;
        CL ps = detail::szego_alpha_t(g);
        if (std::abs(ps) >= 1.0L - 1e-12L) {
            probe.inside = false;
            return probe;
        }
    }
    return probe;
}

double solve_b(double t) {
    if (!(t > 0.0)) throw map_domain_error("solve_b: t must be > 0");
    long double tl = t;
    auto f = [tl](long double b) { return std::log((b - 1.0L) / (b + 1.0L)) + tl * b; };
    long double hi = 2.0L;
    while (f(hi) < 0.0L) hi *= 2.0L;
    long double b = bisect_increasing(f, 1.0L + 1e-18L, hi);
    return (double)b;
}

double solve_d(double t) {
    if (!(t > 2.0)) throw map_domain_error("solve_d: requires t > 2");
    long double tl = t;
    // q(d) = ln((1-d)/(1+d)) + t d is positive at sqrt((t-2)/t) and falls to
    // -oo at 1; bisect on -q to reuse the increasing helper
    auto f = [tl](long double d) { return -(std::log((1.0L - d) / (1.0L + d)) + tl * d); };
    long double lo = std::sqrt((tl - 2.0L) / tl) + 1e-18L;
    long double d = bisect_increasing(f, lo, 1.0L - 1e-18L);
    return (double)d;
}

double solve_a_right(const FlowParams& p) {
    p.validate();
    if (!(p.t > 0.0)) throw map_domain_error("solve_a_right: t must be > 0");
    long double ak = std::abs(p.kappa), tl = p.t;
    if (ak < 1e-15L) return solve_b(p.t);
    // G(a) = ln xi_2t(a) - ln((a-|k|)/(a+|k|)) is strictly increasing on (1,oo)
    auto f = [ak, tl](long double a) {
        return std::log((a - 1.0L) / (a + 1.0L)) + tl * a - std::log((a - ak) / (a + ak));
    };
    long double hi = 2.0L;
    while (f(hi) < 0.0L) hi *= 2.0L;
    long double a = bisect_increasing(f, 1.0L + 1e-18L, hi);
    return (double)a;
}

double solve_z_right(const FlowParams& p) {
    long double a = solve_a_right(p);
    long double k = std::abs(p.kappa);
    long double y = std::sqrt((a * a - k * k) / (1.0L - k * k));
    return (double)((y - 1.0L) / (y + 1.0L));
}

double strip_bound(double t) {
    if (!(t > 0.0)) throw map_domain_error("strip_bound: t must be > 0");
    long double tl = t;
    const long double b = solve_b(t);
    auto bound = [tl](long double x) {
        long double xiv = (x - 1.0L) / (x + 1.0L) * std::exp(tl * x);
        long double d = xiv - 1.0L;
        return 8.0L * std::exp(tl * x) / (d * d);
    };
    // geometric scan (factor 1.05), then bisect the crossing
    long double ceiling = b + std::max(200.0L, 400.0L / tl);
    long double prev = b * 1.000001L + 1e-12L;
    if (bound(prev) < 1.0L) prev = b + 1e-9L;
    long double x = prev;
    while (bound(x) >= 1.0L) {
        prev = x;
        x *= 1.05L;
        if (x > ceiling)
            throw flow_error("strip_bound: scan ceiling " + std::to_string((double)ceiling) +
                             " exhausted");
    }
    long double lo = prev, hiX = x;
    for (int i = 0; i < 200; ++i) {
        long double m = 0.5L * (lo + hiX);
        (bound(m) >= 1.0L ? lo : hiX) = m;
    }
    // nudge off the crossing so the certificate also holds in double
    long double A = hiX * (1.0L + 1e-9L);
    // certify the tail: the bound must stay below 1 for all sampled x >= A
    for (int i = 0; i <= 400; ++i) {
        long double xs = A + (ceiling - A) * (long double)i / 400.0L;
        if (bound(xs) >= 1.0L) {
            long double x2 = xs * 1.05L;
            while (x2 <= ceiling && bound(x2) >= 1.0L) x2 *= 1.05L;
            if (x2 > ceiling) throw flow_error("strip_bound: tail certification failed");
            A = x2;
        }
    }
    return (double)A;
}

double eq2_residual(double x, double u, const FlowParams& p) {
    p.validate();
    if (!(x > 0.0) || !(u > 0.0)) throw map_domain_error("eq2_residual: needs x > 0, u > 0");
    long double k2 = (long double)p.kappa * p.kappa, t = p.t;
    long double xl = x, ul = u;
    long double r2 = xl * xl + ul * ul;
    long double e2 = std::exp(2.0L * t * xl);
    long double st = std::sin(t * ul), ct = std::cos(t * ul);
    long double term1 = -4.0L * k2 * ((r2 + 1.0L) * (r2 + 1.0L) - 4.0L * xl * xl) * std::exp(t * xl);
    long double mid_pref = (k2 - (k2 + 1.0L) * (xl * xl - ul * ul) + r2 * r2) / (xl * ul);
    long double midA = 2.0L * xl * (e2 + 1.0L) * (r2 * st + ul * ct);
    long double midB = (1.0L - e2) * ((r2 * r2 + xl * xl - ul * ul) * st + 2.0L * ul * r2 * ct);
    long double thA = (1.0L - e2) * (2.0L * xl * r2 * ct - 2.0L * xl * ul * st);
    long double thB = (e2 + 1.0L) * ((r2 * r2 + xl * xl - ul * ul) * ct - 2.0L * ul * r2 * st);
    return (double)(term1 + mid_pref * (midA + midB) + 2.0L * (1.0L - k2) * (thA + thB));
}

double eq2_limit(double u, const FlowParams& p) {
    p.validate();
    long double k2 = (long double)p.kappa * p.kappa, t = p.t, ul = u;
    long double st = std::sin(t * ul), ct = std::cos(t * ul);
    long double u2 = ul * ul;
    long double A = -4.0L * k2 * (u2 + 1.0L) * (u2 + 1.0L);
    long double B = 2.0L * (1.0L + u2) * (k2 + u2) *
                    (ul * (t + 2.0L - t * u2) * st + 2.0L * (1.0L - t * u2) * ct);
    long double C = 4.0L * u2 * (1.0L - k2) * ((u2 - 1.0L) * ct - 2.0L * ul * st);
    return (double)(A + B + C);
}

Eq2Factors eq2_limit_factored(double u, const FlowParams& p) {
    p.validate();
    if (!(u > 0.0)) throw map_domain_error("eq2_limit_factored: needs u > 0");
    long double k2 = (long double)p.kappa * p.kappa, t = p.t, ul = u;
    long double c = std::cos(t * ul / 2.0L), s = std::sin(t * ul / 2.0L);
    long double u2 = ul * ul, u4 = u2 * u2;
    long double f1 = ul * c - s;
    long double f2 = ul * (k2 * (t * u2 + t + 2.0L * u2) + u2 * (t * u2 + t - 2.0L)) * c +
                     (k2 * (t * u4 + (t - 4.0L) * u2 - 2.0L) + u4 * (t * u2 + t - 2.0L)) * s;
    // built-in identity check: raw limit = -4 f1 f2
    long double lim = (long double)eq2_limit(u, p);
    long double scale = std::max({std::abs(lim), std::abs(4.0L * f1 * f2), 1.0L});
    if (std::abs(lim + 4.0L * f1 * f2) > 1e-10L * scale)
        throw flow_error("eq2_limit_factored: factorization identity violated");
    return {(double)f1, (double)f2};
}

Complex curve_c_kappa(double k, double beta, double kappa) {
    detail::check_kappa(kappa);
    if (!(k >= 0.0)) throw map_domain_error("curve_c_kappa: k must be >= 0");
    if (!(beta > -M_PI / 2 && beta <= 0.0))
        throw map_domain_error("curve_c_kappa: beta must lie in (-pi/2, 0]");
    Complex w = k * Complex(1.0, std::tan(beta));
    Complex den = w - 2.0;
    if (std::abs(den) < 1e-14) throw map_domain_error("curve_c_kappa: pole at k(1+i tan b) = 2");
    return std::abs(kappa) * std::sqrt(w / den);
}

// ---------------------------------------------------------------------------
// inversion

namespace {

// real-slice bisection: phi is strictly increasing from -1 to 1 on the
// Lemma-2 interval (a_left, a_right)
long double invert_real(long double target, long double kappa, long double t) {
    long double a_left = left_real_a_limit(kappa, t);
    long double a_right = solve_a_right({(double)kappa, (double)t});
    auto f = [kappa, t](long double a) -> long double {
        CL g = g_chain(CL(a, 0.0L), kappa, t);
        CL ps = detail::szego_alpha_t(g);
        return ps.real();
    };
    long double lo = a_left + std::max(1e-17L, a_left * 1e-17L);
    long double hi = a_right;  // phi -> 1 there
    // phi(lo) may still be above target for targets near -1; widen downward
    // is impossible (domain edge), rely on continuity: phi(lo+) ~ -1
    for (int i = 0; i < 200; ++i) {
        long double m = 0.5L * (lo + hi);
        if (m == lo || m == hi) break;
        (f(m) < target ? lo : hi) = m;
    }
    return 0.5L * (lo + hi);
}

}  // namespace

Complex psi_inverse(Complex z, const FlowParams& p, const InversionOptions& opt_in) {
    p.validate();
    if (std::abs(z) >= 1.0)
        throw map_domain_error("psi_inverse: target must lie in the open unit disc");
    if (p.t == 0.0) return z;  // psi_{kappa,0} = id
    InversionOptions opt = opt_in;
    if (const char* s = std::getenv("FJP_INV_TOL")) {
        char* end = nullptr;
        double v = std::strtod(s, &end);
        if (end != s && v > 0.0) opt.tol = v;
    }
    long double k = p.kappa, t = p.t;

    if (std::abs(z.imag()) < 1e-14) {
        long double a = invert_real((long double)z.real(), k, t);
        Complex w = z_from_a(Complex((double)a, 0.0), p.kappa);
        return {w.real(), 0.0};
    }

    CL a{1.0L, 0.0L};
    CL zl = to_l(z);
    auto phi_l = [&](CL av) { return detail::szego_alpha_t(g_chain(av, k, t)); };
    double s = 0.0;
    double ds = 1.0 / opt.path_steps;
    int refinements = 0;
    double last_res = 0.0;
    while (s < 1.0 - 1e-15) {
        double s_next = std::min(1.0, s + ds);
        CL target = zl * (long double)s_next;
        CL a_try = a;
        bool ok = false;
        for (int it = 0; it < opt.max_newton; ++it) {
            CL F = phi_l(a_try) - target;
            last_res = (double)std::abs(F);
            Complex dphi = phi_map_derivative(to_d(a_try), p);
            CL d = to_l(dphi);
            // evaluation noise floor: phi cannot be resolved below
            // |phi'| * ulp-scale of a (dominant at large t, where |phi'|
            // reaches e^t and the preimage is exact long before |F| ~ tol)
            long double floor = std::abs(d) * std::max(std::abs(a_try), 1.0L) * 5e-17L;
            if (std::abs(F) < std::max((long double)opt.tol, floor)) {
                ok = true;
                break;
            }
            if (std::abs(d) < 1e-280L) break;
            CL step = F / d;
            long double lam = 1.0L;
            for (int h = 0; h < 24; ++h) {
                CL a_new = a_try - lam * step;
                bool good = a_new.real() > 0.0L;
                if (good) {
                    try {
                        good = std::abs(phi_l(a_new) - target) < std::abs(F);
                    } catch (const std::exception&) {
                        good = false;
                    }
                }
                if (good) break;
                lam *= 0.5L;
            }
            a_try = a_try - lam * step;
        }
        if (ok) {
            a = a_try;
            s = s_next;
            // gentle growth back toward the nominal step
            ds = std::min(1.0 / opt.path_steps, ds * 2.0);
        } else {
            ds *= 0.5;
            ++refinements;
            if (ds < 1.0 / opt.path_steps / std::pow(2.0, opt.max_refine) || refinements > 4000)
                throw convergence_error("psi_inverse: Newton continuation stalled at s = " +
                                            std::to_string(s),
                                        last_res);
        }
    }
    CL y = std::sqrt((a * a - (long double)(k * k)) / (1.0L - (long double)(k * k)));
    if (y.real() < 0.0L)
        throw flow_error("psi_inverse: continuation escaped the right half-plane");
    CL w = (y - 1.0L) / (y + 1.0L);
    if (std::abs(w) >= 1.0L) throw flow_error("psi_inverse: continuation escaped the unit disc");
    return to_d(w);
}

std::vector<Complex> trace_boundary(const FlowParams& p, int n_rays, int probe_steps) {
    p.validate();
    std::vector<Complex> pts;
    pts.reserve(n_rays);
    long double k = p.kappa, t = p.t;
    // exit = |psi| reaching 1, the chain breaking, or the g-image crossing the
    // cut [1,oo) relative to the last certified-inside sample
    auto g_of = [&](long double r, long double theta) {
        CL w = std::polar(r, theta);
        CL y = detail::herglotz_h0_t(w);
        return g_chain(detail::radial_a_t(y, k), k, t);
    };
    auto exits_from = [&](CL g_inside, long double r, long double theta) {
        try {
            CL g = g_of(r, theta);
            if (on_cut(g) || cut_ambiguous(g) || crosses_cut(g_inside, g)) return true;
            return std::abs(detail::szego_alpha_t(g)) >= 1.0L - 1e-12L;
        } catch (const std::exception&) {
            return true;
        }
    };
    for (int i = 0; i < n_rays; ++i) {
        long double theta = -M_PI + (i + 0.5L) * 2.0L * M_PI / n_rays;
        long double lo = 0.0L, hi = -1.0L;
        CL g_lo{0.0L, 0.0L};
        for (int j = 1; j <= probe_steps; ++j) {
            long double r = (long double)j / (probe_steps + 1);
            if (exits_from(g_lo, r, theta)) {
                hi = r;
                break;
            }
            lo = r;
            g_lo = g_of(r, theta);
        }
        if (hi < 0.0L) continue;  // ray exits only at the unit circle
        for (int it = 0; it < 80; ++it) {
            long double m = 0.5L * (lo + hi);
            if (exits_from(g_lo, m, theta)) {
                hi = m;
            } else {
                lo = m;
                g_lo = g_of(m, theta);
            }
        }
        pts.push_back(to_d(std::polar(0.5L * (lo + hi), theta)));
    }
    return pts;
}

}  // namespace fjp
