#include "fjp/moments.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "fjp/power_series.hpp"
#include "fjp/quadrature.hpp"

namespace fjp {

namespace {

double env_tol(const char* name, double fallback) {
    if (const char* s = std::getenv(name)) {
        char* end = nullptr;
        double v = std::strtod(s, &end);
        if (end != s && v > 0.0) return v;
    }
    return fallback;
}

// exact binomial in unsigned __int128; throws on overflow
unsigned __int128 binom_exact(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    unsigned __int128 r = 1;
    for (int i = 1; i <= k; ++i) {
        unsigned __int128 num = (unsigned __int128)(n - k + i);
        unsigned __int128 prod = r * num;
        if (prod / num != r) throw std::overflow_error("binom_exact: 128-bit overflow");
        r = prod / (unsigned)i;
    }
    return r;
}

long double binom_ld(int n, int k) {
    if (k < 0 || k > n) return 0.0L;
    if (n <= 60) return (long double)binom_exact(n, k);
    return expl(lgammal(n + 1.0L) - lgammal(k + 1.0L) - lgammal(n - k + 1.0L));
}

template <class T>
T laguerre_t(int k, T gamma, T x) {
    T p0 = 1;
    if (k == 0) return p0;
    T p1 = 1 + gamma - x;
    for (int n = 1; n < k; ++n) {
        T p2 = ((2 * n + 1 + gamma - x) * p1 - (n + gamma) * p0) / (n + 1);
        p0 = p1;
        p1 = p2;
    }
    return p1;
}

// The triple alternating sum cancels to ~1e-14 of its largest term at n = 12,
// so plain long double cannot reach the 1e-9 relative contract; accumulation
// runs in __float128 (arithmetic only, no libquadmath needed).
using quad = __float128;

// Taylor series of phi(1 + e) about e = 0 from the defining maps.  Templated:
// long double for the public oracle, __float128 for the small-t fallback of
// the coefficient engine, where inversion conditioning reaches ~1e15.
template <class T>
BasicPowerSeries<T> phi_series_at_one(double kappa, double t, int n_max) {
    using S = BasicPowerSeries<T>;
    const int N = n_max;
    T k{(long double)kappa};
    //   xi(1+e) = e/(2+e) e^t exp(te)
    S eps = S::identity(N);
    S te = T((long double)t) * eps;
    S expte = te.exp0();
    S xi_num = T(expl((long double)t)) * (eps * expte);
    S xi_den(N);
    xi_den[0] = T(2);
    xi_den[1] = T(1);
    S w = xi_num / xi_den;
    //   alpha^-1(w) = 4w/(1+w)^2
    S onepw = w;
    onepw[0] += T(1);
    S m = (T(4) * w) / (onepw * onepw);
    //   prefactor (1+e)^2/((1+e)^2 - kappa^2)
    S a1 = S::identity(N);
    a1[0] = T(1);
    S a2 = a1 * a1;
    S a2mk = a2;
    a2mk[0] -= k * k;
    S g = (a2 / a2mk) * m;
    //   alpha(g) = g/(1+sqrt(1-g))^2
    S onemg = T(-1) * g;
    onemg[0] += T(1);
    S s = onemg.sqrt();
    s[0] += T(1);
    return g / (s * s);
}

// Lagrange inversion through the classical power formula
// c_n = [e^{n-1}] (e/phi(e))^n / n; O(N^3), used on the quad fallback path
// where the order-by-order solve would be too slow.
std::vector<quad> lagrange_invert_q(const BasicPowerSeries<quad>& phi) {
    const int N = phi.order();
    // q = e/phi(e): shift down by one (phi has zero constant term)
    BasicPowerSeries<quad> num = BasicPowerSeries<quad>::constant(quad(1), N);
    BasicPowerSeries<quad> den(N);
    for (int i = 0; i < N; ++i) den[i] = phi[i + 1];
    BasicPowerSeries<quad> q = num / den;
    std::vector<quad> out(N);
    BasicPowerSeries<quad> p = q;
    out[0] = p[0];  // c_1 = [e^0] q / 1
    for (int n = 2; n <= N; ++n) {
        p = p * q;
        out[n - 1] = p[n - 1] / quad(n);
    }
    return out;
}

// rising factorial (2j)_m with (0)_m = delta_{m0}
quad poch_rise_q(int twoj, int m) {
    if (twoj == 0) return m == 0 ? quad(1) : quad(0);
    quad r = 1;
    for (int i = 0; i < m; ++i) r *= quad(twoj + i);
    return r;
}

quad binom_q(int n, int k) {
    if (k < 0 || k > n) return 0;
    if (n <= 60) return quad(binom_exact(n, k));  // exact, fits the 113-bit mantissa
    return quad(binom_ld(n, k));
}

quad p_poly_q(int k, int m, quad eps) {
    quad sum = 0;
    quad epow = 1;  // (-eps)^i
    for (int i = 0; i <= k; ++i) {
        sum += binom_q(k, i) * epow * poch_rise_q(2 * i, m);
        epow *= -eps;
    }
    quad pref = 1;
    for (int i = 1; i <= m; ++i) pref *= quad(-2) / i;
    return pref * sum;
}

// Shared tables for computing c_1..c_n_max in one pass: P_k^(m)(kappa^2) is
// time-independent and the (k,j) inner sums are n-independent.
class CoeffEngine {
public:
    CoeffEngine(double kappa, int n_max) : n_max_(n_max), kappa_(kappa) {
        quad eps = quad(kappa) * quad(kappa);
        p_.assign(n_max + 1, {});
        for (int k = 1; k <= n_max; ++k) {
            p_[k].resize(k);
            for (int m = 0; m < k; ++m) p_[k][m] = p_poly_q(k, m, eps);
        }
    }

    struct Diag {
        double condition = 0.0;    // max term magnitude / |result|
        bool oracle_fallback = false;
    };

    // c_n(kappa, t) for n = 1..n_max.  Each coefficient carries a condition
    // estimate; where cancellation exceeds what __float128 can absorb
    // (condition above ~1e16, reached for n >~ 20 at small t) the value is
    // replaced by the quad series-reversion route, which stays accurate
    // there.  The acceptance gate checks that its whole grid stays on the
    // formula path, keeping the two routes independent where they are
    // compared.
    std::vector<long double> coeffs(double t, std::vector<Diag>* diag = nullptr) const {
        const long double tl = t;
        // L[j][m] = L_{j-m-1}^{(m+1)}(2jt); long double suffices here, a
        // relative error on L scales a whole post-cancellation k-subsum and
        // is not amplified (unlike P and the summation itself)
        std::vector<std::vector<quad>> lag(n_max_ + 1);
        for (int j = 1; j <= n_max_; ++j) {
            lag[j].resize(j);
            for (int m = 0; m < j; ++m)
                lag[j][m] =
                    quad(laguerre_t<long double>(j - m - 1, (long double)(m + 1), 2.0L * j * tl));
        }
        // inner[k] = sum_j C(2k,k-j) e^{-jt} sum_m L[j][m] P[k][m], tracking
        // the largest (j,m)-level contribution for the condition estimate
        std::vector<quad> inner(n_max_ + 1, quad(0)), inner_max(n_max_ + 1, quad(0));
        for (int k = 1; k <= n_max_; ++k) {
            quad acc = 0, mx = 0;
            for (int j = 1; j <= k; ++j) {
                quad msum = 0, mmax = 0;
                for (int m = 0; m < j; ++m) {
                    quad term = lag[j][m] * p_[k][m];
                    msum += term;
                    if (qabs(term) > mmax) mmax = qabs(term);
                }
                quad pref = binom_q(2 * k, k - j) * quad(expl(-(long double)j * tl));
                acc += pref * msum;
                if (pref * mmax > mx) mx = pref * mmax;
            }
            inner[k] = acc;
            inner_max[k] = mx;
        }
        std::vector<long double> out(n_max_);
        std::vector<int> fallback_idx;
        if (diag) diag->assign(n_max_, {});
        for (int n = 1; n <= n_max_; ++n) {
            quad total = 0, mx = 0;
            for (int k = 1; k <= n; ++k) {
                // (2n/(n+k)) C(n+k, n-k) is an integer (Chebyshev-type weight)
                quad w;
                if (n + k <= 60) {
                    unsigned __int128 num = binom_exact(n + k, n - k) * (unsigned)(2 * n);
                    w = quad(num / (unsigned)(n + k));
                } else {
                    w = binom_q(n + k, n - k) * quad(2 * n) / quad(n + k);
                }
                if ((n + k) % 2 == 1) w = -w;
                total += w * inner[k];
                if (qabs(w) * inner_max[k] > mx) mx = qabs(w) * inner_max[k];
            }
            quad value = quad(2) / n * total;
            out[n - 1] = (long double)value;
            if (diag) (*diag)[n - 1].condition = (double)(long double)(mx / std::max(qabs(total), quad(1e-300L)));
            if (qabs(total) < mx * quad(1e-16L)) fallback_idx.push_back(n);
        }
        if (!fallback_idx.empty()) {
            BasicPowerSeries<quad> phi = phi_series_at_one<quad>(kappa_, t, n_max_);
            std::vector<quad> rev = lagrange_invert_q(phi);
            for (int n : fallback_idx) {
                out[n - 1] = (long double)rev[n - 1];
                if (diag) (*diag)[n - 1].oracle_fallback = true;
            }
        }
        return out;
    }

private:
    static quad qabs(quad x) { return x < 0 ? -x : x; }
    int n_max_;
    double kappa_;
    std::vector<std::vector<quad>> p_;
};

long double flow_coeff_ld(int n, long double kappa, long double t) {
    if (n == 0) return 1.0L;
    CoeffEngine engine((double)kappa, n);
    return engine.coeffs((double)t)[n - 1];
}

}  // namespace

double laguerre(int k, double gamma, double x) {
    if (k < 0) throw std::domain_error("laguerre: k must be >= 0");
    if (!(gamma > -1.0)) throw std::domain_error("laguerre: gamma must be > -1");
    return (double)laguerre_t<long double>(k, gamma, x);
}

double p_poly(int k, int m, double eps) {
    if (k < 1 || m < 0) throw std::domain_error("p_poly: needs k >= 1, m >= 0");
    if (!(eps >= 0.0 && eps < 1.0)) throw std::domain_error("p_poly: eps must lie in [0,1)");
    return (double)p_poly_q(k, m, quad(eps));
}

double flow_coeff(int n, const FlowParams& p) {
    p.validate();
    if (n < 0) throw std::domain_error("flow_coeff: n must be >= 0");
    if (n > 64)
        throw std::overflow_error("flow_coeff: n > 64 exceeds the supported combinatorial range");
    return (double)flow_coeff_ld(n, p.kappa, p.t);
}

FlowCoeffInfo flow_coeff_info(int n, const FlowParams& p) {
    p.validate();
    if (n < 1) throw std::domain_error("flow_coeff_info: n must be >= 1");
    if (n > 64)
        throw std::overflow_error("flow_coeff_info: n > 64 exceeds the supported range");
    CoeffEngine engine(p.kappa, n);
    std::vector<CoeffEngine::Diag> diag;
    std::vector<long double> c = engine.coeffs(p.t, &diag);
    return {(double)c[n - 1], diag[n - 1].condition, diag[n - 1].oracle_fallback};
}

std::vector<double> series_reversion_oracle(const FlowParams& p, int n_max) {
    p.validate();
    if (n_max < 1 || n_max > 20)
        throw std::domain_error("series_reversion_oracle: n_max must lie in [1,20]");
    BasicPowerSeries<long double> phi =
        phi_series_at_one<long double>(p.kappa, p.t, n_max);
    BasicPowerSeries<long double> inv = phi.invert();
    std::vector<double> out(n_max);
    for (int i = 1; i <= n_max; ++i) out[i - 1] = (double)inv[i];
    return out;
}

namespace {

// integrand vector f_n(s) = sum_{k=1..n} b_k(s) b_{n-k}(s), n = 1..n_max,
// with b supplied per call (formula or oracle route)
template <class BFun>
std::vector<double> moment_integrands(double s, int n_max, BFun&& b_of) {
    std::vector<long double> b(n_max + 1);
    b[0] = 1.0L;
    for (int k = 1; k <= n_max; ++k) b[k] = (long double)b_of(k, s);
    std::vector<double> f(n_max);
    for (int n = 1; n <= n_max; ++n) {
        long double acc = 0.0L;
        for (int k = 1; k <= n; ++k) acc += b[k] * b[n - k];
        f[n - 1] = (double)acc;
    }
    return f;
}

template <class BFun>
std::vector<double> unitary_moments_impl(const FlowParams& p, int n_max, BFun&& b_of,
                                         const QuadratureOptions& q) {
    if (n_max < 1) throw std::domain_error("unitary_moments: n_max must be >= 1");
    std::vector<double> out(n_max, 1.0);
    if (p.t == 0.0) return out;  // tau(U_0^n) = 1, empty integral
    auto f = [&](double s) { return moment_integrands(s, n_max, b_of); };
    std::vector<double> integrals;
    if (q.fixed_64) {
        integrals.assign(n_max, 0.0);
        for (int n = 1; n <= n_max; ++n)
            integrals[n - 1] =
                gauss_legendre_64([&](double s) { return f(s)[n - 1]; }, 0.0, p.t);
    } else {
        integrals = adaptive_gk_vec(f, n_max, 0.0, p.t, q.abs_tol);
    }
    for (int n = 1; n <= n_max; ++n) out[n - 1] = 1.0 - n * integrals[n - 1];
    return out;
}

}  // namespace

std::vector<double> unitary_moments_opt(const FlowParams& p, int n_max,
                                        const QuadratureOptions& q) {
    p.validate();
    CoeffEngine engine(p.kappa, n_max);
    double cached_s = -1.0;
    std::vector<long double> cached;
    auto b_formula = [&](int k, double s) {
        if (s != cached_s) {
            cached = engine.coeffs(s);
            cached_s = s;
        }
        return 0.5L * cached[k - 1];
    };
    return unitary_moments_impl(p, n_max, b_formula, q);
}

std::vector<double> unitary_moments(const FlowParams& p, int n_max) {
    QuadratureOptions q;
    q.abs_tol = env_tol("FJP_QUAD_TOL", 1e-10);
    return unitary_moments_opt(p, n_max, q);
}

std::vector<double> unitary_moments_reversion(const FlowParams& p, int n_max) {
    p.validate();
    QuadratureOptions q;
    q.abs_tol = env_tol("FJP_QUAD_TOL", 1e-10);
    // one oracle run per quadrature node serves every (k, n)
    double cached_s = -1.0;
    std::vector<double> cached;
    auto b_oracle = [&, n_max](int k, double s) {
        if (s != cached_s) {
            cached = series_reversion_oracle({p.kappa, s}, n_max);
            cached_s = s;
        }
        return 0.5 * cached[k - 1];
    };
    return unitary_moments_impl(p, n_max, b_oracle, q);
}

double unitary_moment(int n, const FlowParams& p) {
    if (n < 1) throw std::domain_error("unitary_moment: n must be >= 1");
    return unitary_moments(p, n)[n - 1];
}

double jacobi_from_unitary(int n, double kappa, const std::vector<double>& u_moments) {
    if (n < 1 || (int)u_moments.size() < n)
        throw std::domain_error("jacobi_from_unitary: need u_moments up to n");
    long double pow4 = powl(2.0L, -2 * n);
    long double bracket = 0.5L * pow4 * binom_ld(2 * n, n) + 0.5L * (long double)kappa;
    long double s = 0.0L;
    for (int k = 1; k <= n; ++k) s += binom_ld(2 * n, n - k) * (long double)u_moments[k - 1];
    bracket += pow4 * s;
    long double tau_p = (1.0L + (long double)kappa) / 2.0L;
    return (double)(bracket / tau_p);
}

std::vector<double> jacobi_moments(const FlowParams& p, int n_max) {
    std::vector<double> u = unitary_moments(p, n_max);
    std::vector<double> out(n_max);
    for (int n = 1; n <= n_max; ++n) out[n - 1] = jacobi_from_unitary(n, p.kappa, u);
    return out;
}

double jacobi_moment(int n, const FlowParams& p) {
    if (n < 1) throw std::domain_error("jacobi_moment: n must be >= 1");
    return jacobi_moments(p, n)[n - 1];
}

MomentTable moment_table_formula(const FlowParams& p, int n_max) {
    MomentTable t;
    t.params = p;
    t.n_max = n_max;
    t.u_moments = unitary_moments(p, n_max);
    t.j_moments.resize(n_max);
    for (int n = 1; n <= n_max; ++n) t.j_moments[n - 1] = jacobi_from_unitary(n, p.kappa, t.u_moments);
    t.source = MomentSource::formula;
    return t;
}

MomentTable moment_table_reversion(const FlowParams& p, int n_max) {
    MomentTable t;
    t.params = p;
    t.n_max = n_max;
    t.u_moments = unitary_moments_reversion(p, n_max);
    t.j_moments.resize(n_max);
    for (int n = 1; n <= n_max; ++n) t.j_moments[n - 1] = jacobi_from_unitary(n, p.kappa, t.u_moments);
    t.source = MomentSource::reversion_oracle;
    return t;
}

std::vector<std::string> moment_table_violations(const MomentTable& table, double slack) {
    std::vector<std::string> v;
    for (int n = 1; n <= table.n_max; ++n) {
        double u = table.u_moments[n - 1];
        double j = table.j_moments[n - 1];
        if (std::abs(u) > 1.0 + slack)
            v.push_back("u[" + std::to_string(n) + "] = " + std::to_string(u) + " outside [-1,1]");
        if (j < -slack || j > 1.0 + slack)
            v.push_back("j[" + std::to_string(n) + "] = " + std::to_string(j) + " outside [0,1]");
        if (n >= 2 && table.j_moments[n - 1] > table.j_moments[n - 2] + slack)
            v.push_back("j[" + std::to_string(n) + "] increases over j[" + std::to_string(n - 1) + "]");
    }
    return v;
}

bool binomial_identity_holds(int n) {
    unsigned __int128 lhs = binom_exact(2 * n, n);
    for (int k = 1; k <= n; ++k) lhs += 2 * binom_exact(2 * n, n - k);
    unsigned __int128 rhs = 1;
    for (int i = 0; i < n; ++i) rhs *= 4;
    return lhs == rhs;
}

}  // namespace fjp
