// Adaptive Gauss-Kronrod (G7,K15) panels plus a fixed 64-node Gauss-Legendre
// rule kept for reproducibility runs.  Integrands here are smooth except for
// square-root edges, which the bisection stack handles.
#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <vector>

namespace fjp {

struct quadrature_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

// K15 nodes on [0,1) half-interval (symmetric rule), Kronrod weights for all
// 15 points and Gauss weights for the embedded 7-point rule.
inline constexpr double kK15Node[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
inline constexpr double kK15Weight[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
// G7 lives on kK15Node indices 1,3,5 (pairs) and 7 (center)
inline constexpr double kG7Weight[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

template <class F>
inline void k15_panel(F&& f, double a, double b, double& k15, double& err) {
    const double h = 0.5 * (b - a), c = 0.5 * (a + b);
    double k = 0.0, g = 0.0;
    for (int i = 0; i < 8; ++i) {
        const double x = h * kK15Node[i];
        const double v = (i == 7) ? f(c) : f(c - x) + f(c + x);
        k += kK15Weight[i] * v;
        if (i == 1) g += kG7Weight[0] * v;
        if (i == 3) g += kG7Weight[1] * v;
        if (i == 5) g += kG7Weight[2] * v;
        if (i == 7) g += kG7Weight[3] * v;
    }
    k15 = h * k;
    err = std::abs(h * (k - g));
}

}  // namespace detail

// Global refinement: split the worst panel until the summed error estimate
// meets the tolerance (handles square-root edges, where per-panel tolerance
// halving never converges).
inline double adaptive_gk(const std::function<double(double)>& f, double a, double b,
                          double abs_tol = 1e-10, int max_panels = 20000) {
    if (a == b) return 0.0;
    struct Panel {
        double a, b, value, err;
        bool operator<(const Panel& o) const { return err < o.err; }
    };
    std::vector<Panel> heap;
    auto push = [&](double lo, double hi) {
        Panel p{lo, hi, 0.0, 0.0};
        detail::k15_panel(f, lo, hi, p.value, p.err);
        heap.push_back(p);
        std::push_heap(heap.begin(), heap.end());
        return p.err;
    };
    double total_err = push(a, b);
    while (total_err > abs_tol) {
        if ((int)heap.size() >= max_panels)
            throw quadrature_error("adaptive_gk: tolerance not met with " +
                                   std::to_string(heap.size()) + " panels");
        std::pop_heap(heap.begin(), heap.end());
        Panel worst = heap.back();
        heap.pop_back();
        total_err -= worst.err;
        double m = 0.5 * (worst.a + worst.b);
        if (m == worst.a || m == worst.b)
            throw quadrature_error("adaptive_gk: panel width underflow");
        total_err += push(worst.a, m);
        total_err += push(m, worst.b);
    }
    double total = 0.0;
    for (const auto& p : heap) total += p.value;
    return total;
}

// 64-node Gauss-Legendre on [a,b]; nodes generated once by Newton on P_64.
inline double gauss_legendre_64(const std::function<double(double)>& f, double a, double b) {
    static const auto rule = [] {
        std::pair<std::vector<double>, std::vector<double>> r;
        const int n = 64;
        r.first.resize(n);
        r.second.resize(n);
        for (int i = 0; i < n / 2; ++i) {
            double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = x;
                for (int k = 2; k <= n; ++k) {
                    double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                double dp = n * (x * p1 - p0) / (x * x - 1.0);
                double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-16) break;
            }
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            double dp = n * (x * p1 - p0) / (x * x - 1.0);
            double w = 2.0 / ((1.0 - x * x) * dp * dp);
            r.first[i] = -x;
            r.first[n - 1 - i] = x;
            r.second[i] = w;
            r.second[n - 1 - i] = w;
        }
        return r;
    }();
    const double h = 0.5 * (b - a), c = 0.5 * (a + b);
    double s = 0.0;
    for (int i = 0; i < 64; ++i) s += rule.second[i] * f(c + h * rule.first[i]);
    return h * s;
}

// Vector-valued adaptive rule; error controlled in the max norm.  Used for
// integrating all moment integrands in one pass over shared panels.
inline std::vector<double> adaptive_gk_vec(const std::function<std::vector<double>(double)>& f,
                                           int dim, double a, double b, double abs_tol = 1e-10,
                                           int max_panels = 20000) {
    std::vector<double> total(dim, 0.0);
    if (a == b) return total;
    struct Panel {
        double a, b, err;
        std::vector<double> value;
        bool operator<(const Panel& o) const { return err < o.err; }
    };
    auto eval = [&](double lo, double hi) {
        Panel p{lo, hi, 0.0, std::vector<double>(dim, 0.0)};
        const double h = 0.5 * (hi - lo), c = 0.5 * (lo + hi);
        std::vector<double> k(dim, 0.0), g(dim, 0.0), v;
        for (int i = 0; i < 8; ++i) {
            const double x = h * detail::kK15Node[i];
            if (i == 7)
                v = f(c);
            else {
                v = f(c - x);
                std::vector<double> v2 = f(c + x);
                for (int d = 0; d < dim; ++d) v[d] += v2[d];
            }
            for (int d = 0; d < dim; ++d) {
                k[d] += detail::kK15Weight[i] * v[d];
                if (i == 1) g[d] += detail::kG7Weight[0] * v[d];
                if (i == 3) g[d] += detail::kG7Weight[1] * v[d];
                if (i == 5) g[d] += detail::kG7Weight[2] * v[d];
                if (i == 7) g[d] += detail::kG7Weight[3] * v[d];
            }
        }
        for (int d = 0; d < dim; ++d) {
            p.value[d] = h * k[d];
            p.err = std::max(p.err, std::abs(h * (k[d] - g[d])));
        }
        return p;
    };
    std::vector<Panel> heap{eval(a, b)};
    double total_err = heap.front().err;
    auto push = [&](Panel&& p) {
        total_err += p.err;
        heap.push_back(std::move(p));
        std::push_heap(heap.begin(), heap.end());
    };
    const bool trace = std::getenv("FJP_QUAD_TRACE") != nullptr;
    while (total_err > abs_tol) {
        if ((int)heap.size() >= max_panels)
            throw quadrature_error("adaptive_gk_vec: tolerance not met");
        std::pop_heap(heap.begin(), heap.end());
        Panel worst = heap.back();
        heap.pop_back();
        total_err -= worst.err;
        if (trace && heap.size() % 200 == 0)
            std::fprintf(stderr, "gk_vec: panels=%zu total_err=%.3e worst=[%a,%a] err=%.3e\n",
                         heap.size(), total_err, worst.a, worst.b, worst.err);
        double m = 0.5 * (worst.a + worst.b);
        if (m == worst.a || m == worst.b)
            throw quadrature_error("adaptive_gk_vec: panel width underflow");
        push(eval(worst.a, m));
        push(eval(m, worst.b));
    }
    for (const auto& p : heap)
        for (int d = 0; d < dim; ++d) total[d] += p.value[d];
    return total;
}

}  // namespace fjp
