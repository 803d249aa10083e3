#include "fjp/loewner.hpp"

#include <cmath>
#include <limits>
#include <optional>

#include "fjp/moments.hpp"

namespace fjp {

namespace {

constexpr double kBlowTol = 1e-6;

struct State {
    Complex psi, h;
};

State rhs(const State& s, double kappa2) {
    Complex one_m = 1.0 - s.psi;
    Complex d_psi = s.psi * s.h;
    Complex d_h = 2.0 * kappa2 * s.psi * (1.0 + s.psi) / (one_m * one_m * one_m);
    return {d_psi, d_h};
}

// one RK4 step; fails (returns false) if any stage leaves the disc, where
// the companion equation is singular and the combination is garbage
bool rk4_step(const State& s, double h, double kappa2, State& out) {
    auto stage_ok = [](const State& st) { return std::abs(st.psi) < 1.0 - kBlowTol; };
    State k1 = rhs(s, kappa2);
    State s2{s.psi + 0.5 * h * k1.psi, s.h + 0.5 * h * k1.h};
    if (!stage_ok(s2)) return false;
    State k2 = rhs(s2, kappa2);
    State s3{s.psi + 0.5 * h * k2.psi, s.h + 0.5 * h * k2.h};
    if (!stage_ok(s3)) return false;
    State k3 = rhs(s3, kappa2);
    State s4{s.psi + h * k3.psi, s.h + h * k3.h};
    if (!stage_ok(s4)) return false;
    State k4 = rhs(s4, kappa2);
    out = {s.psi + h / 6.0 * (k1.psi + 2.0 * k2.psi + 2.0 * k3.psi + k4.psi),
           s.h + h / 6.0 * (k1.h + 2.0 * k2.h + 2.0 * k3.h + k4.h)};
    // trust region: a healthy step never moves psi this far
    if (std::abs(out.psi - s.psi) > 0.1) return false;
    return stage_ok(out);
}

}  // namespace

OdeTrajectory integrate_flow(Complex z0, const FlowParams& p, int steps) {
    p.validate();
    if (steps < 100) throw loewner_error("integrate_flow: needs at least 100 steps");
    if (std::abs(z0) >= 1.0) throw loewner_error("integrate_flow: z0 must lie in the open disc");
    const double kappa2 = p.kappa * p.kappa;
    OdeTrajectory traj;
    traj.z0 = z0;
    traj.step = p.t / steps;
    State s{z0, herglotz_h0(z0)};
    double time = 0.0;
    traj.times.push_back(0.0);
    traj.psi_values.push_back(s.psi);
    traj.h_along.push_back(s.h);
    if (p.t == 0.0) {
        traj.lifespan = 0.0;
        return traj;
    }
    const double h_min = traj.step * std::pow(0.5, 42);
    double h = traj.step;
    long iters = 0;
    const long max_iters = 64L * steps;
    while (time < p.t - 1e-15) {
        if (++iters > max_iters) {
            traj.lifespan = time;
            traj.truncated = true;
            return traj;
        }
        h = std::min(h, p.t - time);
        State next;
        if (!rk4_step(s, h, kappa2, next)) {
            if (h <= h_min) {
                if (std::abs(s.psi) < 0.9)
                    throw loewner_error("integrate_flow: step size underflow away from the boundary");
                traj.lifespan = time;
                traj.truncated = true;
                return traj;
            }
            h *= 0.5;  // halve near the boundary, do not accept the step
            continue;
        }
        s = next;
        time += h;
        traj.times.push_back(time);
        traj.psi_values.push_back(s.psi);
        traj.h_along.push_back(s.h);
        h = std::min(traj.step, h * 2.0);
    }
    traj.lifespan = time;
    return traj;
}

double lifespan(Complex z0, double kappa, double t_max, int steps) {
    FlowParams p{kappa, t_max};
    OdeTrajectory traj = integrate_flow(z0, p, steps);
    return traj.lifespan;
}

std::vector<double> pde_coefficient_residual(const FlowParams& p, int n_max) {
    p.validate();
    if (n_max < 1 || n_max > 10)
        throw loewner_error("pde_coefficient_residual: n_max must lie in [1,10]");
    const double fd = 1e-4;
    double t_lo = std::max(p.t - fd, 0.0);
    double t_hi = p.t + fd;
    std::vector<double> u_hi = unitary_moments({p.kappa, t_hi}, n_max);
    std::vector<double> u_lo = unitary_moments({p.kappa, t_lo}, n_max);
    std::vector<long double> b(n_max + 1);
    b[0] = 1.0L;
    for (int k = 1; k <= n_max; ++k) b[k] = 0.5L * flow_coeff(k, p);
    std::vector<double> res(n_max);
    for (int n = 1; n <= n_max; ++n) {
        double du = (u_hi[n - 1] - u_lo[n - 1]) / (t_hi - t_lo);
        long double conv = 0.0L;
        for (int k = 1; k <= n; ++k) conv += b[k] * b[n - k];
        res[n - 1] = std::abs(du + (double)(n * conv));
    }
    return res;
}

Complex h_eval_ode(Complex z, const FlowParams& p, int steps) {
    p.validate();
    if (std::abs(z) >= 1.0) throw loewner_error("h_eval_ode: z must lie in the open disc");
    if (p.t == 0.0) return herglotz_h0(z);
    const double kappa2 = p.kappa * p.kappa;
    const double h = p.t / steps;
    // backward integration of the pair from (z, hT); G(hT) = h(0) - H_0(psi(0))
    auto shoot = [&](Complex hT) -> std::optional<Complex> {
        State s{z, hT};
        for (int i = 0; i < steps; ++i) {
            State nx;
            if (!rk4_step(s, -h, kappa2, nx)) return std::nullopt;
            s = nx;
        }
        return s.h - herglotz_h0(s.psi);
    };
    auto res_of = [&](std::optional<Complex> v) {
        return v ? std::abs(*v) : std::numeric_limits<double>::infinity();
    };
    Complex hT = herglotz_h0(z);  // kappa = 0 would be exact
    for (int it = 0; it < 60; ++it) {
        std::optional<Complex> F = shoot(hT);
        if (!F) throw loewner_error("h_eval_ode: backward trajectory escaped the disc");
        if (std::abs(*F) < 1e-12) return hT;
        // complex secant via numerical derivative (G is analytic in hT)
        const double dh = 1e-7;
        std::optional<Complex> Fp = shoot(hT + Complex(dh, 0.0));
        if (!Fp) throw loewner_error("h_eval_ode: derivative probe escaped the disc");
        Complex dF = (*Fp - *F) / dh;
        if (std::abs(dF) < 1e-280) break;
        Complex step = *F / dF;
        double lam = 1.0;
        for (int d = 0; d < 20; ++d) {
            if (res_of(shoot(hT - lam * step)) < std::abs(*F)) break;
            lam *= 0.5;
        }
        hT -= lam * step;
    }
    double final_res = res_of(shoot(hT));
    if (final_res > 1e-9)
        throw loewner_error("h_eval_ode: shooting failed, residual " + std::to_string(final_res));
    return hT;
}

std::vector<double> unitary_moments_ode(const FlowParams& p, int n_max, double rho,
                                        int circle_points) {
    p.validate();
    if (n_max < 1) throw loewner_error("unitary_moments_ode: n_max must be >= 1");
    if (!(rho > 0.0 && rho < 1.0)) throw loewner_error("unitary_moments_ode: rho must lie in (0,1)");
    const int M = circle_points;
    std::vector<Complex> vals(M);
    for (int j = 0; j < M; ++j)
        vals[j] = h_eval_ode(std::polar(rho, 2.0 * M_PI * j / M), p);
    std::vector<double> out(n_max);
    for (int n = 1; n <= n_max; ++n) {
        Complex c{0.0, 0.0};
        for (int j = 0; j < M; ++j)
            c += vals[j] * std::polar(1.0, -2.0 * M_PI * j * n / M);
        c /= (double)M;
        out[n - 1] = 0.5 * c.real() / std::pow(rho, n);  // H = 1 + 2 sum tau_n z^n
    }
    return out;
}

}  // namespace fjp
