#include "fjp/rmt.hpp"

#include <atomic>
#include <cmath>
#include <functional>
#include <random>
#include <thread>

#ifdef FJP_USE_LAPACKE
#include <lapacke.h>
extern "C" void openblas_set_num_threads(int);
#endif

namespace fjp {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Hermitian increment with E[X^2] = I: off-diagonal complex variance 1/N,
// real diagonal variance 1/N
Eigen::MatrixXcd gue_increment(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> g;
    Eigen::MatrixXcd x(n, n);
    const double od = 1.0 / std::sqrt(2.0 * n);
    const double dg = 1.0 / std::sqrt((double)n);
    for (int i = 0; i < n; ++i) {
        x(i, i) = dg * g(rng);
        for (int j = i + 1; j < n; ++j) {
            std::complex<double> v(od * g(rng), od * g(rng));
            x(i, j) = v;
            x(j, i) = std::conj(v);
        }
    }
    return x;
}

// y <- y * exp(i s X) for Hermitian X, via X = V D V*: two dense products
// (y V) and ((y V) e^{isD}) V* instead of forming the exponential
void apply_herm_exp(Eigen::MatrixXcd& y, const Eigen::MatrixXcd& x, double s) {
    const int n = (int)x.rows();
    Eigen::MatrixXcd v;
    Eigen::VectorXd w(n);
#ifdef FJP_USE_LAPACKE
    v = x;
    int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', n,
                              reinterpret_cast<lapack_complex_double*>(v.data()), n, w.data());
    if (info != 0) throw rmt_error("zheevd failed, info = " + std::to_string(info));
#else
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(x);
    v = es.eigenvectors();
    w = es.eigenvalues();
#endif
    Eigen::MatrixXcd yv = y * v;
    for (int i = 0; i < n; ++i) yv.col(i) *= std::polar(1.0, s * w(i));
    y.noalias() = yv * v.adjoint();
}

// Newton-Schulz polar correction; Y is already within ~1e-12 of unitary
void polar_correct(Eigen::MatrixXcd& y) {
    const int n = (int)y.rows();
    for (int it = 0; it < 3; ++it) {
        Eigen::MatrixXcd g = y.adjoint() * y;
        double defect = (g - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
        if (defect < 1e-14) return;
        y = 0.5 * y * (3.0 * Eigen::MatrixXcd::Identity(n, n) - g);
    }
}

double unitarity_defect(const Eigen::MatrixXcd& y) {
    const int n = (int)y.rows();
    return (y.adjoint() * y - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
}

// evolve one trial from time t0 (state y) to time t1
void evolve(Eigen::MatrixXcd& y, std::mt19937_64& rng, double t0, double t1, double dt,
            long& step_counter) {
    const double span = t1 - t0;
    if (span <= 0.0) return;
    const int steps = std::max(1, (int)std::llround(span / dt));
    const double h = span / steps;
    const double s = std::sqrt(h);
    const int n = (int)y.rows();
    for (int k = 0; k < steps; ++k) {
        apply_herm_exp(y, gue_increment(rng, n), s);
        if (++step_counter % 50 == 0) polar_correct(y);
    }
}

struct TrialState {
    Eigen::MatrixXcd y;
    std::mt19937_64 rng;
    long steps = 0;
};

int worker_count(const SimConfig& cfg) {
    int hw = (int)std::thread::hardware_concurrency();
    if (hw <= 0) hw = 1;
    int w = cfg.max_threads > 0 ? std::min(cfg.max_threads, hw) : hw;
    return std::min(w, cfg.trials);
}

void for_each_trial(const SimConfig& cfg, std::vector<TrialState>& states,
                    const std::function<void(TrialState&)>& fn) {
    const int workers = worker_count(cfg);
#ifdef FJP_USE_LAPACKE
    openblas_set_num_threads(1);  // trials are the parallel axis
#endif
    if (workers <= 1) {
        for (auto& s : states) fn(s);
        return;
    }
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (;;) {
                size_t i = next.fetch_add(1);
                if (i >= states.size()) return;
                fn(states[i]);
            }
        });
    for (auto& th : pool) th.join();
}

struct MomentAccum {
    std::vector<double> u_sum, u_sq, j_sum, j_sq;
    double binom_res = 0.0, imag_res = 0.0, unit_defect = 0.0;
};

// per-trial moment extraction; binomial identity checked on the same sample
void accumulate(const Eigen::MatrixXcd& y, const SimConfig& cfg, int rank, MomentAccum& acc,
                std::vector<double>& u_out, std::vector<double>& j_out) {
    const int n = (int)y.rows();
    Eigen::MatrixXcd sys = y;  // S Y S with S = diag(+1 x rank, -1 x (n-rank))
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if ((i < rank) != (j < rank)) sys(i, j) = -sys(i, j);
    Eigen::MatrixXcd u = sys * y.adjoint();
    Eigen::MatrixXcd upow = Eigen::MatrixXcd::Identity(n, n);
    u_out.assign(cfg.n_max, 0.0);
    std::vector<std::complex<double>> u_cplx(cfg.n_max);
    for (int k = 1; k <= cfg.n_max; ++k) {
        upow = upow * u;
        std::complex<double> tr = upow.trace() / (double)n;
        u_cplx[k - 1] = tr;
        u_out[k - 1] = tr.real();
        acc.imag_res = std::max(acc.imag_res, std::abs(tr.imag()));
    }
    Eigen::MatrixXcd y11 = y.topLeftCorner(rank, rank);
    Eigen::MatrixXcd gram = y11 * y11.adjoint();
    Eigen::MatrixXcd gpow = Eigen::MatrixXcd::Identity(rank, rank);
    j_out.assign(cfg.n_max, 0.0);
    for (int k = 1; k <= cfg.n_max; ++k) {
        gpow = gpow * gram;
        j_out[k - 1] = gpow.trace().real() / (double)rank;
    }
    // finite-N binomial identity between the families (exact algebra)
    const double kappa_n = (2.0 * rank - n) / (double)n;
    for (int m = 1; m <= cfg.n_max; ++m) {
        // (1/N) tr (P Y P Y*)^m = (rank/N) j_m
        double lhs = j_out[m - 1] * rank / (double)n;
        double rhs = jacobi_from_unitary(m, kappa_n, u_out) * (1.0 + kappa_n) / 2.0;
        acc.binom_res = std::max(acc.binom_res, std::abs(lhs - rhs));
    }
}

}  // namespace

int SimConfig::projection_rank() const {
    return (int)std::llround(matrix_size * (1.0 + kappa) / 2.0);
}

void SimConfig::validate() const {
    if (matrix_size < 2) throw rmt_error("SimConfig: matrix_size must be >= 2");
    detail::check_kappa(kappa);
    if (!(t >= 0.0)) throw rmt_error("SimConfig: t must be >= 0");
    if (!(dt > 0.0 && dt <= 0.05)) throw rmt_error("SimConfig: dt must lie in (0, 0.05]");
    if (trials < 1) throw rmt_error("SimConfig: trials must be >= 1");
    if (n_max < 1) throw rmt_error("SimConfig: n_max must be >= 1");
    int r = projection_rank();
    if (r < 1 || r > matrix_size - 1)
        throw rmt_error("SimConfig: projection rank " + std::to_string(r) + " outside [1, N-1]");
}

std::vector<Eigen::MatrixXcd> sample_unitary_bm(const SimConfig& cfg) {
    cfg.validate();
    std::vector<TrialState> states(cfg.trials);
    for (int i = 0; i < cfg.trials; ++i) {
        states[i].y = Eigen::MatrixXcd::Identity(cfg.matrix_size, cfg.matrix_size);
        states[i].rng.seed(splitmix64(cfg.seed ^ (0x5851f42d4c957f2dULL * (std::uint64_t)(i + 1))));
    }
    for_each_trial(cfg, states, [&](TrialState& s) {
        evolve(s.y, s.rng, 0.0, cfg.t, cfg.dt, s.steps);
        polar_correct(s.y);
        if (unitarity_defect(s.y) > 1e-10)
            throw rmt_error("sample_unitary_bm: unitarity drift beyond 1e-10");
    });
    std::vector<Eigen::MatrixXcd> out;
    out.reserve(cfg.trials);
    for (auto& s : states) out.push_back(std::move(s.y));
    return out;
}

std::vector<EmpiricalMoments> empirical_moments_sweep(const SimConfig& cfg,
                                                      const std::vector<double>& times) {
    cfg.validate();
    for (size_t i = 1; i < times.size(); ++i)
        if (times[i] <= times[i - 1]) throw rmt_error("empirical_moments_sweep: times must increase");
    std::vector<TrialState> states(cfg.trials);
    for (int i = 0; i < cfg.trials; ++i) {
        states[i].y = Eigen::MatrixXcd::Identity(cfg.matrix_size, cfg.matrix_size);
        states[i].rng.seed(splitmix64(cfg.seed ^ (0x5851f42d4c957f2dULL * (std::uint64_t)(i + 1))));
    }
    const int rank = cfg.projection_rank();
    std::vector<EmpiricalMoments> results;
    std::vector<std::vector<double>> u_tr(cfg.trials), j_tr(cfg.trials);
    std::vector<MomentAccum> accs(cfg.trials);
    double t_prev = 0.0;
    for (double tcur : times) {
        for (auto& a : accs) a = MomentAccum{};
        for_each_trial(cfg, states, [&](TrialState& s) {
            size_t idx = (size_t)(&s - states.data());
            evolve(s.y, s.rng, t_prev, tcur, cfg.dt, s.steps);
            polar_correct(s.y);
            accs[idx].unit_defect = std::max(accs[idx].unit_defect, unitarity_defect(s.y));
            accumulate(s.y, cfg, rank, accs[idx], u_tr[idx], j_tr[idx]);
        });
        t_prev = tcur;
        EmpiricalMoments em;
        em.table.params = FlowParams{cfg.kappa, tcur};
        em.table.n_max = cfg.n_max;
        em.table.source = MomentSource::monte_carlo;
        em.table.u_moments.assign(cfg.n_max, 0.0);
        em.table.j_moments.assign(cfg.n_max, 0.0);
        em.table.u_stderr.assign(cfg.n_max, 0.0);
        em.table.j_stderr.assign(cfg.n_max, 0.0);
        em.max_binom_residual = em.max_imag_residue = em.max_unitarity_defect = 0.0;
        for (int i = 0; i < cfg.trials; ++i) {
            for (int k = 0; k < cfg.n_max; ++k) {
                em.table.u_moments[k] += u_tr[i][k];
                em.table.j_moments[k] += j_tr[i][k];
                em.table.u_stderr[k] += u_tr[i][k] * u_tr[i][k];
                em.table.j_stderr[k] += j_tr[i][k] * j_tr[i][k];
            }
            em.max_binom_residual = std::max(em.max_binom_residual, accs[i].binom_res);
            em.max_imag_residue = std::max(em.max_imag_residue, accs[i].imag_res);
            em.max_unitarity_defect = std::max(em.max_unitarity_defect, accs[i].unit_defect);
        }
        const double nt = cfg.trials;
        for (int k = 0; k < cfg.n_max; ++k) {
            double mu = em.table.u_moments[k] / nt;
            double mj = em.table.j_moments[k] / nt;
            double vu = std::max(0.0, em.table.u_stderr[k] / nt - mu * mu);
            double vj = std::max(0.0, em.table.j_stderr[k] / nt - mj * mj);
            em.table.u_moments[k] = mu;
            em.table.j_moments[k] = mj;
            em.table.u_stderr[k] = cfg.trials > 1 ? std::sqrt(vu / (nt - 1)) : 0.0;
            em.table.j_stderr[k] = cfg.trials > 1 ? std::sqrt(vj / (nt - 1)) : 0.0;
        }
        results.push_back(std::move(em));
    }
    return results;
}

EmpiricalMoments empirical_moments_detailed(const SimConfig& cfg) {
    cfg.validate();
    return empirical_moments_sweep(cfg, {cfg.t}).front();
}

MomentTable empirical_moments(const SimConfig& cfg) {
    return empirical_moments_detailed(cfg).table;
}

}  // namespace fjp
