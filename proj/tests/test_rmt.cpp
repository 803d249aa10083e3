#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fjp/rmt.hpp"

using namespace fjp;
using doctest::Approx;

namespace {
SimConfig base_config() {
    SimConfig cfg;
    cfg.matrix_size = 32;
    cfg.kappa = 0.5;
    cfg.t = 0.5;
    cfg.dt = 0.01;
    cfg.trials = 4;
    cfg.seed = 42;
    cfg.n_max = 4;
    return cfg;
}
}  // namespace

TEST_CASE("config validation") {
    SimConfig cfg = base_config();
    CHECK(cfg.projection_rank() == 24);
    cfg.validate();
    SimConfig bad = cfg;
    bad.dt = 0.2;
    CHECK_THROWS_AS(bad.validate(), rmt_error);
    bad = cfg;
    bad.kappa = 0.999;  // rank N at N=32
    CHECK_THROWS_AS(bad.validate(), rmt_error);
    bad = cfg;
    bad.matrix_size = 1;
    CHECK_THROWS_AS(bad.validate(), rmt_error);
}

TEST_CASE("t = 0 gives exact moments") {
    SimConfig cfg = base_config();
    cfg.t = 0.0;
    MomentTable t = empirical_moments(cfg);
    for (int n = 0; n < cfg.n_max; ++n) {
        CHECK(t.u_moments[n] == 1.0);
        CHECK(t.j_moments[n] == 1.0);
    }
}

TEST_CASE("unitarity is preserved") {
    SimConfig cfg = base_config();
    cfg.matrix_size = 64;
    cfg.t = 1.0;
    auto ys = sample_unitary_bm(cfg);
    REQUIRE((int)ys.size() == cfg.trials);
    for (const auto& y : ys) {
        double defect = (y.adjoint() * y - Eigen::MatrixXcd::Identity(64, 64)).cwiseAbs().maxCoeff();
        CHECK(defect < 1e-8);
    }
}

TEST_CASE("free unitary BM first moment drift") {
    SimConfig cfg = base_config();
    cfg.matrix_size = 192;
    cfg.kappa = 0.0;
    cfg.t = 1.0;
    cfg.trials = 12;
    auto ys = sample_unitary_bm(cfg);
    double mean = 0.0;
    for (const auto& y : ys) mean += y.trace().real() / cfg.matrix_size;
    mean /= cfg.trials;
    CHECK(mean == Approx(std::exp(-0.5)).epsilon(0.04));  // e^{-t/2} within MC noise
}

TEST_CASE("finite-N binomial identity is exact on the samples") {
    for (double kappa : {0.0, 0.5, -0.25}) {
        SimConfig cfg = base_config();
        cfg.kappa = kappa;
        EmpiricalMoments em = empirical_moments_detailed(cfg);
        CHECK(em.max_binom_residual < 1e-10);
        CHECK(em.max_unitarity_defect < 1e-10);
        CHECK(em.max_imag_residue < 10.0 / cfg.matrix_size);
    }
}

TEST_CASE("empirical moments approach the formula values") {
    SimConfig cfg = base_config();
    cfg.matrix_size = 128;
    cfg.kappa = 0.6;
    cfg.t = 1.0;
    cfg.trials = 12;
    cfg.n_max = 2;
    EmpiricalMoments em = empirical_moments_detailed(cfg);
    MomentTable ref = moment_table_formula({0.6, 1.0}, 2);
    const double allowance = 1.5 / cfg.matrix_size;
    for (int n = 0; n < 2; ++n) {
        CHECK(std::abs(em.table.u_moments[n] - ref.u_moments[n]) <
              3.0 * (em.table.u_stderr[n] + allowance));
        CHECK(std::abs(em.table.j_moments[n] - ref.j_moments[n]) <
              3.0 * (em.table.j_stderr[n] + allowance));
    }
}

TEST_CASE("seeded runs are bit-reproducible and thread-count independent") {
    SimConfig cfg = base_config();
    MomentTable a = empirical_moments(cfg);
    MomentTable b = empirical_moments(cfg);
    for (int n = 0; n < cfg.n_max; ++n) {
        CHECK(a.u_moments[n] == b.u_moments[n]);
        CHECK(a.j_moments[n] == b.j_moments[n]);
    }
    SimConfig cfg1 = cfg;
    cfg1.max_threads = 1;
    MomentTable c = empirical_moments(cfg1);
    for (int n = 0; n < cfg.n_max; ++n) CHECK(a.u_moments[n] == c.u_moments[n]);
    SimConfig cfg2 = cfg;
    cfg2.seed = 43;
    MomentTable d = empirical_moments(cfg2);
    bool differs = false;
    for (int n = 0; n < cfg.n_max; ++n) differs = differs || a.u_moments[n] != d.u_moments[n];
    CHECK(differs);
}

TEST_CASE("time sweep reuses trajectories consistently") {
    SimConfig cfg = base_config();
    auto sweep = empirical_moments_sweep(cfg, {0.25, 0.5});
    REQUIRE(sweep.size() == 2);
    CHECK(sweep[0].table.params.t == 0.25);
    CHECK(sweep[1].table.params.t == 0.5);
    // the t = 0.5 leg of the sweep sees the same increments as a direct run
    // (only the mid-sweep polar correction differs, at ~1e-14)
    MomentTable direct = empirical_moments(cfg);
    for (int n = 0; n < cfg.n_max; ++n)
        CHECK(sweep[1].table.u_moments[n] == Approx(direct.u_moments[n]).epsilon(1e-9));
}
