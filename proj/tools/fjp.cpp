// Command-line front door: moment tables, spectral densities, boundary data
// and the verification suites, exported as CSV/JSON with embedded manifests.
#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "fjp/herglotz.hpp"
#include "fjp/loewner.hpp"
#include "fjp/manifest.hpp"
#include "fjp/moments.hpp"
#include "fjp/rmt.hpp"
#include "fjp/verify.hpp"

namespace {

using nlohmann::json;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file: " + path);
    f << content;
}

struct MomentsArgs {
    double kappa = 0.0, t = 1.0;
    int n_max = 8;
    std::string sources = "formula";
    std::string output = "moments.csv";
    double tol = 1e-5;
    std::uint64_t seed = 7;
    int trials = 20, N = 512;
    double dt = 0.01;
    int threads = 0;
};

int cmd_moments(const MomentsArgs& a) {
    fjp::FlowParams p{a.kappa, a.t};
    std::vector<std::string> sources;
    {
        std::stringstream ss(a.sources);
        std::string s;
        while (std::getline(ss, s, ',')) sources.push_back(s);
    }
    std::vector<std::pair<std::string, fjp::MomentTable>> tables;
    for (const auto& s : sources) {
        if (s == "formula") {
            tables.emplace_back(s, fjp::moment_table_formula(p, a.n_max));
        } else if (s == "reversion") {
            tables.emplace_back(s, fjp::moment_table_reversion(p, a.n_max));
        } else if (s == "ode") {
            fjp::MomentTable t;
            t.params = p;
            t.n_max = a.n_max;
            t.source = fjp::MomentSource::ode_oracle;
            t.u_moments = fjp::unitary_moments_ode(p, a.n_max);
            t.j_moments.resize(a.n_max);
            for (int n = 1; n <= a.n_max; ++n)
                t.j_moments[n - 1] = fjp::jacobi_from_unitary(n, p.kappa, t.u_moments);
            tables.emplace_back(s, std::move(t));
        } else if (s == "mc") {
            fjp::SimConfig cfg;
            cfg.matrix_size = a.N;
            cfg.kappa = a.kappa;
            cfg.t = a.t;
            cfg.dt = a.dt;
            cfg.trials = a.trials;
            cfg.seed = a.seed;
            cfg.n_max = a.n_max;
            cfg.max_threads = a.threads;
            tables.emplace_back(s, fjp::empirical_moments(cfg));
        } else {
            std::cerr << "unknown source: " << s << "\n";
            return 2;
        }
    }

    fjp::RunManifest man;
    man.command = "moments";
    man.params = {{"kappa", a.kappa}, {"t", a.t},       {"n_max", a.n_max},
                  {"sources", a.sources}, {"tol", a.tol}, {"N", a.N},
                  {"trials", a.trials},   {"dt", a.dt}};
    man.seed = a.seed;
    man.timestamp = fjp::RunManifest::now_utc();

    std::ostringstream out;
    out << man.csv_header() << "\n";
    out << "n";
    for (auto& [name, tbl] : tables) out << ",u_" << name << ",j_" << name;
    out << "\n";
    for (int n = 1; n <= a.n_max; ++n) {
        out << n;
        for (auto& [name, tbl] : tables)
            out << "," << fmt(tbl.u_moments[n - 1]) << "," << fmt(tbl.j_moments[n - 1]);
        out << "\n";
    }
    // pairwise max discrepancy summary (Monte Carlo compared at 3 sigma +
    // finite-size allowance, analytic sources at the configured tolerance)
    double worst = 0.0;
    bool fail = false;
    for (size_t i = 0; i < tables.size(); ++i)
        for (size_t j = i + 1; j < tables.size(); ++j) {
            double d = 0.0;
            bool has_mc = tables[i].second.source == fjp::MomentSource::monte_carlo ||
                          tables[j].second.source == fjp::MomentSource::monte_carlo;
            for (int n = 1; n <= a.n_max; ++n) {
                double du = std::abs(tables[i].second.u_moments[n - 1] -
                                     tables[j].second.u_moments[n - 1]);
                double dj = std::abs(tables[i].second.j_moments[n - 1] -
                                     tables[j].second.j_moments[n - 1]);
                d = std::max({d, du, dj});
                if (has_mc) {
                    const auto& mc = tables[i].second.source == fjp::MomentSource::monte_carlo
                                         ? tables[i].second
                                         : tables[j].second;
                    double su = 3.0 * (mc.u_stderr[n - 1] + 1.5 / a.N);
                    double sj = 3.0 * (mc.j_stderr[n - 1] + 1.5 / a.N);
                    if (du > su || dj > sj) fail = true;
                } else if (du > a.tol || dj > a.tol) {
                    fail = true;
                }
            }
            out << "# max_discrepancy," << tables[i].first << "," << tables[j].first << ","
                << fmt(d) << "\n";
            worst = std::max(worst, d);
        }
    write_file(a.output, out.str());
    std::cout << "wrote " << a.output << " (max cross-source discrepancy " << fmt(worst) << ")\n";
    return fail ? 1 : 0;
}

struct DensityArgs {
    double kappa = 0.0, t = 1.0, r = 0.999;
    int grid = 256;
    std::string measure = "nu";
    double zeta_theta = 0.0;
    std::string output = "density.csv";
};

int cmd_density(const DensityArgs& a) {
    fjp::SpectralMeasureEstimate est;
    if (a.measure == "nu")
        est = fjp::density_nu({a.kappa, a.t}, a.grid, a.r);
    else if (a.measure == "clark")
        est = fjp::density_clark({a.kappa, a.t}, std::polar(1.0, a.zeta_theta), a.grid, a.r);
    else if (a.measure == "stationary")
        est = fjp::stationary_measure(a.kappa, a.grid);
    else {
        std::cerr << "unknown measure: " << a.measure << "\n";
        return 2;
    }
    fjp::RunManifest man;
    man.command = "density";
    man.params = {{"kappa", a.kappa}, {"t", a.t},           {"grid", a.grid},
                  {"r", a.r},         {"measure", a.measure}, {"zeta_theta", a.zeta_theta}};
    man.timestamp = fjp::RunManifest::now_utc();
    std::ostringstream out;
    out << man.csv_header() << "\n";
    out << "theta,density\n";
    for (size_t i = 0; i < est.grid.size(); ++i)
        out << fmt(est.grid[i]) << "," << fmt(est.density[i]) << "\n";
    out << "# atom_at_one," << fmt(est.atom_at_one) << "\n";
    out << "# atom_at_minus_one," << fmt(est.atom_at_minus_one) << "\n";
    out << "# total_mass," << fmt(est.total_mass()) << "\n";
    write_file(a.output, out.str());
    std::cout << "wrote " << a.output << " (atom at 1: " << fmt(est.atom_at_one)
              << ", total mass: " << fmt(est.total_mass()) << ")\n";
    return 0;
}

struct BoundaryArgs {
    double kappa = 0.0, t = 1.0;
    int rays = 64;
    std::string output = "boundary.json";
};

int cmd_boundary(const BoundaryArgs& a) {
    fjp::FlowParams p{a.kappa, a.t};
    json rep;
    fjp::RunManifest man;
    man.command = "boundary";
    man.params = {{"kappa", a.kappa}, {"t", a.t}, {"rays", a.rays}};
    man.timestamp = fjp::RunManifest::now_utc();
    rep["manifest"] = man.to_json();
    double z = fjp::solve_z_right(p);
    rep["z_right"] = z;
    {
        double ar = fjp::solve_a_right(p);
        double res = std::abs(fjp::xi(ar, p.t).real() -
                              (ar - std::abs(p.kappa)) / (ar + std::abs(p.kappa)));
        rep["z_right_residual"] = res;
        rep["psi_at_z_right"] = std::abs(fjp::psi({z, 0.0}, p) - fjp::Complex(1.0, 0.0));
    }
    if (p.t > 0.0) {
        double b = fjp::solve_b(p.t);
        rep["b"] = b;
        rep["b_residual"] = std::abs(fjp::xi(b, p.t).real() - 1.0);
        double A = fjp::strip_bound(p.t);
        rep["strip_bound"] = A;
    }
    if (p.t > 2.0) {
        double d = fjp::solve_d(p.t);
        rep["d"] = d;
        rep["d_residual"] = std::abs(fjp::xi(d, p.t).real() + 1.0);
    }
    auto pts = fjp::trace_boundary(p, a.rays);
    double min_dist = 2.0;
    json arr = json::array();
    for (auto w : pts) {
        arr.push_back({{"re", w.real()}, {"im", w.imag()}});
        min_dist = std::min(min_dist, std::abs(1.0 - w));
    }
    rep["boundary_points"] = arr;
    rep["min_distance_to_one"] = min_dist;
    write_file(a.output, rep.dump(2) + "\n");
    std::cout << "wrote " << a.output << " (z_right " << fmt(z) << ", min |1-w| " << fmt(min_dist)
              << ")\n";
    return 0;
}

struct VerifyArgs {
    std::string level = "quick";
    std::uint64_t seed = 7;
    int threads = 0;
    double mutate_cn = 0.0;
    std::string output;
};

int cmd_verify(const VerifyArgs& a) {
    fjp::VerifyOptions opt;
    opt.level = a.level == "full" ? fjp::VerifyLevel::full : fjp::VerifyLevel::quick;
    opt.seed = a.seed;
    opt.max_threads = a.threads;
    opt.mutate_flow_coeff = a.mutate_cn;
    auto results = fjp::run_verification(opt);
    json rep;
    fjp::RunManifest man;
    man.command = "verify";
    man.params = {{"level", a.level}};
    man.seed = a.seed;
    man.timestamp = fjp::RunManifest::now_utc();
    rep["manifest"] = man.to_json();
    bool all = true;
    json arr = json::array();
    for (const auto& r : results) {
        arr.push_back({{"name", r.name},
                       {"passed", r.passed},
                       {"measured", r.measured},
                       {"threshold", r.threshold},
                       {"detail", r.detail}});
        all = all && r.passed;
        std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << "  measured=" << fmt(r.measured)
                  << " threshold=" << fmt(r.threshold) << "\n";
    }
    rep["checks"] = arr;
    rep["all_passed"] = all;
    if (!a.output.empty()) write_file(a.output, rep.dump(2) + "\n");
    return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"free Jacobi process spectral toolkit"};
    app.require_subcommand(1);

    MomentsArgs ma;
    auto* m = app.add_subcommand("moments", "moment tables tau(U^n), tau(J^n)/tau(P)");
    m->add_option("--kappa", ma.kappa, "kappa in (-1,1)")->required();
    m->add_option("--t", ma.t, "process time");
    m->add_option("--n-max", ma.n_max, "highest moment order");
    m->add_option("--sources", ma.sources, "comma list of formula,reversion,ode,mc");
    m->add_option("--tol", ma.tol, "cross-source discrepancy tolerance");
    m->add_option("--seed", ma.seed, "Monte Carlo seed");
    m->add_option("--trials", ma.trials, "Monte Carlo trials");
    m->add_option("--N", ma.N, "Monte Carlo matrix size");
    m->add_option("--dt", ma.dt, "Monte Carlo time step");
    m->add_option("--threads", ma.threads, "worker cap (0 = hardware)");
    m->add_option("-o,--output", ma.output, "output CSV path");

    DensityArgs da;
    auto* d = app.add_subcommand("density", "spectral density and atoms");
    d->add_option("--kappa", da.kappa, "kappa in (-1,1)")->required();
    d->add_option("--t", da.t, "process time");
    d->add_option("--grid", da.grid, "angle grid size");
    d->add_option("--r", da.r, "evaluation radius in (0.9,1)");
    d->add_option("--measure", da.measure, "nu | clark | stationary");
    d->add_option("--zeta-theta", da.zeta_theta, "angle of zeta for clark");
    d->add_option("-o,--output", da.output, "output CSV path");

    BoundaryArgs ba;
    auto* b = app.add_subcommand("boundary", "flow boundary quantities");
    b->add_option("--kappa", ba.kappa, "kappa in (-1,1)")->required();
    b->add_option("--t", ba.t, "process time");
    b->add_option("--rays", ba.rays, "boundary trace rays");
    b->add_option("-o,--output", ba.output, "output JSON path");

    VerifyArgs va;
    auto* v = app.add_subcommand("verify", "run the invariant suites");
    v->add_option("--level", va.level, "quick | full");
    v->add_option("--seed", va.seed, "suite seed");
    v->add_option("--threads", va.threads, "worker cap (0 = hardware)");
    v->add_option("-o,--output", va.output, "optional JSON report path");
    v->add_option("--mutate-cn", va.mutate_cn, "test hook: perturb c_n by this amount")
        ->group("");  // hidden

    CLI11_PARSE(app, argc, argv);
    try {
        if (m->parsed()) return cmd_moments(ma);
        if (d->parsed()) return cmd_density(da);
        if (b->parsed()) return cmd_boundary(ba);
        if (v->parsed()) return cmd_verify(va);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
