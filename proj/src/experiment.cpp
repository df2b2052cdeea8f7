#include "hdgauss/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "hdgauss/bootstrap.hpp"
#include "hdgauss/bounds.hpp"
#include "hdgauss/distance.hpp"
#include "hdgauss/gauss_ball.hpp"
#include "hdgauss/parallel.hpp"
#include "hdgauss/rate_fit.hpp"
#include "json.hpp"

namespace hdgauss {

namespace {

// 17 significant digits for bit-stable CSV round trips.
std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct CsvWriter {
    explicit CsvWriter(const std::string& path) : out(path, std::ios::binary) {
        if (!out) throw std::runtime_error("cannot open " + path);
    }
    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out << ",";
            out << cells[i];
        }
        out << "\n";
    }
    std::ofstream out;
};

std::vector<double> sample_wsq(const DgpSpec& spec, std::size_t m, unsigned workers, std::uint64_t seed) {
    const CounterRng base(seed);
    return run_replicated<double>(m, workers, base, [&](std::size_t, const CounterRng& key) {
        std::vector<double> w(spec.d);
        sample_w(spec, key, w);
        double nsq = 0.0;
        for (double v : w) nsq += v * v;
        return nsq;
    });
}

// Minimal SVG log-log chart: one polyline per series over shared axes.
void write_svg(const std::string& path, const std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>>& series,
               const std::string& x_label, const std::string& y_label) {
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& [name, pts] : series)
        for (const auto& [x, y] : pts) {
            if (x <= 0.0 || y <= 0.0) continue;
            xmin = std::min(xmin, std::log10(x));
            xmax = std::max(xmax, std::log10(x));
            ymin = std::min(ymin, std::log10(y));
            ymax = std::max(ymax, std::log10(y));
        }
    if (xmin >= xmax) xmax = xmin + 1.0;
    if (ymin >= ymax) ymax = ymin + 1.0;
    const double w = 640.0, h = 440.0, ml = 70.0, mr = 20.0, mt = 20.0, mb = 50.0;
    auto px = [&](double lx) { return ml + (lx - xmin) / (xmax - xmin) * (w - ml - mr); };
    auto py = [&](double ly) { return h - mb - (ly - ymin) / (ymax - ymin) * (h - mt - mb); };
    const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
    std::ofstream out(path);
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='" << h << "'>\n";
    out << "<rect width='100%' height='100%' fill='white'/>\n";
    out << "<line x1='" << ml << "' y1='" << h - mb << "' x2='" << w - mr << "' y2='" << h - mb
        << "' stroke='black'/>\n";
    out << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='" << h - mb << "' stroke='black'/>\n";
    out << "<text x='" << (ml + w - mr) / 2 << "' y='" << h - 12 << "' text-anchor='middle' font-size='13'>"
        << x_label << " (log10)</text>\n";
    out << "<text x='16' y='" << (mt + h - mb) / 2 << "' text-anchor='middle' font-size='13' transform='rotate(-90 16 "
        << (mt + h - mb) / 2 << ")'>" << y_label << " (log10)</text>\n";
    int ci = 0;
    double legend_y = mt + 14.0;
    for (const auto& [name, pts] : series) {
        const char* color = colors[ci++ % 4];
        out << "<polyline fill='none' stroke='" << color << "' stroke-width='1.5' points='";
        for (const auto& [x, y] : pts)
            if (x > 0.0 && y > 0.0) out << px(std::log10(x)) << "," << py(std::log10(y)) << " ";
        out << "'/>\n";
        for (const auto& [x, y] : pts)
            if (x > 0.0 && y > 0.0)
                out << "<circle cx='" << px(std::log10(x)) << "' cy='" << py(std::log10(y))
                    << "' r='2.5' fill='" << color << "'/>\n";
        out << "<text x='" << w - mr - 8 << "' y='" << legend_y << "' text-anchor='end' font-size='12' fill='"
            << color << "'>" << name << "</text>\n";
        legend_y += 16.0;
    }
    out << "</svg>\n";
}

struct GridDistances {
    std::vector<std::size_t> n, d;
    std::vector<double> dist, stderr_, rhs;
};

GridDistances run_distance_grid(const ExperimentConfig& cfg, unsigned workers) {
    GridDistances g;
    for (const auto& [n, d] : cfg.grid) {
        DgpSpec spec = cfg.dgp;
        spec.n = n;
        spec.d = d;
        const std::vector<double> wsq = sample_wsq(spec, cfg.mc_samples, workers, cfg.seed);
        const DistanceEstimate est =
            ks_ball_distance(wsq, [d = d](double t) { return chi2_cdf(d, t); });
        g.n.push_back(n);
        g.d.push_back(d);
        g.dist.push_back(est.value);
        g.stderr_.push_back(est.stderr_);
        g.rhs.push_back(rhs_cor3(n, d));
    }
    return g;
}

void run_bound_report(const ExperimentConfig& cfg, const std::string& out_dir, CsvWriter& csv) {
    csv.row({"n", "d", "deltaA", "deltaB", "delta0", "delta0p", "delta1", "delta2", "rhsConvex", "rhsBall",
             "rhsBall2", "rhsCor3", "rhsMdep", "deltaStar", "deltaCirc"});
    for (const auto& [n, d] : cfg.grid) {
        DgpSpec spec = cfg.dgp;
        spec.n = n;
        spec.d = d;
        const Dataset data = sample(spec, cfg.seed);
        const SymMatrix sigma = SymMatrix::identity(d);
        const SpectralSummary sigma_spec = sym_eigen(sigma);

        const MomentSummary mom = estimate_moments(data);
        const CovInfo cov = estimate_cov_info(data, sigma, CovKind::efron);
        const SpectralSummary sigma_w_spec = sym_eigen(cov.sigma_w);

        BoundReport rep;
        const Dataset whitened = whiten(data, sigma);
        rep.delta_a = delta_convex(estimate_moments(whitened), cov);
        rep.delta_b = delta_ball(mom, cov, sigma_spec);
        const Ball2Deltas deltas = delta_functionals_ball2(mom, cov, sigma_w_spec, sigma_spec);
        rep.delta0 = deltas.delta0;
        rep.delta0p = deltas.delta0p;
        rep.delta1 = deltas.delta1;
        rep.delta2 = deltas.delta2;
        rep.rhs_convex = rhs_convex(d, rep.delta_a);
        rep.rhs_ball = rhs_ball(rep.delta_b);
        rep.rhs_ball2 = rhs_ball2(kappa(sigma_spec), deltas);
        rep.rhs_cor3 = rhs_cor3(n, d);
        rep.rhs_mdep = rhs_mdep(n, spec.ma_order, *mom.sixth_bound, mom.sum2, d);
        rep.delta_star = delta_star(mom, cov, sigma_spec, deltas);
        CovInfo cov_wild = cov;
        cov_wild.op_delta = op_norm_delta(data, sigma, BootstrapKind::wild).op_norm;
        rep.delta_circ = delta_circ(mom, cov_wild, sigma_spec, deltas);

        std::ofstream js(out_dir + "/boundreport_" + std::to_string(n) + "x" + std::to_string(d) + ".json");
        js << rep.to_json() << "\n";
        csv.row({std::to_string(n), std::to_string(d), fmt(rep.delta_a), fmt(rep.delta_b), fmt(rep.delta0),
                 fmt(rep.delta0p), fmt(rep.delta1), fmt(rep.delta2), fmt(rep.rhs_convex), fmt(rep.rhs_ball),
                 fmt(rep.rhs_ball2), fmt(rep.rhs_cor3), fmt(rep.rhs_mdep), fmt(rep.delta_star),
                 fmt(rep.delta_circ)});
    }
}

void run_coverage(const ExperimentConfig& cfg, const std::string& out_dir, CsvWriter& csv, unsigned workers) {
    csv.row({"replicate", "n", "d", "w_norm", "quantile", "exceed"});
    nlohmann::ordered_json summary = nlohmann::ordered_json::array();
    for (const auto& [n, d] : cfg.grid) {
        DgpSpec spec = cfg.dgp;
        spec.n = n;
        spec.d = d;
        const CoverageResult res = coverage_experiment(spec, cfg.alpha, cfg.bootstrap_b, cfg.replicates,
                                                       cfg.bootstrap_kind, cfg.seed, workers, cfg.dgp.multiplier);
        for (std::size_t i = 0; i < cfg.replicates; ++i)
            csv.row({std::to_string(i), std::to_string(n), std::to_string(d), fmt(res.w_norms[i]),
                     fmt(res.quantiles[i]), std::to_string(static_cast<int>(res.exceed[i]))});
        summary.push_back({{"n", n},
                           {"d", d},
                           {"kind", to_string(cfg.bootstrap_kind)},
                           {"alpha", cfg.alpha},
                           {"B", cfg.bootstrap_b},
                           {"R", cfg.replicates},
                           {"coverage", res.coverage},
                           {"stderr", res.stderr_}});
    }
    std::ofstream js(out_dir + "/coverage_summary.json");
    js << summary.dump(2) << "\n";
}

void run_counterexample(const ExperimentConfig& cfg, CsvWriter& csv, unsigned workers) {
    csv.row({"n", "d", "x_n", "p_n", "a_n", "sigma_n", "eta_mean_mc", "eta_m2_mc", "gap_at_zero", "gap_stderr",
             "ks_halfspace", "sum_e_xi4", "gap_over_sqrt_sum", "c0"});
    constexpr double kC0 = 0.018848;  // (8 sqrt(14 pi))^{-1}
    for (const auto& [n, d] : cfg.grid) {
        DgpSpec spec = cfg.dgp;
        spec.kind = DgpKind::nagaev;
        spec.n = n;
        spec.d = d;
        const NagaevParams np = nagaev_params(n);

        // Half-space projections W.e1 over M replicates.
        const std::vector<double> proj = run_replicated<double>(
            cfg.mc_samples, workers, CounterRng(cfg.seed), [&](std::size_t, const CounterRng& key) {
                CounterRng rng = key.derive(0);
                double s = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double u = rng.next_double();
                    s += u < np.p ? np.x : np.sigma * rng.next_gaussian() - np.a;
                }
                return s / std::sqrt(static_cast<double>(n));
            });
        std::size_t below = 0;
        for (double v : proj)
            if (v < 0.0) ++below;
        const double p_below = static_cast<double>(below) / static_cast<double>(proj.size());
        const double gap = p_below - 0.5;
        const double gap_se = std::sqrt(p_below * (1.0 - p_below) / static_cast<double>(proj.size()));
        const double ks = ks_statistic(proj, [](double t) { return normal_cdf(t); });

        // Moment spot check of eta from an independent stream.
        double m1 = 0.0, m2 = 0.0;
        {
            CounterRng rng = CounterRng(cfg.seed).derive(0xe7a5ull);
            const std::size_t mm = std::max<std::size_t>(cfg.mc_samples, 100000);
            for (std::size_t i = 0; i < mm; ++i) {
                const double u = rng.next_double();
                const double eta = u < np.p ? np.x : np.sigma * rng.next_gaussian() - np.a;
                m1 += eta;
                m2 += eta * eta;
            }
            m1 /= static_cast<double>(mm);
            m2 /= static_cast<double>(mm);
        }

        // sum_i E|xi_i|^4 = n^{-1} E[(eta^2 + sum_{j<d-1} zeta_j^2)^2], exact.
        const double dm1 = static_cast<double>(d - 1);
        const double e4 =
            (np.fourth_moment() + 2.0 * dm1 + dm1 * dm1 + 2.0 * dm1) / static_cast<double>(n);
        const double ratio = gap / std::sqrt(e4);
        csv.row({std::to_string(n), std::to_string(d), fmt(np.x), fmt(np.p), fmt(np.a), fmt(np.sigma), fmt(m1),
                 fmt(m2), fmt(gap), fmt(gap_se), fmt(ks), fmt(e4), fmt(ratio), fmt(kC0)});
    }
}

void run_anticoncentration(const ExperimentConfig& cfg, CsvWriter& csv) {
    csv.row({"sigma", "d", "eps", "ratio"});
    for (const auto& [n, d] : cfg.grid) {
        (void)n;
        std::vector<std::pair<std::string, SymMatrix>> sigmas;
        sigmas.emplace_back("identity", SymMatrix::identity(d));
        CounterRng rng = CounterRng(cfg.seed).derive(0xacceull);
        for (int k = 0; k < 3; ++k) {
            std::vector<double> diag(d);
            for (double& v : diag) v = 0.5 + 1.5 * rng.next_double();
            sigmas.emplace_back("random-diag-" + std::to_string(k), SymMatrix::diagonal(diag));
        }
        for (const auto& [label, sigma] : sigmas) {
            const double scale = sigma.trace() / static_cast<double>(d);
            for (double f : cfg.eps_factors) {
                const double eps = f * scale;
                const double ratio = anti_concentration_ratio(sigma, std::vector<double>(d, 0.0), eps,
                                                              anti_concentration_grid_max(sigma), eps / 2.0);
                csv.row({label, std::to_string(d), fmt(eps), fmt(ratio)});
            }
        }
    }
}

}  // namespace

std::string run_experiment(const ExperimentConfig& cfg) {
    namespace fs = std::filesystem;
    const auto t0 = std::chrono::steady_clock::now();
    fs::create_directories(cfg.out_dir);
    const std::string csv_path = cfg.out_dir + "/results.csv";
    const unsigned workers = resolve_threads(cfg.threads);

    try {
        CsvWriter csv(csv_path);
        switch (cfg.kind) {
            case ExperimentKind::bound_report:
                run_bound_report(cfg, cfg.out_dir, csv);
                break;
            case ExperimentKind::distance_grid:
            case ExperimentKind::rate_fit: {
                const GridDistances g = run_distance_grid(cfg, workers);
                csv.row({"n", "d", "distance", "stderr", "mc_samples", "rhs_cor3"});
                for (std::size_t i = 0; i < g.n.size(); ++i)
                    csv.row({std::to_string(g.n[i]), std::to_string(g.d[i]), fmt(g.dist[i]), fmt(g.stderr_[i]),
                             std::to_string(cfg.mc_samples), fmt(g.rhs[i])});
                std::vector<std::pair<double, double>> dist_pts, rhs_pts;
                for (std::size_t i = 0; i < g.n.size(); ++i) {
                    dist_pts.emplace_back(static_cast<double>(g.n[i]), g.dist[i]);
                    rhs_pts.emplace_back(static_cast<double>(g.n[i]), g.rhs[i]);
                }
                write_svg(cfg.out_dir + "/plot.svg", {{"distance", dist_pts}, {"rhs shape", rhs_pts}}, "n",
                          "distance");
                if (cfg.kind == ExperimentKind::rate_fit) {
                    std::vector<std::pair<double, double>> log_pts;
                    for (std::size_t i = 0; i < g.n.size(); ++i)
                        log_pts.emplace_back(std::log(static_cast<double>(g.n[i])), std::log(g.dist[i]));
                    const RateFit fit = rate_fit(log_pts);
                    double c_fit = 0.0;
                    for (std::size_t i = 0; i < g.n.size(); ++i) c_fit = std::max(c_fit, g.dist[i] / g.rhs[i]);
                    nlohmann::ordered_json j;
                    j["slope"] = fit.slope;
                    j["intercept"] = fit.intercept;
                    j["r2"] = fit.r2;
                    j["slopeStderr"] = fit.slope_stderr;
                    j["fittedC"] = c_fit;
                    std::ofstream js(cfg.out_dir + "/ratefit.json");
                    js << j.dump(2) << "\n";
                }
                break;
            }
            case ExperimentKind::coverage:
                run_coverage(cfg, cfg.out_dir, csv, workers);
                break;
            case ExperimentKind::counterexample:
                run_counterexample(cfg, csv, workers);
                break;
            case ExperimentKind::anticoncentration:
                run_anticoncentration(cfg, csv);
                break;
        }
    } catch (const std::exception& e) {
        std::ofstream err(cfg.out_dir + "/error.txt");
        err << "experiment failed: " << e.what() << "\n";
        throw;
    }

    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    char hash_hex[20];
    std::snprintf(hash_hex, sizeof(hash_hex), "%016llx", static_cast<unsigned long long>(cfg.config_hash()));
    nlohmann::ordered_json manifest;
    manifest["configHash"] = hash_hex;
    manifest["kind"] = to_string(cfg.kind);
    manifest["seed"] = cfg.seed;
    manifest["codeVersion"] = "hdgauss 0.1.0";
    manifest["wallTimeSeconds"] = wall;
    std::ofstream mf(cfg.out_dir + "/manifest.json");
    mf << manifest.dump(2) << "\n";
    return csv_path;
}

}  // namespace hdgauss
