#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hdgauss/config.hpp"
#include "hdgauss/experiment.hpp"
#include "hdgauss/gauss_ball.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::string out_dir;
    std::string n_list;
    std::string d_list;
    std::string d_rule;
    std::string marginal;
    long long seed = -1;
    int threads = -1;
    double tol = -1.0;
    long long samples = -1;
};

void add_common(CLI::App* cmd, CommonFlags* f) {
    cmd->add_option("--config", f->config_path, "config file (key = value under [section] headers)");
    cmd->add_option("--seed", f->seed, "base seed (overrides config)");
    cmd->add_option("--threads", f->threads, "worker count (overrides config and HDGAUSS_THREADS)");
    cmd->add_option("--out-dir", f->out_dir, "output directory (overrides config)");
    cmd->add_option("--tol", f->tol, "quadrature tolerance (overrides config)");
    cmd->add_option("--n", f->n_list, "comma-separated n grid (overrides config)");
    cmd->add_option("--d", f->d_list, "comma-separated d grid, or one d for all n");
    cmd->add_option("--d-rule", f->d_rule, "d as a power of n, e.g. n^0.75");
    cmd->add_option("--marginal", f->marginal, "gaussian|rademacher|uniform-std|exp-std");
    cmd->add_option("--samples", f->samples, "Monte Carlo samples M");
}

hdgauss::ExperimentConfig build_config(hdgauss::ExperimentKind kind, const CommonFlags& f) {
    using hdgauss::ExperimentConfig;
    ExperimentConfig cfg;
    if (!f.config_path.empty()) {
        cfg = hdgauss::parse_config_file(f.config_path);
        if (cfg.kind != kind)
            throw std::runtime_error("config kind '" + to_string(cfg.kind) + "' does not match the subcommand");
    } else {
        // Build a config from flags alone via the same parser/validator.
        std::string text = "[experiment]\nkind = " + to_string(kind) + "\n[grid]\n";
        text += "n = " + (f.n_list.empty() ? "1000" : f.n_list) + "\n";
        if (!f.d_rule.empty())
            text += "d-rule = " + f.d_rule + "\n";
        else
            text += "d = " + (f.d_list.empty() ? "10" : f.d_list) + "\n";
        cfg = hdgauss::parse_config(text);
    }
    if (!f.config_path.empty()) {
        // Flag-level grid overrides on top of a config file.
        if (!f.n_list.empty() || !f.d_list.empty() || !f.d_rule.empty()) {
            std::string text = "[experiment]\nkind = " + to_string(kind) + "\n[grid]\n";
            text += "n = " + (f.n_list.empty() ? [&] {
                std::string s;
                for (const auto& [n, d] : cfg.grid) s += (s.empty() ? "" : ",") + std::to_string(n);
                return s;
            }() : f.n_list) + "\n";
            if (!f.d_rule.empty())
                text += "d-rule = " + f.d_rule + "\n";
            else if (!f.d_list.empty())
                text += "d = " + f.d_list + "\n";
            else {
                std::string s;
                for (const auto& [n, d] : cfg.grid) s += (s.empty() ? "" : ",") + std::to_string(d);
                text += "d = " + s + "\n";
            }
            cfg.grid = hdgauss::parse_config(text).grid;
        }
    }
    if (f.seed >= 0) cfg.seed = static_cast<std::uint64_t>(f.seed);
    if (f.threads >= 0) cfg.threads = f.threads;
    if (!f.out_dir.empty()) cfg.out_dir = f.out_dir;
    if (f.tol > 0.0) cfg.tol = f.tol;
    if (f.samples > 0) cfg.mc_samples = static_cast<std::size_t>(f.samples);
    if (!f.marginal.empty()) cfg.dgp.marginal = hdgauss::marginal_from_string(f.marginal);
    return cfg;
}

int run_kind(hdgauss::ExperimentKind kind, const CommonFlags& f) {
    const hdgauss::ExperimentConfig cfg = build_config(kind, f);
    const std::string csv = hdgauss::run_experiment(cfg);
    std::cout << "wrote " << csv << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hdgauss: Gaussian-approximation error functionals, exact ball probabilities, and Monte Carlo rate experiments"};
    app.require_subcommand(1);

    CommonFlags flags[7];
    const char* names[] = {"boundreport", "distgrid", "ratefit", "coverage", "counterexample", "anticonc"};
    const hdgauss::ExperimentKind kinds[] = {
        hdgauss::ExperimentKind::bound_report,   hdgauss::ExperimentKind::distance_grid,
        hdgauss::ExperimentKind::rate_fit,       hdgauss::ExperimentKind::coverage,
        hdgauss::ExperimentKind::counterexample, hdgauss::ExperimentKind::anticoncentration};
    const char* descriptions[] = {
        "evaluate every error functional on a sampled dataset",
        "Kolmogorov distance on centered balls over an (n,d) grid",
        "distance grid plus log-log rate fit",
        "bootstrap coverage experiment",
        "Nagaev half-space gap table",
        "anti-concentration ratio table"};
    CLI::App* cmds[6];
    for (int i = 0; i < 6; ++i) {
        cmds[i] = app.add_subcommand(names[i], descriptions[i]);
        add_common(cmds[i], &flags[i]);
    }

    // Coverage-specific flags.
    double alpha = 0.1;
    long long boot_b = 500, boot_r = 0;
    std::string boot_kind = "efron", multiplier = "gaussian";
    cmds[3]->add_option("--alpha", alpha, "nominal exceedance level");
    cmds[3]->add_option("--B", boot_b, "inner bootstrap replicates");
    cmds[3]->add_option("--R", boot_r, "outer replicates");
    cmds[3]->add_option("--kind", boot_kind, "efron|wild");
    cmds[3]->add_option("--multiplier", multiplier, "gaussian|rademacher|mammen (wild)");

    // ballprob subcommand.
    auto* ball = app.add_subcommand("ballprob", "P(|Z+mu| <= r) for Z ~ N(0, Sigma)");
    std::string sigma_path, mu_str;
    double ball_r = 0.0, ball_tol = 1e-9;
    ball->add_option("--sigma", sigma_path, "Sigma as CSV (header 'dim=d')")->required();
    ball->add_option("--mu", mu_str, "comma-separated mean vector (default 0)");
    ball->add_option("--r", ball_r, "ball radius")->required();
    ball->add_option("--tol", ball_tol, "absolute error tolerance");

    CLI11_PARSE(app, argc, argv);

    try {
        if (ball->parsed()) {
            const hdgauss::SymMatrix sigma = hdgauss::SymMatrix::from_csv_file(sigma_path);
            std::vector<double> mu(sigma.dim(), 0.0);
            if (!mu_str.empty()) {
                std::size_t j = 0, pos = 0;
                while (pos < mu_str.size() && j < mu.size()) {
                    std::size_t next = mu_str.find(',', pos);
                    if (next == std::string::npos) next = mu_str.size();
                    mu[j++] = std::stod(mu_str.substr(pos, next - pos));
                    pos = next + 1;
                }
                if (j != mu.size()) throw std::runtime_error("ballprob: mu needs " + std::to_string(mu.size()) + " entries");
            }
            double err = 0.0;
            const double p = hdgauss::ball_prob(sigma, mu, ball_r, ball_tol, &err);
            std::printf("ballprob %.17g achieved_error_bound %.3g\n", p, err);
            return 0;
        }
        for (int i = 0; i < 6; ++i) {
            if (!cmds[i]->parsed()) continue;
            if (i == 3) {
                hdgauss::ExperimentConfig cfg = build_config(kinds[i], flags[i]);
                cfg.alpha = alpha;
                cfg.bootstrap_b = static_cast<std::size_t>(boot_b);
                if (boot_r > 0) cfg.replicates = static_cast<std::size_t>(boot_r);
                if (cfg.replicates == 0)
                    throw std::runtime_error("coverage: --R (outer replicates) is required");
                cfg.bootstrap_kind = hdgauss::bootstrap_kind_from_string(boot_kind);
                cfg.dgp.multiplier = hdgauss::multiplier_from_string(multiplier);
                const std::string csv = hdgauss::run_experiment(cfg);
                std::cout << "wrote " << csv << "\n";
                return 0;
            }
            return run_kind(kinds[i], flags[i]);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
