#include "hdgauss/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hdgauss {

std::string to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::bound_report: return "bound-report";
        case ExperimentKind::distance_grid: return "distance-grid";
        case ExperimentKind::rate_fit: return "rate-fit";
        case ExperimentKind::coverage: return "coverage";
        case ExperimentKind::counterexample: return "counterexample";
        case ExperimentKind::anticoncentration: return "anticoncentration";
    }
    return "?";
}

ExperimentKind experiment_kind_from_string(const std::string& s) {
    if (s == "bound-report") return ExperimentKind::bound_report;
    if (s == "distance-grid") return ExperimentKind::distance_grid;
    if (s == "rate-fit") return ExperimentKind::rate_fit;
    if (s == "coverage") return ExperimentKind::coverage;
    if (s == "counterexample") return ExperimentKind::counterexample;
    if (s == "anticoncentration") return ExperimentKind::anticoncentration;
    throw std::invalid_argument("unknown experiment kind '" + s + "'");
}

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0;
    std::size_t b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

[[noreturn]] void fail(int line, const std::string& msg) {
    throw std::runtime_error("config line " + std::to_string(line) + ": " + msg);
}

std::size_t parse_size(const std::string& v, int line, const std::string& key) {
    try {
        const long long x = std::stoll(v);
        if (x < 0) fail(line, "'" + key + "' must be nonnegative");
        return static_cast<std::size_t>(x);
    } catch (const std::runtime_error&) {
        throw;
    } catch (...) {
        fail(line, "'" + key + "' expects an integer, got '" + v + "'");
    }
}

double parse_double(const std::string& v, int line, const std::string& key) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) fail(line, "'" + key + "' expects a number, got '" + v + "'");
        return x;
    } catch (const std::runtime_error&) {
        throw;
    } catch (...) {
        fail(line, "'" + key + "' expects a number, got '" + v + "'");
    }
}

}  // namespace

std::string ExperimentConfig::canonical() const {
    std::ostringstream out;
    out.precision(17);
    out << "kind=" << to_string(kind) << ";grid=";
    for (const auto& [n, d] : grid) out << n << "x" << d << ",";
    out << ";dgp=" << to_string(dgp.kind) << "," << to_string(dgp.marginal) << ","
        << to_string(dgp.multiplier) << "," << dgp.ma_order << ";mc=" << mc_samples << ","
        << replicates << "," << bootstrap_b << ",alpha=" << alpha << ",tol=" << tol << ";eps=";
    for (double e : eps_factors) out << e << ",";
    out << ";bootstrap=" << to_string(bootstrap_kind) << ";seed=" << seed;
    return out.str();
}

std::uint64_t ExperimentConfig::config_hash() const {
    const std::string s = canonical();
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    cfg.dgp.kind = DgpKind::iid_marginal;

    std::vector<std::size_t> n_list;
    std::vector<std::size_t> d_list;
    double d_rule_gamma = 0.0;
    bool has_d_rule = false;
    bool has_kind = false;

    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail(line_no, "malformed section header '" + line + "'");
            section = trim(line.substr(1, line.size() - 2));
            if (section != "experiment" && section != "grid" && section != "dgp" && section != "mc")
                fail(line_no, "unknown section '" + section + "'");
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) fail(line_no, "expected key = value, got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) fail(line_no, "empty key");
        if (value.empty()) fail(line_no, "empty value for '" + key + "'");
        if (section.empty()) fail(line_no, "key '" + key + "' before any [section] header");

        try {
            if (section == "experiment") {
                if (key == "kind") {
                    cfg.kind = experiment_kind_from_string(value);
                    has_kind = true;
                } else if (key == "seed") {
                    cfg.seed = static_cast<std::uint64_t>(std::stoull(value));
                } else if (key == "tol") {
                    cfg.tol = parse_double(value, line_no, key);
                } else if (key == "threads") {
                    cfg.threads = static_cast<int>(parse_size(value, line_no, key));
                } else if (key == "out-dir") {
                    cfg.out_dir = value;
                } else {
                    fail(line_no, "unknown key '" + key + "' in [experiment]");
                }
            } else if (section == "grid") {
                if (key == "n") {
                    for (const auto& item : split_list(value)) n_list.push_back(parse_size(item, line_no, key));
                } else if (key == "d") {
                    for (const auto& item : split_list(value)) d_list.push_back(parse_size(item, line_no, key));
                } else if (key == "d-rule") {
                    // Accepted form: n^gamma (d = floor(n^gamma)).
                    const std::string v = trim(value);
                    if (v.size() < 3 || v[0] != 'n' || v[1] != '^')
                        fail(line_no, "d-rule expects 'n^gamma', got '" + v + "'");
                    d_rule_gamma = parse_double(v.substr(2), line_no, key);
                    has_d_rule = true;
                } else {
                    fail(line_no, "unknown key '" + key + "' in [grid]");
                }
            } else if (section == "dgp") {
                if (key == "kind") {
                    cfg.dgp.kind = dgp_kind_from_string(value);
                } else if (key == "marginal") {
                    cfg.dgp.marginal = marginal_from_string(value);
                } else if (key == "multiplier") {
                    cfg.dgp.multiplier = multiplier_from_string(value);
                } else if (key == "ma-order") {
                    cfg.dgp.ma_order = parse_size(value, line_no, key);
                } else {
                    fail(line_no, "unknown key '" + key + "' in [dgp]");
                }
            } else {  // mc
                if (key == "samples") {
                    cfg.mc_samples = parse_size(value, line_no, key);
                } else if (key == "replicates") {
                    cfg.replicates = parse_size(value, line_no, key);
                } else if (key == "bootstrap") {
                    cfg.bootstrap_b = parse_size(value, line_no, key);
                } else if (key == "bootstrap-kind") {
                    cfg.bootstrap_kind = bootstrap_kind_from_string(value);
                } else if (key == "alpha") {
                    cfg.alpha = parse_double(value, line_no, key);
                } else if (key == "eps") {
                    cfg.eps_factors.clear();
                    for (const auto& item : split_list(value))
                        cfg.eps_factors.push_back(parse_double(item, line_no, key));
                } else {
                    fail(line_no, "unknown key '" + key + "' in [mc]");
                }
            }
        } catch (const std::invalid_argument& e) {
            fail(line_no, e.what());
        }
    }

    if (!has_kind) throw std::runtime_error("config: missing required key 'kind' in [experiment]");
    if (n_list.empty()) throw std::runtime_error("config: [grid] must provide at least one n");
    if (has_d_rule && !d_list.empty()) throw std::runtime_error("config: give either d or d-rule, not both");
    if (has_d_rule) {
        for (std::size_t n : n_list)
            d_list.push_back(static_cast<std::size_t>(std::floor(std::pow(static_cast<double>(n), d_rule_gamma))));
    } else if (d_list.size() == 1) {
        d_list.assign(n_list.size(), d_list.front());
    } else if (d_list.empty()) {
        throw std::runtime_error("config: [grid] must provide d or d-rule");
    } else if (d_list.size() != n_list.size()) {
        throw std::runtime_error("config: d list length must be 1 or match the n list");
    }
    for (std::size_t i = 0; i < n_list.size(); ++i) {
        if (n_list[i] == 0 || d_list[i] == 0) throw std::runtime_error("config: grid entries must be >= 1");
        cfg.grid.emplace_back(n_list[i], d_list[i]);
    }
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw std::runtime_error("config: field 'alpha' must be in (0,1)");
    if (cfg.tol <= 0.0) throw std::runtime_error("config: field 'tol' must be positive");
    if (cfg.kind == ExperimentKind::coverage && cfg.replicates == 0)
        throw std::runtime_error("config: field 'replicates' is required for coverage");
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

}  // namespace hdgauss
