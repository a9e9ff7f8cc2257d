#include "purf/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "purf/estimators.hpp"
#include "purf/model.hpp"
#include "purf/parallel.hpp"
#include "purf/partition.hpp"
#include "purf/risk.hpp"
#include "purf/theory.hpp"

namespace purf {

namespace {

// Substream domains for experiment-level draws (the risk module has its own).
constexpr std::uint64_t kDomainPairA = 10;
constexpr std::uint64_t kDomainPairB = 11;
constexpr std::uint64_t kDomainEq9Partition = 12;
constexpr std::uint64_t kDomainEq9Sample = 13;

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ' ' || c == '\t' || c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

std::uint64_t parse_u64(const std::string& field, const std::string& tok) {
    try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(field, "expected a nonnegative integer, got '" + tok + "'");
    }
}

double parse_double(const std::string& field, const std::string& tok) {
    try {
        std::size_t used = 0;
        const double v = std::stod(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(field, "expected a number, got '" + tok + "'");
    }
}

std::vector<std::size_t> parse_size_list(const std::string& field,
                                         const std::string& value) {
    std::vector<std::size_t> out;
    for (const auto& tok : split_list(value)) {
        const std::uint64_t v = parse_u64(field, tok);
        if (v == 0) throw ConfigError(field, "grid values must be positive");
        out.push_back(static_cast<std::size_t>(v));
    }
    if (out.empty()) throw ConfigError(field, "empty list");
    return out;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_list(const std::vector<std::size_t>& xs) {
    std::string out;
    for (std::size_t x : xs) {
        if (!out.empty()) out += " ";
        out += std::to_string(x);
    }
    return out;
}

std::string names_msg() {
    std::string msg;
    for (const auto& n : experiment_names()) {
        if (!msg.empty()) msg += ", ";
        msg += n;
    }
    return msg;
}

NoiseKind noise_kind(const ExperimentConfig& cfg) {
    if (cfg.noise == "gaussian") return NoiseKind::gaussian;
    if (cfg.noise == "uniform") return NoiseKind::uniform;
    throw ConfigError("noise", "expected 'gaussian' or 'uniform'");
}

RegressionModel make_model(const ExperimentConfig& cfg) {
    try {
        RegressionModel m = catalog_model(cfg.model, cfg.sigma);
        m.noise = noise_kind(cfg);
        return m;
    } catch (const std::invalid_argument& e) {
        throw ConfigError("model", e.what());
    }
}

std::uint64_t row_seed(const ExperimentConfig& cfg, std::size_t n,
                       std::size_t k, std::size_t q) {
    return derive_seed(cfg.seed, {n, k, q});
}

std::size_t minimax_k_for(std::size_t n) {
    const long long k1 = std::llround(std::cbrt(static_cast<double>(n)));
    return static_cast<std::size_t>(std::max(1LL, k1) - 1);
}

struct MeanSe {
    double mean = 0, se = 0;
};

MeanSe reduce(const std::vector<double>& xs) {
    double sum = 0;
    for (double x : xs) sum += x;
    const double mean = sum / static_cast<double>(xs.size());
    if (xs.size() < 2) return {mean, 0.0};
    double ss = 0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / static_cast<double>(xs.size() - 1)) /
                      std::sqrt(static_cast<double>(xs.size()))};
}

ExperimentTable run_m12(const ExperimentConfig& cfg) {
    ExperimentTable t;
    t.columns = {"k",  "pairs", "mc_mean",      "mc_se",
                 "exact", "z",     "crossing_sum", "n12_ratio"};
    double max_z = 0;
    for (std::size_t k : cfg.k) {
        const std::uint64_t rs = row_seed(cfg, 0, k, 0);
        std::vector<double> counts(cfg.replicates);
        parallel_for(cfg.replicates, cfg.threads, [&](std::size_t i) {
            RngStream r1(rs, {kDomainPairA, i});
            RngStream r2(rs, {kDomainPairB, i});
            for (;;) {
                try {
                    counts[i] = static_cast<double>(count_m12(
                        sample_partition(k, r1), sample_partition(k, r2)));
                    break;
                } catch (const TieError&) {
                }
            }
        });
        const MeanSe m = reduce(counts);
        const double exact = expected_m12(k);
        const double z = m.se > 0 ? std::fabs(m.mean - exact) / m.se : 0.0;
        max_z = std::max(max_z, z);
        double cross = std::numeric_limits<double>::quiet_NaN();
        if (k >= 3 && k <= 128) {
            double acc = 0;
            for (std::size_t r = 1; r + 2 <= k; ++r)
                for (std::size_t s = 1; s < k; ++s)
                    acc += crossing_probability(k, r, s);
            cross = acc;
        } else if (k < 3) {
            cross = 0.0;
        }
        t.rows.push_back({static_cast<double>(k),
                          static_cast<double>(cfg.replicates), m.mean, m.se,
                          exact, z, cross,
                          expected_n12(k) / (static_cast<double>(k) + 1.0)});
    }
    t.summary.push_back("max |z| over k grid: " + fmt(max_z) +
                        (max_z < 3.0 ? " (< 3)" : " (>= 3)"));
    return t;
}

ExperimentTable run_decomposition(const ExperimentConfig& cfg, bool forest) {
    ExperimentTable t;
    t.columns = {"n",           "k",
                 "q",           "replicates",
                 "risk",        "risk_se",
                 "variance",    "variance_se",
                 "bias",        "bias_se",
                 "gap",         "gap_se",
                 "tree_var_leading", "forest_var_leading",
                 "var_over_tree_leading", "bias_bound",
                 "bias_ok",     "risk_bound"};
    const RegressionModel model = make_model(cfg);
    const std::vector<std::size_t> qs = forest ? cfg.q : std::vector<std::size_t>{1};
    for (std::size_t n : cfg.n)
        for (std::size_t k : cfg.k)
            for (std::size_t q : qs) {
                MonteCarloOptions opt;
                opt.replicates = cfg.replicates;
                opt.seed = row_seed(cfg, n, k, q);
                opt.threads = cfg.threads;
                const RiskReport r =
                    estimate_forest_decomposition(model, n, k, q, opt);
                const BoundSet b = bounds(model, n, k);
                const bool bias_ok = r.bias_term <= b.bias_bound;
                if (!bias_ok) t.bound_violation = true;
                const double lead = b.tree_variance_leading;
                t.rows.push_back({static_cast<double>(n),
                                  static_cast<double>(k),
                                  static_cast<double>(q),
                                  static_cast<double>(cfg.replicates), r.risk,
                                  r.risk_se, r.variance_term, r.variance_se,
                                  r.bias_term, r.bias_se, r.decomposition_gap,
                                  r.decomposition_gap_se,
                                  lead, b.forest_variance_leading,
                                  lead > 0 ? r.variance_term / lead : 0.0,
                                  b.bias_bound, bias_ok ? 1.0 : 0.0,
                                  forest ? b.forest_risk_bound
                                         : b.tree_risk_bound});
            }
    t.summary.push_back(t.bound_violation
                            ? "bias bound violated on at least one grid point"
                            : "bias <= bound on every grid point");
    return t;
}

ExperimentTable run_covariance(const ExperimentConfig& cfg) {
    ExperimentTable t;
    t.columns = {"n",          "k",
                 "replicates", "covariance",
                 "covariance_se", "tree_variance",
                 "tree_variance_se", "ratio",
                 "n12_ratio"};
    const RegressionModel model = make_model(cfg);
    for (std::size_t n : cfg.n)
        for (std::size_t k : cfg.k) {
            MonteCarloOptions opt;
            opt.replicates = cfg.replicates;
            opt.seed = row_seed(cfg, n, k, 2);
            opt.threads = cfg.threads;
            const CovarianceReport c = estimate_tree_covariance(model, n, k, opt);
            t.rows.push_back({static_cast<double>(n), static_cast<double>(k),
                              static_cast<double>(cfg.replicates), c.covariance,
                              c.covariance_se, c.tree_variance,
                              c.tree_variance_se, c.ratio,
                              expected_n12(k) / (static_cast<double>(k) + 1.0)});
            t.summary.push_back("n=" + std::to_string(n) + " k=" +
                                std::to_string(k) + ": ratio " + fmt(c.ratio) +
                                ", upper-bound ratio " +
                                fmt(expected_n12(k) / (static_cast<double>(k) + 1.0)));
        }
    return t;
}

ExperimentTable run_rate(const ExperimentConfig& cfg) {
    ExperimentTable t;
    t.columns = {"n",       "k",
                 "q",       "replicates",
                 "tree_risk", "tree_risk_se",
                 "tree_variance", "tree_bias",
                 "forest_risk", "forest_risk_se",
                 "forest_variance", "forest_bias",
                 "n_pow_minus_2_3"};
    const RegressionModel model = make_model(cfg);
    const std::size_t q = cfg.q.front();
    std::vector<std::pair<double, double>> tree_pts, forest_pts;
    bool forest_below = true;
    for (std::size_t i = 0; i < cfg.n.size(); ++i) {
        const std::size_t n = cfg.n[i];
        const std::size_t k =
            cfg.k_auto ? minimax_k_for(n) : cfg.k[std::min(i, cfg.k.size() - 1)];
        MonteCarloOptions opt;
        opt.replicates = cfg.replicates;
        opt.threads = cfg.threads;
        opt.seed = row_seed(cfg, n, k, 1);
        const RiskReport tr = estimate_decomposition(model, n, k, opt);
        opt.seed = row_seed(cfg, n, k, q);
        const RiskReport fr = estimate_forest_decomposition(model, n, k, q, opt);
        tree_pts.emplace_back(static_cast<double>(n), tr.risk);
        forest_pts.emplace_back(static_cast<double>(n), fr.risk);
        forest_below = forest_below && fr.risk < tr.risk;
        t.rows.push_back({static_cast<double>(n), static_cast<double>(k),
                          static_cast<double>(q),
                          static_cast<double>(cfg.replicates), tr.risk,
                          tr.risk_se, tr.variance_term, tr.bias_term, fr.risk,
                          fr.risk_se, fr.variance_term, fr.bias_term,
                          std::pow(static_cast<double>(n), -2.0 / 3.0)});
    }
    if (tree_pts.size() >= 3) {
        const auto [ts, ti] = rate_fit(tree_pts);
        const auto [fs, fi] = rate_fit(forest_pts);
        t.summary.push_back("tree slope = " + fmt(ts) + ", intercept = " + fmt(ti));
        t.summary.push_back("forest slope = " + fmt(fs) + ", intercept = " + fmt(fi));
    }
    t.summary.push_back(forest_below ? "forest risk < tree risk at every n"
                                     : "forest risk >= tree risk somewhere");
    return t;
}

ExperimentTable run_eq9(const ExperimentConfig& cfg) {
    ExperimentTable t;
    t.columns = {"n",   "k",       "partition", "samples",
                 "eq9", "mc_mean", "mc_se",     "z"};
    const RegressionModel model = make_model(cfg);
    double max_z = 0;
    for (std::size_t n : cfg.n)
        for (std::size_t k : cfg.k) {
            const std::uint64_t rs = row_seed(cfg, n, k, 0);
            for (std::size_t p = 0; p < cfg.partitions; ++p) {
                RngStream prng(rs, {kDomainEq9Partition, p});
                const UniformPartition u = sample_partition(k, prng);
                const double oracle = conditional_variance_eq9(model, u, n);
                const OracleTree ot = oracle_tree(model, u);
                const StepFunction stil = to_step(ot);
                std::vector<double> vals(cfg.replicates);
                parallel_for(cfg.replicates, cfg.threads, [&](std::size_t rep) {
                    RngStream srng(rs, {kDomainEq9Sample, p, rep});
                    const LearningSample ls = sample(model, n, srng);
                    vals[rep] = ise(to_step(fit_tree(ls, u)), stil, model);
                });
                const MeanSe m = reduce(vals);
                const double z =
                    m.se > 0 ? std::fabs(m.mean - oracle) / m.se : 0.0;
                max_z = std::max(max_z, z);
                t.rows.push_back({static_cast<double>(n),
                                  static_cast<double>(k),
                                  static_cast<double>(p),
                                  static_cast<double>(cfg.replicates), oracle,
                                  m.mean, m.se, z});
            }
        }
    t.summary.push_back("max |z| over partitions: " + fmt(max_z) +
                        (max_z < 3.0 ? " (< 3)" : " (>= 3)"));
    return t;
}

}  // namespace

std::vector<std::string> experiment_names() {
    return {"m12",          "tree-decomposition", "forest-decomposition",
            "covariance-ratio", "rate",           "eq9-check"};
}

void apply_key_value(ExperimentConfig& cfg, const std::string& rawkey,
                     const std::string& rawvalue) {
    const std::string key = trim(rawkey);
    const std::string value = trim(rawvalue);
    if (value.empty()) throw ConfigError(key, "empty value");
    if (key == "experiment") {
        cfg.experiment = value;
    } else if (key == "model") {
        cfg.model = value;
    } else if (key == "sigma") {
        cfg.sigma = parse_double(key, value);
        if (cfg.sigma < 0) throw ConfigError(key, "sigma must be >= 0");
    } else if (key == "noise") {
        if (value != "gaussian" && value != "uniform")
            throw ConfigError(key, "expected 'gaussian' or 'uniform'");
        cfg.noise = value;
    } else if (key == "n") {
        cfg.n = parse_size_list(key, value);
    } else if (key == "k") {
        if (value == "auto") {
            cfg.k_auto = true;
            cfg.k.clear();
        } else {
            cfg.k_auto = false;
            cfg.k = parse_size_list(key, value);
        }
    } else if (key == "q") {
        cfg.q = parse_size_list(key, value);
    } else if (key == "replicates") {
        cfg.replicates = static_cast<std::size_t>(parse_u64(key, value));
        if (cfg.replicates == 0) throw ConfigError(key, "must be positive");
    } else if (key == "partitions") {
        cfg.partitions = static_cast<std::size_t>(parse_u64(key, value));
        if (cfg.partitions == 0) throw ConfigError(key, "must be positive");
    } else if (key == "seed") {
        cfg.seed = parse_u64(key, value);
        cfg.has_seed = true;
    } else if (key == "out") {
        cfg.out = value;
    } else if (key == "format") {
        if (value != "csv" && value != "json")
            throw ConfigError(key, "expected 'csv' or 'json'");
        cfg.format = value;
    } else if (key == "threads") {
        cfg.threads = static_cast<int>(parse_u64(key, value));
    } else {
        throw ConfigError(key, "unknown key");
    }
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open '" + path + "'");
    ExperimentConfig cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config", "line " + std::to_string(lineno) +
                                            ": expected 'key = value'");
        apply_key_value(cfg, line.substr(0, eq), line.substr(eq + 1));
    }
    return cfg;
}

void validate_config(ExperimentConfig& cfg) {
    const auto names = experiment_names();
    if (std::find(names.begin(), names.end(), cfg.experiment) == names.end())
        throw ConfigError("experiment", "unknown experiment '" + cfg.experiment +
                                            "' (valid: " + names_msg() + ")");
    make_model(cfg);  // validates model name and noise kind
    if (!cfg.has_seed)
        throw ConfigError("seed", "required (runs never seed from the clock)");
    if (cfg.replicates == 0) throw ConfigError("replicates", "required");
    const bool needs_n = cfg.experiment != "m12";
    if (needs_n && cfg.n.empty()) throw ConfigError("n", "required");
    if (cfg.experiment == "rate") {
        if (!cfg.k_auto && cfg.k.empty()) cfg.k_auto = true;
        if (cfg.n.size() < 3)
            throw ConfigError("n", "rate needs at least 3 values of n");
        if (!cfg.k_auto && cfg.k.size() != 1 && cfg.k.size() != cfg.n.size())
            throw ConfigError("k", "rate takes 'auto', one k, or one k per n");
        if (cfg.q.empty()) cfg.q = {100};
        if (cfg.q.size() != 1)
            throw ConfigError("q", "rate takes a single q value");
    } else if (cfg.k.empty()) {
        throw ConfigError("k", "required");
    }
    if (cfg.experiment == "forest-decomposition" && cfg.q.empty())
        throw ConfigError("q", "required");
    if (cfg.q.empty()) cfg.q = {1};
    if (cfg.threads < 0) throw ConfigError("threads", "must be >= 0");
    if (cfg.threads == 0)
        cfg.threads = static_cast<int>(
            std::max(1u, std::thread::hardware_concurrency()));
    if (cfg.out.empty()) cfg.out = cfg.experiment + "." + cfg.format;
}

ExperimentTable run_experiment(const ExperimentConfig& cfg) {
    if (cfg.experiment == "m12") return run_m12(cfg);
    if (cfg.experiment == "tree-decomposition")
        return run_decomposition(cfg, false);
    if (cfg.experiment == "forest-decomposition")
        return run_decomposition(cfg, true);
    if (cfg.experiment == "covariance-ratio") return run_covariance(cfg);
    if (cfg.experiment == "rate") return run_rate(cfg);
    if (cfg.experiment == "eq9-check") return run_eq9(cfg);
    throw ConfigError("experiment",
                      "unknown experiment '" + cfg.experiment +
                          "' (valid: " + names_msg() + ")");
}

namespace {

// The provenance echo: everything that determines the numbers. Output path
// and thread count are deliberately excluded so reruns byte-match.
std::vector<std::pair<std::string, std::string>> echo_config(
    const ExperimentConfig& cfg) {
    std::vector<std::pair<std::string, std::string>> kv;
    kv.emplace_back("experiment", cfg.experiment);
    kv.emplace_back("model", cfg.model);
    kv.emplace_back("sigma", fmt(cfg.sigma));
    kv.emplace_back("noise", cfg.noise);
    if (!cfg.n.empty()) kv.emplace_back("n", fmt_list(cfg.n));
    kv.emplace_back("k", cfg.k_auto ? "auto" : fmt_list(cfg.k));
    kv.emplace_back("q", fmt_list(cfg.q));
    kv.emplace_back("replicates", std::to_string(cfg.replicates));
    if (cfg.experiment == "eq9-check")
        kv.emplace_back("partitions", std::to_string(cfg.partitions));
    kv.emplace_back("seed", std::to_string(cfg.seed));
    kv.emplace_back("format", cfg.format);
    return kv;
}

}  // namespace

std::string render_csv(const ExperimentConfig& cfg, const ExperimentTable& t) {
    std::string out;
    for (const auto& [k, v] : echo_config(cfg))
        out += "# " + k + " = " + v + "\n";
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
        if (c) out += ",";
        out += t.columns[c];
    }
    out += "\n";
    for (const auto& row : t.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out += ",";
            out += fmt(row[c]);
        }
        out += "\n";
    }
    return out;
}

std::string render_json(const ExperimentConfig& cfg, const ExperimentTable& t) {
    nlohmann::json j;
    nlohmann::json jc;
    jc["experiment"] = cfg.experiment;
    jc["model"] = cfg.model;
    jc["sigma"] = cfg.sigma;
    jc["noise"] = cfg.noise;
    jc["n"] = cfg.n;
    if (cfg.k_auto)
        jc["k"] = "auto";
    else
        jc["k"] = cfg.k;
    jc["q"] = cfg.q;
    jc["replicates"] = cfg.replicates;
    if (cfg.experiment == "eq9-check") jc["partitions"] = cfg.partitions;
    jc["seed"] = cfg.seed;
    jc["format"] = cfg.format;
    j["config"] = jc;
    j["columns"] = t.columns;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : t.rows) {
        nlohmann::json r;
        for (std::size_t c = 0; c < row.size(); ++c) r[t.columns[c]] = row[c];
        rows.push_back(std::move(r));
    }
    j["rows"] = std::move(rows);
    j["summary"] = t.summary;
    return j.dump(2) + "\n";
}

std::string render_summary(const ExperimentConfig& cfg,
                           const ExperimentTable& t) {
    std::ostringstream os;
    os << cfg.experiment << " (model=" << cfg.model << ", sigma=" << cfg.sigma
       << ", seed=" << cfg.seed << ", replicates=" << cfg.replicates << ")\n";
    for (std::size_t c = 0; c < t.columns.size(); ++c)
        os << (c ? "  " : "") << t.columns[c];
    os << "\n";
    for (const auto& row : t.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.6g", row[c]);
            os << (c ? "  " : "") << buf;
        }
        os << "\n";
    }
    for (const auto& s : t.summary) os << s << "\n";
    return os.str();
}

}  // namespace purf
