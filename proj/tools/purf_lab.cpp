#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "purf/experiments.hpp"

namespace {

// Exit codes: 0 success, 1 bad config, 2 hard bias-bound assertion failed,
// 3 I/O failure.
constexpr int kOk = 0;
constexpr int kBadConfig = 1;
constexpr int kBoundViolation = 2;
constexpr int kIoFailure = 3;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"purf-lab: seeded simulation experiments for uniformly random "
                 "partition trees and forests"};
    std::string experiment, config_path, out, format, model, noise, k_spec;
    std::vector<std::size_t> n, q;
    std::uint64_t seed = 0;
    std::size_t replicates = 0, partitions = 0;
    double sigma = -1.0;
    int threads = -1;

    app.add_option("experiment", experiment, "experiment name")->required();
    app.add_option("--config", config_path, "key = value config file");
    app.add_option("--seed", seed, "master seed (required here or in config)");
    app.add_option("--out", out, "output path (default <experiment>.<format>)");
    app.add_option("--format", format, "csv | json");
    app.add_option("--threads", threads, "worker threads; 0 = all cores");
    app.add_option("--model", model, "catalog model name");
    app.add_option("--sigma", sigma, "noise standard deviation");
    app.add_option("--noise", noise, "gaussian | uniform");
    app.add_option("--n", n, "sample size grid");
    app.add_option("--k", k_spec, "cut count grid, or 'auto' (rate)");
    app.add_option("--q", q, "tree count grid");
    app.add_option("--replicates", replicates, "Monte Carlo replicates");
    app.add_option("--partitions", partitions, "partitions for eq9-check");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kBadConfig;
    }

    purf::ExperimentConfig cfg;
    try {
        if (!config_path.empty()) cfg = purf::load_config_file(config_path);
        if (!cfg.experiment.empty() && cfg.experiment != experiment)
            throw purf::ConfigError(
                "experiment", "config file says '" + cfg.experiment +
                                  "' but the command line says '" + experiment +
                                  "'");
        cfg.experiment = experiment;
        auto set = [&cfg](const std::string& key, const std::string& value) {
            purf::apply_key_value(cfg, key, value);
        };
        if (app.count("--seed")) set("seed", std::to_string(seed));
        if (app.count("--out")) set("out", out);
        if (app.count("--format")) set("format", format);
        if (app.count("--threads")) set("threads", std::to_string(threads));
        if (app.count("--model")) set("model", model);
        if (app.count("--sigma")) set("sigma", std::to_string(sigma));
        if (app.count("--noise")) set("noise", noise);
        if (app.count("--k")) set("k", k_spec);
        if (app.count("--replicates"))
            set("replicates", std::to_string(replicates));
        if (app.count("--partitions"))
            set("partitions", std::to_string(partitions));
        if (app.count("--n")) {
            cfg.n.clear();
            for (auto v : n) cfg.n.push_back(v);
        }
        if (app.count("--q")) {
            cfg.q.clear();
            for (auto v : q) cfg.q.push_back(v);
        }
        purf::validate_config(cfg);
    } catch (const purf::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kBadConfig;
    }

    purf::ExperimentTable table;
    try {
        table = purf::run_experiment(cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kBadConfig;
    }

    const std::string rendered = cfg.format == "json"
                                     ? purf::render_json(cfg, table)
                                     : purf::render_csv(cfg, table);
    {
        std::ofstream f(cfg.out, std::ios::binary);
        if (!f || !(f << rendered) || !f.flush()) {
            std::cerr << "i/o error: cannot write '" << cfg.out << "'\n";
            return kIoFailure;
        }
    }
    std::cout << purf::render_summary(cfg, table);
    std::cout << "wrote " << cfg.out << "\n";
    return table.bound_violation ? kBoundViolation : kOk;
}
