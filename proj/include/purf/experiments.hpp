#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace purf {

struct ConfigError : std::runtime_error {
    std::string field;
    ConfigError(const std::string& f, const std::string& msg)
        : std::runtime_error("field '" + f + "': " + msg), field(f) {}
};

// Resolved run description: defaults, then config file keys, then CLI flags.
// The n x k x q lists form a cartesian grid. `partitions` only drives the
// eq9-check experiment. `out` and `threads` are execution details and are
// not part of the provenance echo.
struct ExperimentConfig {
    std::string experiment;
    std::string model = "linear-uniform";
    double sigma = 1.0;
    std::string noise = "gaussian";
    std::vector<std::size_t> n;
    std::vector<std::size_t> k;
    bool k_auto = false;  // rate: k+1 = round(n^{1/3}) per grid point
    std::vector<std::size_t> q;
    std::size_t replicates = 0;
    std::size_t partitions = 10;
    bool has_seed = false;
    std::uint64_t seed = 0;
    std::string out;
    std::string format = "csv";
    int threads = 1;
};

std::vector<std::string> experiment_names();

// Applies one "key = value" setting; throws ConfigError on unknown keys or
// unparsable values. Lists are whitespace- or comma-separated.
void apply_key_value(ExperimentConfig& cfg, const std::string& key,
                     const std::string& value);

ExperimentConfig load_config_file(const std::string& path);

// Checks experiment-specific requirements and fills the default output path.
void validate_config(ExperimentConfig& cfg);

struct ExperimentTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<std::string> summary;
    bool bound_violation = false;  // a hard bias <= bound assertion failed
};

ExperimentTable run_experiment(const ExperimentConfig& cfg);

// Byte-deterministic renderings for identical (config, seed), independent of
// the thread count.
std::string render_csv(const ExperimentConfig& cfg, const ExperimentTable& t);
std::string render_json(const ExperimentConfig& cfg, const ExperimentTable& t);
std::string render_summary(const ExperimentConfig& cfg,
                           const ExperimentTable& t);

}  // namespace purf
