#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "purf/rng.hpp"

namespace purf {

enum class NoiseKind { gaussian, uniform };

// Data-generating process Y = s(X) + eps on [0,1]: regression function s,
// design density mu, and centered noise with known standard deviation.
// The declared constants (lipschitz_const C, density bounds m <= mu <= M) are
// promises checked by validate_model, not enforced at construction.
struct RegressionModel {
    std::string name;
    std::function<double(double)> regression_fn;    // s
    std::function<double(double)> design_density;   // mu
    std::function<double(double)> design_cdf;       // exact CDF of mu, if known
    std::function<double(double)> design_inv_cdf;   // exact inverse CDF, if known
    double noise_sd = 1.0;
    NoiseKind noise = NoiseKind::gaussian;
    double lipschitz_const = 1.0;   // C
    double density_max = 1.0;       // M
    double density_min = 1.0;       // m
};

struct LearningSample {
    std::vector<double> xs;
    std::vector<double> ys;
    std::size_t size() const { return xs.size(); }
};

// Fixed catalog: "linear-uniform", "sine-uniform", "linear-tilted".
std::vector<std::string> catalog_names();
RegressionModel catalog_model(const std::string& name, double noise_sd = 1.0);

// Throws std::runtime_error naming the violated invariant: density mass 1
// within 1e-8, density bounds and Lipschitz constant on a 1e4-point grid.
void validate_model(const RegressionModel& model);

// n i.i.d. observations. The design draws use the model's inverse CDF when
// present and rejection sampling under the flat density_max envelope
// otherwise. Draw order: all xs first, then the noise vector (Box-Muller
// pairs for gaussian noise).
LearningSample sample(const RegressionModel& model, std::size_t n,
                      RngStream& rng);

}  // namespace purf
