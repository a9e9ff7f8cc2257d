#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "purf/estimators.hpp"
#include "purf/model.hpp"
#include "purf/partition.hpp"
#include "purf/quadrature.hpp"
#include "purf/step_function.hpp"

namespace purf {

// Monte Carlo estimates of the quadratic risk and its bias-variance split,
// with standard errors over replicates. decomposition_gap tracks the paired
// per-replicate residual risk - variance - bias, which is mean-zero noise.
struct RiskReport {
    double risk = 0, risk_se = 0;
    double variance_term = 0, variance_se = 0;
    double bias_term = 0, bias_se = 0;
    double decomposition_gap = 0, decomposition_gap_se = 0;
    std::size_t replicates = 0;
    // config echo
    std::string model_name;
    double sigma = 0;
    std::size_t n = 0, k = 0, q = 1;
    std::uint64_t seed = 0;
};

struct CovarianceReport {
    double covariance = 0, covariance_se = 0;
    double tree_variance = 0, tree_variance_se = 0;
    double ratio = 0;  // covariance / tree_variance
    std::size_t replicates = 0;
};

struct MonteCarloOptions {
    std::size_t replicates = 0;
    std::uint64_t seed = 0;
    int threads = 1;
    QuadratureSettings quad{};
};

// Integrated squared error between two piecewise-constant functions against
// the design measure, exact on the union of their breakpoints (the cell mass
// comes from the model's exact CDF when available).
double ise(const StepFunction& f, const StepFunction& g,
           const RegressionModel& model);

// Integrated squared error between a piecewise-constant function and the
// model's regression function, by per-cell quadrature.
double ise_vs_regression(const StepFunction& f, const RegressionModel& model,
                         const QuadratureSettings& quad = {});

// Integral of f * g against the design measure, exact per merged sub-cell.
double weighted_product_integral(const StepFunction& f, const StepFunction& g,
                                 const RegressionModel& model);

// Per replicate: draw a partition and a learning sample, fit the tree, build
// the oracle on the same partition, and accumulate the exact variance
// integral plus quadrature bias and risk integrals.
RiskReport estimate_decomposition(const RegressionModel& model, std::size_t n,
                                  std::size_t k, const MonteCarloOptions& opt);

// Same protocol with the q-tree aggregates. q = 1 reproduces
// estimate_decomposition bit for bit under the same seed.
RiskReport estimate_forest_decomposition(const RegressionModel& model,
                                         std::size_t n, std::size_t k,
                                         std::size_t q,
                                         const MonteCarloOptions& opt);

// Per replicate: one sample, two independent partitions; accumulates the
// exact merged-grid integral of the two estimation-error products and the
// first tree's squared error.
CovarianceReport estimate_tree_covariance(const RegressionModel& model,
                                          std::size_t n, std::size_t k,
                                          const MonteCarloOptions& opt);

// E[1/B ; B >= 1] for B ~ Binomial(n, p): sum_{m=1}^{n} (1/m) P(B = m),
// accumulated from log-space terms. The empty event contributes 0; p = 0
// returns 0 by the same convention.
double expected_inverse_positive_binomial(std::size_t n, double p);

// Conditional estimation variance of a tree on a fixed partition:
//   sum_j p_j * [ E[1/B_j; B_j>=1] * (sigma^2 + (sigma_j^d)^2)
//                 + beta_j^2 * (1-p_j)^n ]
// with B_j ~ Binomial(n, p_j). The last term is the exact contribution of
// the empty-cell event under the beta_hat = 0 convention; dropping it is
// measurably wrong whenever n * min_j p_j is small (see tests).
double conditional_variance_eq9(const RegressionModel& model,
                                const UniformPartition& partition,
                                std::size_t n,
                                const QuadratureSettings& quad = {});

}  // namespace purf
