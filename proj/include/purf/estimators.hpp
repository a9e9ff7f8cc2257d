#pragma once

#include <cstddef>
#include <vector>

#include "purf/model.hpp"
#include "purf/partition.hpp"
#include "purf/quadrature.hpp"
#include "purf/step_function.hpp"

namespace purf {

// Regressogram on a uniform random partition: per-cell sample means of Y,
// with empty cells set to 0.
struct TreeEstimator {
    UniformPartition partition;
    std::vector<double> beta_hat;       // k+1 cell values
    std::vector<std::size_t> counts;    // k+1 occupancies, summing to n
};

// The best piecewise-constant approximation of s on the same partition:
// beta[j] = E[Y | cell j], cell_probs[j] = P(X in cell j), and
// cell_approx_var[j] = E[(s(X) - beta[j])^2 | cell j].
struct OracleTree {
    UniformPartition partition;
    std::vector<double> beta;
    std::vector<double> cell_probs;
    std::vector<double> cell_approx_var;
};

// q regressograms fitted on one shared learning sample; only the partitions
// differ. No bootstrap resampling.
struct ForestEstimator {
    std::vector<TreeEstimator> trees;
    std::size_t q() const { return trees.size(); }
};

TreeEstimator fit_tree(const LearningSample& sample,
                       UniformPartition partition);
double predict_tree(const TreeEstimator& tree, double x);

// Cell moments by adaptive composite Gauss-Legendre quadrature. Cells with
// zero design mass get beta = 0 (unreachable for catalog models, whose
// densities are bounded away from 0).
OracleTree oracle_tree(const RegressionModel& model, UniformPartition partition,
                       const QuadratureSettings& quad = {});

// Draws q independent partitions from rng (in tree order, so enlarging q
// extends rather than perturbs the draw) and fits each on the same sample.
ForestEstimator fit_forest(const LearningSample& sample, std::size_t k,
                           std::size_t q, RngStream& rng);
double predict_forest(const ForestEstimator& forest, double x);

StepFunction to_step(const TreeEstimator& tree);
StepFunction to_step(const OracleTree& oracle);

// The forest aggregate (1/q) sum of member trees, materialized on the sorted
// union of all member breakpoints.
StepFunction forest_step(const ForestEstimator& forest);
StepFunction forest_oracle_step(const std::vector<OracleTree>& oracles);

}  // namespace purf
