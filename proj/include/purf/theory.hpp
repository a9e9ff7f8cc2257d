#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "purf/model.hpp"
#include "purf/partition.hpp"

namespace purf {

// Closed-form leading terms and bounds for a tree and a forest at (n, k),
// evaluated with the model's declared sigma, C and M.
struct BoundSet {
    double tree_variance_leading;    // sigma^2 (k+1) / n
    double bias_bound;               // 6 M C^2 / (k+1)^2
    double tree_risk_bound;          // sum of the two above
    double forest_variance_leading;  // (3/4) sigma^2 (k+1) / n
    double forest_risk_bound;
    long long minimax_k;             // round(n^{1/3}) - 1
    double rate_exponent;            // -2/3
};

BoundSet bounds(const RegressionModel& model, std::size_t n, std::size_t k);

// Least-squares slope and intercept of log(risk) against log(n). Requires at
// least 3 points, all coordinates positive.
std::pair<double, double> rate_fit(
    const std::vector<std::pair<double, double>>& points);

// k + 1 - expected_m12(k): the expected number of surviving covariance terms
// for a pair of independent uniform partitions; the ratio to k+1 decreases
// toward 3/4.
double expected_n12(std::size_t k);

}  // namespace purf
