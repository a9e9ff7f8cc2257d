#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "purf/rng.hpp"

namespace purf {

// Exact tie between cut points of two partitions: a probability-zero event
// under the continuous sampling scheme. Callers drawing random inputs may
// catch and resample.
struct TieError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// k sorted cut points in (0,1); sentinels 0 and 1 are implicit, so the cells
// are (U_(j), U_(j+1)] for j = 0..k with U_(0) = 0 and U_(k+1) = 1.
struct UniformPartition {
    std::vector<double> cuts;

    std::size_t k() const { return cuts.size(); }
    std::size_t cells() const { return cuts.size() + 1; }
    double lower(std::size_t j) const { return j == 0 ? 0.0 : cuts[j - 1]; }
    double upper(std::size_t j) const {
        return j == cuts.size() ? 1.0 : cuts[j];
    }
};

// Sorted union of two equal-k partitions with provenance labels (1 or 2).
struct MergedPartition {
    std::vector<double> cuts;
    std::vector<std::uint8_t> origin;
};

// k i.i.d. Uniform(0,1) draws, sorted; resamples on an exact internal tie.
UniformPartition sample_partition(std::size_t k, RngStream& rng);

// Index j of the cell (U_(j), U_(j+1)] containing x; x = 0 belongs to cell 0.
// Binary search, O(log k). Throws std::domain_error outside [0,1].
std::size_t locate(const UniformPartition& p, double x);

// Throws std::invalid_argument on unequal k and TieError on a cross tie.
MergedPartition merge(const UniformPartition& p1, const UniformPartition& p2);

// Number of index pairs (r, s), r in 1..k-2 and s in 1..k-1, such that the
// three consecutive cut points r, r+1, r+2 of p1 lie strictly inside the
// s-th cell of p2. Single merged scan, O(k): every maximal run of l >= 3
// consecutive p1 cuts strictly between two adjacent p2 cuts contributes
// l - 2 (runs against the 0/1 sentinels are excluded by the s range).
std::size_t count_m12(const UniformPartition& p1, const UniformPartition& p2);

// Exact expectation of count_m12 over independent uniform partition pairs:
// (k-2)/(2(2k-1)) * (k-3 + 4/(k+1)) for k >= 3, and 0 for k <= 2.
double expected_m12(std::size_t k);

// P(three consecutive order statistics r..r+2 of the first partition fall
// inside the s-th cell of the second), as a double sum of factorial ratios
// evaluated with long-double log-factorials. Summing over the full (r, s)
// range reproduces expected_m12(k). Requires k >= 3, 1 <= r <= k-2,
// 1 <= s <= k-1.
double crossing_probability(std::size_t k, std::size_t r, std::size_t s);

// m-th moment of a spacing U_(j+1) - U_(j), i.e. of Beta(1, k):
// m! k! / (k+m)!. Equals 1 for k = 0.
double spacing_moment(std::size_t k, unsigned m);

}  // namespace purf
