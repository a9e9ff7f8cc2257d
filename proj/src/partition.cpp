#include "purf/partition.hpp"

#include <algorithm>
#include <cmath>

namespace purf {

UniformPartition sample_partition(std::size_t k, RngStream& rng) {
    UniformPartition p;
    p.cuts.resize(k);
    for (;;) {
        for (std::size_t i = 0; i < k; ++i) p.cuts[i] = rng.uniform01();
        std::sort(p.cuts.begin(), p.cuts.end());
        bool tie = false;
        for (std::size_t i = 1; i < k; ++i)
            if (p.cuts[i] == p.cuts[i - 1]) {
                tie = true;
                break;
            }
        if (!tie) return p;
    }
}

std::size_t locate(const UniformPartition& p, double x) {
    if (!(x >= 0.0 && x <= 1.0))
        throw std::domain_error("locate: x outside [0,1]");
    // Cell j collects (U_(j), U_(j+1)], so j = #cuts strictly below x.
    return static_cast<std::size_t>(
        std::lower_bound(p.cuts.begin(), p.cuts.end(), x) - p.cuts.begin());
}

MergedPartition merge(const UniformPartition& p1, const UniformPartition& p2) {
    const std::size_t k = p1.k();
    if (p2.k() != k)
        throw std::invalid_argument("merge: partitions must have equal k");
    MergedPartition m;
    m.cuts.reserve(2 * k);
    m.origin.reserve(2 * k);
    std::size_t i = 0, j = 0;
    while (i < k || j < k) {
        if (i < k && j < k && p1.cuts[i] == p2.cuts[j])
            throw TieError("merge: exact tie across partitions");
        if (j == k || (i < k && p1.cuts[i] < p2.cuts[j])) {
            m.cuts.push_back(p1.cuts[i++]);
            m.origin.push_back(1);
        } else {
            m.cuts.push_back(p2.cuts[j++]);
            m.origin.push_back(2);
        }
    }
    return m;
}

std::size_t count_m12(const UniformPartition& p1, const UniformPartition& p2) {
    const std::size_t k = p1.k();
    if (p2.k() != k)
        throw std::invalid_argument("count_m12: partitions must have equal k");
    if (k < 3) return 0;
    std::size_t total = 0;
    std::size_t i = 0;
    // Interior cells of p2 only: (c2[s-1], c2[s]) for s = 1..k-1.
    for (std::size_t s = 1; s < k; ++s) {
        const double lo = p2.cuts[s - 1];
        const double hi = p2.cuts[s];
        while (i < k && p1.cuts[i] <= lo) {
            if (p1.cuts[i] == lo)
                throw TieError("count_m12: exact tie across partitions");
            ++i;
        }
        const std::size_t start = i;
        while (i < k && p1.cuts[i] < hi) ++i;
        if (i < k && p1.cuts[i] == hi)
            throw TieError("count_m12: exact tie across partitions");
        const std::size_t run = i - start;
        if (run >= 3) total += run - 2;
    }
    return total;
}

double expected_m12(std::size_t k) {
    if (k <= 2) return 0.0;
    const double kd = static_cast<double>(k);
    // Factored form; finite at k = 3 where the textbook product is 0 * inf.
    return (kd - 2.0) / (2.0 * (2.0 * kd - 1.0)) *
           ((kd - 3.0) + 4.0 / (kd + 1.0));
}

double crossing_probability(std::size_t k, std::size_t r, std::size_t s) {
    if (k < 3 || r < 1 || r > k - 2 || s < 1 || s > k - 1)
        throw std::domain_error(
            "crossing_probability: need k >= 3, 1 <= r <= k-2, 1 <= s <= k-1");
    // Log-factorial table up to (2k)! in long double.
    std::vector<long double> lf(2 * k + 1);
    lf[0] = 0.0L;
    for (std::size_t i = 1; i <= 2 * k; ++i)
        lf[i] = lf[i - 1] + std::log(static_cast<long double>(i));
    long double acc = 0.0L;
    for (std::size_t j = r + 2; j <= k; ++j) {
        for (std::size_t i = 0; i < r; ++i) {
            const long double lt = lf[k] - lf[i] - lf[k - j] + lf[k] -
                                   lf[s - 1] - lf[k - s - 1] +
                                   lf[i + s - 1] + lf[2 * k - j - s - 1] -
                                   lf[2 * k];
            acc += std::exp(lt);
        }
    }
    return static_cast<double>(acc);
}

double spacing_moment(std::size_t k, unsigned m) {
    if (m == 0) throw std::domain_error("spacing_moment: m must be >= 1");
    double out = 1.0;
    for (unsigned i = 1; i <= m; ++i)
        out *= static_cast<double>(i) / static_cast<double>(k + i);
    return out;
}

}  // namespace purf
