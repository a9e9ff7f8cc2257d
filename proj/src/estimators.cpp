#include "purf/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace purf {

TreeEstimator fit_tree(const LearningSample& sample,
                       UniformPartition partition) {
    if (sample.size() == 0)
        throw std::invalid_argument("fit_tree: empty sample");
    if (sample.xs.size() != sample.ys.size())
        throw std::invalid_argument("fit_tree: xs/ys length mismatch");
    TreeEstimator t;
    const std::size_t cells = partition.cells();
    t.beta_hat.assign(cells, 0.0);
    t.counts.assign(cells, 0);
    t.partition = std::move(partition);
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const std::size_t j = locate(t.partition, sample.xs[i]);
        t.beta_hat[j] += sample.ys[i];
        ++t.counts[j];
    }
    for (std::size_t j = 0; j < cells; ++j)
        t.beta_hat[j] = t.counts[j] ? t.beta_hat[j] / t.counts[j] : 0.0;
    return t;
}

double predict_tree(const TreeEstimator& tree, double x) {
    return tree.beta_hat[locate(tree.partition, x)];
}

OracleTree oracle_tree(const RegressionModel& model, UniformPartition partition,
                       const QuadratureSettings& quad) {
    OracleTree o;
    const std::size_t cells = partition.cells();
    o.beta.resize(cells);
    o.cell_probs.resize(cells);
    o.cell_approx_var.resize(cells);
    o.partition = std::move(partition);
    const auto& s = model.regression_fn;
    const auto& mu = model.design_density;
    for (std::size_t j = 0; j < cells; ++j) {
        const double a = o.partition.lower(j);
        const double b = o.partition.upper(j);
        try {
            const double p = integrate(mu, a, b, quad);
            const double sm =
                integrate([&](double x) { return s(x) * mu(x); }, a, b, quad);
            const double beta = p > 0.0 ? sm / p : 0.0;
            double v = 0.0;
            if (p > 0.0) {
                v = integrate(
                        [&](double x) {
                            const double d = s(x) - beta;
                            return d * d * mu(x);
                        },
                        a, b, quad) /
                    p;
            }
            o.cell_probs[j] = p;
            o.beta[j] = beta;
            o.cell_approx_var[j] = std::max(v, 0.0);
        } catch (const QuadratureError& e) {
            throw QuadratureError("oracle_tree: cell " + std::to_string(j) +
                                  ": " + e.what());
        }
    }
    return o;
}

ForestEstimator fit_forest(const LearningSample& sample, std::size_t k,
                           std::size_t q, RngStream& rng) {
    if (q == 0) throw std::invalid_argument("fit_forest: q must be >= 1");
    ForestEstimator f;
    f.trees.reserve(q);
    for (std::size_t t = 0; t < q; ++t)
        f.trees.push_back(fit_tree(sample, sample_partition(k, rng)));
    return f;
}

double predict_forest(const ForestEstimator& forest, double x) {
    if (forest.trees.empty())
        throw std::invalid_argument("predict_forest: empty forest");
    double acc = 0.0;
    for (const auto& t : forest.trees) acc += predict_tree(t, x);
    return acc / static_cast<double>(forest.q());
}

StepFunction to_step(const TreeEstimator& tree) {
    return StepFunction{tree.partition.cuts, tree.beta_hat};
}

StepFunction to_step(const OracleTree& oracle) {
    return StepFunction{oracle.partition.cuts, oracle.beta};
}

namespace {

// Averages per-tree cell values over the sorted union of all breakpoints.
// One forward pass per tree: both the union and the tree cuts are sorted.
StepFunction average_steps(const std::vector<const std::vector<double>*>& cuts,
                           const std::vector<const std::vector<double>*>& vals) {
    StepFunction out;
    std::size_t total = 0;
    for (const auto* c : cuts) total += c->size();
    out.cuts.reserve(total);
    for (const auto* c : cuts)
        out.cuts.insert(out.cuts.end(), c->begin(), c->end());
    std::sort(out.cuts.begin(), out.cuts.end());
    out.values.assign(out.cuts.size() + 1, 0.0);
    for (std::size_t t = 0; t < cuts.size(); ++t) {
        const auto& tc = *cuts[t];
        const auto& tv = *vals[t];
        std::size_t ti = 0;
        for (std::size_t c = 0; c <= out.cuts.size(); ++c) {
            out.values[c] += tv[ti];
            if (c < out.cuts.size()) {
                const double cut = out.cuts[c];
                while (ti < tc.size() && tc[ti] == cut) ++ti;
            }
        }
    }
    const double inv_q = 1.0 / static_cast<double>(cuts.size());
    for (auto& v : out.values) v *= inv_q;
    return out;
}

}  // namespace

StepFunction forest_step(const ForestEstimator& forest) {
    std::vector<const std::vector<double>*> cuts, vals;
    cuts.reserve(forest.q());
    vals.reserve(forest.q());
    for (const auto& t : forest.trees) {
        cuts.push_back(&t.partition.cuts);
        vals.push_back(&t.beta_hat);
    }
    return average_steps(cuts, vals);
}

StepFunction forest_oracle_step(const std::vector<OracleTree>& oracles) {
    std::vector<const std::vector<double>*> cuts, vals;
    cuts.reserve(oracles.size());
    vals.reserve(oracles.size());
    for (const auto& o : oracles) {
        cuts.push_back(&o.partition.cuts);
        vals.push_back(&o.beta);
    }
    return average_steps(cuts, vals);
}

}  // namespace purf
