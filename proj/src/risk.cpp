#include "purf/risk.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "purf/parallel.hpp"

namespace purf {

namespace {

// Substream domains; every replicate derives its streams from
// (seed, domain, replicate[, tree]) only.
constexpr std::uint64_t kDomainSample = 1;
constexpr std::uint64_t kDomainPartition = 2;

double cell_mass(const RegressionModel& model, double a, double b) {
    if (a >= b) return 0.0;
    if (model.design_cdf) return model.design_cdf(b) - model.design_cdf(a);
    return integrate(model.design_density, a, b);
}

struct MeanSe {
    double mean = 0, se = 0;
};

MeanSe reduce(const std::vector<double>& xs) {
    const std::size_t n = xs.size();
    double sum = 0;
    for (double x : xs) sum += x;
    const double mean = sum / static_cast<double>(n);
    if (n < 2) return {mean, 0.0};
    double ss = 0;
    for (double x : xs) {
        const double d = x - mean;
        ss += d * d;
    }
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    return {mean, sd / std::sqrt(static_cast<double>(n))};
}

template <class Op>
double walk_pair(const StepFunction& f, const StepFunction& g,
                 const RegressionModel& model, Op op) {
    const std::vector<double> cuts = merged_cuts(f, g);
    double acc = 0.0;
    double a = 0.0;
    std::size_t fi = 0, gi = 0;
    for (std::size_t c = 0; c <= cuts.size(); ++c) {
        const double b = c < cuts.size() ? cuts[c] : 1.0;
        if (b > a) acc += op(f.values[fi], g.values[gi]) * cell_mass(model, a, b);
        if (c < cuts.size()) {
            while (fi < f.cuts.size() && f.cuts[fi] == b) ++fi;
            while (gi < g.cuts.size() && g.cuts[gi] == b) ++gi;
        }
        a = b;
    }
    return acc;
}

}  // namespace

double ise(const StepFunction& f, const StepFunction& g,
           const RegressionModel& model) {
    if (f.cuts == g.cuts) {
        double acc = 0.0;
        double a = 0.0;
        for (std::size_t j = 0; j < f.values.size(); ++j) {
            const double b = j < f.cuts.size() ? f.cuts[j] : 1.0;
            const double d = f.values[j] - g.values[j];
            if (b > a) acc += d * d * cell_mass(model, a, b);
            a = b;
        }
        return acc;
    }
    return walk_pair(f, g, model, [](double x, double y) {
        const double d = x - y;
        return d * d;
    });
}

double weighted_product_integral(const StepFunction& f, const StepFunction& g,
                                 const RegressionModel& model) {
    return walk_pair(f, g, model, [](double x, double y) { return x * y; });
}

double ise_vs_regression(const StepFunction& f, const RegressionModel& model,
                         const QuadratureSettings& quad) {
    const auto& s = model.regression_fn;
    const auto& mu = model.design_density;
    double acc = 0.0;
    double a = 0.0;
    for (std::size_t j = 0; j < f.values.size(); ++j) {
        const double b = j < f.cuts.size() ? f.cuts[j] : 1.0;
        if (b > a) {
            const double v = f.values[j];
            acc += integrate(
                [&](double x) {
                    const double d = v - s(x);
                    return d * d * mu(x);
                },
                a, b, quad);
        }
        a = b;
    }
    return acc;
}

RiskReport estimate_forest_decomposition(const RegressionModel& model,
                                         std::size_t n, std::size_t k,
                                         std::size_t q,
                                         const MonteCarloOptions& opt) {
    if (opt.replicates < 2)
        throw std::invalid_argument("estimate_decomposition: replicates >= 2");
    if (q < 1)
        throw std::invalid_argument("estimate_forest_decomposition: q >= 1");
    std::vector<std::array<double, 3>> slots(opt.replicates);
    parallel_for(opt.replicates, opt.threads, [&](std::size_t rep) {
        RngStream srng(opt.seed, {kDomainSample, rep});
        const LearningSample ls = sample(model, n, srng);
        ForestEstimator forest;
        forest.trees.reserve(q);
        std::vector<OracleTree> oracles;
        oracles.reserve(q);
        for (std::size_t t = 0; t < q; ++t) {
            RngStream prng(opt.seed, {kDomainPartition, rep, t});
            UniformPartition u = sample_partition(k, prng);
            forest.trees.push_back(fit_tree(ls, u));
            oracles.push_back(oracle_tree(model, std::move(u), opt.quad));
        }
        const StepFunction shat = forest_step(forest);
        const StepFunction stil = forest_oracle_step(oracles);
        slots[rep] = {ise_vs_regression(shat, model, opt.quad),
                      ise(shat, stil, model),
                      ise_vs_regression(stil, model, opt.quad)};
    });
    std::vector<double> risks(opt.replicates), vars(opt.replicates),
        biases(opt.replicates), gaps(opt.replicates);
    for (std::size_t r = 0; r < opt.replicates; ++r) {
        risks[r] = slots[r][0];
        vars[r] = slots[r][1];
        biases[r] = slots[r][2];
        gaps[r] = slots[r][0] - slots[r][1] - slots[r][2];
    }
    RiskReport rep;
    const MeanSe mr = reduce(risks), mv = reduce(vars), mb = reduce(biases),
                 mg = reduce(gaps);
    rep.risk = mr.mean;
    rep.risk_se = mr.se;
    rep.variance_term = mv.mean;
    rep.variance_se = mv.se;
    rep.bias_term = mb.mean;
    rep.bias_se = mb.se;
    rep.decomposition_gap = mg.mean;
    rep.decomposition_gap_se = mg.se;
    rep.replicates = opt.replicates;
    rep.model_name = model.name;
    rep.sigma = model.noise_sd;
    rep.n = n;
    rep.k = k;
    rep.q = q;
    rep.seed = opt.seed;
    return rep;
}

RiskReport estimate_decomposition(const RegressionModel& model, std::size_t n,
                                  std::size_t k, const MonteCarloOptions& opt) {
    return estimate_forest_decomposition(model, n, k, 1, opt);
}

CovarianceReport estimate_tree_covariance(const RegressionModel& model,
                                          std::size_t n, std::size_t k,
                                          const MonteCarloOptions& opt) {
    if (opt.replicates < 2)
        throw std::invalid_argument("estimate_tree_covariance: replicates >= 2");
    std::vector<std::array<double, 2>> slots(opt.replicates);
    parallel_for(opt.replicates, opt.threads, [&](std::size_t rep) {
        RngStream srng(opt.seed, {kDomainSample, rep});
        const LearningSample ls = sample(model, n, srng);
        StepFunction diff[2];
        for (std::size_t t = 0; t < 2; ++t) {
            RngStream prng(opt.seed, {kDomainPartition, rep, t});
            UniformPartition u = sample_partition(k, prng);
            const TreeEstimator tree = fit_tree(ls, u);
            const OracleTree oracle = oracle_tree(model, std::move(u), opt.quad);
            diff[t] = step_difference(to_step(tree), to_step(oracle));
        }
        slots[rep] = {weighted_product_integral(diff[0], diff[1], model),
                      weighted_product_integral(diff[0], diff[0], model)};
    });
    std::vector<double> covs(opt.replicates), vars(opt.replicates);
    for (std::size_t r = 0; r < opt.replicates; ++r) {
        covs[r] = slots[r][0];
        vars[r] = slots[r][1];
    }
    const MeanSe mc = reduce(covs), mv = reduce(vars);
    CovarianceReport out;
    out.covariance = mc.mean;
    out.covariance_se = mc.se;
    out.tree_variance = mv.mean;
    out.tree_variance_se = mv.se;
    out.ratio = mv.mean != 0.0 ? mc.mean / mv.mean : 0.0;
    out.replicates = opt.replicates;
    return out;
}

double expected_inverse_positive_binomial(std::size_t n, double p) {
    if (n == 0)
        throw std::invalid_argument(
            "expected_inverse_positive_binomial: n >= 1");
    if (p <= 0.0) return 0.0;
    if (p >= 1.0) return 1.0 / static_cast<double>(n);
    const double lgn1 = std::lgamma(static_cast<double>(n) + 1.0);
    const double lp = std::log(p);
    const double lq = std::log1p(-p);
    double acc = 0.0;
    for (std::size_t m = 1; m <= n; ++m) {
        const double md = static_cast<double>(m);
        const double lt = lgn1 - std::lgamma(md + 1.0) -
                          std::lgamma(static_cast<double>(n - m) + 1.0) +
                          md * lp + static_cast<double>(n - m) * lq;
        acc += std::exp(lt) / md;
    }
    return acc;
}

double conditional_variance_eq9(const RegressionModel& model,
                                const UniformPartition& partition,
                                std::size_t n,
                                const QuadratureSettings& quad) {
    if (n == 0) throw std::invalid_argument("conditional_variance_eq9: n >= 1");
    const OracleTree o = oracle_tree(model, partition, quad);
    const double s2 = model.noise_sd * model.noise_sd;
    double acc = 0.0;
    for (std::size_t j = 0; j < o.cell_probs.size(); ++j) {
        const double p = o.cell_probs[j];
        if (p <= 0.0) continue;
        double term = expected_inverse_positive_binomial(n, p) *
                      (s2 + o.cell_approx_var[j]);
        if (p < 1.0) {
            const double empty =
                std::exp(static_cast<double>(n) * std::log1p(-p));
            term += o.beta[j] * o.beta[j] * empty;
        }
        acc += p * term;
    }
    return acc;
}

}  // namespace purf
