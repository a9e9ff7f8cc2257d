#include "purf/model.hpp"

#include <cmath>
#include <stdexcept>

#include "purf/quadrature.hpp"

namespace purf {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::string known_names_msg() {
    std::string msg;
    for (const auto& n : catalog_names()) {
        if (!msg.empty()) msg += ", ";
        msg += n;
    }
    return msg;
}

}  // namespace

std::vector<std::string> catalog_names() {
    return {"linear-uniform", "sine-uniform", "linear-tilted"};
}

RegressionModel catalog_model(const std::string& name, double noise_sd) {
    if (!(noise_sd >= 0.0))
        throw std::invalid_argument("catalog_model: noise_sd must be >= 0");
    RegressionModel m;
    m.name = name;
    m.noise_sd = noise_sd;
    if (name == "linear-uniform") {
        m.regression_fn = [](double x) { return x; };
        m.design_density = [](double) { return 1.0; };
        m.design_cdf = [](double x) { return x; };
        m.design_inv_cdf = [](double u) { return u; };
        m.lipschitz_const = 1.0;
        m.density_max = 1.0;
        m.density_min = 1.0;
    } else if (name == "sine-uniform") {
        m.regression_fn = [](double x) { return std::sin(kTwoPi * x); };
        m.design_density = [](double) { return 1.0; };
        m.design_cdf = [](double x) { return x; };
        m.design_inv_cdf = [](double u) { return u; };
        m.lipschitz_const = kTwoPi;
        m.density_max = 1.0;
        m.density_min = 1.0;
    } else if (name == "linear-tilted") {
        // mu(x) = (2/3)(1+x): affine density with mass one on [0,1].
        m.regression_fn = [](double x) { return x; };
        m.design_density = [](double x) { return (2.0 / 3.0) * (1.0 + x); };
        m.design_cdf = [](double x) { return (2.0 * x + x * x) / 3.0; };
        m.design_inv_cdf = [](double u) { return std::sqrt(1.0 + 3.0 * u) - 1.0; };
        m.lipschitz_const = 1.0;
        m.density_max = 4.0 / 3.0;
        m.density_min = 2.0 / 3.0;
    } else {
        throw std::invalid_argument("unknown model '" + name +
                                    "' (valid: " + known_names_msg() + ")");
    }
    return m;
}

void validate_model(const RegressionModel& m) {
    if (!m.regression_fn || !m.design_density)
        throw std::runtime_error("model '" + m.name +
                                 "': regression_fn and design_density required");
    const double mass = integrate(m.design_density, 0.0, 1.0);
    if (std::fabs(mass - 1.0) > 1e-8)
        throw std::runtime_error("model '" + m.name +
                                 "': design density mass " +
                                 std::to_string(mass) + " != 1 within 1e-8");
    const int grid = 10000;
    const double slack = 1e-9;
    double prev_x = 0.0, prev_s = m.regression_fn(0.0);
    for (int i = 0; i <= grid; ++i) {
        const double x = static_cast<double>(i) / grid;
        const double d = m.design_density(x);
        if (d < m.density_min - slack || d > m.density_max + slack)
            throw std::runtime_error("model '" + m.name +
                                     "': density outside declared [m, M] at x=" +
                                     std::to_string(x));
        const double s = m.regression_fn(x);
        if (i > 0 &&
            std::fabs(s - prev_s) > m.lipschitz_const * (x - prev_x) + 1e-12)
            throw std::runtime_error("model '" + m.name +
                                     "': declared Lipschitz constant violated near x=" +
                                     std::to_string(x));
        prev_x = x;
        prev_s = s;
    }
}

LearningSample sample(const RegressionModel& model, std::size_t n,
                      RngStream& rng) {
    if (n == 0) throw std::invalid_argument("sample: n must be >= 1");
    LearningSample out;
    out.xs.resize(n);
    out.ys.resize(n);
    if (model.design_inv_cdf) {
        for (std::size_t i = 0; i < n; ++i)
            out.xs[i] = model.design_inv_cdf(rng.uniform01());
    } else {
        // Rejection under the flat envelope density_max.
        for (std::size_t i = 0; i < n; ++i) {
            for (;;) {
                const double x = rng.uniform01();
                if (rng.uniform01() * model.density_max <= model.design_density(x)) {
                    out.xs[i] = x;
                    break;
                }
            }
        }
    }
    if (model.noise_sd == 0.0) {
        for (std::size_t i = 0; i < n; ++i)
            out.ys[i] = model.regression_fn(out.xs[i]);
    } else if (model.noise == NoiseKind::gaussian) {
        std::size_t i = 0;
        for (; i + 1 < n; i += 2) {
            double a, b;
            rng.normal_pair(a, b);
            out.ys[i] = model.regression_fn(out.xs[i]) + model.noise_sd * a;
            out.ys[i + 1] = model.regression_fn(out.xs[i + 1]) + model.noise_sd * b;
        }
        if (i < n)
            out.ys[i] = model.regression_fn(out.xs[i]) + model.noise_sd * rng.normal();
    } else {
        // Uniform(-a, a) with a = sd * sqrt(3) so the variance is sd^2.
        const double a = model.noise_sd * std::sqrt(3.0);
        for (std::size_t i = 0; i < n; ++i)
            out.ys[i] = model.regression_fn(out.xs[i]) + rng.uniform_sym(a);
    }
    return out;
}

}  // namespace purf
