#include "purf/theory.hpp"

#include <cmath>
#include <stdexcept>

namespace purf {

BoundSet bounds(const RegressionModel& model, std::size_t n, std::size_t k) {
    if (n == 0) throw std::invalid_argument("bounds: n >= 1");
    BoundSet b{};
    const double s2 = model.noise_sd * model.noise_sd;
    const double c = model.lipschitz_const;
    const double k1 = static_cast<double>(k) + 1.0;
    b.tree_variance_leading = s2 * k1 / static_cast<double>(n);
    b.bias_bound = 6.0 * model.density_max * c * c / (k1 * k1);
    b.tree_risk_bound = b.tree_variance_leading + b.bias_bound;
    b.forest_variance_leading = 0.75 * b.tree_variance_leading;
    b.forest_risk_bound = b.forest_variance_leading + b.bias_bound;
    b.minimax_k =
        std::llround(std::cbrt(static_cast<double>(n))) - 1;
    b.rate_exponent = -2.0 / 3.0;
    return b;
}

std::pair<double, double> rate_fit(
    const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 3)
        throw std::domain_error("rate_fit: need at least 3 points");
    double sx = 0, sy = 0;
    for (const auto& [n, r] : points) {
        if (!(n > 0.0) || !(r > 0.0))
            throw std::domain_error("rate_fit: points must be positive");
        sx += std::log(n);
        sy += std::log(r);
    }
    const double mx = sx / points.size();
    const double my = sy / points.size();
    double sxx = 0, sxy = 0;
    for (const auto& [n, r] : points) {
        const double dx = std::log(n) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(r) - my);
    }
    if (sxx == 0.0) throw std::domain_error("rate_fit: degenerate n values");
    const double slope = sxy / sxx;
    return {slope, my - slope * mx};
}

double expected_n12(std::size_t k) {
    return static_cast<double>(k) + 1.0 - expected_m12(k);
}

}  // namespace purf
