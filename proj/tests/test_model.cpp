#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "purf/model.hpp"

using namespace purf;

TEST_CASE("catalog constants") {
    const auto lin = catalog_model("linear-uniform");
    CHECK(lin.lipschitz_const == 1.0);
    CHECK(lin.density_max == 1.0);
    CHECK(lin.density_min == 1.0);
    const auto sine = catalog_model("sine-uniform");
    CHECK(sine.lipschitz_const == doctest::Approx(2 * M_PI));
    const auto tilt = catalog_model("linear-tilted");
    CHECK(tilt.density_min == doctest::Approx(2.0 / 3.0));
    CHECK(tilt.density_max == doctest::Approx(4.0 / 3.0));
}

TEST_CASE("catalog entries satisfy their declared invariants") {
    for (const auto& name : catalog_names())
        CHECK_NOTHROW(validate_model(catalog_model(name)));
}

TEST_CASE("unknown model names the valid set") {
    try {
        catalog_model("nope");
        FAIL("expected throw");
    } catch (const std::invalid_argument& e) {
        const std::string msg = e.what();
        for (const auto& name : catalog_names())
            CHECK(msg.find(name) != std::string::npos);
    }
}

TEST_CASE("sample basics") {
    RngStream rng(1);
    const auto m = catalog_model("linear-uniform", 1.0);
    const auto s = sample(m, 5, rng);
    CHECK(s.size() == 5);
    for (double x : s.xs) {
        CHECK(x >= 0.0);
        CHECK(x <= 1.0);
    }
    CHECK_THROWS_AS(sample(m, 0, rng), std::invalid_argument);
}

TEST_CASE("zero noise reproduces the regression function exactly") {
    RngStream rng(2);
    for (const auto& name : catalog_names()) {
        const auto m = catalog_model(name, 0.0);
        const auto s = sample(m, 1000, rng);
        for (std::size_t i = 0; i < s.size(); ++i)
            CHECK(s.ys[i] == m.regression_fn(s.xs[i]));
    }
}

TEST_CASE("noise mean obeys the CLT band") {
    RngStream rng(3);
    const std::size_t n = 100000;
    const auto m = catalog_model("linear-uniform", 1.0);
    const auto s = sample(m, n, rng);
    double acc = 0;
    for (std::size_t i = 0; i < n; ++i) acc += s.ys[i] - s.xs[i];
    CHECK(std::fabs(acc / n) < 3.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("uniform noise kind keeps the declared variance") {
    RngStream rng(4);
    auto m = catalog_model("linear-uniform", 0.5);
    m.noise = NoiseKind::uniform;
    const std::size_t n = 200000;
    const auto s = sample(m, n, rng);
    double ss = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = s.ys[i] - s.xs[i];
        ss += e * e;
    }
    CHECK(ss / n == doctest::Approx(0.25).epsilon(0.02));
}

TEST_CASE("design draws track the design CDF (Kolmogorov-Smirnov)") {
    const std::size_t n = 100000;
    for (const auto& name : catalog_names()) {
        RngStream rng(5);
        const auto m = catalog_model(name, 0.0);
        auto s = sample(m, n, rng);
        std::sort(s.xs.begin(), s.xs.end());
        double ks = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double f = m.design_cdf(s.xs[i]);
            ks = std::max(ks, std::fabs(f - (i + 1.0) / n));
            ks = std::max(ks, std::fabs(f - static_cast<double>(i) / n));
        }
        CHECK(ks < 0.01);
    }
}

TEST_CASE("rejection sampling fallback matches the density") {
    // Same tilted density, inverse CDF removed.
    auto m = catalog_model("linear-tilted", 0.0);
    const auto cdf = m.design_cdf;
    m.design_inv_cdf = nullptr;
    RngStream rng(6);
    const std::size_t n = 50000;
    auto s = sample(m, n, rng);
    std::sort(s.xs.begin(), s.xs.end());
    double ks = 0;
    for (std::size_t i = 0; i < n; ++i)
        ks = std::max(ks, std::fabs(cdf(s.xs[i]) - (i + 1.0) / n));
    CHECK(ks < 0.015);
}
