#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace purf {

struct QuadratureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Composite 16-node Gauss-Legendre with panel doubling until two successive
// estimates agree to rel_tol. abs_tol keeps integrals that vanish by
// cancellation (true value ~0) from refining forever.
struct QuadratureSettings {
    double rel_tol = 1e-10;
    double abs_tol = 1e-15;
    int max_panels = 4096;
};

namespace detail {

// 16-point Gauss-Legendre nodes/weights on [-1, 1], positive half.
inline constexpr double kGlNode[8] = {
    0.0950125098376374401853193, 0.2816035507792589132304605,
    0.4580167776572273863424194, 0.6178762444026437484466718,
    0.7554044083550030338951012, 0.8656312023878317438804679,
    0.9445750230732325760779884, 0.9894009349916499325961542};
inline constexpr double kGlWeight[8] = {
    0.1894506104550684962853967, 0.1826034150449235888667637,
    0.1691565193950025381893121, 0.1495959888165767320815017,
    0.1246289712555338720524763, 0.0951585116824927848099251,
    0.0622535239386478928628438, 0.0271524594117540948517806};

template <class F>
double panels(F& f, double a, double b, int m) {
    const double h = (b - a) / m;
    double total = 0.0;
    for (int p = 0; p < m; ++p) {
        const double mid = a + (p + 0.5) * h;
        const double half = 0.5 * h;
        double acc = 0.0;
        for (int i = 0; i < 8; ++i) {
            const double dx = half * kGlNode[i];
            acc += kGlWeight[i] * (f(mid - dx) + f(mid + dx));
        }
        total += half * acc;
    }
    return total;
}

}  // namespace detail

template <class F>
double integrate(F&& f, double a, double b, const QuadratureSettings& q = {}) {
    if (!(a <= b)) throw QuadratureError("integrate: empty or inverted interval");
    if (a == b) return 0.0;
    double prev = detail::panels(f, a, b, 1);
    for (int m = 2; m <= q.max_panels; m *= 2) {
        const double cur = detail::panels(f, a, b, m);
        const double diff = std::fabs(cur - prev);
        if (diff <= q.rel_tol * std::fabs(cur) || diff <= q.abs_tol) return cur;
        prev = cur;
    }
    throw QuadratureError("integrate: no convergence to rel_tol " +
                          std::to_string(q.rel_tol) + " within " +
                          std::to_string(q.max_panels) + " panels");
}

}  // namespace purf
