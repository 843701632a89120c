#pragma once

// Closed-form CDFs for the selective-reporting models: the
// repeat-below-threshold model (A), the coin-flip redraw model (B), and the
// biased-theory base CDF with its selection transform.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <variant>

#include "mendel/numerics.hpp"

namespace mendel {

namespace detail {
inline void check_unit_interval(double x, const char* who) {
    if (std::isnan(x)) throw std::invalid_argument(std::string(who) + ": NaN");
    if (x < 0.0 || x > 1.0)
        throw std::domain_error(std::string(who) + ": argument outside [0,1]");
}
}  // namespace detail

// Repeat an experiment when its p-value falls below alpha and report the
// larger p-value of the pair.
struct ModelA {
    double alpha = 0.0;
};

// Redraw with fixed probability beta regardless of outcome and report the
// larger p-value.
struct ModelB {
    double beta = 0.0;
};

// Chi-square-test p-value distribution when the data-generating success
// probability p1 differs from the hypothesized p0, with repeat-below-alpha
// selection on top.
struct BiasedTheory {
    int n = 1;
    double p0 = 0.5;
    double p1 = 0.5;
    double alpha = 0.0;

    double delta() const { return n * (p1 - p0) / std::sqrt(n * p0 * (1.0 - p0)); }
    double eta() const { return std::sqrt(p1 * (1.0 - p1) / (p0 * (1.0 - p0))); }
};

inline Probability model_a_cdf(const ModelA& m, double x) {
    detail::check_unit_interval(m.alpha, "model_a_cdf alpha");
    detail::check_unit_interval(x, "model_a_cdf");
    double v = (x <= m.alpha) ? x * x : (1.0 + m.alpha) * x - m.alpha;
    return Probability(v);
}

inline Probability model_b_cdf(const ModelB& m, double x) {
    detail::check_unit_interval(m.beta, "model_b_cdf beta");
    detail::check_unit_interval(x, "model_b_cdf");
    return Probability((1.0 - m.beta) * x + m.beta * x * x);
}

inline double model_quantile(const ModelA& m, Probability u) {
    double uv = u.value();
    if (uv <= m.alpha * m.alpha) return std::sqrt(uv);
    return (uv + m.alpha) / (1.0 + m.alpha);
}

inline double model_quantile(const ModelB& m, Probability u) {
    double uv = u.value();
    if (m.beta == 0.0) return uv;
    double b = 1.0 - m.beta;
    return (-b + std::sqrt(b * b + 4.0 * m.beta * uv)) / (2.0 * m.beta);
}

// Base CDF of the reported p-value under the wrong-theory binomial, by the
// normal approximation; endpoints by continuous extension.
inline Probability f0_cdf(const BiasedTheory& t, double x) {
    detail::check_unit_interval(x, "f0_cdf");
    if (t.p0 <= 0.0 || t.p0 >= 1.0 || t.p1 <= 0.0 || t.p1 >= 1.0)
        throw std::domain_error("f0_cdf: p0 and p1 must be in (0,1)");
    if (x == 0.0) return Probability(0.0);
    if (x == 1.0) return Probability(1.0);
    double z = std_normal_quantile(Probability(1.0 - x / 2.0));
    double d = t.delta();
    double e = t.eta();
    double v = std_normal_cdf((-z - d) / e).value() + 1.0 -
               std_normal_cdf((z - d) / e).value();
    if (v < 0.0) v = 0.0;
    if (v > 1.0) v = 1.0;
    return Probability(v);
}

// Selection transform of f0: squares the CDF below alpha, linear blend above.
inline Probability fstar_cdf(const BiasedTheory& t, double x) {
    detail::check_unit_interval(t.alpha, "fstar_cdf alpha");
    detail::check_unit_interval(x, "fstar_cdf");
    double f = f0_cdf(t, x).value();
    if (x <= t.alpha) return Probability(f * f);
    double fa = f0_cdf(t, t.alpha).value();
    return Probability((1.0 + fa) * f - fa);
}

// Model tag used by the Monte Carlo engine and the CLI.
struct NullModel {};
using SelectionModel = std::variant<NullModel, ModelA, ModelB>;

inline std::function<double(double)> cdf_callable(const ModelA& m) {
    return [m](double x) { return model_a_cdf(m, x).value(); };
}
inline std::function<double(double)> cdf_callable(const ModelB& m) {
    return [m](double x) { return model_b_cdf(m, x).value(); };
}
inline std::function<double(double)> uniform_cdf() {
    return [](double x) { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); };
}

}  // namespace mendel
