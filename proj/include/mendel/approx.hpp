#pragma once

// Closed-form mean and variance of a statistic recorded under the
// repeat-below-threshold model, the density of that statistic, and the
// CLT-based p-value for the aggregated total.

#include <cmath>
#include <functional>
#include <stdexcept>

#include "mendel/numerics.hpp"

namespace mendel {

struct ModelAMoments {
    double alpha = 0.0;
    double c_alpha = 0.0;   // (1-alpha) quantile of chi2_1
    double k_alpha = 0.0;   // exp(-c_alpha)/pi
    double mu_star = 0.0;
    double sigma2_star = 0.0;
};

inline ModelAMoments model_a_moments(double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw std::domain_error("model_a_moments: alpha must be in [0,1]");
    ModelAMoments m;
    m.alpha = alpha;
    if (alpha == 0.0) {
        // no selection: plain chi2_1 moments in the c -> infinity limit
        m.c_alpha = std::numeric_limits<double>::infinity();
        m.k_alpha = 0.0;
        m.mu_star = 1.0;
        m.sigma2_star = 2.0;
        return m;
    }
    m.c_alpha = alpha == 1.0 ? 0.0
                             : chi_square_quantile(Probability(1.0 - alpha), 1);
    m.k_alpha = std::exp(-m.c_alpha) / M_PI;
    double root = std::sqrt(2.0 * m.c_alpha * m.k_alpha);
    double one_minus = 1.0 - alpha;
    m.mu_star = 1.0 - (2.0 * m.k_alpha + one_minus * root);
    m.sigma2_star =
        2.0 - (4.0 * m.k_alpha * m.k_alpha +
               one_minus * root * (4.0 * m.k_alpha + 1.0 + m.c_alpha) +
               2.0 * (2.0 + m.c_alpha * (2.0 - 2.0 * alpha + alpha * alpha)) *
                   m.k_alpha);
    return m;
}

// 1 - Phi((q_obs - m*mu) / sqrt(m*sigma2)): the normal approximation to the
// aggregated total under the selection model.
inline Probability approx_total_pvalue(double alpha, double q_observed = 41.3376,
                                       int m = 84) {
    if (m < 1) throw std::domain_error("approx_total_pvalue: m must be >= 1");
    ModelAMoments mm = model_a_moments(alpha);
    if (mm.sigma2_star <= 0.0)
        throw std::runtime_error("approx_total_pvalue: nonpositive variance");
    double z = (q_observed - m * mm.mu_star) / std::sqrt(m * mm.sigma2_star);
    return Probability(1.0 - std_normal_cdf(z).value());
}

// Density of the recorded statistic: (1+alpha) f(x) below the threshold,
// 2 f(x) (1 - F(x)) above, with f and F the chi2_1 density and CDF.
inline double qstar_density(double alpha, double x) {
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw std::domain_error("qstar_density: alpha must be in [0,1]");
    if (!(x > 0.0)) throw std::domain_error("qstar_density: x must be positive");
    double c = model_a_moments(alpha).c_alpha;
    double f = chi_square_pdf(x, 1);
    if (x <= c) return (1.0 + alpha) * f;
    return 2.0 * f * (1.0 - chi_square_cdf(x, 1));
}

namespace detail {

inline double adaptive_simpson(const std::function<double(double)>& f, double a,
                               double b, double fa, double fb, double fm,
                               double eps, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::fabs(left + right - whole) < 15.0 * eps)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, fa, fm, flm, 0.5 * eps, depth - 1) +
           adaptive_simpson(f, m, b, fm, fb, frm, 0.5 * eps, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a,
                        double b, double eps = 1e-10) {
    if (!(b > a)) return 0.0;
    double m = 0.5 * (a + b);
    return adaptive_simpson(f, a, b, f(a), f(b), f(m), eps, 40);
}

}  // namespace detail

// Integrates g(x) * qstar_density(x) over (0, 80]. The substitution x = t^2
// removes the 1/sqrt(x) singularity at the origin; the threshold point
// splits the remaining range.
inline double qstar_expectation(double alpha,
                                const std::function<double(double)>& g) {
    double c = model_a_moments(alpha).c_alpha;
    double upper = 80.0;
    auto h = [&](double x) { return g(x) * qstar_density(alpha, x); };
    double split = std::isfinite(c) ? std::min(c, upper) : upper;
    if (split <= 0.0) split = std::min(1.0, upper);
    auto sub = [&](double t) { return 2.0 * t * h(t * t); };
    double head = detail::integrate(sub, 1e-12, std::sqrt(split));
    double tail = split < upper ? detail::integrate(h, split, upper) : 0.0;
    return head + tail;
}

}  // namespace mendel
