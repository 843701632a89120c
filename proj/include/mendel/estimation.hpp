#pragma once

// Minimum-K-S-distance estimation of the selection parameter over a grid,
// confidence sets by test inversion, and the estimator validation study.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mendel/ks.hpp"
#include "mendel/montecarlo.hpp"
#include "mendel/numerics.hpp"
#include "mendel/selection_models.hpp"

namespace mendel {

enum class ModelFamily { A, B };

struct EstimationResult {
    double param_hat = 0.0;
    double d_at_hat = 0.0;
    Probability p_at_hat;
    double grid_width = 0.001;
    std::optional<std::pair<double, double>> ci;
    double ci_level = 0.90;
    bool ci_empty = false;
    bool ci_disconnected = false;  // qualifying set was not an interval
    uint64_t jitter_seed = 0;
};

inline constexpr uint64_t kDefaultJitterSeed = 20090800;

namespace detail {

inline double family_cdf(ModelFamily f, double theta, double x) {
    double xc = std::clamp(x, 0.0, 1.0);
    return f == ModelFamily::A ? model_a_cdf(ModelA{theta}, xc).value()
                               : model_b_cdf(ModelB{theta}, xc).value();
}

// D(theta) for a pre-jittered, pre-sorted sample.
inline double sweep_distance(const std::vector<double>& sorted,
                             ModelFamily f, double theta) {
    size_t n = sorted.size();
    double d = 0.0;
    for (size_t i = 0; i < n; ++i) {
        double F = family_cdf(f, theta, sorted[i]);
        double upper = std::fabs(F - static_cast<double>(i + 1) / n);
        double lower = std::fabs(F - static_cast<double>(i) / n);
        d = std::max(d, std::max(upper, lower));
    }
    return d;
}

}  // namespace detail

// D(theta) against the family CDF, for a pre-jittered and pre-sorted sample.
inline double family_ks_distance(const std::vector<double>& sorted_jittered,
                                 ModelFamily f, double theta) {
    return detail::sweep_distance(sorted_jittered, f, theta);
}

// Maximizes the K-S p-value (equivalently minimizes D) over the theta grid
// {0, w, 2w, ..., 1}. The jitter realization is fixed once for the whole
// sweep so D(theta) varies smoothly; grid ties break toward smaller theta.
inline EstimationResult estimate(const std::vector<double>& sample,
                                 ModelFamily family, double grid_width = 0.001,
                                 double ci_level = 0.90,
                                 uint64_t jitter_seed = kDefaultJitterSeed) {
    if (sample.empty()) throw std::domain_error("estimate: empty sample");
    if (!(grid_width > 0.0) || grid_width > 0.5)
        throw std::domain_error("estimate: grid_width must split [0,1] into >= 2 cells");
    for (double v : sample)
        if (!(v >= 0.0 && v <= 1.0))
            throw std::domain_error("estimate: sample values must lie in [0,1]");

    std::vector<double> jittered = jitter_ties(sample, jitter_seed);
    std::sort(jittered.begin(), jittered.end());
    const int n = static_cast<int>(sample.size());
    const int cells = static_cast<int>(std::llround(1.0 / grid_width));

    // p(theta) >= 1 - level  <=>  D(theta) <= d_crit
    double d_crit = ks_critical_value(1.0 - ci_level, n);

    double best_d = 2.0;
    double best_theta = 0.0;
    double qual_min = 2.0, qual_max = -1.0;
    int qual_runs = 0;
    bool in_run = false;
    for (int k = 0; k <= cells; ++k) {
        double theta = std::min(1.0, k * grid_width);
        double d = detail::sweep_distance(jittered, family, theta);
        if (d < best_d) {
            best_d = d;
            best_theta = theta;
        }
        bool qual = d <= d_crit;
        if (qual) {
            qual_min = std::min(qual_min, theta);
            qual_max = std::max(qual_max, theta);
            if (!in_run) ++qual_runs;
        }
        in_run = qual;
    }

    EstimationResult r;
    r.param_hat = best_theta;
    r.d_at_hat = best_d;
    r.p_at_hat = ks_exact_pvalue(best_d, n);
    r.grid_width = grid_width;
    r.ci_level = ci_level;
    r.jitter_seed = jitter_seed;
    if (qual_runs == 0) {
        r.ci_empty = true;
    } else {
        r.ci = std::make_pair(qual_min, qual_max);  // convex hull of the set
        r.ci_disconnected = qual_runs > 1;
    }
    return r;
}

// Just the confidence set: {theta : p(theta) >= 1 - level}.
inline EstimationResult confidence_set(const std::vector<double>& sample,
                                       ModelFamily family, double level = 0.90,
                                       double grid_width = 0.001,
                                       uint64_t jitter_seed = kDefaultJitterSeed) {
    return estimate(sample, family, grid_width, level, jitter_seed);
}

struct ValidationSummary {
    int n_samples = 0;
    double mean = 0.0;
    double median = 0.0;
    double sd = 0.0;
    int empty_count = 0;
    double coverage = 0.0;      // over samples with nonempty CI
    double mean_ci_length = 0.0;
    uint64_t seed = 0;
};

// Repeats the whole estimate-and-invert procedure on simulated p-value sets
// drawn under the repeat-below-alpha model.
inline ValidationSummary validate_estimator(const Dataset& ds,
                                            double true_alpha = 0.2,
                                            int n_samples = 1000,
                                            double level = 0.90,
                                            uint64_t seed = 13,
                                            double grid_width = 0.001) {
    if (n_samples < 1)
        throw std::invalid_argument("validate_estimator: n_samples must be >= 1");
    PvalueSetSampler sampler(ds);
    CounterRng master(seed);
    std::vector<double> estimates;
    estimates.reserve(n_samples);
    int covered = 0, nonempty = 0, empty = 0;
    double len_sum = 0.0;
    for (int s = 0; s < n_samples; ++s) {
        uint64_t sample_seed = master.raw(0x76616c6964617465ULL, s);
        std::vector<double> pv =
            sampler.sample(ModelA{true_alpha}, sample_seed);
        EstimationResult er = estimate(pv, ModelFamily::A, grid_width, level,
                                       master.raw(0x6a69747465722121ULL, s));
        estimates.push_back(er.param_hat);
        if (er.ci_empty) {
            ++empty;
        } else {
            ++nonempty;
            len_sum += er.ci->second - er.ci->first;
            if (er.ci->first <= true_alpha && true_alpha <= er.ci->second)
                ++covered;
        }
    }
    ValidationSummary v;
    v.n_samples = n_samples;
    v.seed = seed;
    double sum = 0.0;
    for (double e : estimates) sum += e;
    v.mean = sum / n_samples;
    double ss = 0.0;
    for (double e : estimates) ss += (e - v.mean) * (e - v.mean);
    v.sd = n_samples > 1 ? std::sqrt(ss / (n_samples - 1)) : 0.0;
    std::vector<double> tmp = estimates;
    std::sort(tmp.begin(), tmp.end());
    v.median = (n_samples % 2 == 1)
                   ? tmp[n_samples / 2]
                   : 0.5 * (tmp[n_samples / 2 - 1] + tmp[n_samples / 2]);
    v.empty_count = empty;
    v.coverage = nonempty > 0 ? static_cast<double>(covered) / nonempty : 0.0;
    v.mean_ci_length = nonempty > 0 ? len_sum / nonempty : 0.0;
    return v;
}

}  // namespace mendel
