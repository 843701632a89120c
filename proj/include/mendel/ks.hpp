#pragma once

// Empirical CDF, tie jitter, and the one-sample Kolmogorov-Smirnov test
// against an arbitrary continuous CDF with exact finite-sample p-values.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "mendel/numerics.hpp"
#include "mendel/rng.hpp"

namespace mendel {

struct EcdfResult {
    std::vector<double> sorted_sample;
    // step height after the i-th point is (i+1)/n
    double height(size_t i) const {
        return static_cast<double>(i + 1) / sorted_sample.size();
    }
};

struct KsResult {
    double d = 0.0;
    int n = 0;
    Probability p;
    std::optional<uint64_t> jitter_seed;
};

inline EcdfResult make_ecdf(std::vector<double> sample) {
    if (sample.empty()) throw std::domain_error("make_ecdf: empty sample");
    std::sort(sample.begin(), sample.end());
    return EcdfResult{std::move(sample)};
}

inline constexpr uint64_t kJitterStream = 0x6a69747465720000ULL;

// Adds independent zero-mean normal noise (default sd 1e-7) to break ties;
// same seed, same output.
inline std::vector<double> jitter_ties(const std::vector<double>& sample,
                                       uint64_t seed, double sd = 1e-7) {
    CounterRng rng(seed);
    std::vector<double> out(sample.size());
    for (size_t i = 0; i < sample.size(); ++i) {
        double u = rng.uniform(kJitterStream, i);
        out[i] = sample[i] + sd * std_normal_quantile(Probability(u));
    }
    return out;
}

// sup_x |F_n(x) - F(x)| evaluated at the sample points, both one-sided gaps.
inline double ks_statistic(const std::vector<double>& sample,
                           const std::function<double(double)>& cdf) {
    if (sample.empty()) throw std::domain_error("ks_statistic: empty sample");
    std::vector<double> x(sample);
    std::sort(x.begin(), x.end());
    size_t n = x.size();
    double d = 0.0;
    for (size_t i = 0; i < n; ++i) {
        double f = cdf(x[i]);
        double upper = std::fabs(f - static_cast<double>(i + 1) / n);
        double lower = std::fabs(f - static_cast<double>(i) / n);
        d = std::max(d, std::max(upper, lower));
    }
    return d;
}

// Jitter, compute D, attach the exact p-value.
inline KsResult ks_test(const std::vector<double>& sample,
                        const std::function<double(double)>& cdf,
                        uint64_t jitter_seed) {
    std::vector<double> jittered = jitter_ties(sample, jitter_seed);
    double d = ks_statistic(jittered, cdf);
    KsResult r;
    r.d = d;
    r.n = static_cast<int>(sample.size());
    r.p = ks_exact_pvalue(d, r.n);
    r.jitter_seed = jitter_seed;
    return r;
}

}  // namespace mendel
