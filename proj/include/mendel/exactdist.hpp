#pragma once

// Exact discrete distribution of the chi-square-test p-values under
// binomial sampling: per experiment, mixed over the whole dataset, and the
// max-of-two transform.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "mendel/dataset.hpp"
#include "mendel/numerics.hpp"

namespace mendel {

struct DiscretePValueDistribution {
    // support sorted by p-value ascending
    std::vector<double> p_values;
    std::vector<double> masses;
    double truncated_mass = 0.0;

    double total_mass() const {
        double s = truncated_mass;
        for (double m : masses) s += m;
        return s;
    }
    // P(p-value <= x), including any truncated tail mass
    double cdf(double x) const {
        double s = truncated_mass;
        for (size_t i = 0; i < p_values.size() && p_values[i] <= x; ++i)
            s += masses[i];
        return s;
    }
};

namespace detail {

// Sorts atoms by p-value and merges exact duplicates. Identical outcomes
// (symmetric counts under p0 = 1/2, repeated experiment setups) reach
// bitwise-equal p-values through the same expression, so exact merging
// collapses precisely the mathematically equal atoms.
inline DiscretePValueDistribution merge_atoms(std::vector<double> ps,
                                              std::vector<double> ms) {
    std::vector<size_t> idx(ps.size());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(),
              [&](size_t a, size_t b) { return ps[a] < ps[b]; });
    DiscretePValueDistribution d;
    d.p_values.reserve(ps.size());
    d.masses.reserve(ps.size());
    for (size_t i : idx) {
        if (!d.p_values.empty() && ps[i] == d.p_values.back()) {
            d.masses.back() += ms[i];
        } else {
            d.p_values.push_back(ps[i]);
            d.masses.push_back(ms[i]);
        }
    }
    return d;
}

}  // namespace detail

// Lists the n+1 outcomes of one experiment: statistic, chi-square p-value,
// binomial mass (log-space, safe for large n).
inline DiscretePValueDistribution per_experiment_distribution(int n, double p0) {
    if (n < 1) throw std::domain_error("per_experiment_distribution: n must be >= 1");
    if (!(p0 > 0.0 && p0 < 1.0))
        throw std::domain_error("per_experiment_distribution: p0 must be in (0,1)");
    std::vector<double> ps(n + 1), ms(n + 1);
    double mean = n * p0;
    double var = n * p0 * (1.0 - p0);
    double lp = std::log(p0), lq = std::log1p(-p0);
    double lgn = std::lgamma(n + 1.0);
    for (int y = 0; y <= n; ++y) {
        double stat = (y - mean) * (y - mean) / var;
        ps[y] = chi_square_sf(stat, 1).value();
        ms[y] = std::exp(lgn - std::lgamma(y + 1.0) - std::lgamma(n - y + 1.0) +
                         y * lp + (n - y) * lq);
    }
    return detail::merge_atoms(std::move(ps), std::move(ms));
}

// Pools the 84 experiments with weight 1/84 each, then drops atoms from the
// smallest p-value upward while the dropped mass stays below
// truncation_mass; the dropped total is recorded.
inline DiscretePValueDistribution mixture_distribution(const Dataset& ds,
                                                       double truncation_mass = 0.001) {
    if (ds.binomials.empty())
        throw std::domain_error("mixture_distribution: empty dataset");
    std::vector<double> ps, ms;
    double w = 1.0 / static_cast<double>(ds.binomials.size());
    for (const auto& e : ds.binomials) {
        DiscretePValueDistribution one =
            per_experiment_distribution(e.n, e.p0_value());
        for (size_t i = 0; i < one.p_values.size(); ++i) {
            ps.push_back(one.p_values[i]);
            ms.push_back(one.masses[i] * w);
        }
    }
    DiscretePValueDistribution d = detail::merge_atoms(std::move(ps), std::move(ms));
    if (truncation_mass > 0.0) {
        double dropped = 0.0;
        size_t k = 0;
        while (k < d.masses.size() && dropped + d.masses[k] < truncation_mass) {
            dropped += d.masses[k];
            ++k;
        }
        d.p_values.erase(d.p_values.begin(), d.p_values.begin() + k);
        d.masses.erase(d.masses.begin(), d.masses.begin() + k);
        d.truncated_mass = dropped;
    }
    return d;
}

// Distribution of the maximum of two independent copies: the CDF is squared
// on the same support and masses recovered by differencing.
inline DiscretePValueDistribution max_of_two_distribution(
    const DiscretePValueDistribution& d) {
    DiscretePValueDistribution out;
    out.p_values = d.p_values;
    out.masses.resize(d.masses.size());
    out.truncated_mass = d.truncated_mass * d.truncated_mass;
    double cdf = d.truncated_mass;
    double prev_sq = out.truncated_mass;
    for (size_t i = 0; i < d.masses.size(); ++i) {
        cdf += d.masses[i];
        double sq = cdf * cdf;
        out.masses[i] = sq - prev_sq;
        prev_sq = sq;
    }
    return out;
}

}  // namespace mendel
