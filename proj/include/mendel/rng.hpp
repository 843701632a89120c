#pragma once

// Counter-based random numbers: every variate is a pure function of
// (master seed, stream, counter), so parallel replication order cannot
// change results. Streams are decorrelated with two rounds of the
// splitmix64 finalizer.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace mendel {

namespace detail {

inline uint64_t mix64(uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace detail

class CounterRng {
public:
    explicit CounterRng(uint64_t master_seed) : master_(master_seed) {}

    uint64_t raw(uint64_t stream, uint64_t counter) const {
        uint64_t k = detail::mix64(master_ ^ detail::mix64(stream));
        return detail::mix64(k ^ (counter * 0xd1342543de82ef95ULL));
    }

    // uniform in the open interval (0,1)
    double uniform(uint64_t stream, uint64_t counter) const {
        return (static_cast<double>(raw(stream, counter) >> 11) + 0.5) *
               0x1.0p-53;
    }

    uint64_t seed() const { return master_; }

private:
    uint64_t master_;
};

// Inversion sampler over a precomputed binomial CDF table. Lookup is a
// binary search, so a given uniform always maps to the same outcome.
class BinomialSampler {
public:
    BinomialSampler() = default;
    BinomialSampler(int n, double p) : n_(n) {
        if (n < 1 || p <= 0.0 || p >= 1.0)
            throw std::domain_error("BinomialSampler: need n >= 1 and p in (0,1)");
        cdf_.resize(n + 1);
        double lp = std::log(p), lq = std::log1p(-p);
        double lgn = std::lgamma(n + 1.0);
        double acc = 0.0;
        for (int y = 0; y <= n; ++y) {
            double lpmf = lgn - std::lgamma(y + 1.0) - std::lgamma(n - y + 1.0) +
                          y * lp + (n - y) * lq;
            acc += std::exp(lpmf);
            cdf_[y] = acc;
        }
        cdf_[n] = 1.0;  // absorb accumulated rounding in the last cell
    }

    int sample(double u) const {
        int lo = 0, hi = n_;
        while (lo < hi) {
            int mid = (lo + hi) / 2;
            if (cdf_[mid] < u)
                lo = mid + 1;
            else
                hi = mid;
        }
        return lo;
    }

    int n() const { return n_; }

private:
    int n_ = 0;
    std::vector<double> cdf_;
};

// One conditional-binomial draw for multinomial sampling: inversion by
// walking the pmf recurrence from zero. Cell probabilities in this dataset
// keep pmf(0) comfortably above the underflow floor.
inline int binomial_inverse_walk(int n, double p, double u) {
    if (n == 0) return 0;
    if (p <= 0.0) return 0;
    if (p >= 1.0) return n;
    double lq = std::log1p(-p);
    double pmf = std::exp(n * lq);
    double ratio = p / (1.0 - p);
    double acc = pmf;
    int y = 0;
    while (acc < u && y < n) {
        ++y;
        pmf *= ratio * static_cast<double>(n - y + 1) / y;
        acc += pmf;
    }
    return y;
}

// Sequential conditional-binomial multinomial draw; consumes one uniform per
// cell except the last.
inline void multinomial_sample(const CounterRng& rng, uint64_t stream,
                               uint64_t counter_base, int total,
                               const std::vector<int>& ratios,
                               std::vector<int>& out) {
    size_t k = ratios.size();
    out.resize(k);
    double remaining_ratio = 0.0;
    for (int r : ratios) remaining_ratio += r;
    int left = total;
    for (size_t j = 0; j + 1 < k; ++j) {
        if (left == 0) {
            out[j] = 0;
            remaining_ratio -= ratios[j];
            continue;
        }
        double p = ratios[j] / remaining_ratio;
        double u = rng.uniform(stream, counter_base + j);
        int c = binomial_inverse_walk(left, p, u);
        out[j] = c;
        left -= c;
        remaining_ratio -= ratios[j];
    }
    out[k - 1] = left;
}

}  // namespace mendel
