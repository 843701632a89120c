#pragma once

// Special functions and distribution kernels: standard normal CDF/quantile,
// chi-square survival function and quantile (regularized incomplete gamma),
// and the exact finite-sample Kolmogorov-Smirnov p-value.

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace mendel {

// Probability value clamped to [0,1]; construction rejects NaN and
// out-of-range inputs beyond last-ulp drift.
class Probability {
public:
    Probability() = default;
    explicit Probability(double v) : value_(v) {
        if (std::isnan(v))
            throw std::invalid_argument("Probability: NaN");
        if (v < -1e-9 || v > 1.0 + 1e-9)
            throw std::domain_error("Probability: value outside [0,1]");
        if (value_ < 0.0) value_ = 0.0;
        if (value_ > 1.0) value_ = 1.0;
    }
    double value() const { return value_; }
    operator double() const { return value_; }

private:
    double value_ = 0.0;
};

struct ChiSquareStat {
    double value = 0.0;
    int df = 1;
};

// Phi(x), absolute error well below 1e-12.
inline Probability std_normal_cdf(double x) {
    if (std::isnan(x))
        throw std::invalid_argument("std_normal_cdf: NaN input");
    if (x == std::numeric_limits<double>::infinity()) return Probability(1.0);
    if (x == -std::numeric_limits<double>::infinity()) return Probability(0.0);
    return Probability(0.5 * std::erfc(-x / std::sqrt(2.0)));
}

namespace detail {

// Acklam's rational approximation to the normal quantile, then one Halley
// refinement against erfc. Residual |Phi(q)-p| lands near machine epsilon.
inline double normal_quantile_acklam(double p) {
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    double q, x;
    if (p < plow) {
        q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - plow) {
        q = p - 0.5;
        double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    // Halley step
    double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
    double u = e * std::sqrt(2.0 * M_PI) * std::exp(x * x / 2.0);
    x = x - u / (1.0 + x * u / 2.0);
    return x;
}

// Regularized lower incomplete gamma P(a,x) by series expansion (x < a+1).
inline double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 500; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized upper incomplete gamma Q(a,x) by Lentz continued fraction
// (x >= a+1).
inline double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace detail

// Inverse of std_normal_cdf; p must lie strictly inside (0,1).
inline double std_normal_quantile(Probability p) {
    double pv = p.value();
    if (pv <= 0.0 || pv >= 1.0)
        throw std::domain_error("std_normal_quantile: p must be in (0,1)");
    return detail::normal_quantile_acklam(pv);
}

// P(chi2_df > x) = Q(df/2, x/2). Series below the a+1 switch point,
// continued fraction above.
inline Probability chi_square_sf(double x, int df) {
    if (df < 1) throw std::domain_error("chi_square_sf: df must be >= 1");
    if (std::isnan(x)) throw std::invalid_argument("chi_square_sf: NaN input");
    if (x < 0.0) throw std::domain_error("chi_square_sf: negative statistic");
    if (x == 0.0) return Probability(1.0);
    double a = 0.5 * df;
    double t = 0.5 * x;
    double q = (t < a + 1.0) ? 1.0 - detail::gamma_p_series(a, t)
                             : detail::gamma_q_cf(a, t);
    if (q < 0.0) q = 0.0;
    if (q > 1.0) q = 1.0;
    return Probability(q);
}

inline double chi_square_cdf(double x, int df) {
    return 1.0 - chi_square_sf(x, df).value();
}

// chi2_df density, for Newton steps and the selected-statistic density.
inline double chi_square_pdf(double x, int df) {
    if (x <= 0.0) return 0.0;
    double a = 0.5 * df;
    return std::exp((a - 1.0) * std::log(x) - 0.5 * x - a * std::log(2.0) -
                    std::lgamma(a));
}

// p-quantile of chi2_df: the x with P(chi2_df <= x) = p. Wilson-Hilferty
// start, Newton polish, bisection as the safety net.
inline double chi_square_quantile(Probability p, int df) {
    double pv = p.value();
    if (pv <= 0.0 || pv >= 1.0)
        throw std::domain_error("chi_square_quantile: p must be in (0,1)");
    double z = detail::normal_quantile_acklam(pv);
    double k = static_cast<double>(df);
    double t = 1.0 - 2.0 / (9.0 * k) + z * std::sqrt(2.0 / (9.0 * k));
    double x = k * t * t * t;
    if (!(x > 0.0)) x = 0.5 * k;

    for (int it = 0; it < 60; ++it) {
        double f = chi_square_cdf(x, df) - pv;
        double d = chi_square_pdf(x, df);
        if (d <= 0.0) break;
        double step = f / d;
        double xn = x - step;
        if (xn <= 0.0) xn = 0.5 * x;
        if (std::fabs(xn - x) < 1e-14 * (1.0 + x)) {
            x = xn;
            break;
        }
        x = xn;
    }
    if (std::fabs(chi_square_cdf(x, df) - pv) > 1e-11) {
        double lo = 0.0, hi = std::max(2.0 * x, 1.0);
        while (chi_square_cdf(hi, df) < pv) hi *= 2.0;
        for (int it = 0; it < 200; ++it) {
            double mid = 0.5 * (lo + hi);
            if (chi_square_cdf(mid, df) < pv)
                lo = mid;
            else
                hi = mid;
        }
        x = 0.5 * (lo + hi);
    }
    return x;
}

// Exact P(D_n > d) for the one-sample K-S statistic under a continuous
// fully specified null, by the Marsaglia-Tsang-Wang matrix power method
// for P(D_n < d).
inline Probability ks_exact_pvalue(double d, int n) {
    if (n < 1) throw std::domain_error("ks_exact_pvalue: n must be >= 1");
    if (std::isnan(d)) throw std::invalid_argument("ks_exact_pvalue: NaN input");
    if (d < 0.0 || d > 1.0)
        throw std::domain_error("ks_exact_pvalue: d must be in [0,1]");
    if (d == 0.0) return Probability(1.0);
    if (d * n >= n) return Probability(0.0);
    if (n * d * d >= 18.37) return Probability(0.0);  // cdf is 1 to double precision
    int k = static_cast<int>(std::ceil(n * d));
    double h = k - n * d;
    int m = 2 * k - 1;

    std::vector<double> H(static_cast<size_t>(m) * m, 0.0);
    auto at = [m](std::vector<double>& M, int i, int j) -> double& {
        return M[static_cast<size_t>(i) * m + j];
    };
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            if (i - j + 1 >= 0) at(H, i, j) = 1.0;
    for (int i = 0; i < m; ++i) {
        at(H, i, 0) -= std::pow(h, i + 1);
        at(H, m - 1, i) -= std::pow(h, m - i);
    }
    if (2.0 * h - 1.0 > 0.0) at(H, m - 1, 0) += std::pow(2.0 * h - 1.0, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            if (i - j + 1 > 0)
                for (int g = 1; g <= i - j + 1; ++g) at(H, i, j) /= g;

    // H^n by binary powering with periodic rescaling
    const double big = 1e140;
    std::vector<double> R(static_cast<size_t>(m) * m, 0.0), A = H,
        tmp(static_cast<size_t>(m) * m, 0.0);
    for (int i = 0; i < m; ++i) at(R, i, i) = 1.0;
    long eR = 0, eA = 0;
    auto mmul = [&](const std::vector<double>& X, const std::vector<double>& Y,
                    std::vector<double>& out) {
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                double s = 0.0;
                for (int l = 0; l < m; ++l)
                    s += X[static_cast<size_t>(i) * m + l] * Y[static_cast<size_t>(l) * m + j];
                out[static_cast<size_t>(i) * m + j] = s;
            }
    };
    auto rescale = [&](std::vector<double>& M, long& e) {
        double mx = 0.0;
        for (double v : M) mx = std::max(mx, std::fabs(v));
        if (mx > big) {
            for (double& v : M) v /= big;
            e += 140;
        }
    };
    int nn = n;
    while (nn > 0) {
        if (nn & 1) {
            mmul(R, A, tmp);
            R.swap(tmp);
            eR += eA;
            rescale(R, eR);
        }
        nn >>= 1;
        if (nn == 0) break;
        mmul(A, A, tmp);
        A.swap(tmp);
        eA *= 2;
        rescale(A, eA);
    }
    double s = at(R, k - 1, k - 1);
    long e = eR;
    for (int i = 1; i <= n; ++i) {
        s *= static_cast<double>(i) / n;
        if (s < 1e-140 && s > 0.0) {
            s *= big;
            e -= 140;
        }
    }
    double cdf;
    if (e == 0)
        cdf = s;
    else
        cdf = s * std::pow(10.0, static_cast<double>(e));
    if (cdf > 1.0) cdf = 1.0;
    if (cdf < 0.0) cdf = 0.0;
    return Probability(1.0 - cdf);
}

// Largest d with P(D_n > d) >= p; used to turn confidence-set sweeps into a
// single threshold comparison on the statistic.
inline double ks_critical_value(double p, int n) {
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 80; ++it) {
        double mid = 0.5 * (lo + hi);
        if (ks_exact_pvalue(mid, n).value() >= p)
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

}  // namespace mendel
