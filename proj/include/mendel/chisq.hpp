#pragma once

// Goodness-of-fit statistics and the aggregated chi-square table over the
// embedded dataset, under both the multinomial grouping and the flat
// 84-binomial decomposition.

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "mendel/dataset.hpp"
#include "mendel/numerics.hpp"

namespace mendel {

// Square root of the 1-df statistic, signed by observed minus expected.
struct SignedChi {
    double value = 0.0;
    double chi_square() const { return value * value; }
};

struct AggregateRow {
    std::string label;
    int df = 0;
    double chisq = 0.0;
    Probability p_chisq;
};

inline SignedChi signed_chi(const BinomialExperiment& e) {
    double p0 = e.p0_value();
    double mean = e.n * p0;
    double sd = std::sqrt(e.n * p0 * (1.0 - p0));
    return SignedChi{(e.n1 - mean) / sd};
}

inline Probability binomial_pvalue(const BinomialExperiment& e) {
    return chi_square_sf(signed_chi(e).chi_square(), 1);
}

inline ChiSquareStat multinomial_chisq(const MultinomialExperiment& e) {
    e.validate();
    double total = e.total();
    if (total <= 0.0) throw std::domain_error("multinomial_chisq: zero total");
    double ratio_sum = 0.0;
    for (int r : e.ratios) ratio_sum += r;
    double stat = 0.0;
    for (size_t i = 0; i < e.counts.size(); ++i) {
        double expected = total * e.ratios[i] / ratio_sum;
        double d = e.counts[i] - expected;
        stat += d * d / expected;
    }
    return ChiSquareStat{stat, e.df()};
}

inline AggregateRow aggregate(const std::vector<ChiSquareStat>& stats,
                              std::string label = "total") {
    if (stats.empty()) throw std::domain_error("aggregate: empty input");
    double sum = 0.0;
    int df = 0;
    for (const auto& s : stats) {
        sum += s.value;
        df += s.df;
    }
    return AggregateRow{std::move(label), df, sum, chi_square_sf(sum, df)};
}

// One line of the deterministic chi-square table: the observed statistic and
// chi-square-df p-value under both groupings.
struct Table5Row {
    std::string label;
    int df = 0;
    double fisher_chisq = 0.0;
    Probability fisher_p;
    double edwards_chisq = 0.0;
    Probability edwards_p;
};

namespace detail {

inline double group_binomial_sum(const Dataset& ds, ExperimentGroup g) {
    double s = 0.0;
    for (const auto& e : ds.binomials)
        if (e.group == g) s += signed_chi(e).chi_square();
    return s;
}

inline int group_size(const Dataset& ds, ExperimentGroup g) {
    int k = 0;
    for (const auto& e : ds.binomials)
        if (e.group == g) ++k;
    return k;
}

}  // namespace detail

// Full table: five experiment-type rows, the 64-df total, the
// plant-variation row, and the 84-df total. The multinomial ("Fisher")
// decomposition and the flat binomial ("Edwards") decomposition differ only
// in the BF/GR/TF rows.
inline std::vector<Table5Row> table5_deterministic(const Dataset& ds) {
    using G = ExperimentGroup;
    auto bsum = [&](G g) { return detail::group_binomial_sum(ds, g); };
    auto bdf = [&](G g) { return detail::group_size(ds, g); };

    double multi_bf = 0.0, multi_tf = 0.0, multi_gr = 0.0;
    int multi_bf_df = 0, multi_tf_df = 0, multi_gr_df = 0;
    for (const auto& m : ds.fisher_multinomials) {
        ChiSquareStat s = multinomial_chisq(m);
        if (m.label.rfind("bifactorial", 0) == 0) {
            multi_bf += s.value;
            multi_bf_df += s.df;
        } else if (m.label.rfind("trifactorial", 0) == 0) {
            multi_tf += s.value;
            multi_tf_df += s.df;
        } else if (m.label.rfind("gametic", 0) == 0) {
            multi_gr += s.value;
            multi_gr_df += s.df;
        }
    }

    struct Entry {
        const char* label;
        int df;
        double fisher;
        double edwards;
    };
    std::vector<Entry> entries = {
        {"3:1", bdf(G::Ratio3to1), bsum(G::Ratio3to1), bsum(G::Ratio3to1)},
        {"2:1", bdf(G::Ratio2to1), bsum(G::Ratio2to1), bsum(G::Ratio2to1)},
        {"BF", multi_bf_df, multi_bf, bsum(G::Bifactorial)},
        {"GR", multi_gr_df, multi_gr, bsum(G::GameticRatios)},
        {"TF", multi_tf_df, multi_tf, bsum(G::Trifactorial)},
    };

    std::vector<Table5Row> rows;
    double f64 = 0.0, e64 = 0.0;
    int df64 = 0;
    for (const auto& en : entries) {
        rows.push_back({en.label, en.df, en.fisher, chi_square_sf(en.fisher, en.df),
                        en.edwards, chi_square_sf(en.edwards, en.df)});
        f64 += en.fisher;
        e64 += en.edwards;
        df64 += en.df;
    }
    rows.push_back({"Tot64", df64, f64, chi_square_sf(f64, df64), e64,
                    chi_square_sf(e64, df64)});
    double pv = bsum(G::PlantVariation);
    int pvdf = bdf(G::PlantVariation);
    rows.push_back({"PV", pvdf, pv, chi_square_sf(pv, pvdf), pv,
                    chi_square_sf(pv, pvdf)});
    rows.push_back({"Tot84", df64 + pvdf, f64 + pv,
                    chi_square_sf(f64 + pv, df64 + pvdf), e64 + pv,
                    chi_square_sf(e64 + pv, df64 + pvdf)});
    return rows;
}

}  // namespace mendel
