#pragma once

// Seeded Monte Carlo engine: replicates the 84 experiments under the null
// or a selection model, aggregates chi-square totals per experiment group,
// and estimates exceedance p-values. Replicates are split into a fixed
// number of blocks reduced in block order, so results are bit-identical for
// any worker-thread count.

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "mendel/chisq.hpp"
#include "mendel/dataset.hpp"
#include "mendel/numerics.hpp"
#include "mendel/rng.hpp"
#include "mendel/selection_models.hpp"

namespace mendel {

enum class Grouping { Fisher, Edwards };

struct SimConfig {
    SelectionModel model = NullModel{};
    uint64_t reps = 1'000'000;
    uint64_t master_seed = 20090800;
    Grouping grouping = Grouping::Edwards;
    int threads = 0;  // 0 = all hardware threads
};

struct McEstimate {
    Probability p;
    double se = 0.0;
    uint64_t reps = 0;
    uint64_t exceed_count = 0;
};

struct McRow {
    std::string label;
    int df = 0;
    double chisq_obs = 0.0;
    McEstimate est;
};

struct McResult {
    std::vector<McRow> rows;  // six groups plus Tot64 and Tot84
    // mean of all recorded per-experiment statistics, for moment checks
    double mean_recorded_stat = 0.0;
};

namespace detail {

constexpr int kNumGroups = 6;
constexpr int kBlocks = 256;
// per-(replicate, experiment) draw indices: 0 first draw, 1 redraw decision,
// 2 second draw
constexpr uint64_t kDrawsPerExperiment = 4;

inline int group_index(ExperimentGroup g) { return static_cast<int>(g); }

struct ExperimentTables {
    BinomialSampler sampler;
    std::vector<double> stat;
    std::vector<double> pval;
    std::vector<double> chi;
    int group = 0;
};

inline std::vector<ExperimentTables> build_tables(const Dataset& ds) {
    std::vector<ExperimentTables> tabs;
    tabs.reserve(ds.binomials.size());
    for (const auto& e : ds.binomials) {
        ExperimentTables t;
        double p0 = e.p0_value();
        double mean = e.n * p0;
        double var = e.n * p0 * (1.0 - p0);
        double sd = std::sqrt(var);
        t.sampler = BinomialSampler(e.n, p0);
        t.stat.resize(e.n + 1);
        t.pval.resize(e.n + 1);
        t.chi.resize(e.n + 1);
        for (int y = 0; y <= e.n; ++y) {
            double c = (y - mean) / sd;
            t.chi[y] = c;
            t.stat[y] = c * c;
            t.pval[y] = chi_square_sf(c * c, 1).value();
        }
        t.group = group_index(e.group);
        tabs.push_back(std::move(t));
    }
    return tabs;
}

struct MultinomialTables {
    std::vector<int> ratios;
    std::vector<double> expected;
    int total = 0;
    int group = 0;
    uint64_t stream = 0;
};

inline std::vector<MultinomialTables> build_multinomial_tables(const Dataset& ds) {
    std::vector<MultinomialTables> tabs;
    uint64_t stream = 84;
    for (const auto& m : ds.fisher_multinomials) {
        MultinomialTables t;
        t.ratios = m.ratios;
        t.total = m.total();
        double rsum = 0.0;
        for (int r : m.ratios) rsum += r;
        for (int r : m.ratios) t.expected.push_back(t.total * r / rsum);
        if (m.label.rfind("bifactorial", 0) == 0)
            t.group = group_index(ExperimentGroup::Bifactorial);
        else if (m.label.rfind("trifactorial", 0) == 0)
            t.group = group_index(ExperimentGroup::Trifactorial);
        else
            t.group = group_index(ExperimentGroup::GameticRatios);
        t.stream = stream++;
        tabs.push_back(std::move(t));
    }
    return tabs;
}

struct BlockAccum {
    std::array<uint64_t, kNumGroups + 2> exceed{};  // groups, Tot64, Tot84
    double stat_sum = 0.0;
};

// Recorded statistic for one experiment in one replicate.
template <class Tables>
inline double draw_statistic(const CounterRng& rng, const Tables& t,
                             uint64_t exp_stream, uint64_t rep,
                             const SelectionModel& model, double* chi_out) {
    uint64_t base = rep * kDrawsPerExperiment;
    int y1 = t.sampler.sample(rng.uniform(exp_stream, base + 0));
    double q = t.stat[y1];
    double chi = t.chi[y1];
    if (const ModelA* a = std::get_if<ModelA>(&model)) {
        if (t.pval[y1] < a->alpha) {
            int y2 = t.sampler.sample(rng.uniform(exp_stream, base + 2));
            if (t.stat[y2] < q) {
                q = t.stat[y2];
                chi = t.chi[y2];
            }
        }
    } else if (const ModelB* b = std::get_if<ModelB>(&model)) {
        double u = rng.uniform(exp_stream, base + 1);  // always consumed
        if (u < b->beta) {
            int y2 = t.sampler.sample(rng.uniform(exp_stream, base + 2));
            if (t.stat[y2] < q) {
                q = t.stat[y2];
                chi = t.chi[y2];
            }
        }
    }
    if (chi_out) *chi_out = chi;
    return q;
}

}  // namespace detail

// Estimates, for each group and both totals, P(simulated total > observed
// total) under the configured model.
inline McResult simulate_pvalues(const Dataset& ds, const SimConfig& cfg) {
    if (cfg.reps < 1) throw std::invalid_argument("simulate_pvalues: reps must be >= 1");
    const bool selected = !std::holds_alternative<NullModel>(cfg.model);
    if (selected && cfg.grouping == Grouping::Fisher)
        throw std::invalid_argument(
            "simulate_pvalues: selection models require the Edwards grouping");

    auto tabs = detail::build_tables(ds);
    auto multi = detail::build_multinomial_tables(ds);
    auto t5 = table5_deterministic(ds);

    // observed per-group totals in fixed group order, then Tot64/Tot84
    std::array<double, detail::kNumGroups> obs_group{};
    for (const auto& e : ds.binomials)
        if (cfg.grouping == Grouping::Edwards)
            obs_group[detail::group_index(e.group)] += signed_chi(e).chi_square();
    if (cfg.grouping == Grouping::Fisher) {
        for (const auto& row : t5) {
            auto set = [&](ExperimentGroup g) {
                obs_group[detail::group_index(g)] = row.fisher_chisq;
            };
            if (row.label == "3:1") set(ExperimentGroup::Ratio3to1);
            if (row.label == "2:1") set(ExperimentGroup::Ratio2to1);
            if (row.label == "BF") set(ExperimentGroup::Bifactorial);
            if (row.label == "GR") set(ExperimentGroup::GameticRatios);
            if (row.label == "TF") set(ExperimentGroup::Trifactorial);
            if (row.label == "PV") set(ExperimentGroup::PlantVariation);
        }
    }
    const int pv = detail::group_index(ExperimentGroup::PlantVariation);
    double obs64 = 0.0;
    for (int g = 0; g < detail::kNumGroups; ++g)
        if (g != pv) obs64 += obs_group[g];
    double obs84 = obs64 + obs_group[pv];

    const CounterRng rng(cfg.master_seed);
    std::vector<detail::BlockAccum> blocks(detail::kBlocks);

    auto run_block = [&](int b) {
        uint64_t lo = cfg.reps * b / detail::kBlocks;
        uint64_t hi = cfg.reps * (b + 1) / detail::kBlocks;
        detail::BlockAccum acc;
        std::vector<int> cells;
        for (uint64_t rep = lo; rep < hi; ++rep) {
            std::array<double, detail::kNumGroups> tot{};
            if (cfg.grouping == Grouping::Edwards) {
                for (size_t i = 0; i < tabs.size(); ++i) {
                    double q = detail::draw_statistic(rng, tabs[i], i, rep,
                                                      cfg.model, nullptr);
                    tot[tabs[i].group] += q;
                    acc.stat_sum += q;
                }
            } else {
                for (size_t i = 0; i < tabs.size(); ++i) {
                    int g = tabs[i].group;
                    if (g == detail::group_index(ExperimentGroup::Bifactorial) ||
                        g == detail::group_index(ExperimentGroup::Trifactorial) ||
                        g == detail::group_index(ExperimentGroup::GameticRatios))
                        continue;  // replaced by multinomial sampling
                    double q = detail::draw_statistic(rng, tabs[i], i, rep,
                                                      cfg.model, nullptr);
                    tot[g] += q;
                    acc.stat_sum += q;
                }
                for (const auto& m : multi) {
                    multinomial_sample(rng, m.stream, rep * 32, m.total,
                                       m.ratios, cells);
                    double q = 0.0;
                    for (size_t j = 0; j < cells.size(); ++j) {
                        double d = cells[j] - m.expected[j];
                        q += d * d / m.expected[j];
                    }
                    tot[m.group] += q;
                    acc.stat_sum += q;
                }
            }
            double t64 = 0.0;
            for (int g = 0; g < detail::kNumGroups; ++g)
                if (g != pv) t64 += tot[g];
            for (int g = 0; g < detail::kNumGroups; ++g)
                if (tot[g] > obs_group[g]) ++acc.exceed[g];
            if (t64 > obs64) ++acc.exceed[detail::kNumGroups];
            if (t64 + tot[pv] > obs84) ++acc.exceed[detail::kNumGroups + 1];
        }
        blocks[b] = acc;
    };

    int nthreads = cfg.threads > 0
                       ? cfg.threads
                       : static_cast<int>(std::thread::hardware_concurrency());
    if (nthreads < 1) nthreads = 1;
    nthreads = std::min(nthreads, detail::kBlocks);
    if (nthreads == 1) {
        for (int b = 0; b < detail::kBlocks; ++b) run_block(b);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        pool.reserve(nthreads);
        for (int w = 0; w < nthreads; ++w)
            pool.emplace_back([&] {
                for (int b = next.fetch_add(1); b < detail::kBlocks;
                     b = next.fetch_add(1))
                    run_block(b);
            });
        for (auto& th : pool) th.join();
    }

    std::array<uint64_t, detail::kNumGroups + 2> exceed{};
    double stat_sum = 0.0;
    for (const auto& b : blocks) {
        for (size_t i = 0; i < exceed.size(); ++i) exceed[i] += b.exceed[i];
        stat_sum += b.stat_sum;
    }

    auto make_est = [&](uint64_t count) {
        McEstimate e;
        e.reps = cfg.reps;
        e.exceed_count = count;
        e.p = Probability(static_cast<double>(count) / cfg.reps);
        e.se = std::sqrt(e.p.value() * (1.0 - e.p.value()) / cfg.reps);
        return e;
    };

    // df per row matches the deterministic table
    std::array<int, detail::kNumGroups> dfs{};
    for (const auto& e : ds.binomials) dfs[detail::group_index(e.group)] += 1;

    McResult res;
    const char* labels[detail::kNumGroups] = {"3:1", "2:1", "BF", "GR", "TF", "PV"};
    int df64 = 0;
    for (int g = 0; g < detail::kNumGroups; ++g)
        if (g != pv) df64 += dfs[g];
    for (int g = 0; g < detail::kNumGroups; ++g) {
        if (g == pv) continue;
        res.rows.push_back({labels[g], dfs[g], obs_group[g], make_est(exceed[g])});
    }
    res.rows.push_back({"Tot64", df64, obs64, make_est(exceed[detail::kNumGroups])});
    res.rows.push_back({"PV", dfs[pv], obs_group[pv], make_est(exceed[pv])});
    res.rows.push_back(
        {"Tot84", df64 + dfs[pv], obs84, make_est(exceed[detail::kNumGroups + 1])});
    res.mean_recorded_stat = stat_sum / (static_cast<double>(cfg.reps) * 84.0);
    return res;
}

// Reusable sampler for replicate sets of the 84 reported p-values; builds
// the per-experiment tables once.
class PvalueSetSampler {
public:
    explicit PvalueSetSampler(const Dataset& ds)
        : tabs_(detail::build_tables(ds)) {}

    // One replicate: the larger p-value of the pair when a repetition occurred.
    std::vector<double> sample(const SelectionModel& model, uint64_t seed) const {
        CounterRng rng(seed);
        std::vector<double> out(tabs_.size());
        for (size_t i = 0; i < tabs_.size(); ++i) {
            const auto& t = tabs_[i];
            int y1 = t.sampler.sample(rng.uniform(i, 0));
            double p = t.pval[y1];
            if (const ModelA* a = std::get_if<ModelA>(&model)) {
                if (p < a->alpha) {
                    int y2 = t.sampler.sample(rng.uniform(i, 2));
                    p = std::max(p, t.pval[y2]);
                }
            } else if (const ModelB* b = std::get_if<ModelB>(&model)) {
                double u = rng.uniform(i, 1);
                if (u < b->beta) {
                    int y2 = t.sampler.sample(rng.uniform(i, 2));
                    p = std::max(p, t.pval[y2]);
                }
            }
            out[i] = p;
        }
        return out;
    }

private:
    std::vector<detail::ExperimentTables> tabs_;
};

inline std::vector<double> sample_pvalue_set(const Dataset& ds,
                                             const SelectionModel& model,
                                             uint64_t seed) {
    return PvalueSetSampler(ds).sample(model, seed);
}

struct QqSamples {
    std::vector<std::vector<double>> sorted_samples;  // n_samples x 84, ascending
    std::vector<double> synthetic;                    // element-wise mean
    std::vector<double> plot_quantiles;               // Phi^-1((i-0.5)/84)
    std::vector<double> observed_sorted;              // data chi values
};

// Simulated chi-value samples for normal quantile-quantile comparison,
// plus the synthetic sample obtained by averaging order statistics.
inline QqSamples edwards_qq_samples(const Dataset& ds, const SelectionModel& model,
                                    int n_samples, uint64_t seed) {
    if (n_samples < 1)
        throw std::invalid_argument("edwards_qq_samples: n_samples must be >= 1");
    auto tabs = detail::build_tables(ds);
    CounterRng rng(seed);
    size_t m = tabs.size();
    QqSamples qq;
    qq.sorted_samples.resize(n_samples);
    qq.synthetic.assign(m, 0.0);
    for (int s = 0; s < n_samples; ++s) {
        std::vector<double> chis(m);
        for (size_t i = 0; i < m; ++i) {
            double chi = 0.0;
            detail::draw_statistic(rng, tabs[i], i, static_cast<uint64_t>(s),
                                   model, &chi);
            chis[i] = chi;
        }
        std::sort(chis.begin(), chis.end());
        for (size_t i = 0; i < m; ++i) qq.synthetic[i] += chis[i];
        qq.sorted_samples[s] = std::move(chis);
    }
    for (double& v : qq.synthetic) v /= n_samples;
    qq.plot_quantiles.resize(m);
    for (size_t i = 0; i < m; ++i)
        qq.plot_quantiles[i] = std_normal_quantile(
            Probability((static_cast<double>(i) + 0.5) / m));
    for (const auto& e : ds.binomials)
        qq.observed_sorted.push_back(signed_chi(e).value);
    std::sort(qq.observed_sorted.begin(), qq.observed_sorted.end());
    return qq;
}

// Chi values drawn straight from the standard normal, for the reference
// panel of the quantile-quantile figure.
inline QqSamples normal_qq_samples(const Dataset& ds, int n_samples,
                                   uint64_t seed) {
    if (n_samples < 1)
        throw std::invalid_argument("normal_qq_samples: n_samples must be >= 1");
    CounterRng rng(seed);
    size_t m = ds.binomials.size();
    QqSamples qq;
    qq.sorted_samples.resize(n_samples);
    qq.synthetic.assign(m, 0.0);
    for (int s = 0; s < n_samples; ++s) {
        std::vector<double> chis(m);
        for (size_t i = 0; i < m; ++i)
            chis[i] = std_normal_quantile(Probability(
                rng.uniform(i, static_cast<uint64_t>(s) * detail::kDrawsPerExperiment)));
        std::sort(chis.begin(), chis.end());
        for (size_t i = 0; i < m; ++i) qq.synthetic[i] += chis[i];
        qq.sorted_samples[s] = std::move(chis);
    }
    for (double& v : qq.synthetic) v /= n_samples;
    qq.plot_quantiles.resize(m);
    for (size_t i = 0; i < m; ++i)
        qq.plot_quantiles[i] = std_normal_quantile(
            Probability((static_cast<double>(i) + 0.5) / m));
    for (const auto& e : ds.binomials)
        qq.observed_sorted.push_back(signed_chi(e).value);
    std::sort(qq.observed_sorted.begin(), qq.observed_sorted.end());
    return qq;
}

}  // namespace mendel
