#pragma once

// Embedded dataset: the 84 binomial experiments plus the multinomial
// grouping (bifactorial 9 cells, trifactorial 27 cells, five gametic-ratio
// tables), with CSV and JSON import/export.

#include <algorithm>
#include <array>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mendel {

enum class ExperimentGroup {
    Ratio3to1,
    Ratio2to1,
    Bifactorial,
    GameticRatios,
    Trifactorial,
    PlantVariation,
};

inline std::string_view to_string(ExperimentGroup g) {
    switch (g) {
        case ExperimentGroup::Ratio3to1: return "Ratio3to1";
        case ExperimentGroup::Ratio2to1: return "Ratio2to1";
        case ExperimentGroup::Bifactorial: return "Bifactorial";
        case ExperimentGroup::GameticRatios: return "GameticRatios";
        case ExperimentGroup::Trifactorial: return "Trifactorial";
        case ExperimentGroup::PlantVariation: return "PlantVariation";
    }
    return "?";
}

inline ExperimentGroup group_from_string(std::string_view s) {
    if (s == "Ratio3to1") return ExperimentGroup::Ratio3to1;
    if (s == "Ratio2to1") return ExperimentGroup::Ratio2to1;
    if (s == "Bifactorial") return ExperimentGroup::Bifactorial;
    if (s == "GameticRatios") return ExperimentGroup::GameticRatios;
    if (s == "Trifactorial") return ExperimentGroup::Trifactorial;
    if (s == "PlantVariation") return ExperimentGroup::PlantVariation;
    throw std::invalid_argument("unknown experiment group: " + std::string(s));
}

// Null success probability kept as an exact rational; 2/3 has no exact
// double and the downstream statistics are sensitive in the 4th decimal.
struct Rational {
    int num = 0;
    int den = 1;
    double to_double() const { return static_cast<double>(num) / den; }
    friend bool operator==(const Rational&, const Rational&) = default;
};

struct BinomialExperiment {
    int id = 0;
    ExperimentGroup group = ExperimentGroup::Ratio3to1;
    std::string trait;
    int n = 0;   // Bernoulli trials
    int n1 = 0;  // successes
    Rational p0; // null success probability

    double p0_value() const { return p0.to_double(); }

    void validate() const {
        if (n < 1) throw std::domain_error("experiment " + std::to_string(id) + ": n must be positive");
        if (n1 < 0 || n1 > n)
            throw std::domain_error("experiment " + std::to_string(id) + ": n1 must be in [0,n]");
        if (p0.den <= 0 || p0.num <= 0 || p0.num >= p0.den)
            throw std::domain_error("experiment " + std::to_string(id) + ": p0 must be in (0,1)");
    }
};

struct MultinomialExperiment {
    std::string label;
    std::vector<int> counts;
    std::vector<int> ratios;

    int df() const { return static_cast<int>(counts.size()) - 1; }
    int total() const {
        int t = 0;
        for (int c : counts) t += c;
        return t;
    }
    void validate() const {
        if (counts.size() < 2 || counts.size() != ratios.size())
            throw std::domain_error("multinomial " + label + ": counts/ratios size mismatch");
        for (int c : counts)
            if (c < 0) throw std::domain_error("multinomial " + label + ": negative count");
        for (int r : ratios)
            if (r <= 0) throw std::domain_error("multinomial " + label + ": ratio must be positive");
    }
};

struct Dataset {
    std::vector<BinomialExperiment> binomials;
    std::vector<MultinomialExperiment> fisher_multinomials;
};

namespace detail {

struct Row {
    int id;
    ExperimentGroup g;
    const char* trait;
    int n;
    int n1;
    int num;
    int den;
};

inline const std::array<Row, 84>& embedded_rows() {
    using G = ExperimentGroup;
    static const std::array<Row, 84> rows = {{
        {1, G::Ratio3to1, "A", 7324, 5474, 3, 4},
        {2, G::Ratio3to1, "B", 8023, 6022, 3, 4},
        {3, G::Ratio3to1, "C", 929, 705, 3, 4},
        {4, G::Ratio3to1, "D", 1181, 882, 3, 4},
        {5, G::Ratio3to1, "E", 580, 428, 3, 4},
        {6, G::Ratio3to1, "F", 858, 651, 3, 4},
        {7, G::Ratio3to1, "G", 1064, 787, 3, 4},
        {8, G::PlantVariation, "A", 57, 45, 3, 4},
        {9, G::PlantVariation, "A", 35, 27, 3, 4},
        {10, G::PlantVariation, "A", 31, 24, 3, 4},
        {11, G::PlantVariation, "A", 29, 19, 3, 4},
        {12, G::PlantVariation, "A", 43, 32, 3, 4},
        {13, G::PlantVariation, "A", 32, 26, 3, 4},
        {14, G::PlantVariation, "A", 112, 88, 3, 4},
        {15, G::PlantVariation, "A", 32, 22, 3, 4},
        {16, G::PlantVariation, "A", 34, 28, 3, 4},
        {17, G::PlantVariation, "A", 32, 25, 3, 4},
        {18, G::PlantVariation, "B", 36, 25, 3, 4},
        {19, G::PlantVariation, "B", 39, 32, 3, 4},
        {20, G::PlantVariation, "B", 19, 14, 3, 4},
        {21, G::PlantVariation, "B", 97, 70, 3, 4},
        {22, G::PlantVariation, "B", 37, 24, 3, 4},
        {23, G::PlantVariation, "B", 26, 20, 3, 4},
        {24, G::PlantVariation, "B", 45, 32, 3, 4},
        {25, G::PlantVariation, "B", 53, 44, 3, 4},
        {26, G::PlantVariation, "B", 64, 50, 3, 4},
        {27, G::PlantVariation, "B", 62, 44, 3, 4},
        {28, G::Bifactorial, "A", 556, 423, 3, 4},
        {29, G::Bifactorial, "B among 'A'", 423, 315, 3, 4},
        {30, G::Bifactorial, "B among 'a'", 133, 101, 3, 4},
        {31, G::Trifactorial, "A", 639, 480, 3, 4},
        {32, G::Trifactorial, "B among 'A'", 480, 367, 3, 4},
        {33, G::Trifactorial, "B among 'a'", 159, 122, 3, 4},
        {34, G::Trifactorial, "C among AaBb", 175, 127, 3, 4},
        {35, G::Trifactorial, "C among AaBB", 70, 52, 3, 4},
        {36, G::Trifactorial, "C among AABb", 78, 60, 3, 4},
        {37, G::Trifactorial, "C among AABB", 44, 30, 3, 4},
        {38, G::Trifactorial, "C among Aabb", 76, 60, 3, 4},
        {39, G::Trifactorial, "C among AAbb", 37, 26, 3, 4},
        {40, G::Trifactorial, "C among aaBb", 79, 55, 3, 4},
        {41, G::Trifactorial, "C among aaBB", 43, 33, 3, 4},
        {42, G::Trifactorial, "C among aabb", 37, 30, 3, 4},
        {43, G::Ratio2to1, "A", 565, 372, 2, 3},
        {44, G::Ratio2to1, "B", 519, 353, 2, 3},
        {45, G::Ratio2to1, "C", 100, 64, 2, 3},
        {46, G::Ratio2to1, "D", 100, 71, 2, 3},
        {47, G::Ratio2to1, "E", 100, 60, 2, 3},
        {48, G::Ratio2to1, "F", 100, 67, 2, 3},
        {49, G::Ratio2to1, "G", 100, 72, 2, 3},
        {50, G::Ratio2to1, "E", 100, 65, 2, 3},
        {51, G::Bifactorial, "A among 'AB'", 301, 198, 2, 3},
        {52, G::Bifactorial, "A among 'Ab'", 102, 67, 2, 3},
        {53, G::Bifactorial, "B among 'aB'", 96, 68, 2, 3},
        {54, G::Bifactorial, "B among Aa'B'", 198, 138, 2, 3},
        {55, G::Bifactorial, "B among AA'B'", 103, 65, 2, 3},
        {56, G::Trifactorial, "A among 'AB'", 367, 245, 2, 3},
        {57, G::Trifactorial, "A among 'Ab'", 113, 76, 2, 3},
        {58, G::Trifactorial, "B among 'aB'", 122, 79, 2, 3},
        {59, G::Trifactorial, "B among Aa'B'", 245, 175, 2, 3},
        {60, G::Trifactorial, "B among AA'B'", 122, 78, 2, 3},
        {61, G::Trifactorial, "C among AaBb", 127, 78, 2, 3},
        {62, G::Trifactorial, "C among AaBB", 52, 38, 2, 3},
        {63, G::Trifactorial, "C among AABb", 60, 45, 2, 3},
        {64, G::Trifactorial, "C among AABB", 30, 22, 2, 3},
        {65, G::Trifactorial, "C among Aabb", 60, 40, 2, 3},
        {66, G::Trifactorial, "C among AAbb", 26, 17, 2, 3},
        {67, G::Trifactorial, "C among aaBb", 55, 36, 2, 3},
        {68, G::Trifactorial, "C among aaBB", 33, 25, 2, 3},
        {69, G::Trifactorial, "C among aabb", 30, 20, 2, 3},
        {70, G::GameticRatios, "A", 90, 43, 1, 2},
        {71, G::GameticRatios, "B among AA", 43, 20, 1, 2},
        {72, G::GameticRatios, "B among Aa", 47, 25, 1, 2},
        {73, G::GameticRatios, "A", 110, 57, 1, 2},
        {74, G::GameticRatios, "B among Aa", 57, 31, 1, 2},
        {75, G::GameticRatios, "B among aa", 53, 27, 1, 2},
        {76, G::GameticRatios, "A", 87, 44, 1, 2},
        {77, G::GameticRatios, "B among AA", 44, 25, 1, 2},
        {78, G::GameticRatios, "B among Aa", 43, 22, 1, 2},
        {79, G::GameticRatios, "A", 98, 49, 1, 2},
        {80, G::GameticRatios, "B among Aa", 49, 24, 1, 2},
        {81, G::GameticRatios, "B among aa", 49, 22, 1, 2},
        {82, G::GameticRatios, "G", 166, 87, 1, 2},
        {83, G::GameticRatios, "C among Gg", 87, 47, 1, 2},
        {84, G::GameticRatios, "C among gg", 79, 38, 1, 2},
    }};
    return rows;
}

inline std::vector<int> trifactorial_ratios() {
    // 27-cell triple product of 1:2:1, B outer, C middle, A inner
    std::vector<int> r;
    r.reserve(27);
    for (int b : {1, 2, 1})
        for (int c : {1, 2, 1})
            for (int a : {1, 2, 1}) r.push_back(b * c * a);
    return r;
}

}  // namespace detail

inline Dataset load_embedded() {
    Dataset ds;
    ds.binomials.reserve(84);
    for (const auto& r : detail::embedded_rows()) {
        BinomialExperiment e{r.id, r.g, r.trait, r.n, r.n1, {r.num, r.den}};
        e.validate();
        ds.binomials.push_back(std::move(e));
    }
    ds.fisher_multinomials.push_back(
        {"bifactorial",
         {38, 60, 28, 65, 138, 68, 35, 67, 30},
         {1, 2, 1, 2, 4, 2, 1, 2, 1}});
    ds.fisher_multinomials.push_back(
        {"trifactorial",
         {8, 14, 8, 22, 38, 25, 14, 18, 10, 15, 49, 19, 45, 78, 36, 18, 48, 24,
          9, 20, 10, 17, 40, 20, 11, 16, 7},
         detail::trifactorial_ratios()});
    ds.fisher_multinomials.push_back({"gametic-1", {20, 23, 25, 22}, {1, 1, 1, 1}});
    ds.fisher_multinomials.push_back({"gametic-2", {31, 26, 27, 26}, {1, 1, 1, 1}});
    ds.fisher_multinomials.push_back({"gametic-3", {25, 19, 22, 21}, {1, 1, 1, 1}});
    ds.fisher_multinomials.push_back({"gametic-4", {24, 25, 22, 27}, {1, 1, 1, 1}});
    ds.fisher_multinomials.push_back({"gametic-5", {47, 40, 38, 41}, {1, 1, 1, 1}});
    for (const auto& m : ds.fisher_multinomials) m.validate();
    return ds;
}

inline constexpr const char* kCsvHeader = "id,group,trait,n,n1,p0_num,p0_den";

// Parses the binomial-experiment CSV schema. Errors carry the 1-based line
// number and the offending field.
inline std::vector<BinomialExperiment> parse_csv(std::string_view text) {
    std::vector<BinomialExperiment> out;
    size_t pos = 0;
    int lineno = 0;
    bool saw_header = false;
    while (pos <= text.size()) {
        size_t eol = text.find('\n', pos);
        std::string_view line = (eol == std::string_view::npos)
                                    ? text.substr(pos)
                                    : text.substr(pos, eol - pos);
        pos = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty() || line.front() == '#') continue;
        if (!saw_header) {
            if (line != kCsvHeader)
                throw std::invalid_argument("line 1: expected header '" +
                                            std::string(kCsvHeader) + "'");
            saw_header = true;
            continue;
        }
        std::vector<std::string> fields;
        size_t fpos = 0;
        while (true) {
            size_t comma = line.find(',', fpos);
            fields.emplace_back(line.substr(fpos, comma == std::string_view::npos
                                                      ? std::string_view::npos
                                                      : comma - fpos));
            if (comma == std::string_view::npos) break;
            fpos = comma + 1;
        }
        if (fields.size() != 7)
            throw std::invalid_argument("line " + std::to_string(lineno) +
                                        ": expected 7 fields, got " +
                                        std::to_string(fields.size()));
        auto to_int = [&](const std::string& s, const char* name) {
            try {
                size_t used = 0;
                int v = std::stoi(s, &used);
                if (used != s.size()) throw std::invalid_argument("trailing");
                return v;
            } catch (const std::exception&) {
                throw std::invalid_argument("line " + std::to_string(lineno) +
                                            ": field '" + name +
                                            "' is not an integer: '" + s + "'");
            }
        };
        BinomialExperiment e;
        e.id = to_int(fields[0], "id");
        e.group = group_from_string(fields[1]);
        e.trait = fields[2];
        e.n = to_int(fields[3], "n");
        e.n1 = to_int(fields[4], "n1");
        e.p0 = {to_int(fields[5], "p0_num"), to_int(fields[6], "p0_den")};
        try {
            e.validate();
        } catch (const std::domain_error& ex) {
            throw std::invalid_argument("line " + std::to_string(lineno) + ": " +
                                        ex.what());
        }
        out.push_back(std::move(e));
    }
    return out;
}

// Deterministic, byte-stable export sorted by id.
inline std::string export_csv(const std::vector<BinomialExperiment>& exps) {
    std::vector<const BinomialExperiment*> sorted;
    sorted.reserve(exps.size());
    for (const auto& e : exps) sorted.push_back(&e);
    std::sort(sorted.begin(), sorted.end(),
              [](const BinomialExperiment* a, const BinomialExperiment* b) {
                  return a->id < b->id;
              });
    std::string out(kCsvHeader);
    out += '\n';
    for (const auto* e : sorted) {
        out += std::to_string(e->id);
        out += ',';
        out += to_string(e->group);
        out += ',';
        out += e->trait;
        out += ',';
        out += std::to_string(e->n);
        out += ',';
        out += std::to_string(e->n1);
        out += ',';
        out += std::to_string(e->p0.num);
        out += ',';
        out += std::to_string(e->p0.den);
        out += '\n';
    }
    return out;
}

inline std::string export_csv(const Dataset& ds) { return export_csv(ds.binomials); }

}  // namespace mendel
