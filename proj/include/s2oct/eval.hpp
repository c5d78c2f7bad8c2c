#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "s2oct/common.hpp"

namespace s2oct {

// Class A counts as positive.
struct ConfusionCounts {
    long tp = 0;
    long tn = 0;
    long fp = 0;
    long fn = 0;

    long total() const { return tp + tn + fp + fn; }
};

inline ConfusionCounts confusion(const std::vector<ClassLabel>& predicted,
                                 const std::vector<ClassLabel>& truth) {
    if (predicted.size() != truth.size())
        throw ParameterError("confusion: prediction/truth length mismatch");
    ConfusionCounts c;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        if (predicted[i] == ClassLabel::A)
            truth[i] == ClassLabel::A ? ++c.tp : ++c.fp;
        else
            truth[i] == ClassLabel::B ? ++c.tn : ++c.fn;
    }
    return c;
}

inline double accuracy(const ConfusionCounts& c) {
    const long t = c.total();
    return t == 0 ? 0.0 : static_cast<double>(c.tp + c.tn) / static_cast<double>(t);
}

// Matthews correlation coefficient. Any zero factor under the square root
// makes the coefficient undefined; the convention here is to return 0.
inline double mcc(const ConfusionCounts& c) {
    const double tp = static_cast<double>(c.tp), tn = static_cast<double>(c.tn);
    const double fp = static_cast<double>(c.fp), fn = static_cast<double>(c.fn);
    const double denom = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
    if (denom == 0.0) return 0.0;
    return (tp * tn - fp * fn) / std::sqrt(denom);
}

// Precision/recall carry a defined flag: a zero denominator yields 0 with
// defined=false rather than NaN.
struct FlaggedMetric {
    double value = 0.0;
    bool defined = true;
};

inline FlaggedMetric precision(const ConfusionCounts& c) {
    if (c.tp + c.fp == 0) return {0.0, false};
    return {static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp), true};
}

inline FlaggedMetric recall(const ConfusionCounts& c) {
    if (c.tp + c.fn == 0) return {0.0, false};
    return {static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn), true};
}

struct MetricSet {
    double ac = 0.0;
    double mcc = 0.0;
    double pr = 0.0;
    double re = 0.0;
    bool pr_defined = true;
    bool re_defined = true;
};

inline MetricSet metric_set(const ConfusionCounts& c) {
    MetricSet m;
    m.ac = accuracy(c);
    m.mcc = mcc(c);
    const FlaggedMetric p = precision(c), r = recall(c);
    m.pr = p.value;
    m.pr_defined = p.defined;
    m.re = r.value;
    m.re_defined = r.defined;
    return m;
}

// Instance-wise method differences (first minus second).
struct MetricDiff {
    double ac = 0.0;
    double mcc = 0.0;
    double pr = 0.0;
    double re = 0.0;
};

inline MetricDiff diff_metrics(const MetricSet& a, const MetricSet& b) {
    return {a.ac - b.ac, a.mcc - b.mcc, a.pr - b.pr, a.re - b.re};
}

// Fraction of runs solved within sigma seconds; times above the limit count
// as unsolved at every sigma.
inline double ecdf_at(const std::vector<double>& times, double limit, double sigma) {
    if (times.empty()) return 0.0;
    const double cutoff = std::min(sigma, limit);
    std::size_t solved = 0;
    for (double t : times)
        if (t <= cutoff && t <= limit) ++solved;
    return static_cast<double>(solved) / static_cast<double>(times.size());
}

// Step-function samples (sigma, gamma(sigma)) at each distinct solved time,
// prefixed with (0, gamma(0)) and closed at (limit, gamma(limit)).
inline std::vector<std::pair<double, double>> ecdf(const std::vector<double>& times,
                                                   double limit) {
    std::vector<double> solved;
    for (double t : times)
        if (t <= limit) solved.push_back(t);
    std::sort(solved.begin(), solved.end());
    solved.erase(std::unique(solved.begin(), solved.end()), solved.end());

    std::vector<std::pair<double, double>> steps;
    steps.emplace_back(0.0, ecdf_at(times, limit, 0.0));
    for (double t : solved) steps.emplace_back(t, ecdf_at(times, limit, t));
    if (steps.back().first < limit) steps.emplace_back(limit, ecdf_at(times, limit, limit));
    return steps;
}

}  // namespace s2oct
