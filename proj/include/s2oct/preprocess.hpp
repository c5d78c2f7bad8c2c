#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "s2oct/common.hpp"
#include "s2oct/core.hpp"
#include "s2oct/rng.hpp"

namespace s2oct {

struct RawRow {
    std::vector<double> features;
    long label;
};

// Integer-labeled table after complete-case filtering.
struct RawTable {
    std::vector<RawRow> rows;
    std::size_t dim = 0;
    std::size_t dropped_incomplete = 0;
};

struct BinaryRow {
    std::vector<double> features;
    ClassLabel label;
};

struct BinaryTable {
    std::vector<BinaryRow> rows;
    std::size_t dim = 0;
};

namespace detail {

inline bool parse_field(const std::string& field, double& out) {
    std::size_t pos = 0;
    std::string trimmed = field;
    trimmed.erase(0, trimmed.find_first_not_of(" \t\r"));
    trimmed.erase(trimmed.find_last_not_of(" \t\r") + 1);
    if (trimmed.empty() || trimmed == "?" || trimmed == "NA" || trimmed == "nan") return false;
    try {
        out = std::stod(trimmed, &pos);
    } catch (const std::exception&) {
        return false;
    }
    return pos == trimmed.size() && std::isfinite(out);
}

}  // namespace detail

// Comma-separated, decimal point, label in the last column. Rows with any
// unparseable or missing field are dropped (complete cases only).
inline RawTable read_csv(const std::string& path, bool has_header) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open CSV file: " + path);
    RawTable table;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (first && has_header) {
            first = false;
            continue;
        }
        first = false;
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (line.back() == ',') fields.push_back("");
        if (fields.size() < 2) throw FormatError("CSV row needs >= 1 feature plus a label: " + path);
        if (table.dim == 0)
            table.dim = fields.size() - 1;
        else if (fields.size() - 1 != table.dim)
            throw FormatError("CSV row width mismatch in " + path);

        RawRow row;
        row.features.reserve(table.dim);
        bool complete = true;
        for (std::size_t j = 0; j + 1 < fields.size(); ++j) {
            double v;
            if (!detail::parse_field(fields[j], v)) {
                complete = false;
                break;
            }
            row.features.push_back(v);
        }
        double label_v;
        if (complete && detail::parse_field(fields.back(), label_v) &&
            label_v == std::floor(label_v)) {
            row.label = static_cast<long>(label_v);
            table.rows.push_back(std::move(row));
        } else {
            ++table.dropped_incomplete;
        }
    }
    if (table.rows.empty()) throw FormatError("CSV has no complete rows: " + path);
    return table;
}

// Label 1 becomes class A; labels 2 and 3 become class B. Anything outside
// {1, 2, 3} is rejected.
inline BinaryTable collapse_classes(const RawTable& table) {
    BinaryTable out;
    out.dim = table.dim;
    out.rows.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        if (row.label < 1 || row.label > 3)
            throw FormatError("class labels must be in {1,2,3}, got " + std::to_string(row.label));
        out.rows.push_back({row.features, row.label == 1 ? ClassLabel::A : ClassLabel::B});
    }
    return out;
}

struct CoordinateScaling {
    double lower = 0.0;        // l_j
    double upper = 0.0;        // u_j
    double midpoint = 0.0;     // m_j
    bool remapped = false;     // affinely mapped onto [-100, 100]
    bool remap_skipped = false;  // remap wanted but coordinate constant
};

struct ScalingReport {
    std::vector<CoordinateScaling> coordinates;

    std::string to_text() const {
        std::ostringstream os;
        for (std::size_t j = 0; j < coordinates.size(); ++j) {
            const auto& c = coordinates[j];
            os << "coord." << j + 1 << ".lower = " << c.lower << "\n"
               << "coord." << j + 1 << ".upper = " << c.upper << "\n"
               << "coord." << j + 1 << ".midpoint = " << c.midpoint << "\n"
               << "coord." << j + 1 << ".remapped = " << (c.remapped ? "yes" : "no") << "\n";
            if (c.remap_skipped) os << "coord." << j + 1 << ".remap_skipped = yes\n";
        }
        return os.str();
    }
};

// Shifts every coordinate by its range midpoint; coordinates whose shifted
// range still leaves [-100, 100] are affinely mapped onto that interval.
inline std::pair<BinaryTable, ScalingReport> scale_midpoint(const BinaryTable& table) {
    if (table.rows.empty()) throw ParameterError("scale_midpoint: empty table");
    const std::size_t p = table.dim;
    BinaryTable out = table;
    ScalingReport report;
    report.coordinates.resize(p);
    constexpr double kCap = 100.0;

    for (std::size_t j = 0; j < p; ++j) {
        double lo = table.rows.front().features[j], hi = lo;
        for (const auto& row : table.rows) {
            lo = std::min(lo, row.features[j]);
            hi = std::max(hi, row.features[j]);
        }
        auto& cs = report.coordinates[j];
        cs.lower = lo;
        cs.upper = hi;
        cs.midpoint = 0.5 * (lo + hi);
        const double shifted_lo = lo - cs.midpoint, shifted_hi = hi - cs.midpoint;
        const bool needs_remap = shifted_lo < -kCap || shifted_hi > kCap;
        if (needs_remap && shifted_hi == shifted_lo) {
            cs.remap_skipped = true;  // constant coordinate, shift only
        }
        const bool remap = needs_remap && shifted_hi > shifted_lo;
        cs.remapped = remap;
        for (auto& row : out.rows) {
            double v = row.features[j] - cs.midpoint;
            if (remap)
                v = 2.0 * kCap * (v - shifted_lo) / (shifted_hi - shifted_lo) - kCap;
            row.features[j] = v;
        }
    }
    return {std::move(out), std::move(report)};
}

// Affine map of each coordinate onto [0, 1]; constant coordinates go to 0.5.
inline BinaryTable scale_unit(const BinaryTable& table) {
    if (table.rows.empty()) throw ParameterError("scale_unit: empty table");
    BinaryTable out = table;
    for (std::size_t j = 0; j < table.dim; ++j) {
        double lo = table.rows.front().features[j], hi = lo;
        for (const auto& row : table.rows) {
            lo = std::min(lo, row.features[j]);
            hi = std::max(hi, row.features[j]);
        }
        for (auto& row : out.rows)
            row.features[j] = hi > lo ? (row.features[j] - lo) / (hi - lo) : 0.5;
    }
    return out;
}

enum class SampleKind { Biased, SimpleRandom };

struct SampleDesign {
    SampleKind kind = SampleKind::Biased;
    double labeled_fraction = 0.10;
    double bias_probability = 0.85;  // chance each draw targets the class-A pool
    std::uint64_t seed = 1;
};

struct SampleResult {
    Dataset dataset;
    std::vector<ClassLabel> unlabeled_truth;  // ground truth of the unlabeled part
    long lambda = 0;                          // true class-A count among unlabeled
    std::vector<std::size_t> labeled_indices;
    std::vector<std::size_t> unlabeled_indices;
};

// Splits the table into labeled and unlabeled parts. SimpleRandom draws n
// uniformly without replacement; Biased draws sequentially, each draw taking
// a uniform element of the remaining class-A pool with probability
// bias_probability (falling back to whichever pool is non-empty). lambda is
// the exact class-A count of the unlabeled remainder.
inline SampleResult draw_sample(const BinaryTable& table, const SampleDesign& design) {
    const std::size_t total = table.rows.size();
    if (total == 0) throw DesignError("draw_sample: empty table");
    if (design.labeled_fraction <= 0.0 || design.labeled_fraction > 1.0)
        throw DesignError("labeled_fraction must be in (0, 1]");
    if (design.bias_probability < 0.0 || design.bias_probability > 1.0)
        throw DesignError("bias_probability must be in [0, 1]");
    // Round half up.
    const std::size_t n =
        static_cast<std::size_t>(std::floor(design.labeled_fraction * static_cast<double>(total) + 0.5));
    if (n == 0) throw DesignError("design yields n = 0 labeled points");
    if (n >= total) throw DesignError("design leaves no unlabeled points");

    Rng rng(design.seed);
    std::vector<std::size_t> chosen;
    chosen.reserve(n);

    if (design.kind == SampleKind::SimpleRandom) {
        std::vector<std::size_t> idx(total);
        for (std::size_t i = 0; i < total; ++i) idx[i] = i;
        for (std::size_t k = 0; k < n; ++k) {
            const std::size_t pick = k + rng.below(total - k);
            std::swap(idx[k], idx[pick]);
            chosen.push_back(idx[k]);
        }
    } else {
        std::vector<std::size_t> pool_a, pool_b;
        for (std::size_t i = 0; i < total; ++i)
            (table.rows[i].label == ClassLabel::A ? pool_a : pool_b).push_back(i);
        for (std::size_t k = 0; k < n; ++k) {
            bool take_a = rng.bernoulli(design.bias_probability);
            if (take_a && pool_a.empty()) take_a = false;
            if (!take_a && pool_b.empty()) take_a = true;
            auto& pool = take_a ? pool_a : pool_b;
            const std::size_t at = rng.below(pool.size());
            chosen.push_back(pool[at]);
            pool[at] = pool.back();
            pool.pop_back();
        }
    }

    std::sort(chosen.begin(), chosen.end());
    SampleResult result;
    result.labeled_indices = chosen;
    std::vector<LabeledPoint> labeled;
    std::vector<std::vector<double>> unlabeled;
    std::size_t next = 0;
    for (std::size_t i = 0; i < total; ++i) {
        if (next < chosen.size() && chosen[next] == i) {
            labeled.push_back({table.rows[i].features, table.rows[i].label});
            ++next;
        } else {
            unlabeled.push_back(table.rows[i].features);
            result.unlabeled_indices.push_back(i);
            result.unlabeled_truth.push_back(table.rows[i].label);
            if (table.rows[i].label == ClassLabel::A) ++result.lambda;
        }
    }
    result.dataset = make_dataset(std::move(labeled), std::move(unlabeled));
    return result;
}

}  // namespace s2oct
