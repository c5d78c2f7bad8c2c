#pragma once

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "s2oct/common.hpp"
#include "s2oct/core.hpp"
#include "s2oct/eval.hpp"
#include "s2oct/model.hpp"
#include "s2oct/preprocess.hpp"
#include "s2oct/rng.hpp"
#include "s2oct/solve.hpp"
#include "s2oct/svg.hpp"

namespace s2oct {

struct InstanceSpec {
    std::string name;
    std::string path;
    bool header = false;
};

struct DesignSpec {
    std::string name;
    SampleKind kind = SampleKind::Biased;
    double fraction = 0.10;
    double bias = 0.85;
    int replicates = 5;
};

enum class ScaleMode { Midpoint, Unit, None };

struct ExperimentConfig {
    std::string output_dir = "out";
    int workers = 1;
    double time_limit = 7200.0;
    Emphasis emphasis = Emphasis::FeasibilityFirst;
    std::string solver_cmd;
    int solver_threads = 1;
    double c_penalty = 1.0;
    std::optional<int> depth;
    std::optional<double> s_box;
    std::optional<double> mip_gap;
    bool polish = false;
    ScaleMode scale = ScaleMode::Midpoint;
    std::uint64_t base_seed = 1;
    std::vector<InstanceSpec> instances;
    std::vector<DesignSpec> designs;
};

namespace harness_detail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline bool parse_bool(const std::string& v) { return v == "true" || v == "yes" || v == "1"; }

}  // namespace harness_detail

// Flat key-value config with [instance <name>] and [design <name>] sections;
// keys before the first section are global. '#' starts a comment.
inline ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::string section_kind;
    InstanceSpec* instance = nullptr;
    DesignSpec* design = nullptr;

    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = harness_detail::trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') throw FormatError("bad section header: " + line);
            std::istringstream hs(line.substr(1, line.size() - 2));
            std::string kind, name;
            hs >> kind >> name;
            if (name.empty() || name.find(',') != std::string::npos)
                throw FormatError("section needs a comma-free name: " + line);
            if (kind == "instance") {
                cfg.instances.push_back({name, "", false});
                instance = &cfg.instances.back();
                design = nullptr;
            } else if (kind == "design") {
                cfg.designs.push_back({name});
                design = &cfg.designs.back();
                instance = nullptr;
            } else {
                throw FormatError("unknown section kind: " + kind);
            }
            section_kind = kind;
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string::npos) throw FormatError("expected key = value: " + line);
        const std::string key = harness_detail::trim(line.substr(0, eq));
        const std::string value = harness_detail::trim(line.substr(eq + 1));

        if (section_kind.empty()) {
            if (key == "output_dir") cfg.output_dir = value;
            else if (key == "workers") cfg.workers = std::stoi(value);
            else if (key == "time_limit") cfg.time_limit = std::stod(value);
            else if (key == "emphasis")
                cfg.emphasis = value == "balanced" ? Emphasis::Balanced : Emphasis::FeasibilityFirst;
            else if (key == "solver_cmd") cfg.solver_cmd = value;
            else if (key == "solver_threads") cfg.solver_threads = std::stoi(value);
            else if (key == "c") cfg.c_penalty = std::stod(value);
            else if (key == "depth") cfg.depth = std::stoi(value);
            else if (key == "s") cfg.s_box = std::stod(value);
            else if (key == "mip_gap") cfg.mip_gap = std::stod(value);
            else if (key == "polish") cfg.polish = harness_detail::parse_bool(value);
            else if (key == "scale")
                cfg.scale = value == "unit"   ? ScaleMode::Unit
                            : value == "none" ? ScaleMode::None
                                              : ScaleMode::Midpoint;
            else if (key == "base_seed") cfg.base_seed = std::stoull(value);
            else throw FormatError("unknown global key: " + key);
        } else if (instance) {
            if (key == "path") instance->path = value;
            else if (key == "header") instance->header = harness_detail::parse_bool(value);
            else throw FormatError("unknown instance key: " + key);
        } else if (design) {
            if (key == "kind")
                design->kind = value == "simple" ? SampleKind::SimpleRandom : SampleKind::Biased;
            else if (key == "fraction") design->fraction = std::stod(value);
            else if (key == "bias") design->bias = std::stod(value);
            else if (key == "replicates") design->replicates = std::stoi(value);
            else throw FormatError("unknown design key: " + key);
        }
    }
    if (cfg.instances.empty()) throw FormatError("config declares no instances");
    if (cfg.designs.empty()) throw FormatError("config declares no designs");
    for (const auto& inst : cfg.instances)
        if (inst.path.empty()) throw FormatError("instance without path: " + inst.name);
    return cfg;
}

inline ExperimentConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

struct ResultRow {
    std::string instance, design, method;
    std::uint64_t seed = 0;
    long n = 0, m = 0, p = 0, depth = 0;
    double s = 0.0, c_penalty = 0.0;
    long lambda = 0;
    double big_m = 0.0;
    std::string status;
    double runtime_s = 0.0;
    double objective = 0.0, xi = 0.0;
    bool has_solver_fields = true;  // false on diff rows
    bool has_metrics = false;
    MetricSet full, unlab;
};

inline const char* results_csv_header() {
    return "instance,design,seed,method,n,m,p,D,s,C,lambda,M,status,runtime_s,objective,xi,"
           "ac_full,mcc_full,pr_full,re_full,ac_unlabeled,mcc_unlabeled,pr_unlabeled,re_unlabeled";
}

namespace harness_detail {

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

inline std::string metric_fields(const ResultRow& row) {
    if (!row.has_metrics) return ",,,,,,,";
    std::ostringstream os;
    os << fmt(row.full.ac) << "," << fmt(row.full.mcc) << "," << fmt(row.full.pr) << ","
       << fmt(row.full.re) << "," << fmt(row.unlab.ac) << "," << fmt(row.unlab.mcc) << ","
       << fmt(row.unlab.pr) << "," << fmt(row.unlab.re);
    return os.str();
}

}  // namespace harness_detail

inline std::string to_csv_line(const ResultRow& row) {
    std::ostringstream os;
    os << row.instance << "," << row.design << "," << row.seed << "," << row.method << "," << row.n
       << "," << row.m << "," << row.p << "," << row.depth << ",";
    if (row.has_solver_fields)
        os << harness_detail::fmt(row.s) << "," << harness_detail::fmt(row.c_penalty) << ","
           << row.lambda << "," << harness_detail::fmt(row.big_m) << "," << row.status << ","
           << harness_detail::fmt(row.runtime_s) << "," << harness_detail::fmt(row.objective) << ","
           << harness_detail::fmt(row.xi) << ",";
    else
        os << ",,,," << row.status << ",,,,";
    os << harness_detail::metric_fields(row);
    return os.str();
}

namespace harness_detail {

inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    for (char c : line) {
        if (c == ',') {
            out.push_back(field);
            field.clear();
        } else {
            field += c;
        }
    }
    out.push_back(field);
    return out;
}

}  // namespace harness_detail

inline std::vector<ResultRow> parse_results_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open results CSV: " + path);
    std::vector<ResultRow> rows;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (first) {
            first = false;
            continue;
        }
        if (line.empty()) continue;
        const auto f = harness_detail::split_csv(line);
        if (f.size() != 24) throw FormatError("results CSV row with wrong field count");
        ResultRow row;
        row.instance = f[0];
        row.design = f[1];
        row.seed = std::stoull(f[2]);
        row.method = f[3];
        row.n = std::stol(f[4]);
        row.m = std::stol(f[5]);
        row.p = std::stol(f[6]);
        row.depth = std::stol(f[7]);
        row.has_solver_fields = !f[8].empty();
        if (row.has_solver_fields) {
            row.s = std::stod(f[8]);
            row.c_penalty = std::stod(f[9]);
            row.lambda = std::stol(f[10]);
            row.big_m = std::stod(f[11]);
            row.runtime_s = f[13].empty() ? 0.0 : std::stod(f[13]);
            row.objective = f[14].empty() ? 0.0 : std::stod(f[14]);
            row.xi = f[15].empty() ? 0.0 : std::stod(f[15]);
        }
        row.status = f[12];
        row.has_metrics = !f[16].empty();
        if (row.has_metrics) {
            row.full.ac = std::stod(f[16]);
            row.full.mcc = std::stod(f[17]);
            row.full.pr = std::stod(f[18]);
            row.full.re = std::stod(f[19]);
            row.unlab.ac = std::stod(f[20]);
            row.unlab.mcc = std::stod(f[21]);
            row.unlab.pr = std::stod(f[22]);
            row.unlab.re = std::stod(f[23]);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

// ECDF + the two 8-panel boxplot figures, all recomputable from the CSV.
inline void make_plots(const std::vector<ResultRow>& rows, double limit,
                       const std::string& outdir) {
    namespace fs = std::filesystem;
    svg::EcdfSeries s2oct_series{"s2oct", {}}, base_series{"baseline", {}};
    for (const auto& row : rows) {
        if (row.method == "s2oct" || row.method == "baseline") {
            const double t = row.status == "Optimal" ? row.runtime_s : 2.0 * limit + 1.0;
            (row.method == "s2oct" ? s2oct_series : base_series).times.push_back(t);
        }
    }
    {
        std::ofstream out(fs::path(outdir) / "ecdf.svg");
        out << svg::ecdf_svg({s2oct_series, base_series}, limit, "Run times (ECDF)");
    }

    auto diff_panels = [&rows](bool use_ac_mcc) {
        std::vector<svg::BoxPanel> panels;
        const char* names[2] = {use_ac_mcc ? "AC" : "PR", use_ac_mcc ? "MCC" : "RE"};
        for (int metric = 0; metric < 2; ++metric) {
            for (int slice = 0; slice < 2; ++slice) {      // full / unlabeled
                for (int sub = 0; sub < 2; ++sub) {        // all / both-Optimal
                    svg::BoxPanel panel;
                    panel.title = std::string(names[metric]) + " diff, " +
                                  (slice == 0 ? "full" : "unlabeled") +
                                  (sub == 0 ? ", all" : ", both terminated");
                    for (const auto& row : rows) {
                        if (row.method != "diff" || !row.has_metrics) continue;
                        if (sub == 1 && row.status != "Optimal/Optimal") continue;
                        const MetricSet& ms = slice == 0 ? row.full : row.unlab;
                        double v = 0.0;
                        if (use_ac_mcc)
                            v = metric == 0 ? ms.ac : ms.mcc;
                        else
                            v = metric == 0 ? ms.pr : ms.re;
                        panel.values.push_back(v);
                    }
                    panels.push_back(std::move(panel));
                }
            }
        }
        return panels;
    };
    {
        std::ofstream out(fs::path(outdir) / "boxplot_ac_mcc.svg");
        out << svg::boxplot_grid_svg(diff_panels(true), 2, "S2OCT minus baseline");
    }
    {
        std::ofstream out(fs::path(outdir) / "boxplot_pr_re.svg");
        out << svg::boxplot_grid_svg(diff_panels(false), 2, "S2OCT minus baseline");
    }
}

struct RunSummary {
    std::vector<ResultRow> rows;
    long error_rows = 0;
    std::string results_csv;
    std::vector<std::string> log_lines;
};

namespace harness_detail {

struct PreparedInstance {
    InstanceSpec spec;
    BinaryTable table;  // collapsed and scaled
    std::string scaling_report;
};

inline BinaryTable prepare_table(const InstanceSpec& inst, ScaleMode scale,
                                 std::string* report_text = nullptr) {
    const RawTable raw = read_csv(inst.path, inst.header);
    BinaryTable table = collapse_classes(raw);
    if (scale == ScaleMode::Midpoint) {
        auto [scaled, report] = scale_midpoint(table);
        table = std::move(scaled);
        if (report_text) *report_text = report.to_text();
    }
    if (scale == ScaleMode::Unit) table = scale_unit(table);
    return table;
}

inline MetricSet metrics_for(const TreeTopology& topology, const TreeParams& tree,
                             const Dataset& data, const std::vector<ClassLabel>& unlabeled_truth,
                             MetricSet& unlabeled_out) {
    std::vector<ClassLabel> pred, truth;
    for (const auto& lp : data.labeled) {
        pred.push_back(classify(topology, tree, lp.x));
        truth.push_back(lp.label);
    }
    std::vector<ClassLabel> upred;
    for (const auto& x : data.unlabeled) upred.push_back(classify(topology, tree, x));
    pred.insert(pred.end(), upred.begin(), upred.end());
    truth.insert(truth.end(), unlabeled_truth.begin(), unlabeled_truth.end());
    unlabeled_out = metric_set(confusion(upred, unlabeled_truth));
    return metric_set(confusion(pred, truth));
}

inline long routed_a_count(const TreeTopology& topology, const TreeParams& tree,
                           const Dataset& data) {
    long count = 0;
    for (const auto& x : data.unlabeled)
        if (classify(topology, tree, x) == ClassLabel::A) ++count;
    return count;
}

inline long sigma_delta_from_values(const ModelLayout& lay, const std::vector<double>& values) {
    long sum = 0;
    for (const auto& du : lay.delta)
        for (const auto& [leaf, col] : du) sum += static_cast<long>(std::llround(values[col]));
    return sum;
}

}  // namespace harness_detail

// One (instance x design x replicate) job: sample, build and solve both
// methods, evaluate, and emit three CSV rows plus artifacts.
inline std::vector<ResultRow> run_job(const ExperimentConfig& cfg,
                                      const harness_detail::PreparedInstance& inst,
                                      const DesignSpec& des, int replicate,
                                      std::vector<std::string>& log) {
    const std::uint64_t seed =
        mix_seed(mix_seed(mix_seed(cfg.base_seed, inst.spec.name), des.name),
                 static_cast<std::uint64_t>(replicate));

    ResultRow base_row;
    base_row.instance = inst.spec.name;
    base_row.design = des.name;
    base_row.seed = seed;

    std::vector<ResultRow> rows;
    try {
        SampleDesign sd{des.kind, des.fraction, des.bias, seed};
        const SampleResult sample = draw_sample(inst.table, sd);
        const Dataset& data = sample.dataset;
        const std::size_t total = data.total();

        const int depth = cfg.depth ? *cfg.depth : default_depth(total);
        const TreeTopology topology(depth);
        const double eta = compute_eta(data);
        const double s = cfg.s_box ? *cfg.s_box : default_s(total, eta, data.p);
        const ModelParams params =
            make_model_params(data, depth, s, cfg.c_penalty, sample.lambda);

        base_row.n = static_cast<long>(data.n());
        base_row.m = static_cast<long>(data.m());
        base_row.p = static_cast<long>(data.p);
        base_row.depth = depth;
        base_row.s = s;
        base_row.c_penalty = cfg.c_penalty;
        base_row.lambda = params.lambda;
        base_row.big_m = params.big_m;

        namespace fs = std::filesystem;
        const std::string stem =
            inst.spec.name + "_" + des.name + "_" + std::to_string(seed);

        bool diff_ready = true;
        std::string status_s2oct, status_base;
        MetricSet s_full, s_unlab, b_full, b_unlab;
        bool s_ok = false, b_ok = false;

        for (const std::string method : {"s2oct", "baseline"}) {
            ResultRow row = base_row;
            row.method = method;
            const MilpModel model = method == "s2oct" ? build_s2oct(data, topology, params)
                                                      : build_labeled_only(data, topology, params);
            SolverConfig sc;
            sc.time_limit_seconds = cfg.time_limit;
            sc.emphasis = cfg.emphasis;
            sc.command_template = cfg.solver_cmd;
            sc.threads = cfg.solver_threads;
            if (cfg.mip_gap) sc.mip_gap = *cfg.mip_gap;
            sc.polish = cfg.polish;
            sc.mps_path = (fs::path(cfg.output_dir) / "mps" / (stem + "_" + method + ".mps")).string();
            sc.sol_path = sc.mps_path + ".sol";

            const SolveReport report = solve_milp(model, data, topology, params, sc);
            row.status = to_string(report.status);
            row.runtime_s = report.runtime_seconds;
            row.objective = report.objective;
            row.xi = report.xi;

            const bool has_tree =
                report.status == SolveStatus::Optimal || report.status == SolveStatus::Feasible;
            if (has_tree) {
                row.unlab = MetricSet{};
                row.full = harness_detail::metrics_for(topology, report.tree, data,
                                                       sample.unlabeled_truth, row.unlab);
                row.has_metrics = true;

                nlohmann::json art;
                art["instance"] = inst.spec.name;
                art["path"] = inst.spec.path;
                art["header"] = inst.spec.header;
                art["scale"] = cfg.scale == ScaleMode::Midpoint ? "midpoint"
                               : cfg.scale == ScaleMode::Unit  ? "unit"
                                                               : "none";
                art["design"] = des.name;
                art["kind"] = des.kind == SampleKind::Biased ? "biased" : "simple";
                art["fraction"] = des.fraction;
                art["bias"] = des.bias;
                art["seed"] = seed;
                art["method"] = method;
                art["n"] = row.n;
                art["m"] = row.m;
                art["p"] = row.p;
                art["depth"] = depth;
                art["s"] = s;
                art["c"] = cfg.c_penalty;
                art["lambda"] = params.lambda;
                art["big_m"] = params.big_m;
                art["status"] = row.status;
                art["objective"] = report.objective;
                art["xi"] = report.xi;
                art["omega"] = report.tree.omega;
                art["gamma"] = report.tree.gamma;
                art["labeled_indices"] = sample.labeled_indices;
                if (method == "s2oct") {
                    const ModelLayout lay = make_layout(model, data, topology);
                    art["sigma_delta"] = harness_detail::sigma_delta_from_values(lay, report.values);
                }
                art["metrics"] = {{"ac_full", row.full.ac},       {"mcc_full", row.full.mcc},
                                  {"pr_full", row.full.pr},       {"re_full", row.full.re},
                                  {"ac_unlabeled", row.unlab.ac}, {"mcc_unlabeled", row.unlab.mcc},
                                  {"pr_unlabeled", row.unlab.pr}, {"re_unlabeled", row.unlab.re}};
                std::ofstream out(fs::path(cfg.output_dir) / "trees" / (stem + "_" + method + ".json"));
                out << art.dump(2) << "\n";
            } else {
                diff_ready = false;
                log.push_back(stem + " " + method + ": " + row.status +
                              (report.diagnostics.empty() ? "" : " (" + report.diagnostics + ")"));
            }
            if (method == "s2oct") {
                status_s2oct = row.status;
                s_full = row.full;
                s_unlab = row.unlab;
                s_ok = has_tree;
            } else {
                status_base = row.status;
                b_full = row.full;
                b_unlab = row.unlab;
                b_ok = has_tree;
            }
            rows.push_back(std::move(row));
        }

        ResultRow diff = base_row;
        diff.method = "diff";
        diff.has_solver_fields = false;
        diff.status = status_s2oct + "/" + status_base;
        if (diff_ready && s_ok && b_ok) {
            const MetricDiff df = diff_metrics(s_full, b_full);
            const MetricDiff du = diff_metrics(s_unlab, b_unlab);
            diff.full = {df.ac, df.mcc, df.pr, df.re, true, true};
            diff.unlab = {du.ac, du.mcc, du.pr, du.re, true, true};
            diff.has_metrics = true;
        }
        rows.push_back(std::move(diff));
    } catch (const std::exception& e) {
        ResultRow row = base_row;
        row.method = "s2oct";
        row.status = "Error";
        rows.assign(2, row);
        rows[1].method = "baseline";
        ResultRow diff = base_row;
        diff.method = "diff";
        diff.has_solver_fields = false;
        diff.status = "Error/Error";
        rows.push_back(diff);
        log.push_back(base_row.instance + "_" + des.name + "_" + std::to_string(seed) +
                      ": job failed: " + e.what());
    }
    return rows;
}

// Full pipeline: prepare instances, run the job pool, write the CSV, the
// plots, and the log. Rows are emitted in deterministic job order.
inline RunSummary run_experiment(const ExperimentConfig& cfg) {
    namespace fs = std::filesystem;
    fs::create_directories(fs::path(cfg.output_dir) / "mps");
    fs::create_directories(fs::path(cfg.output_dir) / "trees");

    std::vector<harness_detail::PreparedInstance> prepared;
    for (const auto& inst : cfg.instances) {
        std::string scaling_report;
        BinaryTable table = harness_detail::prepare_table(inst, cfg.scale, &scaling_report);
        if (!scaling_report.empty()) {
            std::ofstream out(fs::path(cfg.output_dir) / ("scaling_" + inst.name + ".txt"));
            out << scaling_report;
        }
        prepared.push_back({inst, std::move(table), std::move(scaling_report)});
    }

    struct Job {
        std::size_t instance, design;
        int replicate;
    };
    std::vector<Job> jobs;
    for (std::size_t i = 0; i < prepared.size(); ++i)
        for (std::size_t d = 0; d < cfg.designs.size(); ++d)
            for (int r = 0; r < cfg.designs[d].replicates; ++r) jobs.push_back({i, d, r});

    std::vector<std::vector<ResultRow>> slots(jobs.size());
    std::vector<std::vector<std::string>> logs(jobs.size());
    std::atomic<std::size_t> cursor{0};
    const int workers = std::max(1, cfg.workers);
    auto worker = [&]() {
        while (true) {
            const std::size_t k = cursor.fetch_add(1);
            if (k >= jobs.size()) break;
            const Job& job = jobs[k];
            slots[k] = run_job(cfg, prepared[job.instance], cfg.designs[job.design], job.replicate,
                               logs[k]);
        }
    };
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    RunSummary summary;
    for (auto& slot : slots)
        for (auto& row : slot) summary.rows.push_back(std::move(row));
    for (auto& lg : logs)
        for (auto& line : lg) summary.log_lines.push_back(std::move(line));
    for (const auto& row : summary.rows)
        if (row.status == "Error" || row.status == "Error/Error") ++summary.error_rows;

    summary.results_csv = (fs::path(cfg.output_dir) / "results.csv").string();
    {
        std::ofstream out(summary.results_csv);
        if (!out) throw IoError("cannot write " + summary.results_csv);
        out << results_csv_header() << "\n";
        for (const auto& row : summary.rows) out << to_csv_line(row) << "\n";
    }
    make_plots(summary.rows, cfg.time_limit, cfg.output_dir);
    {
        std::ofstream out(fs::path(cfg.output_dir) / "run.log");
        for (const auto& line : summary.log_lines) out << line << "\n";
    }
    return summary;
}

struct ValidationReport {
    long checked = 0;
    long mismatches = 0;
    std::vector<std::string> lines;
};

// Replays every stored tree: re-routes all points, recomputes the metrics
// and the class-A routing count, and flags any disagreement with the
// artifact beyond 1e-6.
inline ValidationReport validate_artifacts(const std::string& output_dir) {
    namespace fs = std::filesystem;
    ValidationReport report;
    const fs::path dir = fs::path(output_dir) / "trees";
    if (!fs::exists(dir)) throw IoError("no trees directory under " + output_dir);

    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.path().extension() == ".json") files.push_back(entry.path());
    std::sort(files.begin(), files.end());

    for (const auto& file : files) {
        ++report.checked;
        std::ifstream in(file);
        nlohmann::json art;
        in >> art;

        InstanceSpec inst{art["instance"], art["path"], art["header"]};
        const std::string scale_name = art["scale"];
        const ScaleMode mode = scale_name == "midpoint" ? ScaleMode::Midpoint
                               : scale_name == "unit"   ? ScaleMode::Unit
                                                        : ScaleMode::None;
        const BinaryTable table = harness_detail::prepare_table(inst, mode);

        std::vector<std::size_t> labeled_idx = art["labeled_indices"];
        std::vector<LabeledPoint> labeled;
        std::vector<std::vector<double>> unlabeled;
        std::vector<ClassLabel> truth;
        std::size_t next = 0;
        for (std::size_t i = 0; i < table.rows.size(); ++i) {
            if (next < labeled_idx.size() && labeled_idx[next] == i) {
                labeled.push_back({table.rows[i].features, table.rows[i].label});
                ++next;
            } else {
                unlabeled.push_back(table.rows[i].features);
                truth.push_back(table.rows[i].label);
            }
        }
        const Dataset data = make_dataset(std::move(labeled), std::move(unlabeled));
        const TreeTopology topology(art["depth"]);
        TreeParams tree;
        tree.omega = art["omega"].get<std::vector<std::vector<double>>>();
        tree.gamma = art["gamma"].get<std::vector<double>>();

        MetricSet unlab;
        const MetricSet full = harness_detail::metrics_for(topology, tree, data, truth, unlab);
        const auto stored = art["metrics"];
        auto off = [](double a, double b) { return std::fabs(a - b) > 1e-6; };
        bool bad = off(full.ac, stored["ac_full"]) || off(full.mcc, stored["mcc_full"]) ||
                   off(full.pr, stored["pr_full"]) || off(full.re, stored["re_full"]) ||
                   off(unlab.ac, stored["ac_unlabeled"]) || off(unlab.mcc, stored["mcc_unlabeled"]) ||
                   off(unlab.pr, stored["pr_unlabeled"]) || off(unlab.re, stored["re_unlabeled"]);
        std::string note;
        if (art.contains("sigma_delta")) {
            const long routed = harness_detail::routed_a_count(topology, tree, data);
            const long stored_count = art["sigma_delta"];
            if (routed != stored_count) {
                bad = true;
                note = " sigma_delta " + std::to_string(stored_count) + " vs routed " +
                       std::to_string(routed);
            }
        }
        if (bad) {
            ++report.mismatches;
            report.lines.push_back("MISMATCH " + file.filename().string() + note);
        } else {
            report.lines.push_back("ok " + file.filename().string());
        }
    }
    return report;
}

}  // namespace s2oct
