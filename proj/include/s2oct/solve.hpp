#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "s2oct/common.hpp"
#include "s2oct/core.hpp"
#include "s2oct/mip.hpp"
#include "s2oct/model.hpp"
#include "s2oct/mps.hpp"
#include "s2oct/simplex.hpp"

namespace s2oct {

enum class SolveStatus { Optimal, Feasible, Infeasible, TimeLimit, Error };

inline const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "Optimal";
        case SolveStatus::Feasible: return "Feasible";
        case SolveStatus::Infeasible: return "Infeasible";
        case SolveStatus::TimeLimit: return "TimeLimit";
        case SolveStatus::Error: return "Error";
    }
    return "Error";
}

enum class Emphasis { Balanced, FeasibilityFirst };

struct SolverConfig {
    double time_limit_seconds = 7200.0;
    Emphasis emphasis = Emphasis::FeasibilityFirst;
    int threads = 1;
    double mip_gap = -1.0;  // negative: backend default
    std::string solver_id = "builtin";
    // External backend: command with {mps} and {sol} placeholders. When empty
    // the S2OCT_SOLVER_CMD environment variable is consulted, then the
    // built-in branch and bound takes over.
    std::string command_template;
    std::string mps_path;  // model file location; empty keeps it in a temp name
    std::string sol_path;
    bool polish = false;  // canonicalize the returned optimum via a margin LP
};

struct SolveReport {
    SolveStatus status = SolveStatus::Error;
    double runtime_seconds = 0.0;
    double objective = 0.0;
    double best_bound = 0.0;
    TreeParams tree;
    double xi = 0.0;
    long binaries = 0;
    long binaries_at_one = 0;
    long nodes = 0;
    bool emphasis_applied = false;
    std::vector<double> values;
    std::string diagnostics;
};

namespace detail {

// Routes a point through the tree given raw (w, g) values from an LP node;
// returns the leaf index.
inline int route_by_values(const ModelLayout& lay, const TreeTopology& topology,
                           const std::vector<double>& vals, const std::vector<double>& x) {
    int node = 1;
    while (!topology.is_leaf(node)) {
        double v = -vals[lay.g[node - 1]];
        for (std::size_t j = 0; j < x.size(); ++j) v += vals[lay.w[node - 1][j]] * x[j];
        node = v <= 0.0 ? 2 * node : 2 * node + 1;
    }
    return node;
}

// Turns a candidate tree into a full integer proposal: alpha picks the
// min-leaf-error leaf, z follows the hyperplane signs, delta follows z. A
// non-empty z_override dictates the root split per unlabeled point.
inline mip::Proposal proposal_from_tree(const ModelLayout& lay, const Dataset& data,
                                        const TreeTopology& topology, const TreeParams& tree,
                                        const std::vector<int>& z_override = {}) {
    mip::Proposal prop;
    for (std::size_t i = 0; i < data.n(); ++i) {
        double best = lp::kInf;
        int best_leaf = -1;
        for (const auto& [leaf, col] : lay.alpha[i]) {
            const double le = leaf_error(topology, tree, data.labeled[i].x, leaf);
            if (le < best) {
                best = le;
                best_leaf = leaf;
            }
        }
        for (const auto& [leaf, col] : lay.alpha[i])
            prop.emplace_back(col, leaf == best_leaf ? 1.0 : 0.0);
    }
    for (std::size_t u = 0; u < lay.z.size(); ++u) {
        std::vector<int> zu(lay.g.size());
        for (std::size_t b = 0; b < lay.g.size(); ++b)
            zu[b] = hyperplane_value(tree, static_cast<int>(b) + 1, data.unlabeled[u]) > 0.0 ? 1 : 0;
        if (!z_override.empty()) zu[0] = z_override[u];
        for (std::size_t b = 0; b < lay.g.size(); ++b)
            prop.emplace_back(lay.z[u][b], static_cast<double>(zu[b]));
        // delta = 1 exactly on the A-leaf the z-pattern routes to.
        int node = 1;
        while (!topology.is_leaf(node)) node = zu[node - 1] == 1 ? 2 * node + 1 : 2 * node;
        for (const auto& [leaf, col] : lay.delta[u])
            prop.emplace_back(col, leaf == node ? 1.0 : 0.0);
    }
    return prop;
}

inline TreeParams tree_from_values(const ModelLayout& lay, std::size_t p,
                                   const std::vector<double>& vals) {
    TreeParams tree;
    for (std::size_t b = 0; b < lay.g.size(); ++b) {
        std::vector<double> w(p);
        for (std::size_t j = 0; j < p; ++j) w[j] = vals[lay.w[b][j]];
        tree.omega.push_back(std::move(w));
        tree.gamma.push_back(vals[lay.g[b]]);
    }
    return tree;
}

// Class-centroid split replicated at every branch node: a relaxation-free
// pattern that is almost always margin-feasible and so seeds the search with
// an incumbent even when the relaxation values are uninformative.
inline TreeParams centroid_tree(const Dataset& data, const TreeTopology& topology) {
    std::vector<double> mean_a(data.p, 0.0), mean_b(data.p, 0.0);
    std::size_t na = 0, nb = 0;
    for (const auto& lp : data.labeled) {
        auto& mean = lp.label == ClassLabel::A ? mean_a : mean_b;
        (lp.label == ClassLabel::A ? na : nb)++;
        for (std::size_t j = 0; j < data.p; ++j) mean[j] += lp.x[j];
    }
    std::vector<double> w(data.p, 0.0);
    double gamma = 0.0;
    if (na > 0 && nb > 0) {
        double mid = 0.0;
        for (std::size_t j = 0; j < data.p; ++j) {
            w[j] = mean_b[j] / static_cast<double>(nb) - mean_a[j] / static_cast<double>(na);
            mid += w[j] * 0.5 *
                   (mean_b[j] / static_cast<double>(nb) + mean_a[j] / static_cast<double>(na));
        }
        gamma = mid;
    } else {
        w[0] = 1.0;  // single-class labels: any axis split works
    }
    TreeParams tree;
    for (std::size_t b = 0; b < topology.branch_nodes().size(); ++b) {
        tree.omega.push_back(w);
        tree.gamma.push_back(gamma);
    }
    return tree;
}

// Depth-1 refinement: sweep the root offset so that exactly lambda unlabeled
// points fall on the class-A (left) side, ordered by their projections.
inline std::vector<int> cardinality_sweep(const TreeParams& tree, const Dataset& data,
                                          long lambda) {
    const std::size_t m = data.m();
    std::vector<std::pair<double, std::size_t>> proj(m);
    for (std::size_t u = 0; u < m; ++u) {
        double v = 0.0;
        for (std::size_t j = 0; j < data.p; ++j) v += tree.omega[0][j] * data.unlabeled[u][j];
        proj[u] = {v, u};
    }
    std::stable_sort(proj.begin(), proj.end());
    std::vector<int> z(m, 1);
    for (long k = 0; k < lambda && k < static_cast<long>(m); ++k)
        z[proj[static_cast<std::size_t>(k)].second] = 0;
    return z;
}

inline mip::HeuristicFn make_heuristic(const MilpModel& model, const Dataset& data,
                                       const TreeTopology& topology, const ModelParams& params) {
    const ModelLayout lay = make_layout(model, data, topology);
    const TreeParams fallback = centroid_tree(data, topology);
    return [&data, &topology, params, lay, fallback](const std::vector<double>& vals) {
        std::vector<mip::Proposal> out;
        const TreeParams relaxed = tree_from_values(lay, data.p, vals);
        if (topology.depth() == 1 && !lay.z.empty()) {
            out.push_back(proposal_from_tree(lay, data, topology, relaxed,
                                             cardinality_sweep(relaxed, data, params.lambda)));
        }
        out.push_back(proposal_from_tree(lay, data, topology, relaxed));
        if (topology.depth() == 1 && !lay.z.empty()) {
            out.push_back(proposal_from_tree(lay, data, topology, fallback,
                                             cardinality_sweep(fallback, data, params.lambda)));
        }
        out.push_back(proposal_from_tree(lay, data, topology, fallback));
        return out;
    };
}

inline std::string replace_all(std::string s, const std::string& from, const std::string& to) {
    std::size_t pos = 0;
    while ((pos = s.find(from, pos)) != std::string::npos) {
        s.replace(pos, from.size(), to);
        pos += to.size();
    }
    return s;
}

// Native solution-file format: optional '# Objective value = <v>' comment,
// optional 'status <word>' line, then one '<variable> <value>' pair per line.
inline void parse_solution_file(const std::string& path, const MilpModel& model,
                                std::vector<double>& values, SolveStatus& status) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open solution file: " + path);
    values.assign(model.vars.size(), 0.0);
    status = SolveStatus::Feasible;
    std::string line;
    while (std::getline(in, line)) {
        auto tok = detail::tokenize(line);
        if (tok.empty() || tok[0][0] == '#') continue;
        if (tok[0] == "status" && tok.size() > 1) {
            std::string w = tok[1];
            std::transform(w.begin(), w.end(), w.begin(), ::tolower);
            if (w == "optimal") status = SolveStatus::Optimal;
            else if (w == "infeasible") status = SolveStatus::Infeasible;
            else if (w == "timelimit") status = SolveStatus::TimeLimit;
            else if (w == "error") status = SolveStatus::Error;
            else status = SolveStatus::Feasible;
            continue;
        }
        if (tok.size() >= 2 && model.has(tok[0])) values[model.col(tok[0])] = std::stod(tok[1]);
    }
}

}  // namespace detail

// Solves the IR. The external command template (config or S2OCT_SOLVER_CMD)
// takes precedence; otherwise the built-in branch and bound runs in process.
// Every returned solution is re-verified against the IR regardless of what
// the backend claimed.
inline SolveReport solve_milp(const MilpModel& model, const Dataset& data,
                              const TreeTopology& topology, const ModelParams& params,
                              const SolverConfig& config) {
    SolveReport report;
    report.binaries = static_cast<long>(model.binary_count());
    const auto started = std::chrono::steady_clock::now();
    auto elapsed = [&started]() {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    };

    std::string command = config.command_template;
    if (command.empty()) {
        if (const char* env = std::getenv("S2OCT_SOLVER_CMD")) command = env;
    }

    const std::string mps_path =
        config.mps_path.empty() ? model.name + ".mps" : config.mps_path;
    if (!config.mps_path.empty() || !command.empty()) write_model_file(model, mps_path);

    bool have_values = false;
    try {
        if (!command.empty()) {
            const std::string sol_path =
                config.sol_path.empty() ? mps_path + ".sol" : config.sol_path;
            std::string cmd = detail::replace_all(command, "{mps}", mps_path);
            cmd = detail::replace_all(cmd, "{sol}", sol_path);
            cmd = detail::replace_all(cmd, "{threads}", std::to_string(config.threads));
            cmd = detail::replace_all(cmd, "{limit}", std::to_string(config.time_limit_seconds));
            const int rc = std::system(cmd.c_str());
            if (rc != 0) {
                report.status = SolveStatus::Error;
                report.diagnostics = "external solver exited with code " + std::to_string(rc);
                report.runtime_seconds = elapsed();
                return report;
            }
            detail::parse_solution_file(sol_path, model, report.values, report.status);
            report.best_bound = recompute_objective(model, report.values);
            report.emphasis_applied = false;
            if (config.emphasis == Emphasis::FeasibilityFirst)
                report.diagnostics = "emphasis handled by external backend; recorded as unsupported";
            have_values = report.status == SolveStatus::Optimal ||
                          report.status == SolveStatus::Feasible;
        } else {
            mip::Options options;
            options.time_limit_seconds = config.time_limit_seconds;
            if (config.mip_gap >= 0.0) options.gap_abs = options.gap_rel = config.mip_gap;
            options.heuristic_period = config.emphasis == Emphasis::FeasibilityFirst ? 8 : 64;
            report.emphasis_applied = true;

            std::vector<int> integer_cols;
            for (std::size_t j = 0; j < model.vars.size(); ++j)
                if (model.vars[j].kind == VarKind::Binary) integer_cols.push_back(static_cast<int>(j));

            const mip::HeuristicFn heuristic =
                detail::make_heuristic(model, data, topology, params);
            const mip::Result res =
                mip::solve(model.to_lp(), integer_cols, options, heuristic);
            report.nodes = res.nodes;
            report.best_bound = res.best_bound;
            switch (res.status) {
                case mip::Status::Optimal: report.status = SolveStatus::Optimal; break;
                case mip::Status::Feasible: report.status = SolveStatus::Feasible; break;
                case mip::Status::Infeasible: report.status = SolveStatus::Infeasible; break;
                case mip::Status::TimeLimit: report.status = SolveStatus::TimeLimit; break;
                case mip::Status::Error: report.status = SolveStatus::Error; break;
            }
            if (res.status == mip::Status::Optimal || res.status == mip::Status::Feasible) {
                report.values = res.x;
                have_values = true;
            } else {
                report.diagnostics = "no incumbent";
            }
        }

        const double leftover = config.time_limit_seconds - elapsed();
        if (have_values && config.polish && leftover > 0.0) {
            const MilpModel polish = build_margin_polish(model, data, topology, report.values);
            const lp::Solution ps = lp::solve(polish.to_lp(), leftover);
            if (ps.status == lp::Status::Optimal) {
                // Adopt the polished continuous part together with the snapped
                // binaries it was solved against.
                for (std::size_t j = 0; j < model.vars.size(); ++j)
                    report.values[j] = model.vars[j].kind == VarKind::Binary
                                           ? std::round(report.values[j])
                                           : ps.x[j];
            }
        }

        if (have_values) {
            const ExtractedSolution ex = extract_solution(model, topology, data.p, report.values);
            report.tree = ex.tree;
            report.xi = ex.xi;
            report.objective = ex.objective;
            for (std::size_t j = 0; j < model.vars.size(); ++j)
                if (model.vars[j].kind == VarKind::Binary && report.values[j] > 0.5)
                    ++report.binaries_at_one;

            const double viol = max_violation(model, report.values);
            if (viol > 1e-6) {
                report.status = SolveStatus::Error;
                report.diagnostics = "solution violates the IR by " + std::to_string(viol);
            }
        }
    } catch (const std::exception& e) {
        report.status = SolveStatus::Error;
        report.diagnostics = e.what();
    }

    report.runtime_seconds = elapsed();
    return report;
}

}  // namespace s2oct
