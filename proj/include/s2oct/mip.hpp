#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "s2oct/simplex.hpp"

namespace s2oct::mip {

enum class Status { Optimal, Feasible, Infeasible, TimeLimit, Error };

struct Options {
    double time_limit_seconds = 7200.0;
    double int_tol = 1e-6;
    double gap_abs = 1e-9;
    double gap_rel = 1e-9;
    // How eagerly the incumbent heuristic runs: every node while hunting for
    // a first feasible point, then every heuristic_period nodes.
    int heuristic_period = 16;
};

// A proposal fixes a set of columns (normally all integer columns) to
// concrete values; the solver completes it with an LP.
using Proposal = std::vector<std::pair<int, double>>;
using HeuristicFn = std::function<std::vector<Proposal>(const std::vector<double>& lp_values)>;

struct Result {
    Status status = Status::Error;
    std::vector<double> x;
    double objective = std::numeric_limits<double>::infinity();
    double best_bound = -std::numeric_limits<double>::infinity();
    long nodes = 0;
    int lp_iterations = 0;
};

// Depth-first branch and bound over the LP relaxation. Branching variable is
// the most fractional integer column; the LP-preferred side is explored
// first. The heuristic callback may inject integer proposals at any node.
class BranchAndBound {
public:
    Result solve(const lp::Problem& problem, const std::vector<int>& integer_cols,
                 const Options& options, const HeuristicFn& heuristic = nullptr) {
        const auto started = std::chrono::steady_clock::now();
        const auto deadline =
            started + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                          std::chrono::duration<double>(options.time_limit_seconds));
        auto remaining = [&deadline]() {
            return std::chrono::duration<double>(deadline - std::chrono::steady_clock::now())
                .count();
        };

        Result result;
        struct Node {
            std::vector<double> lower, upper;
            double bound;
        };
        std::vector<Node> stack;
        stack.push_back({problem.col_lower, problem.col_upper,
                         -std::numeric_limits<double>::infinity()});

        bool any_infeasible_root = false;
        bool hit_limit = false;
        bool lp_failed = false;
        long nodes_since_heuristic = 0;

        while (!stack.empty()) {
            const double budget = remaining();
            if (budget <= 0.0) {
                hit_limit = true;
                break;
            }
            Node node = std::move(stack.back());
            stack.pop_back();
            if (node.bound >= result.objective - gap(options, result.objective)) continue;

            const lp::Solution rel = lp::solve(problem, node.lower, node.upper, budget);
            result.lp_iterations += rel.iterations;
            ++result.nodes;
            if (rel.status == lp::Status::Infeasible) {
                if (result.nodes == 1) any_infeasible_root = true;
                continue;
            }
            if (rel.status != lp::Status::Optimal) {
                // Out of time inside the LP, or a genuinely failed relaxation.
                if (rel.status == lp::Status::IterationLimit && remaining() <= 0.0) {
                    stack.push_back(std::move(node));  // keep its bound honest
                    hit_limit = true;
                } else {
                    lp_failed = true;
                }
                break;
            }
            if (rel.objective >= result.objective - gap(options, result.objective)) continue;

            const int frac = most_fractional(rel.x, integer_cols, options.int_tol);
            if (frac < 0) {
                // Integral relaxation: new incumbent.
                accept(result, rel.x, rel.objective);
                continue;
            }

            const bool hunt = !std::isfinite(result.objective);
            if (heuristic && (hunt || ++nodes_since_heuristic >= options.heuristic_period)) {
                nodes_since_heuristic = 0;
                for (const auto& proposal : heuristic(rel.x)) {
                    try_proposal(problem, node, proposal, remaining(), result);
                    if (result.objective <= rel.objective + gap(options, result.objective)) break;
                }
                if (result.objective <= rel.objective + gap(options, result.objective)) {
                    // Incumbent matches this subtree's bound; nothing better here.
                    continue;
                }
            }

            const double v = rel.x[frac];
            const double floor_v = std::floor(v);
            Node down = node, up = node;
            down.upper[frac] = floor_v;
            down.bound = rel.objective;
            up.lower[frac] = floor_v + 1.0;
            up.bound = rel.objective;
            // Push the preferred side last so it pops first.
            if (v - floor_v > 0.5) {
                stack.push_back(std::move(down));
                stack.push_back(std::move(up));
            } else {
                stack.push_back(std::move(up));
                stack.push_back(std::move(down));
            }
        }

        double open_bound = std::numeric_limits<double>::infinity();
        for (const auto& nd : stack) open_bound = std::min(open_bound, nd.bound);

        if (lp_failed && !std::isfinite(result.objective)) {
            result.status = Status::Error;
        } else if (std::isfinite(result.objective)) {
            const bool proven = stack.empty() && !hit_limit && !lp_failed;
            result.best_bound = proven ? result.objective : std::min(open_bound, result.objective);
            result.status = proven ? Status::Optimal : Status::Feasible;
        } else if (hit_limit) {
            result.status = Status::TimeLimit;
        } else if (any_infeasible_root || result.nodes > 0) {
            result.status = Status::Infeasible;
            result.best_bound = std::numeric_limits<double>::infinity();
        } else {
            result.status = Status::Error;
        }
        return result;
    }

private:
    static double gap(const Options& o, double incumbent) {
        if (!std::isfinite(incumbent)) return 0.0;
        return std::max(o.gap_abs, o.gap_rel * std::fabs(incumbent));
    }

    static int most_fractional(const std::vector<double>& x, const std::vector<int>& cols,
                               double tol) {
        int best = -1;
        double best_frac = tol;
        for (int c : cols) {
            const double f = std::fabs(x[c] - std::round(x[c]));
            if (f > best_frac) {
                best_frac = f;
                best = c;
            }
        }
        return best;
    }

    void accept(Result& result, const std::vector<double>& x, double objective) {
        if (objective < result.objective) {
            result.objective = objective;
            result.x = x;
        }
    }

    void try_proposal(const lp::Problem& problem, const auto& node, const Proposal& proposal,
                      double budget, Result& result) {
        if (budget <= 0.0) return;
        std::vector<double> lo = node.lower, hi = node.upper;
        for (const auto& [col, value] : proposal) {
            // Respect branching decisions already made on this node.
            if (value < lo[col] - 0.5 || value > hi[col] + 0.5) return;
            lo[col] = hi[col] = value;
        }
        const lp::Solution sol = lp::solve(problem, lo, hi, budget);
        result.lp_iterations += sol.iterations;
        if (sol.status == lp::Status::Optimal) accept(result, sol.x, sol.objective);
    }
};

inline Result solve(const lp::Problem& problem, const std::vector<int>& integer_cols,
                    const Options& options, const HeuristicFn& heuristic = nullptr) {
    return BranchAndBound().solve(problem, integer_cols, options, heuristic);
}

}  // namespace s2oct::mip
