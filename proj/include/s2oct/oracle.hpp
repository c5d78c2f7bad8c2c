#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "s2oct/common.hpp"
#include "s2oct/core.hpp"
#include "s2oct/model.hpp"
#include "s2oct/simplex.hpp"

namespace s2oct {

struct OracleResult {
    double objective = 0.0;
    double xi = 0.0;
    long sigma_delta = 0;              // unlabeled points routed to class-A leaves
    std::vector<int> labeled_leaves;   // chosen leaf per labeled point
    std::vector<unsigned> z_patterns;  // per unlabeled point, bit b-1 = right at branch b
};

namespace oracle_detail {

// LP for one branch node with all binaries fixed: minimize the branch errors
// of the labeled points routed through it, subject to the box on omega and
// the (de)activated routing constraints of the unlabeled points.
// Roles: 0 = not on path, 1 = right branch, 2 = left branch.
inline double branch_lp(const Dataset& data, const ModelParams& params,
                        const std::vector<unsigned char>& roles,
                        const std::vector<unsigned char>& zbits) {
    const int p = static_cast<int>(data.p);
    lp::Problem prob;
    prob.num_cols = p + 1;  // omega, gamma; y columns appended below
    for (int j = 0; j < p; ++j) {
        prob.col_lower.push_back(-params.s);
        prob.col_upper.push_back(params.s);
    }
    const double gb = params.gamma_bound ? *params.gamma_bound : lp::kInf;
    prob.col_lower.push_back(-gb);
    prob.col_upper.push_back(gb);
    prob.objective.assign(static_cast<std::size_t>(p) + 1, 0.0);

    const int gamma = p;
    for (std::size_t i = 0; i < roles.size(); ++i) {
        if (roles[i] == 0) continue;
        const int y = prob.num_cols++;
        prob.col_lower.push_back(0.0);
        prob.col_upper.push_back(lp::kInf);
        prob.objective.push_back(1.0);
        const auto& x = data.labeled[i].x;
        lp::Row row;
        row.sense = lp::Sense::GE;
        row.rhs = 1.0;
        row.terms.emplace_back(y, 1.0);
        if (roles[i] == 1) {
            for (int j = 0; j < p; ++j) row.terms.emplace_back(j, x[j]);
            row.terms.emplace_back(gamma, -1.0);
        } else {
            for (int j = 0; j < p; ++j) row.terms.emplace_back(j, -x[j]);
            row.terms.emplace_back(gamma, 1.0);
        }
        prob.rows.push_back(std::move(row));
    }
    for (std::size_t u = 0; u < zbits.size(); ++u) {
        const auto& x = data.unlabeled[u];
        lp::Row inner, outer;
        for (int j = 0; j < p; ++j) {
            inner.terms.emplace_back(j, x[j]);
            outer.terms.emplace_back(j, x[j]);
        }
        inner.terms.emplace_back(gamma, -1.0);
        outer.terms.emplace_back(gamma, -1.0);
        if (zbits[u]) {
            inner.sense = lp::Sense::GE;
            inner.rhs = 1.0;
            outer.sense = lp::Sense::LE;
            outer.rhs = params.big_m - 1.0;
        } else {
            inner.sense = lp::Sense::LE;
            inner.rhs = -1.0;
            outer.sense = lp::Sense::GE;
            outer.rhs = 1.0 - params.big_m;
        }
        prob.rows.push_back(std::move(inner));
        prob.rows.push_back(std::move(outer));
    }

    const lp::Solution sol = lp::solve(prob);
    if (sol.status == lp::Status::Infeasible) return lp::kInf;
    if (sol.status != lp::Status::Optimal)
        throw SolutionIntegrityError("oracle branch LP did not converge");
    return sol.objective;
}

inline int route_by_bits(const TreeTopology& topology, unsigned bits) {
    int node = 1;
    while (!topology.is_leaf(node)) node = (bits >> (node - 1)) & 1u ? 2 * node + 1 : 2 * node;
    return node;
}

}  // namespace oracle_detail

// Independent optimum by exhausting every binary assignment: one class leaf
// per labeled point, one routing bit per (unlabeled point, branch node). The
// continuous remainder splits into one small LP per branch node (cached by
// signature). Refuses instances with more than 2^20 assignments.
inline OracleResult enumerate_optimum(const Dataset& data, const TreeTopology& topology,
                                      const ModelParams& params) {
    const std::size_t n = data.n(), m = data.m();
    const std::size_t nb = topology.branch_nodes().size();

    double log_total = static_cast<double>(m * nb) * std::log2(2.0);
    for (std::size_t i = 0; i < n; ++i)
        log_total += std::log2(static_cast<double>(topology.leaves_for(data.labeled[i].label).size()));
    if (log_total > 20.0) throw SizeError("oracle refuses: more than 2^20 assignments");

    std::vector<const std::vector<int>*> choices(n);
    for (std::size_t i = 0; i < n; ++i) choices[i] = &topology.leaves_for(data.labeled[i].label);
    const unsigned z_radix = 1u << nb;

    std::vector<std::size_t> leaf_digit(n, 0);
    std::vector<unsigned> z_digit(m, 0);
    std::unordered_map<std::string, double> cache;

    OracleResult best;
    best.objective = lp::kInf;

    bool done = false;
    while (!done) {
        // Per-branch signatures, then the cached LP values.
        double continuous = 0.0;
        for (std::size_t b = 1; b <= nb && continuous < lp::kInf; ++b) {
            std::string key;
            key.reserve(n + m);
            std::vector<unsigned char> roles(n, 0), zbits(m, 0);
            for (std::size_t i = 0; i < n; ++i) {
                const int leaf = (*choices[i])[leaf_digit[i]];
                for (int rb : topology.right_path(leaf))
                    if (rb == static_cast<int>(b)) roles[i] = 1;
                for (int lb : topology.left_path(leaf))
                    if (lb == static_cast<int>(b)) roles[i] = 2;
                key.push_back(static_cast<char>('0' + roles[i]));
            }
            for (std::size_t u = 0; u < m; ++u) {
                zbits[u] = static_cast<unsigned char>((z_digit[u] >> (b - 1)) & 1u);
                key.push_back(static_cast<char>('0' + zbits[u]));
            }
            auto it = cache.find(key);
            if (it == cache.end())
                it = cache.emplace(key, oracle_detail::branch_lp(data, params, roles, zbits)).first;
            continuous += it->second;
        }

        if (continuous < lp::kInf) {
            long count = 0;
            for (std::size_t u = 0; u < m; ++u)
                if (oracle_detail::route_by_bits(topology, z_digit[u]) % 2 == 0) ++count;
            const double xi = std::fabs(static_cast<double>(count - params.lambda));
            const double total = continuous + params.c_penalty * xi;
            if (total < best.objective - 1e-12) {
                best.objective = total;
                best.xi = xi;
                best.sigma_delta = count;
                best.labeled_leaves.assign(n, 0);
                for (std::size_t i = 0; i < n; ++i)
                    best.labeled_leaves[i] = (*choices[i])[leaf_digit[i]];
                best.z_patterns = z_digit;
            }
        }

        // Mixed-radix odometer: labeled leaf choices first, then z patterns.
        done = true;
        for (std::size_t i = 0; i < n; ++i) {
            if (++leaf_digit[i] < choices[i]->size()) {
                done = false;
                break;
            }
            leaf_digit[i] = 0;
        }
        if (done) {
            for (std::size_t u = 0; u < m; ++u) {
                if (++z_digit[u] < z_radix) {
                    done = false;
                    break;
                }
                z_digit[u] = 0;
            }
        }
    }

    if (best.objective >= lp::kInf)
        throw SolutionIntegrityError("oracle found no feasible assignment");
    return best;
}

}  // namespace s2oct
