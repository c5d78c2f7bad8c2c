#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "s2oct/common.hpp"
#include "s2oct/core.hpp"
#include "s2oct/simplex.hpp"

namespace s2oct {

// Every scalar of the MILP: depth D, box bound s, penalty C, cardinality
// target lambda, max pairwise distance eta, and the derived big-M and leaf
// error bound B(s).
struct ModelParams {
    int depth = 1;
    double s = 10.0;
    double c_penalty = 1.0;
    long lambda = 0;
    double eta = 0.0;
    double big_m = 0.0;    // eta * s * sqrt(p) + 1
    double bound_b = 0.0;  // D * (eta * s * sqrt(p) + 1)
    // Redundant numerical-safety box for gamma; nullopt leaves gamma free.
    std::optional<double> gamma_bound;
};

inline double compute_eta(const Dataset& data) {
    const std::size_t total = data.total();
    if (total < 2) throw ParameterError("eta needs at least two points");
    double best = 0.0;
    for (std::size_t i = 0; i + 1 < total; ++i) {
        const auto& a = data.point(i);
        for (std::size_t k = i + 1; k < total; ++k) {
            const auto& b = data.point(k);
            double d2 = 0.0;
            for (std::size_t j = 0; j < data.p; ++j) {
                const double d = a[j] - b[j];
                d2 += d * d;
            }
            best = std::max(best, d2);
        }
    }
    return std::sqrt(best);
}

inline double compute_big_m(double eta, double s, std::size_t p) {
    if (s <= 0.0) throw ParameterError("s must be positive");
    if (eta < 0.0 || p < 1) throw ParameterError("bad eta or dimension");
    return eta * s * std::sqrt(static_cast<double>(p)) + 1.0;
}

inline double compute_bound_b(int depth, double eta, double s, std::size_t p) {
    return static_cast<double>(depth) * compute_big_m(eta, s, p);
}

// Box-bound rule calibrated to keep M at least 500.
inline double default_s(std::size_t total, double eta, std::size_t p) {
    if (eta <= 0.0) throw ParameterError("default_s requires eta > 0");
    const double base = 499.0 / (eta * std::sqrt(static_cast<double>(p)));
    double floor_s = 10.0;
    if (total >= 650) floor_s = 20.0;
    if (total >= 1500) floor_s = 40.0;
    return std::max(floor_s, base);
}

inline int default_depth(std::size_t total) { return total < 1000 ? 2 : 3; }

inline ModelParams make_model_params(const Dataset& data, int depth, double s, double c_penalty,
                                     long lambda, bool clamp_gamma = true) {
    if (s <= 0.0) throw ParameterError("s must be positive");
    if (c_penalty <= 0.0) throw ParameterError("C must be positive");
    if (lambda < 0 || lambda > static_cast<long>(data.m()))
        throw ParameterError("lambda must lie in [0, m]");
    ModelParams params;
    params.depth = depth;
    params.s = s;
    params.c_penalty = c_penalty;
    params.lambda = lambda;
    params.eta = compute_eta(data);
    params.big_m = compute_big_m(params.eta, s, data.p);
    params.bound_b = compute_bound_b(depth, params.eta, s, data.p);
    if (clamp_gamma) {
        double max_abs = 0.0;
        for (std::size_t i = 0; i < data.total(); ++i)
            for (double v : data.point(i)) max_abs = std::max(max_abs, std::fabs(v));
        params.gamma_bound = params.eta * s * std::sqrt(static_cast<double>(data.p)) +
                             max_abs * s * static_cast<double>(data.p);
    }
    return params;
}

enum class VarKind { Continuous, Binary };

struct Variable {
    std::string name;
    VarKind kind = VarKind::Continuous;
    double lower = 0.0;
    double upper = lp::kInf;
};

struct Constraint {
    std::string name;
    std::vector<std::pair<int, double>> terms;
    lp::Sense sense = lp::Sense::LE;
    double rhs = 0.0;
};

// Solver-agnostic MILP intermediate representation. Variable names are
// unique and the whole structure is deterministic given its inputs.
struct MilpModel {
    std::string name = "s2oct";
    std::vector<Variable> vars;
    std::vector<Constraint> rows;
    std::vector<std::pair<int, double>> objective;  // minimize
    std::unordered_map<std::string, int> index;

    int add_var(std::string var_name, VarKind kind, double lower, double upper) {
        if (index.count(var_name)) throw ParameterError("duplicate variable: " + var_name);
        const int col = static_cast<int>(vars.size());
        index.emplace(var_name, col);
        vars.push_back({std::move(var_name), kind, lower, upper});
        return col;
    }

    void add_row(std::string row_name, std::vector<std::pair<int, double>> terms, lp::Sense sense,
                 double rhs) {
        for (const auto& [col, coeff] : terms) {
            (void)coeff;
            if (col < 0 || col >= static_cast<int>(vars.size()))
                throw ParameterError("constraint references undeclared variable in " + row_name);
        }
        rows.push_back({std::move(row_name), std::move(terms), sense, rhs});
    }

    int col(const std::string& var_name) const {
        const auto it = index.find(var_name);
        if (it == index.end()) throw ParameterError("unknown variable: " + var_name);
        return it->second;
    }

    bool has(const std::string& var_name) const { return index.count(var_name) > 0; }

    std::size_t binary_count() const {
        std::size_t k = 0;
        for (const auto& v : vars)
            if (v.kind == VarKind::Binary) ++k;
        return k;
    }

    // LP relaxation: binaries keep their [0,1] bounds, integrality dropped.
    lp::Problem to_lp() const {
        lp::Problem p;
        p.num_cols = static_cast<int>(vars.size());
        p.col_lower.reserve(vars.size());
        p.col_upper.reserve(vars.size());
        p.objective.assign(vars.size(), 0.0);
        for (const auto& v : vars) {
            p.col_lower.push_back(v.lower);
            p.col_upper.push_back(v.upper);
        }
        for (const auto& [col, coeff] : objective) p.objective[col] += coeff;
        p.rows.reserve(rows.size());
        for (const auto& r : rows) p.rows.push_back({r.terms, r.sense, r.rhs});
        return p;
    }
};

namespace detail {

inline std::string nm(const char* stem, int a) {
    return std::string(stem) + "_" + std::to_string(a);
}
inline std::string nm(const char* stem, int a, int b) {
    return std::string(stem) + "_" + std::to_string(a) + "_" + std::to_string(b);
}
inline std::string nm(const char* stem, int a, int b, int c) {
    return nm(stem, a, b) + "_" + std::to_string(c);
}

// Hyperplanes, branch errors, and the min-leaf-error linearization shared by
// the S2OCT model and the labeled-only baseline.
inline void add_labeled_part(MilpModel& model, const Dataset& data, const TreeTopology& topology,
                             const ModelParams& params) {
    const int n = static_cast<int>(data.n());
    const int p = static_cast<int>(data.p);

    for (int b : topology.branch_nodes())
        for (int j = 1; j <= p; ++j)
            model.add_var(nm("w", b, j), VarKind::Continuous, -params.s, params.s);
    const double glo = params.gamma_bound ? -*params.gamma_bound : -lp::kInf;
    const double ghi = params.gamma_bound ? *params.gamma_bound : lp::kInf;
    for (int b : topology.branch_nodes())
        model.add_var(nm("g", b), VarKind::Continuous, glo, ghi);
    for (int b : topology.branch_nodes())
        for (int i = 1; i <= n; ++i)
            model.add_var(nm("yR", b, i), VarKind::Continuous, 0.0, lp::kInf);
    for (int b : topology.branch_nodes())
        for (int i = 1; i <= n; ++i)
            model.add_var(nm("yL", b, i), VarKind::Continuous, 0.0, lp::kInf);
    for (int i = 1; i <= n; ++i)
        for (int t : topology.leaves_for(data.labeled[i - 1].label))
            model.add_var(nm("beta", i, t), VarKind::Continuous, 0.0, params.bound_b);
}

inline std::vector<std::pair<int, double>> hyperplane_terms(const MilpModel& model, int branch,
                                                            const std::vector<double>& x) {
    // w^b . x - g_b as linear terms.
    std::vector<std::pair<int, double>> terms;
    terms.reserve(x.size() + 1);
    for (std::size_t j = 0; j < x.size(); ++j)
        terms.emplace_back(model.col(nm("w", branch, static_cast<int>(j) + 1)), x[j]);
    terms.emplace_back(model.col(nm("g", branch)), -1.0);
    return terms;
}

// LE(x^i, t) as (column, coefficient) pairs over the y variables.
inline std::vector<std::pair<int, double>> leaf_error_terms(const MilpModel& model,
                                                            const TreeTopology& topology, int i,
                                                            int t) {
    std::vector<std::pair<int, double>> terms;
    for (int b : topology.right_path(t)) terms.emplace_back(model.col(nm("yR", b, i)), 1.0);
    for (int b : topology.left_path(t)) terms.emplace_back(model.col(nm("yL", b, i)), 1.0);
    return terms;
}

inline void add_labeled_rows(MilpModel& model, const Dataset& data, const TreeTopology& topology,
                             const ModelParams& params) {
    const int n = static_cast<int>(data.n());

    // Branch-error lower bounds: yR >= -w.x + g + 1 and yL >= w.x - g + 1.
    for (int b : topology.branch_nodes()) {
        for (int i = 1; i <= n; ++i) {
            const auto& x = data.labeled[i - 1].x;
            auto terms = hyperplane_terms(model, b, x);
            terms.emplace_back(model.col(nm("yR", b, i)), 1.0);
            model.add_row(nm("c1", b, i), std::move(terms), lp::Sense::GE, 1.0);
        }
    }
    for (int b : topology.branch_nodes()) {
        for (int i = 1; i <= n; ++i) {
            const auto& x = data.labeled[i - 1].x;
            auto terms = hyperplane_terms(model, b, x);
            for (auto& [col, coeff] : terms) coeff = -coeff;
            terms.emplace_back(model.col(nm("yL", b, i)), 1.0);
            model.add_row(nm("c2", b, i), std::move(terms), lp::Sense::GE, 1.0);
        }
    }

    // One leaf choice per labeled point, and the McCormick link
    // beta = alpha * LE on the class leaf set.
    for (int i = 1; i <= n; ++i) {
        const auto& leaves = topology.leaves_for(data.labeled[i - 1].label);
        std::vector<std::pair<int, double>> sum;
        for (int t : leaves) sum.emplace_back(model.col(nm("alpha", i, t)), 1.0);
        model.add_row(nm("asum", i), std::move(sum), lp::Sense::EQ, 1.0);
    }
    for (int i = 1; i <= n; ++i) {
        for (int t : topology.leaves_for(data.labeled[i - 1].label)) {
            const int beta = model.col(nm("beta", i, t));
            const int alpha = model.col(nm("alpha", i, t));
            auto le = leaf_error_terms(model, topology, i, t);

            auto bb1 = le;
            for (auto& [col, coeff] : bb1) coeff = -coeff;
            bb1.emplace_back(beta, 1.0);
            model.add_row(nm("bb1", i, t), std::move(bb1), lp::Sense::LE, 0.0);

            auto bb2 = le;
            for (auto& [col, coeff] : bb2) coeff = -coeff;
            bb2.emplace_back(beta, 1.0);
            bb2.emplace_back(alpha, -params.bound_b);
            model.add_row(nm("bb2", i, t), std::move(bb2), lp::Sense::GE, -params.bound_b);

            model.add_row(nm("bb3", i, t), {{beta, 1.0}, {alpha, -params.bound_b}}, lp::Sense::LE,
                          0.0);
        }
    }
}

}  // namespace detail

// Problem P2: branch errors and leaf-choice linearization for the labeled
// points, big-M routing indicators and leaf-membership binaries for the
// unlabeled points, and the soft cardinality constraint on the class-A count.
inline MilpModel build_s2oct(const Dataset& data, const TreeTopology& topology,
                             const ModelParams& params) {
    if (params.eta <= 0.0) throw ParameterError("build_s2oct: eta must be positive");
    if (params.lambda < 0 || params.lambda > static_cast<long>(data.m()))
        throw ParameterError("build_s2oct: lambda outside [0, m] is infeasible by construction");

    MilpModel model;
    model.name = "s2oct";
    const int n = static_cast<int>(data.n());
    const int m = static_cast<int>(data.m());

    detail::add_labeled_part(model, data, topology, params);
    const int xi = model.add_var("xi", VarKind::Continuous, 0.0, lp::kInf);

    for (int i = 1; i <= n; ++i)
        for (int t : topology.leaves_for(data.labeled[i - 1].label))
            model.add_var(detail::nm("alpha", i, t), VarKind::Binary, 0.0, 1.0);
    for (int u = 0; u < m; ++u)
        for (int b : topology.branch_nodes())
            model.add_var(detail::nm("z", n + 1 + u, b), VarKind::Binary, 0.0, 1.0);
    for (int u = 0; u < m; ++u)
        for (int t : topology.leaves_a())
            model.add_var(detail::nm("delta", n + 1 + u, t), VarKind::Binary, 0.0, 1.0);

    detail::add_labeled_rows(model, data, topology, params);

    // Big-M routing: w.x - g <= z*M - 1 and w.x - g >= -(1-z)*M + 1.
    for (int u = 0; u < m; ++u) {
        const int gi = n + 1 + u;
        const auto& x = data.unlabeled[u];
        for (int b : topology.branch_nodes()) {
            const int z = model.col(detail::nm("z", gi, b));
            auto up = detail::hyperplane_terms(model, b, x);
            up.emplace_back(z, -params.big_m);
            model.add_row(detail::nm("bigm1", gi, b), std::move(up), lp::Sense::LE, -1.0);
            auto lo = detail::hyperplane_terms(model, b, x);
            lo.emplace_back(z, -params.big_m);
            model.add_row(detail::nm("bigm2", gi, b), std::move(lo), lp::Sense::GE,
                          1.0 - params.big_m);
        }
    }

    // delta is the AND of its path indicators.
    for (int u = 0; u < m; ++u) {
        const int gi = n + 1 + u;
        for (int t : topology.leaves_a()) {
            const int d = model.col(detail::nm("delta", gi, t));
            for (int b : topology.right_path(t))
                model.add_row(detail::nm("dR", gi, t, b),
                              {{d, 1.0}, {model.col(detail::nm("z", gi, b)), -1.0}}, lp::Sense::LE,
                              0.0);
            for (int b : topology.left_path(t))
                model.add_row(detail::nm("dL", gi, t, b),
                              {{d, 1.0}, {model.col(detail::nm("z", gi, b)), 1.0}}, lp::Sense::LE,
                              1.0);
            std::vector<std::pair<int, double>> sum{{d, 1.0}};
            for (int b : topology.right_path(t))
                sum.emplace_back(model.col(detail::nm("z", gi, b)), -1.0);
            for (int b : topology.left_path(t))
                sum.emplace_back(model.col(detail::nm("z", gi, b)), 1.0);
            const double rhs = static_cast<double>(topology.left_path(t).size()) -
                               static_cast<double>(params.depth - 1);
            model.add_row(detail::nm("dsum", gi, t), std::move(sum), lp::Sense::GE, rhs);
        }
    }

    // lambda - xi <= sum(delta) <= lambda + xi.
    std::vector<std::pair<int, double>> lo_terms, hi_terms;
    for (int u = 0; u < m; ++u)
        for (int t : topology.leaves_a())
            lo_terms.emplace_back(model.col(detail::nm("delta", n + 1 + u, t)), 1.0);
    hi_terms = lo_terms;
    lo_terms.emplace_back(xi, 1.0);
    hi_terms.emplace_back(xi, -1.0);
    model.add_row("card_lo", std::move(lo_terms), lp::Sense::GE, static_cast<double>(params.lambda));
    model.add_row("card_hi", std::move(hi_terms), lp::Sense::LE, static_cast<double>(params.lambda));

    for (int i = 1; i <= n; ++i)
        for (int t : topology.leaves_for(data.labeled[i - 1].label))
            model.objective.emplace_back(model.col(detail::nm("beta", i, t)), 1.0);
    model.objective.emplace_back(xi, params.c_penalty);
    return model;
}

// The labeled-only baseline: the S2OCT model with every unlabeled block
// removed and the plain sum of betas as objective. lambda is ignored.
inline MilpModel build_labeled_only(const Dataset& data, const TreeTopology& topology,
                                    const ModelParams& params) {
    if (params.eta <= 0.0) throw ParameterError("build_labeled_only: eta must be positive");
    MilpModel model;
    model.name = "s2oct_baseline";
    const int n = static_cast<int>(data.n());

    detail::add_labeled_part(model, data, topology, params);
    for (int i = 1; i <= n; ++i)
        for (int t : topology.leaves_for(data.labeled[i - 1].label))
            model.add_var(detail::nm("alpha", i, t), VarKind::Binary, 0.0, 1.0);

    detail::add_labeled_rows(model, data, topology, params);

    for (int i = 1; i <= n; ++i)
        for (int t : topology.leaves_for(data.labeled[i - 1].label))
            model.objective.emplace_back(model.col(detail::nm("beta", i, t)), 1.0);
    return model;
}

inline double recompute_objective(const MilpModel& model, const std::vector<double>& values) {
    double v = 0.0;
    for (const auto& [col, coeff] : model.objective) v += coeff * values[col];
    return v;
}

// Largest violation over all rows and variable bounds.
inline double max_violation(const MilpModel& model, const std::vector<double>& values) {
    double worst = 0.0;
    for (std::size_t j = 0; j < model.vars.size(); ++j) {
        worst = std::max(worst, model.vars[j].lower - values[j]);
        worst = std::max(worst, values[j] - model.vars[j].upper);
    }
    for (const auto& row : model.rows) {
        double act = 0.0;
        for (const auto& [col, coeff] : row.terms) act += coeff * values[col];
        switch (row.sense) {
            case lp::Sense::LE: worst = std::max(worst, act - row.rhs); break;
            case lp::Sense::GE: worst = std::max(worst, row.rhs - act); break;
            case lp::Sense::EQ: worst = std::max(worst, std::fabs(act - row.rhs)); break;
        }
    }
    return worst;
}

inline void verify_integrality(const MilpModel& model, const std::vector<double>& values,
                               double tol = 1e-6) {
    for (std::size_t j = 0; j < model.vars.size(); ++j) {
        if (model.vars[j].kind != VarKind::Binary) continue;
        const double v = values[j];
        if (std::fabs(v - std::round(v)) > tol)
            throw SolutionIntegrityError("binary variable " + model.vars[j].name +
                                         " is non-integral: " + std::to_string(v));
    }
}

struct ExtractedSolution {
    TreeParams tree;
    double xi = 0.0;
    double objective = 0.0;
};

// Reads the tree parameters and xi out of a raw value vector, verifying
// binary integrality on the way.
inline ExtractedSolution extract_solution(const MilpModel& model, const TreeTopology& topology,
                                          std::size_t p, const std::vector<double>& values,
                                          double tol = 1e-6) {
    if (values.size() < model.vars.size())
        throw ParameterError("extract_solution: value vector does not cover all variables");
    verify_integrality(model, values, tol);
    ExtractedSolution out;
    for (int b : topology.branch_nodes()) {
        std::vector<double> w(p);
        for (std::size_t j = 0; j < p; ++j)
            w[j] = values[model.col(detail::nm("w", b, static_cast<int>(j) + 1))];
        out.tree.omega.push_back(std::move(w));
        out.tree.gamma.push_back(values[model.col(detail::nm("g", b))]);
    }
    out.xi = model.has("xi") ? values[model.col("xi")] : 0.0;
    out.objective = recompute_objective(model, values);
    return out;
}

// Column lookup tables for the heuristic and polish passes.
struct ModelLayout {
    std::vector<std::vector<int>> w;                        // [branch-1][j-1]
    std::vector<int> g;                                     // [branch-1]
    std::vector<std::vector<std::pair<int, int>>> alpha;    // per labeled: (leaf, col)
    std::vector<std::vector<std::pair<int, int>>> beta;     // per labeled: (leaf, col)
    std::vector<std::vector<int>> z;                        // [u][branch-1], empty if baseline
    std::vector<std::vector<std::pair<int, int>>> delta;    // per unlabeled: (leaf, col)
    int xi = -1;
};

inline ModelLayout make_layout(const MilpModel& model, const Dataset& data,
                               const TreeTopology& topology) {
    ModelLayout lay;
    const int n = static_cast<int>(data.n());
    const int m = static_cast<int>(data.m());
    const int p = static_cast<int>(data.p);
    for (int b : topology.branch_nodes()) {
        std::vector<int> wb(p);
        for (int j = 1; j <= p; ++j) wb[j - 1] = model.col(detail::nm("w", b, j));
        lay.w.push_back(std::move(wb));
        lay.g.push_back(model.col(detail::nm("g", b)));
    }
    for (int i = 1; i <= n; ++i) {
        std::vector<std::pair<int, int>> acols, bcols;
        for (int t : topology.leaves_for(data.labeled[i - 1].label)) {
            acols.emplace_back(t, model.col(detail::nm("alpha", i, t)));
            bcols.emplace_back(t, model.col(detail::nm("beta", i, t)));
        }
        lay.alpha.push_back(std::move(acols));
        lay.beta.push_back(std::move(bcols));
    }
    const bool has_unlabeled = model.has("xi");
    if (has_unlabeled) {
        lay.xi = model.col("xi");
        for (int u = 0; u < m; ++u) {
            std::vector<int> zu;
            for (int b : topology.branch_nodes()) zu.push_back(model.col(detail::nm("z", n + 1 + u, b)));
            lay.z.push_back(std::move(zu));
            std::vector<std::pair<int, int>> du;
            for (int t : topology.leaves_a())
                du.emplace_back(t, model.col(detail::nm("delta", n + 1 + u, t)));
            lay.delta.push_back(std::move(du));
        }
    }
    return lay;
}

// Canonicalizes an incumbent: binaries pinned, objective pinned, and the sum
// of |w.x - g| over all points and branch nodes minimized. Keeps the returned
// optimum inside the analytic margin bound instead of at an arbitrary vertex
// of the optimal face.
inline MilpModel build_margin_polish(const MilpModel& base, const Dataset& data,
                                     const TreeTopology& topology,
                                     const std::vector<double>& incumbent) {
    MilpModel polish;
    polish.name = base.name + "_polish";
    for (std::size_t j = 0; j < base.vars.size(); ++j) {
        const auto& v = base.vars[j];
        if (v.kind == VarKind::Binary) {
            const double fixed = std::round(incumbent[j]);
            polish.add_var(v.name, VarKind::Continuous, fixed, fixed);
        } else {
            polish.add_var(v.name, v.kind, v.lower, v.upper);
        }
    }
    for (const auto& r : base.rows) polish.add_row(r.name, r.terms, r.sense, r.rhs);

    const double obj = recompute_objective(base, incumbent);
    std::vector<std::pair<int, double>> pin;
    for (const auto& [col, coeff] : base.objective) pin.emplace_back(col, coeff);
    polish.add_row("obj_pin", std::move(pin), lp::Sense::LE, obj + 1e-9);

    const int total = static_cast<int>(data.total());
    for (int i = 1; i <= total; ++i)
        for (int b : topology.branch_nodes())
            polish.add_var(detail::nm("u", i, b), VarKind::Continuous, 0.0, lp::kInf);
    for (int i = 1; i <= total; ++i) {
        const auto& x = data.point(static_cast<std::size_t>(i - 1));
        for (int b : topology.branch_nodes()) {
            const int u = polish.col(detail::nm("u", i, b));
            auto above = detail::hyperplane_terms(polish, b, x);
            for (auto& [col, coeff] : above) coeff = -coeff;
            above.emplace_back(u, 1.0);
            polish.add_row(detail::nm("mpos", i, b), std::move(above), lp::Sense::GE, 0.0);
            auto below = detail::hyperplane_terms(polish, b, x);
            below.emplace_back(u, 1.0);
            polish.add_row(detail::nm("mneg", i, b), std::move(below), lp::Sense::GE, 0.0);
            polish.objective.emplace_back(u, 1.0);
        }
    }
    return polish;
}

}  // namespace s2oct
