#pragma once

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "s2oct/core.hpp"
#include "s2oct/model.hpp"
#include "s2oct/oracle.hpp"
#include "s2oct/preprocess.hpp"
#include "s2oct/rng.hpp"
#include "s2oct/solve.hpp"

namespace s2oct::checks {

// Random tiny instance: n in [2,4] labeled (both classes can be absent, the
// labels are uniform), m in [1,4] unlabeled, p = 2, points uniform in
// [0,10]^2, lambda uniform in [0,m].
struct TinyInstance {
    Dataset data;
    long lambda = 0;
};

inline TinyInstance make_tiny_instance(std::uint64_t seed) {
    Rng rng(seed);
    const std::size_t n = 2 + rng.below(3);
    const std::size_t m = 1 + rng.below(4);
    std::vector<LabeledPoint> labeled;
    for (std::size_t i = 0; i < n; ++i) {
        labeled.push_back({{rng.uniform01() * 10.0, rng.uniform01() * 10.0},
                           rng.bernoulli(0.5) ? ClassLabel::A : ClassLabel::B});
    }
    std::vector<std::vector<double>> unlabeled;
    for (std::size_t u = 0; u < m; ++u)
        unlabeled.push_back({rng.uniform01() * 10.0, rng.uniform01() * 10.0});
    TinyInstance inst;
    inst.lambda = static_cast<long>(rng.below(m + 1));
    inst.data = make_dataset(std::move(labeled), std::move(unlabeled));
    return inst;
}

struct TinyCheck {
    bool solved = false;           // solver reached Optimal
    bool objective_match = false;  // |solver - oracle| <= 1e-5
    bool bigm_robust = false;      // 10x M changes the optimum by <= 1e-5
    bool beta_link = false;        // sum(beta) per point == min-leaf error within 1e-6
    bool bounds_ok = false;        // LE <= B(s)+1e-6, |w.x-g| <= eta*s*sqrt(p)+1e-6
    bool cardinality_ok = false;   // |sum(delta)-lambda| <= xi+1e-6 and matches re-routing
    double solver_objective = 0.0;
    double oracle_objective = 0.0;
    std::string detail;

    bool all_good() const {
        return solved && objective_match && bigm_robust && beta_link && bounds_ok && cardinality_ok;
    }
};

// Solves one tiny instance with the full stack and checks it against the
// enumeration oracle plus the structural guarantees of the formulation.
inline TinyCheck run_tiny_check(std::uint64_t seed, double time_limit = 60.0) {
    TinyCheck out;
    const TinyInstance inst = make_tiny_instance(seed);
    const Dataset& data = inst.data;
    const TreeTopology topology(1);
    const double eta = compute_eta(data);
    const double s = default_s(data.total(), eta, data.p);
    const ModelParams params = make_model_params(data, 1, s, 1.0, inst.lambda);

    const MilpModel model = build_s2oct(data, topology, params);
    SolverConfig sc;
    sc.time_limit_seconds = time_limit;
    sc.polish = true;
    const SolveReport report = solve_milp(model, data, topology, params, sc);
    out.solver_objective = report.objective;
    if (report.status != SolveStatus::Optimal) {
        out.detail = std::string("solver status ") + to_string(report.status);
        return out;
    }
    out.solved = true;

    const OracleResult oracle = enumerate_optimum(data, topology, params);
    out.oracle_objective = oracle.objective;
    out.objective_match = std::fabs(report.objective - oracle.objective) <= 1e-5;

    // Big-M robustness: a tenfold M must not move a proven optimum.
    ModelParams loose = params;
    loose.big_m *= 10.0;
    const MilpModel model10 = build_s2oct(data, topology, loose);
    const SolveReport report10 = solve_milp(model10, data, topology, loose, sc);
    out.bigm_robust = report10.status == SolveStatus::Optimal &&
                      std::fabs(report10.objective - report.objective) <= 1e-5;

    // Per labeled point the beta block must equal the min-leaf leaf error
    // recomputed from the returned tree.
    const ModelLayout lay = make_layout(model, data, topology);
    out.beta_link = true;
    for (std::size_t i = 0; i < data.n(); ++i) {
        double beta_sum = 0.0;
        for (const auto& [leaf, col] : lay.beta[i]) beta_sum += report.values[col];
        const double want =
            min_leaf_error(topology, report.tree, data.labeled[i].x, data.labeled[i].label);
        if (std::fabs(beta_sum - want) > 1e-6) out.beta_link = false;
    }

    // Analytic margin and leaf-error bounds at the returned optimum.
    const double margin_cap = params.eta * params.s * std::sqrt(static_cast<double>(data.p));
    out.bounds_ok = true;
    for (std::size_t i = 0; i < data.total(); ++i)
        for (int b : topology.branch_nodes())
            if (std::fabs(hyperplane_value(report.tree, b, data.point(i))) > margin_cap + 1e-6)
                out.bounds_ok = false;
    for (std::size_t i = 0; i < data.n(); ++i)
        for (int t : topology.leaf_nodes())
            if (leaf_error(topology, report.tree, data.labeled[i].x, t) > params.bound_b + 1e-6)
                out.bounds_ok = false;

    // Cardinality: the delta block against xi, and against actual routing.
    long sigma = 0;
    for (const auto& du : lay.delta)
        for (const auto& [leaf, col] : du) sigma += static_cast<long>(std::llround(report.values[col]));
    long routed = 0;
    for (const auto& x : data.unlabeled)
        if (classify(topology, report.tree, x) == ClassLabel::A) ++routed;
    out.cardinality_ok =
        std::fabs(static_cast<double>(sigma - params.lambda)) <= report.xi + 1e-6 &&
        sigma == routed;

    if (!out.all_good()) {
        std::ostringstream os;
        os << "seed " << seed << ": obj " << out.solver_objective << " vs oracle "
           << out.oracle_objective << (out.objective_match ? "" : " MISMATCH")
           << (out.bigm_robust ? "" : " BIGM") << (out.beta_link ? "" : " BETA")
           << (out.bounds_ok ? "" : " BOUNDS") << (out.cardinality_ok ? "" : " CARD");
        out.detail = os.str();
    }
    return out;
}

// Two well-separated Gaussian clouds, class A centred at (-c, 0) and class B
// at (+c, 0); labels 1/2 so the table feeds the usual collapse step.
inline BinaryTable two_gaussians_table(std::size_t total, std::uint64_t seed,
                                       double centre = 2.0, double sigma = 0.45) {
    Rng rng(seed);
    BinaryTable table;
    table.dim = 2;
    for (std::size_t i = 0; i < total; ++i) {
        const bool is_a = i % 2 == 0;
        const double cx = is_a ? -centre : centre;
        table.rows.push_back({{rng.gaussian(cx, sigma), rng.gaussian(0.0, sigma)},
                              is_a ? ClassLabel::A : ClassLabel::B});
    }
    return table;
}

}  // namespace s2oct::checks
