#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "s2oct/model.hpp"
#include "s2oct/rng.hpp"

using namespace s2oct;

namespace {

Dataset four_by_six() {
    std::vector<LabeledPoint> labeled{{{0.0, 0.0}, ClassLabel::A},
                                      {{1.0, 0.0}, ClassLabel::A},
                                      {{5.0, 5.0}, ClassLabel::B},
                                      {{6.0, 5.0}, ClassLabel::B}};
    std::vector<std::vector<double>> unlabeled{{0.5, 0.5}, {1.5, 0.5}, {2.5, 2.5},
                                               {4.5, 4.5}, {5.5, 4.5}, {6.0, 4.0}};
    return make_dataset(std::move(labeled), std::move(unlabeled));
}

}  // namespace

TEST_CASE("eta is the maximum pairwise distance") {
    CHECK(compute_eta(make_dataset({{{0.0, 0.0}, ClassLabel::A}}, {{3.0, 4.0}})) ==
          doctest::Approx(5.0));
    CHECK(compute_eta(make_dataset({{{0.0, 0.0}, ClassLabel::A}, {{0.0, 0.0}, ClassLabel::B}}, {})) ==
          doctest::Approx(0.0));
    CHECK(compute_eta(make_dataset({{{0.0, 0.0}, ClassLabel::A},
                                    {{1.0, 0.0}, ClassLabel::B},
                                    {{0.0, 1.0}, ClassLabel::A}},
                                   {})) == doctest::Approx(std::sqrt(2.0)));
    CHECK_THROWS_AS(compute_eta(make_dataset({{{0.0}, ClassLabel::A}}, {})), ParameterError);
}

TEST_CASE("big-M and B(s) formulas") {
    CHECK(compute_big_m(5.0, 10.0, 4) == doctest::Approx(101.0));
    CHECK(compute_bound_b(2, 5.0, 10.0, 4) == doctest::Approx(202.0));
    CHECK(compute_big_m(0.0, 10.0, 4) == doctest::Approx(1.0));
    CHECK(compute_bound_b(3, 0.0, 10.0, 4) == doctest::Approx(3.0));
}

TEST_CASE("s rule follows the piecewise floors") {
    // eta*sqrt(p) = 100 -> 499/100 = 4.99.
    CHECK(default_s(500, 100.0 / std::sqrt(2.0), 2) == doctest::Approx(10.0));
    // eta*sqrt(p) = 10 -> 49.9 beats the floor of 20.
    CHECK(default_s(700, 10.0 / std::sqrt(2.0), 2) == doctest::Approx(49.9));
    CHECK(default_s(2000, 10.0 / std::sqrt(2.0), 2) == doctest::Approx(49.9));
    CHECK(default_s(2000, 100.0 / std::sqrt(2.0), 2) == doctest::Approx(40.0));
    CHECK(default_s(649, 100.0 / std::sqrt(2.0), 2) == doctest::Approx(10.0));
    CHECK(default_s(650, 100.0 / std::sqrt(2.0), 2) == doctest::Approx(20.0));
    CHECK_THROWS_AS(default_s(100, 0.0, 2), ParameterError);
}

TEST_CASE("depth rule") {
    CHECK(default_depth(1) == 2);
    CHECK(default_depth(999) == 2);
    CHECK(default_depth(1000) == 3);
    CHECK(default_depth(5000) == 3);
}

TEST_CASE("model params validate their invariants") {
    const Dataset d = four_by_six();
    CHECK_THROWS_AS(make_model_params(d, 2, -1.0, 1.0, 0), ParameterError);
    CHECK_THROWS_AS(make_model_params(d, 2, 10.0, 0.0, 0), ParameterError);
    CHECK_THROWS_AS(make_model_params(d, 2, 10.0, 1.0, 7), ParameterError);
    const ModelParams p = make_model_params(d, 2, 10.0, 1.0, 3);
    CHECK(p.big_m == doctest::Approx(p.eta * 10.0 * std::sqrt(2.0) + 1.0));
    CHECK(p.bound_b == doctest::Approx(2.0 * p.big_m));
}

TEST_CASE("variable counts match the P2 index sets") {
    const Dataset d = four_by_six();
    const TreeTopology t(2);
    const ModelParams params = make_model_params(d, 2, 10.0, 1.0, 3);
    const MilpModel model = build_s2oct(d, t, params);

    std::size_t continuous = 0, binary = 0;
    for (const auto& v : model.vars)
        (v.kind == VarKind::Binary ? binary : continuous)++;
    CHECK(continuous == 42);  // 6 w + 3 g + 24 y + 8 beta + 1 xi
    CHECK(binary == 38);      // 8 alpha + 18 z + 12 delta

    std::size_t bigm1 = 0;
    for (const auto& row : model.rows)
        if (row.name.rfind("bigm1_", 0) == 0) ++bigm1;
    CHECK(bigm1 == d.m() * t.branch_nodes().size());
}

TEST_CASE("baseline drops the unlabeled blocks") {
    const Dataset d = four_by_six();
    const TreeTopology t(2);
    const ModelParams params = make_model_params(d, 2, 10.0, 1.0, 3);
    const MilpModel model = build_labeled_only(d, t, params);

    std::size_t continuous = 0, binary = 0;
    for (const auto& v : model.vars)
        (v.kind == VarKind::Binary ? binary : continuous)++;
    CHECK(continuous == 41);
    CHECK(binary == 8);
    CHECK_FALSE(model.has("xi"));
    for (const auto& v : model.vars) {
        CHECK(v.name.rfind("z_", 0) != 0);
        CHECK(v.name.rfind("delta_", 0) != 0);
    }
}

TEST_CASE("baseline ignores lambda") {
    const Dataset d = four_by_six();
    const TreeTopology t(2);
    const ModelParams a = make_model_params(d, 2, 10.0, 1.0, 0);
    const ModelParams b = make_model_params(d, 2, 10.0, 1.0, 6);
    const MilpModel ma = build_labeled_only(d, t, a);
    const MilpModel mb = build_labeled_only(d, t, b);
    REQUIRE(ma.vars.size() == mb.vars.size());
    REQUIRE(ma.rows.size() == mb.rows.size());
    for (std::size_t r = 0; r < ma.rows.size(); ++r) {
        CHECK(ma.rows[r].rhs == mb.rows[r].rhs);
        CHECK(ma.rows[r].terms == mb.rows[r].terms);
    }
}

TEST_CASE("degenerate builds are rejected") {
    const Dataset coincident =
        make_dataset({{{1.0, 1.0}, ClassLabel::A}, {{1.0, 1.0}, ClassLabel::B}}, {});
    const TreeTopology t(1);
    ModelParams params;
    params.depth = 1;
    params.s = 10.0;
    params.c_penalty = 1.0;
    params.lambda = 0;
    params.eta = 0.0;
    params.big_m = 1.0;
    params.bound_b = 1.0;
    CHECK_THROWS_AS(build_s2oct(coincident, t, params), ParameterError);
    CHECK_THROWS_AS(build_labeled_only(coincident, t, params), ParameterError);

    const Dataset d = four_by_six();
    ModelParams bad = make_model_params(d, 1, 10.0, 1.0, 3);
    bad.lambda = 7;  // > m
    CHECK_THROWS_AS(build_s2oct(d, TreeTopology(1), bad), ParameterError);
}

TEST_CASE("empty unlabeled set degenerates cleanly") {
    const Dataset d =
        make_dataset({{{0.0}, ClassLabel::A}, {{4.0}, ClassLabel::B}}, {});
    const TreeTopology t(1);
    const ModelParams params = make_model_params(d, 1, 10.0, 1.0, 0);
    const MilpModel model = build_s2oct(d, t, params);
    for (const auto& v : model.vars) {
        CHECK(v.name.rfind("z_", 0) != 0);
        CHECK(v.name.rfind("delta_", 0) != 0);
    }
    // card rows collapse to xi >= 0 and 0 <= lambda.
    CHECK(model.has("xi"));
}

TEST_CASE("single labeled point with hand-made params") {
    // eta cannot be computed from one point; the params come in directly.
    const Dataset d = make_dataset({{{2.0, 1.0}, ClassLabel::A}}, {});
    ModelParams params;
    params.depth = 1;
    params.s = 10.0;
    params.c_penalty = 1.0;
    params.lambda = 0;
    params.eta = 1.0;
    params.big_m = compute_big_m(params.eta, params.s, 2);
    params.bound_b = compute_bound_b(1, params.eta, params.s, 2);
    const MilpModel model = build_s2oct(d, TreeTopology(1), params);
    for (const auto& v : model.vars) CHECK(v.name.rfind("z_", 0) != 0);
    // The cardinality rows degenerate to xi >= 0.
    for (const auto& row : model.rows) {
        if (row.name == "card_lo") {
            REQUIRE(row.terms.size() == 1);
            CHECK(row.terms[0].first == model.col("xi"));
            CHECK(row.rhs == 0.0);
        }
    }
}

TEST_CASE("identical inputs give an identical IR") {
    const Dataset d = four_by_six();
    const TreeTopology t(2);
    const ModelParams params = make_model_params(d, 2, 10.0, 1.0, 3);
    const MilpModel a = build_s2oct(d, t, params);
    const MilpModel b = build_s2oct(d, t, params);
    REQUIRE(a.vars.size() == b.vars.size());
    for (std::size_t j = 0; j < a.vars.size(); ++j) {
        CHECK(a.vars[j].name == b.vars[j].name);
        CHECK(a.vars[j].lower == b.vars[j].lower);
        CHECK(a.vars[j].upper == b.vars[j].upper);
    }
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t r = 0; r < a.rows.size(); ++r) {
        CHECK(a.rows[r].name == b.rows[r].name);
        CHECK(a.rows[r].terms == b.rows[r].terms);
        CHECK(a.rows[r].rhs == b.rows[r].rhs);
    }
    CHECK(a.objective == b.objective);
}

TEST_CASE("integrality verification") {
    const Dataset d = four_by_six();
    const TreeTopology t(1);
    const ModelParams params = make_model_params(d, 1, 10.0, 1.0, 3);
    const MilpModel model = build_s2oct(d, t, params);
    std::vector<double> values(model.vars.size(), 0.0);
    for (std::size_t j = 0; j < model.vars.size(); ++j)
        if (model.vars[j].kind == VarKind::Binary) values[j] = 1.0;
    CHECK_NOTHROW(verify_integrality(model, values));
    values[model.col("alpha_1_2")] = 0.4;
    CHECK_THROWS_AS(verify_integrality(model, values), SolutionIntegrityError);
    CHECK_THROWS_AS(extract_solution(model, t, d.p, values), SolutionIntegrityError);
}

TEST_CASE("extract_solution reads the tree back") {
    const Dataset d = four_by_six();
    const TreeTopology t(1);
    const ModelParams params = make_model_params(d, 1, 10.0, 1.0, 3);
    const MilpModel model = build_s2oct(d, t, params);
    std::vector<double> values(model.vars.size(), 0.0);
    values[model.col("w_1_1")] = 2.5;
    values[model.col("w_1_2")] = -1.0;
    values[model.col("g_1")] = 0.75;
    values[model.col("xi")] = 1.25;
    const ExtractedSolution ex = extract_solution(model, t, d.p, values);
    CHECK(ex.tree.omega[0] == std::vector<double>{2.5, -1.0});
    CHECK(ex.tree.gamma[0] == doctest::Approx(0.75));
    CHECK(ex.xi == doctest::Approx(1.25));
    CHECK(ex.objective == doctest::Approx(1.25));  // C * xi, betas all zero

    std::vector<double> short_values(3, 0.0);
    CHECK_THROWS_AS(extract_solution(model, t, d.p, short_values), ParameterError);
}
