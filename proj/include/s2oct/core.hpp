#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include "s2oct/common.hpp"

namespace s2oct {

struct LabeledPoint {
    std::vector<double> x;
    ClassLabel label;
};

// Labeled + unlabeled points, all of dimension p. Immutable after
// construction; make_dataset validates the invariants.
struct Dataset {
    std::vector<LabeledPoint> labeled;
    std::vector<std::vector<double>> unlabeled;
    std::size_t p = 0;

    std::size_t n() const { return labeled.size(); }
    std::size_t m() const { return unlabeled.size(); }
    std::size_t total() const { return labeled.size() + unlabeled.size(); }

    // Point i in [0, N): labeled first, then unlabeled.
    const std::vector<double>& point(std::size_t i) const {
        return i < labeled.size() ? labeled[i].x : unlabeled[i - labeled.size()];
    }
};

inline Dataset make_dataset(std::vector<LabeledPoint> labeled,
                            std::vector<std::vector<double>> unlabeled) {
    if (labeled.empty()) throw ParameterError("dataset needs at least one labeled point");
    const std::size_t p = labeled.front().x.size();
    if (p == 0) throw ParameterError("dataset dimension must be >= 1");
    for (const auto& lp : labeled)
        if (lp.x.size() != p) throw ParameterError("labeled point dimension mismatch");
    for (const auto& u : unlabeled)
        if (u.size() != p) throw ParameterError("unlabeled point dimension mismatch");
    return Dataset{std::move(labeled), std::move(unlabeled), p};
}

// Complete binary tree of depth D. Branch nodes are 1..2^D-1, leaves are
// 2^D..2^(D+1)-1. Even leaves classify as A, odd leaves as B. left_path(t)
// and right_path(t) are the branch ancestors reached via the left / right
// ("greater than") branch on the way to leaf t.
class TreeTopology {
public:
    explicit TreeTopology(int depth) : depth_(depth) {
        if (depth < 1 || depth > 10) throw ParameterError("tree depth must be in [1, 10]");
        const int first_leaf = 1 << depth;
        for (int b = 1; b < first_leaf; ++b) branch_nodes_.push_back(b);
        for (int t = first_leaf; t < 2 * first_leaf; ++t) {
            leaf_nodes_.push_back(t);
            (t % 2 == 0 ? leaves_a_ : leaves_b_).push_back(t);
            std::vector<int> left, right;
            for (int node = t; node > 1; node /= 2)
                (node % 2 == 0 ? left : right).push_back(node / 2);
            std::sort(left.begin(), left.end());
            std::sort(right.begin(), right.end());
            left_paths_.push_back(std::move(left));
            right_paths_.push_back(std::move(right));
        }
    }

    int depth() const { return depth_; }
    int first_leaf() const { return 1 << depth_; }
    const std::vector<int>& branch_nodes() const { return branch_nodes_; }
    const std::vector<int>& leaf_nodes() const { return leaf_nodes_; }
    const std::vector<int>& leaves_a() const { return leaves_a_; }
    const std::vector<int>& leaves_b() const { return leaves_b_; }
    const std::vector<int>& leaves_for(ClassLabel c) const {
        return c == ClassLabel::A ? leaves_a_ : leaves_b_;
    }
    const std::vector<int>& left_path(int leaf) const { return left_paths_[leaf_slot(leaf)]; }
    const std::vector<int>& right_path(int leaf) const { return right_paths_[leaf_slot(leaf)]; }

    bool is_leaf(int node) const { return node >= first_leaf() && node < 2 * first_leaf(); }

private:
    std::size_t leaf_slot(int leaf) const {
        if (!is_leaf(leaf)) throw ParameterError("not a leaf node index");
        return static_cast<std::size_t>(leaf - first_leaf());
    }

    int depth_;
    std::vector<int> branch_nodes_, leaf_nodes_, leaves_a_, leaves_b_;
    std::vector<std::vector<int>> left_paths_, right_paths_;
};

inline TreeTopology build_topology(int depth) { return TreeTopology(depth); }

// Hyperplane (omega^b, gamma_b) per branch node, indexed by node - 1.
struct TreeParams {
    std::vector<std::vector<double>> omega;
    std::vector<double> gamma;
};

inline double hyperplane_value(const TreeParams& params, int branch,
                               const std::vector<double>& x) {
    const auto& w = params.omega[static_cast<std::size_t>(branch - 1)];
    double dot = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) dot += w[j] * x[j];
    return dot - params.gamma[static_cast<std::size_t>(branch - 1)];
}

// Descends from the root; value <= 0 routes left (boundary goes left),
// value > 0 routes right. Comparisons are exact: the MILP enforces a unit
// margin, so no epsilon is involved.
inline int route_point(const TreeTopology& topology, const TreeParams& params,
                       const std::vector<double>& x) {
    int node = 1;
    while (!topology.is_leaf(node)) {
        node = hyperplane_value(params, node, x) <= 0.0 ? 2 * node : 2 * node + 1;
    }
    return node;
}

inline ClassLabel classify(const TreeTopology& topology, const TreeParams& params,
                           const std::vector<double>& x) {
    return route_point(topology, params, x) % 2 == 0 ? ClassLabel::A : ClassLabel::B;
}

// Hinge violations of the two routing inequalities at branch node b:
// yR = [ -w.x + g + 1 ]+ and yL = [ w.x - g + 1 ]+.
inline std::pair<double, double> branch_errors(const TreeParams& params,
                                               const std::vector<double>& x, int branch) {
    const double v = hyperplane_value(params, branch, x);
    return {std::max(0.0, -v + 1.0), std::max(0.0, v + 1.0)};
}

inline double leaf_error(const TreeTopology& topology, const TreeParams& params,
                         const std::vector<double>& x, int leaf) {
    double total = 0.0;
    for (int b : topology.right_path(leaf)) total += branch_errors(params, x, b).first;
    for (int b : topology.left_path(leaf)) total += branch_errors(params, x, b).second;
    return total;
}

inline double min_leaf_error(const TreeTopology& topology, const TreeParams& params,
                             const std::vector<double>& x, ClassLabel c) {
    double best = std::numeric_limits<double>::infinity();
    for (int t : topology.leaves_for(c)) best = std::min(best, leaf_error(topology, params, x, t));
    return best;
}

}  // namespace s2oct
