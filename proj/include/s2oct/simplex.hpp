#pragma once

#include <chrono>
#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include "s2oct/common.hpp"

namespace s2oct::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sense { LE, EQ, GE };

struct Row {
    std::vector<std::pair<int, double>> terms;  // (column, coefficient)
    Sense sense = Sense::LE;
    double rhs = 0.0;
};

// min c.x  s.t. rows, col_lower <= x <= col_upper (entries may be +-inf).
struct Problem {
    int num_cols = 0;
    std::vector<double> col_lower, col_upper, objective;
    std::vector<Row> rows;
};

enum class Status { Optimal, Infeasible, Unbounded, IterationLimit };

struct Solution {
    Status status = Status::IterationLimit;
    std::vector<double> x;
    double objective = 0.0;
    int iterations = 0;
};

// Bounded-variable primal simplex on a dense tableau. Phase 1 drives
// artificial variables (added only on rows whose slack cannot absorb the
// initial residual) to zero, phase 2 optimizes the real objective. Dantzig
// pricing with a Bland fallback once the objective stalls.
class Simplex {
public:
    Solution solve(const Problem& p, double time_limit_seconds = kInf) {
        return solve(p, p.col_lower, p.col_upper, time_limit_seconds);
    }

    Solution solve(const Problem& p, const std::vector<double>& lower,
                   const std::vector<double>& upper, double time_limit_seconds = kInf) {
        no_deadline_ = !std::isfinite(time_limit_seconds);
        deadline_ = std::chrono::steady_clock::now() +
                    std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                        std::chrono::duration<double>(
                            std::isfinite(time_limit_seconds) ? time_limit_seconds : 1e9));
        const int ns = p.num_cols;
        const int nr = static_cast<int>(p.rows.size());
        nrows_ = nr;

        lo_.assign(lower.begin(), lower.end());
        hi_.assign(upper.begin(), upper.end());
        cost_.assign(p.objective.begin(), p.objective.end());
        // Slack per row: LE -> [0,inf), EQ -> [0,0], GE -> (-inf,0].
        for (int i = 0; i < nr; ++i) {
            switch (p.rows[i].sense) {
                case Sense::LE: lo_.push_back(0.0); hi_.push_back(kInf); break;
                case Sense::EQ: lo_.push_back(0.0); hi_.push_back(0.0); break;
                case Sense::GE: lo_.push_back(-kInf); hi_.push_back(0.0); break;
            }
            cost_.push_back(0.0);
        }
        ncols_ = ns + nr;
        tab_.assign(static_cast<std::size_t>(nr) * (ncols_ + nr), 0.0);  // room for artificials
        cap_ = ncols_ + nr;
        for (int i = 0; i < nr; ++i) {
            for (const auto& [j, a] : p.rows[i].terms) at(i, j) += a;
            at(i, ns + i) = 1.0;
        }

        x_.assign(static_cast<std::size_t>(cap_), 0.0);
        state_.assign(static_cast<std::size_t>(cap_), State::AtLower);
        for (int j = 0; j < ns; ++j) {
            if (std::isfinite(lo_[j])) {
                state_[j] = State::AtLower;
                x_[j] = lo_[j];
            } else if (std::isfinite(hi_[j])) {
                state_[j] = State::AtUpper;
                x_[j] = hi_[j];
            } else {
                state_[j] = State::Free;
                x_[j] = 0.0;
            }
        }

        // Initial basis: the slack when it can hold the residual, otherwise
        // an artificial bounded to the residual's side.
        basis_.assign(static_cast<std::size_t>(nr), -1);
        nart_ = 0;
        lo_.resize(static_cast<std::size_t>(cap_), 0.0);
        hi_.resize(static_cast<std::size_t>(cap_), 0.0);
        cost_.resize(static_cast<std::size_t>(cap_), 0.0);
        phase1_.assign(static_cast<std::size_t>(cap_), 0.0);
        for (int i = 0; i < nr; ++i) {
            double r = p.rows[i].rhs;
            for (const auto& [j, a] : p.rows[i].terms) r -= a * x_[j];
            const int sj = ns + i;
            const double sv = std::min(hi_[sj], std::max(lo_[sj], r));
            if (sv == r) {
                basis_[i] = sj;
                state_[sj] = State::Basic;
                x_[sj] = r;
            } else {
                state_[sj] = sv == lo_[sj] ? State::AtLower : State::AtUpper;
                x_[sj] = sv;
                const int aj = ncols_ + nart_;
                ++nart_;
                const double g = r - sv;
                at(i, aj) = 1.0;
                if (g > 0.0) {
                    lo_[aj] = 0.0;
                    hi_[aj] = kInf;
                    phase1_[aj] = 1.0;
                } else {
                    lo_[aj] = -kInf;
                    hi_[aj] = 0.0;
                    phase1_[aj] = -1.0;
                }
                basis_[i] = aj;
                state_[aj] = State::Basic;
                x_[aj] = g;
            }
        }
        ntotal_ = ncols_ + nart_;

        // Reduced-cost rows for both phases (initial basis is an identity,
        // so the tableau is already in canonical form).
        d1_.assign(phase1_.begin(), phase1_.end());
        d2_.assign(cost_.begin(), cost_.end());
        for (int i = 0; i < nr; ++i) {
            const int bj = basis_[i];
            if (phase1_[bj] != 0.0) {
                const double cb = phase1_[bj];
                for (int j = 0; j < ntotal_; ++j) d1_[j] -= cb * at(i, j);
            }
            if (cost_[bj] != 0.0) {
                const double cb = cost_[bj];
                for (int j = 0; j < ntotal_; ++j) d2_[j] -= cb * at(i, j);
            }
        }

        Solution out;
        iters_ = 0;
        max_iters_ = 20000 + 200 * (nr + ntotal_);

        if (nart_ > 0) {
            const Status s1 = iterate(d1_, true);
            if (s1 == Status::IterationLimit) return finish(out, s1, ns);
            if (phase1_objective() > 1e-7) return finish(out, Status::Infeasible, ns);
            for (int aj = ncols_; aj < ntotal_; ++aj) {
                lo_[aj] = 0.0;
                hi_[aj] = 0.0;
                if (state_[aj] != State::Basic) {
                    state_[aj] = State::AtLower;
                    x_[aj] = 0.0;
                }
            }
        }
        const Status s2 = iterate(d2_, false);
        return finish(out, s2, ns);
    }

private:
    enum class State : unsigned char { Basic, AtLower, AtUpper, Free };

    double& at(int i, int j) { return tab_[static_cast<std::size_t>(i) * cap_ + j]; }

    double phase1_objective() const {
        double v = 0.0;
        for (int aj = ncols_; aj < ntotal_; ++aj) v += phase1_[aj] * x_[aj];
        return v;
    }

    double objective_value() const {
        double v = 0.0;
        for (int j = 0; j < ncols_; ++j)
            if (cost_[j] != 0.0) v += cost_[j] * x_[j];
        return v;
    }

    Solution finish(Solution& out, Status s, int ns) {
        out.status = s;
        out.iterations = iters_;
        out.x.assign(x_.begin(), x_.begin() + ns);
        out.objective = objective_value();
        return out;
    }

    // One simplex phase on reduced-cost row d. Artificials never enter in
    // phase 2 (their bounds are fixed to [0,0] first).
    Status iterate(std::vector<double>& d, bool phase1) {
        constexpr double kDualTol = 1e-9;
        constexpr double kPivTol = 1e-9;
        int stall = 0;
        double last_obj = phase1 ? phase1_objective() : objective_value();
        bool bland = false;

        while (true) {
            if (++iters_ > max_iters_) return Status::IterationLimit;
            if (!no_deadline_ && (iters_ & 127) == 0 &&
                std::chrono::steady_clock::now() > deadline_)
                return Status::IterationLimit;

            int enter = -1;
            double best = kDualTol;
            for (int j = 0; j < ntotal_; ++j) {
                if (state_[j] == State::Basic) continue;
                if (lo_[j] == hi_[j]) continue;  // fixed, cannot move
                double viol = 0.0;
                if ((state_[j] == State::AtLower || state_[j] == State::Free) && d[j] < -kDualTol)
                    viol = -d[j];
                else if ((state_[j] == State::AtUpper || state_[j] == State::Free) && d[j] > kDualTol)
                    viol = d[j];
                if (viol > 0.0) {
                    if (bland) {
                        enter = j;
                        break;
                    }
                    if (viol > best) {
                        best = viol;
                        enter = j;
                    }
                }
            }
            if (enter < 0) return Status::Optimal;

            const double dir = (state_[enter] == State::AtUpper || (state_[enter] == State::Free && d[enter] > 0.0))
                                   ? -1.0
                                   : 1.0;

            // Ratio test: step limited by the entering variable's own range
            // and by every basic variable hitting one of its bounds.
            double limit = kInf;
            if (std::isfinite(lo_[enter]) && std::isfinite(hi_[enter]))
                limit = hi_[enter] - lo_[enter];
            int leave_row = -1;
            double leave_bound = 0.0;
            // Two passes: find the tightest ratio, then the best pivot among
            // rows within tolerance of it.
            for (int pass = 0; pass < 2; ++pass) {
                double best_piv = 0.0;
                for (int i = 0; i < nrows_; ++i) {
                    const double a = at(i, enter);
                    if (std::fabs(a) < kPivTol) continue;
                    const int bj = basis_[i];
                    const double rate = -a * dir;  // d x_bj / d step
                    double cap, bound;
                    if (rate > 0.0) {
                        if (!std::isfinite(hi_[bj])) continue;
                        cap = (hi_[bj] - x_[bj]) / rate;
                        bound = hi_[bj];
                    } else {
                        if (!std::isfinite(lo_[bj])) continue;
                        cap = (x_[bj] - lo_[bj]) / (-rate);
                        bound = lo_[bj];
                    }
                    if (cap < 0.0) cap = 0.0;
                    if (pass == 0) {
                        if (cap < limit) limit = cap;
                    } else if (cap <= limit + 1e-9 && std::fabs(a) > best_piv) {
                        best_piv = std::fabs(a);
                        leave_row = i;
                        leave_bound = bound;
                    }
                }
                if (pass == 0 && !std::isfinite(limit)) {
                    // Phase 1 is bounded below by zero, so an unbounded ray
                    // there can only be numerical noise.
                    return phase1 ? Status::IterationLimit : Status::Unbounded;
                }
            }

            if (leave_row < 0) {
                // Bound flip: the entering variable traverses its whole range.
                const double step = limit;
                for (int i = 0; i < nrows_; ++i) {
                    const double a = at(i, enter);
                    if (a != 0.0) x_[basis_[i]] -= a * dir * step;
                }
                x_[enter] += dir * step;
                state_[enter] = state_[enter] == State::AtLower ? State::AtUpper : State::AtLower;
                x_[enter] = state_[enter] == State::AtLower ? lo_[enter] : hi_[enter];
            } else {
                const double step = limit;
                for (int i = 0; i < nrows_; ++i) {
                    const double a = at(i, enter);
                    if (a != 0.0) x_[basis_[i]] -= a * dir * step;
                }
                x_[enter] += dir * step;

                const int out_var = basis_[leave_row];
                x_[out_var] = leave_bound;
                state_[out_var] = leave_bound == lo_[out_var] ? State::AtLower : State::AtUpper;

                pivot(leave_row, enter);
                basis_[leave_row] = enter;
                state_[enter] = State::Basic;
            }

            const double obj = phase1 ? phase1_objective() : objective_value();
            if (obj < last_obj - 1e-12) {
                last_obj = obj;
                stall = 0;
                bland = false;
            } else if (++stall > 256) {
                bland = true;  // anti-cycling
            }
            if (phase1 && obj < 1e-10) return Status::Optimal;
        }
    }

    void pivot(int r, int e) {
        const double piv = at(r, e);
        const double inv = 1.0 / piv;
        double* rowr = &tab_[static_cast<std::size_t>(r) * cap_];
        for (int j = 0; j < ntotal_; ++j) rowr[j] *= inv;
        rowr[e] = 1.0;
        for (int i = 0; i < nrows_; ++i) {
            if (i == r) continue;
            const double f = at(i, e);
            if (f == 0.0) continue;
            double* rowi = &tab_[static_cast<std::size_t>(i) * cap_];
            for (int j = 0; j < ntotal_; ++j) rowi[j] -= f * rowr[j];
            rowi[e] = 0.0;
        }
        // Both reduced-cost rows stay canonical.
        for (auto* dv : {&d1_, &d2_}) {
            const double f = (*dv)[e];
            if (f == 0.0) continue;
            for (int j = 0; j < ntotal_; ++j) (*dv)[j] -= f * rowr[j];
            (*dv)[e] = 0.0;
        }
    }

    int nrows_ = 0, ncols_ = 0, ntotal_ = 0, nart_ = 0, cap_ = 0;
    int iters_ = 0, max_iters_ = 0;
    bool no_deadline_ = true;
    std::chrono::steady_clock::time_point deadline_;
    std::vector<double> tab_, lo_, hi_, cost_, phase1_, x_, d1_, d2_;
    std::vector<int> basis_;
    std::vector<State> state_;
};

inline Solution solve(const Problem& p, double time_limit_seconds = kInf) {
    return Simplex().solve(p, time_limit_seconds);
}

inline Solution solve(const Problem& p, const std::vector<double>& lower,
                      const std::vector<double>& upper, double time_limit_seconds = kInf) {
    return Simplex().solve(p, lower, upper, time_limit_seconds);
}

}  // namespace s2oct::lp
