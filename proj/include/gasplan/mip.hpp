#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "gasplan/core.hpp"

namespace gasplan::mip {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VarKind { continuous, binary, integer };
enum class Sense { le, eq, ge };
enum class ObjSense { minimize, maximize };

struct Variable {
    std::string name;
    VarKind kind = VarKind::continuous;
    double lb = 0.0;
    double ub = kInf;
};

struct Constraint {
    std::vector<std::pair<int, double>> coeffs; // (variable index, coefficient)
    Sense sense = Sense::le;
    double rhs = 0.0;
    std::string name;
};

/// A mixed-integer linear program in the form used by the delivery-list and
/// routing formulations: named variables with bounds, sparse rows, a single
/// linear objective.
class Model {
public:
    int add_var(std::string name, VarKind kind, double lb, double ub) {
        if (kind == VarKind::binary) { lb = std::max(lb, 0.0); ub = std::min(ub, 1.0); }
        if (!(lb <= ub)) throw ValidationError("variable " + name + ": lb > ub");
        if (!std::isfinite(lb)) throw ValidationError("variable " + name + ": lower bound must be finite");
        vars_.push_back(Variable{std::move(name), kind, lb, ub});
        obj_.push_back(0.0);
        return static_cast<int>(vars_.size()) - 1;
    }
    int add_continuous(std::string name, double lb, double ub) {
        return add_var(std::move(name), VarKind::continuous, lb, ub);
    }
    int add_binary(std::string name) { return add_var(std::move(name), VarKind::binary, 0, 1); }

    void add_constraint(std::vector<std::pair<int, double>> coeffs, Sense s, double rhs,
                        std::string name = "") {
        for (auto& [j, a] : coeffs) {
            if (j < 0 || j >= num_vars()) throw ValidationError("constraint references unknown variable");
            if (!std::isfinite(a)) throw ValidationError("non-finite constraint coefficient");
        }
        rows_.push_back(Constraint{std::move(coeffs), s, rhs, std::move(name)});
    }

    void set_objective(ObjSense sense) { obj_sense_ = sense; }
    void set_obj_coeff(int var, double c) { obj_.at(static_cast<std::size_t>(var)) = c; }

    int num_vars() const { return static_cast<int>(vars_.size()); }
    int num_rows() const { return static_cast<int>(rows_.size()); }
    const Variable& var(int j) const { return vars_[static_cast<std::size_t>(j)]; }
    Variable& var(int j) { return vars_[static_cast<std::size_t>(j)]; }
    const std::vector<Constraint>& rows() const { return rows_; }
    const std::vector<double>& objective() const { return obj_; }
    ObjSense obj_sense() const { return obj_sense_; }

    bool is_integral_var(int j) const { return var(j).kind != VarKind::continuous; }

    double eval_objective(const std::vector<double>& x) const {
        double v = 0;
        for (int j = 0; j < num_vars(); ++j) v += obj_[static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(j)];
        return v;
    }

    /// Max constraint violation plus integrality violation of a point.
    double infeasibility(const std::vector<double>& x) const {
        double worst = 0;
        for (int j = 0; j < num_vars(); ++j) {
            const auto& v = var(j);
            double xj = x[static_cast<std::size_t>(j)];
            worst = std::max(worst, v.lb - xj);
            if (std::isfinite(v.ub)) worst = std::max(worst, xj - v.ub);
            if (v.kind != VarKind::continuous)
                worst = std::max(worst, std::fabs(xj - std::round(xj)));
        }
        for (const auto& r : rows_) {
            double lhs = 0;
            for (auto [j, a] : r.coeffs) lhs += a * x[static_cast<std::size_t>(j)];
            switch (r.sense) {
                case Sense::le: worst = std::max(worst, lhs - r.rhs); break;
                case Sense::ge: worst = std::max(worst, r.rhs - lhs); break;
                case Sense::eq: worst = std::max(worst, std::fabs(lhs - r.rhs)); break;
            }
        }
        return worst;
    }

    /// Plain-text dump in an LP-style format, for debugging model builders.
    void dump(std::ostream& os) const {
        os << (obj_sense_ == ObjSense::minimize ? "minimize" : "maximize") << "\n  ";
        bool first = true;
        for (int j = 0; j < num_vars(); ++j) {
            double c = obj_[static_cast<std::size_t>(j)];
            if (c == 0) continue;
            os << (first ? "" : " + ") << c << " " << vars_[static_cast<std::size_t>(j)].name;
            first = false;
        }
        if (first) os << "0";
        os << "\nsubject to\n";
        for (const auto& r : rows_) {
            os << "  ";
            if (!r.name.empty()) os << r.name << ": ";
            for (std::size_t t = 0; t < r.coeffs.size(); ++t) {
                os << (t ? " + " : "") << r.coeffs[t].second << " "
                   << vars_[static_cast<std::size_t>(r.coeffs[t].first)].name;
            }
            os << (r.sense == Sense::le ? " <= " : r.sense == Sense::ge ? " >= " : " = ") << r.rhs << "\n";
        }
        os << "bounds\n";
        for (const auto& v : vars_) {
            os << "  " << v.lb << " <= " << v.name << " <= ";
            if (std::isfinite(v.ub)) os << v.ub; else os << "inf";
            os << (v.kind == VarKind::binary ? "  [binary]" : v.kind == VarKind::integer ? "  [integer]" : "")
               << "\n";
        }
    }

private:
    std::vector<Variable> vars_;
    std::vector<Constraint> rows_;
    std::vector<double> obj_;
    ObjSense obj_sense_ = ObjSense::minimize;
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
    LpStatus status = LpStatus::infeasible;
    double objective = 0.0;
    std::vector<double> x;
};

namespace detail {

inline constexpr double kFeasTol = 1e-9;
inline constexpr double kOptTol = 1e-9;
inline constexpr double kPivotTol = 1e-9;

/// Dense two-phase primal simplex. Lower bounds are shifted out, finite upper
/// bounds become explicit rows, phase 1 drives artificials to zero, and a run
/// of degenerate pivots switches pivoting to Bland's rule so cycling cannot
/// occur. Desk-scale models only.
class Simplex {
public:
    // lb/ub override the model's variable bounds (used by branch and bound).
    // Variables with lb == ub are substituted out before the tableau is
    // built, which keeps the deep branch-and-bound nodes small.
    LpResult solve(const Model& model, const std::vector<double>& lb, const std::vector<double>& ub) {
        int full_n = model.num_vars();
        std::vector<int> reduced(static_cast<std::size_t>(full_n), -1);
        std::vector<int> original;
        for (int j = 0; j < full_n; ++j) {
            if (lb[static_cast<std::size_t>(j)] > ub[static_cast<std::size_t>(j)] + kFeasTol)
                return {LpStatus::infeasible, 0.0, {}};
            if (ub[static_cast<std::size_t>(j)] - lb[static_cast<std::size_t>(j)] > kFeasTol) {
                reduced[static_cast<std::size_t>(j)] = static_cast<int>(original.size());
                original.push_back(j);
            }
        }
        n_ = static_cast<int>(original.size());

        // Rows: model rows plus one upper-bound row per finite-ub variable;
        // fixed variables contribute to the right-hand side only.
        struct Row { std::vector<double> a; double b; Sense s; };
        std::vector<Row> rows;
        rows.reserve(model.rows().size() + static_cast<std::size_t>(n_));
        for (const auto& r : model.rows()) {
            Row row{std::vector<double>(static_cast<std::size_t>(n_), 0.0), r.rhs, r.sense};
            for (auto [j, a] : r.coeffs) {
                row.b -= a * lb[static_cast<std::size_t>(j)]; // shift x_j = lb_j + s_j
                if (reduced[static_cast<std::size_t>(j)] >= 0)
                    row.a[static_cast<std::size_t>(reduced[static_cast<std::size_t>(j)])] += a;
            }
            rows.push_back(std::move(row));
        }
        for (int r = 0; r < n_; ++r) {
            int j = original[static_cast<std::size_t>(r)];
            double range = ub[static_cast<std::size_t>(j)] - lb[static_cast<std::size_t>(j)];
            if (!std::isfinite(range)) continue;
            Row row{std::vector<double>(static_cast<std::size_t>(n_), 0.0), range, Sense::le};
            row.a[static_cast<std::size_t>(r)] = 1.0;
            rows.push_back(std::move(row));
        }

        m_ = static_cast<int>(rows.size());
        // Column layout: [structural n_][slack/surplus][artificial].
        int n_slack = 0, n_art = 0;
        for (auto& r : rows) {
            if (r.b < 0) { // normalize rhs >= 0
                for (auto& a : r.a) a = -a;
                r.b = -r.b;
                r.s = (r.s == Sense::le) ? Sense::ge : (r.s == Sense::ge) ? Sense::le : Sense::eq;
            }
            if (r.s != Sense::eq) ++n_slack;
            if (r.s != Sense::le) ++n_art;
        }
        total_ = n_ + n_slack + n_art;
        art_begin_ = n_ + n_slack;
        tab_.assign(static_cast<std::size_t>(m_), std::vector<double>(static_cast<std::size_t>(total_ + 1), 0.0));
        basis_.assign(static_cast<std::size_t>(m_), -1);

        int sl = n_, ar = art_begin_;
        for (int i = 0; i < m_; ++i) {
            auto& t = tab_[static_cast<std::size_t>(i)];
            for (int j = 0; j < n_; ++j) t[static_cast<std::size_t>(j)] = rows[static_cast<std::size_t>(i)].a[static_cast<std::size_t>(j)];
            t[static_cast<std::size_t>(total_)] = rows[static_cast<std::size_t>(i)].b;
            switch (rows[static_cast<std::size_t>(i)].s) {
                case Sense::le:
                    t[static_cast<std::size_t>(sl)] = 1.0; basis_[static_cast<std::size_t>(i)] = sl++; break;
                case Sense::ge:
                    t[static_cast<std::size_t>(sl)] = -1.0; ++sl;
                    t[static_cast<std::size_t>(ar)] = 1.0; basis_[static_cast<std::size_t>(i)] = ar++; break;
                case Sense::eq:
                    t[static_cast<std::size_t>(ar)] = 1.0; basis_[static_cast<std::size_t>(i)] = ar++; break;
            }
        }

        // Phase-2 cost row (minimization; negate for maximize), then phase-1 row.
        // Both are rebuilt per solve; a stale phase-1 row from a previous call
        // must never leak into pivot updates.
        p1_.clear();
        double sign = model.obj_sense() == ObjSense::minimize ? 1.0 : -1.0;
        cost_.assign(static_cast<std::size_t>(total_ + 1), 0.0);
        for (int r = 0; r < n_; ++r)
            cost_[static_cast<std::size_t>(r)] =
                sign * model.objective()[static_cast<std::size_t>(original[static_cast<std::size_t>(r)])];
        // Objective offset from the lb shift is reconstructed at the end.

        if (n_art > 0) {
            p1_.assign(static_cast<std::size_t>(total_ + 1), 0.0);
            for (int j = art_begin_; j < total_; ++j) p1_[static_cast<std::size_t>(j)] = 1.0;
            // Price out the basic artificials.
            for (int i = 0; i < m_; ++i)
                if (basis_[static_cast<std::size_t>(i)] >= art_begin_) sub_row(p1_, i);
            if (!iterate(p1_, /*ban_art=*/false)) return {LpStatus::unbounded, 0.0, {}}; // cannot happen: phase 1 bounded
            if (p1_[static_cast<std::size_t>(total_)] < -1e-7) return {LpStatus::infeasible, 0.0, {}};
            // Pivot any artificial still in the basis out of it (or drop the row).
            for (int i = 0; i < m_; ++i) {
                if (basis_[static_cast<std::size_t>(i)] < art_begin_) continue;
                int enter = -1;
                for (int j = 0; j < art_begin_; ++j)
                    if (std::fabs(tab_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) > 1e-7) { enter = j; break; }
                if (enter >= 0) pivot(i, enter);
                // else: redundant row, harmless to keep with an artificial at 0.
            }
        }

        // Price out basic columns from the phase-2 cost row.
        for (int i = 0; i < m_; ++i) {
            int b = basis_[static_cast<std::size_t>(i)];
            if (b < total_ && std::fabs(cost_[static_cast<std::size_t>(b)]) > 0) sub_row(cost_, i);
        }
        if (!iterate(cost_, /*ban_art=*/true)) return {LpStatus::unbounded, 0.0, {}};

        std::vector<double> x(static_cast<std::size_t>(full_n), 0.0);
        for (int j = 0; j < full_n; ++j) x[static_cast<std::size_t>(j)] = lb[static_cast<std::size_t>(j)];
        for (int i = 0; i < m_; ++i) {
            int b = basis_[static_cast<std::size_t>(i)];
            if (b < n_)
                x[static_cast<std::size_t>(original[static_cast<std::size_t>(b)])] +=
                    tab_[static_cast<std::size_t>(i)][static_cast<std::size_t>(total_)];
        }
        for (int j = 0; j < full_n; ++j) {
            // Clean tiny negative noise against the bounds.
            x[static_cast<std::size_t>(j)] = std::clamp(x[static_cast<std::size_t>(j)], lb[static_cast<std::size_t>(j)],
                                                        std::isfinite(ub[static_cast<std::size_t>(j)]) ? ub[static_cast<std::size_t>(j)] : x[static_cast<std::size_t>(j)]);
        }
        return {LpStatus::optimal, model.eval_objective(x), std::move(x)};
    }

private:
    void sub_row(std::vector<double>& costrow, int i) {
        double f = costrow[static_cast<std::size_t>(basis_[static_cast<std::size_t>(i)])];
        if (f == 0) return;
        const auto& t = tab_[static_cast<std::size_t>(i)];
        for (int j = 0; j <= total_; ++j) costrow[static_cast<std::size_t>(j)] -= f * t[static_cast<std::size_t>(j)];
    }

    void pivot(int row, int col) {
        auto& pr = tab_[static_cast<std::size_t>(row)];
        double pv = pr[static_cast<std::size_t>(col)];
        for (double& v : pr) v /= pv;
        pr[static_cast<std::size_t>(col)] = 1.0; // exact
        for (int i = 0; i < m_; ++i) {
            if (i == row) continue;
            auto& r = tab_[static_cast<std::size_t>(i)];
            double f = r[static_cast<std::size_t>(col)];
            if (f == 0) continue;
            for (int j = 0; j <= total_; ++j) r[static_cast<std::size_t>(j)] -= f * pr[static_cast<std::size_t>(j)];
            r[static_cast<std::size_t>(col)] = 0.0;
        }
        auto fix = [&](std::vector<double>& c) {
            if (c.empty()) return;
            double f = c[static_cast<std::size_t>(col)];
            if (f == 0) return;
            for (int j = 0; j <= total_; ++j) c[static_cast<std::size_t>(j)] -= f * pr[static_cast<std::size_t>(j)];
            c[static_cast<std::size_t>(col)] = 0.0;
        };
        fix(cost_);
        fix(p1_);
        basis_[static_cast<std::size_t>(row)] = col;
    }

    // Returns false when unbounded.
    bool iterate(std::vector<double>& costrow, bool ban_art) {
        int degenerate_run = 0;
        bool bland = false;
        const long max_iter = 20000L + 200L * static_cast<long>(m_ + total_);
        for (long it = 0; it < max_iter; ++it) {
            int limit = ban_art ? art_begin_ : total_;
            int enter = -1;
            if (!bland) {
                double best = -kOptTol;
                for (int j = 0; j < limit; ++j)
                    if (costrow[static_cast<std::size_t>(j)] < best) { best = costrow[static_cast<std::size_t>(j)]; enter = j; }
            } else {
                for (int j = 0; j < limit; ++j)
                    if (costrow[static_cast<std::size_t>(j)] < -kOptTol) { enter = j; break; }
            }
            if (enter < 0) return true; // optimal

            int leave = -1;
            double best_ratio = kInf;
            for (int i = 0; i < m_; ++i) {
                double a = tab_[static_cast<std::size_t>(i)][static_cast<std::size_t>(enter)];
                if (a <= kPivotTol) continue;
                double ratio = tab_[static_cast<std::size_t>(i)][static_cast<std::size_t>(total_)] / a;
                if (ratio < best_ratio - kFeasTol) { best_ratio = ratio; leave = i; }
                else if (ratio < best_ratio + kFeasTol && leave >= 0) {
                    if (bland) {
                        if (basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leave)]) leave = i;
                    } else if (a > tab_[static_cast<std::size_t>(leave)][static_cast<std::size_t>(enter)]) {
                        leave = i; // prefer the larger pivot for stability
                    }
                }
            }
            if (leave < 0) return false; // unbounded direction

            if (best_ratio < kFeasTol) {
                if (++degenerate_run > 40) bland = true;
            } else {
                degenerate_run = 0;
                bland = false;
            }
            pivot(leave, enter);
        }
        throw Error("simplex iteration limit exceeded");
    }

    int n_ = 0, m_ = 0, total_ = 0, art_begin_ = 0;
    std::vector<std::vector<double>> tab_;
    std::vector<double> cost_, p1_;
    std::vector<int> basis_;
};

} // namespace detail

/// Solves the LP relaxation (integrality dropped).
inline LpResult solve_lp(const Model& model) {
    std::vector<double> lb(static_cast<std::size_t>(model.num_vars()));
    std::vector<double> ub(static_cast<std::size_t>(model.num_vars()));
    for (int j = 0; j < model.num_vars(); ++j) {
        lb[static_cast<std::size_t>(j)] = model.var(j).lb;
        ub[static_cast<std::size_t>(j)] = model.var(j).ub;
    }
    detail::Simplex s;
    return s.solve(model, lb, ub);
}

enum class MilpStatus { optimal, feasible_incumbent, infeasible, time_limit_no_incumbent };

struct MilpResult {
    MilpStatus status = MilpStatus::infeasible;
    double objective = 0.0;
    std::vector<double> x;
    double gap = kInf;        // |incumbent - best bound|, 0 when proved optimal
    long nodes = 0;
    double wall_seconds = 0.0;
    std::vector<std::pair<long, double>> gap_trace; // (node count, gap) after each node

    bool has_solution() const {
        return status == MilpStatus::optimal || status == MilpStatus::feasible_incumbent;
    }
};

namespace detail {
inline void gap_trace_push(MilpResult& r, double gap) { r.gap_trace.emplace_back(r.nodes, gap); }
} // namespace detail

inline constexpr double kIntTol = 1e-6;

/// When non-empty, every model passed to solve_milp is appended to this file
/// in the LP-style dump format (CLI --dump-model).
inline std::string& dump_model_path() {
    static std::string path;
    return path;
}

/// Best-bound branch and bound over LP relaxations. Branches on the most
/// fractional integral variable; dives depth-first until the first incumbent
/// is found, then switches to best-bound node selection. Deterministic for a
/// given model (the time limit only decides how much of the tree is seen).
inline MilpResult solve_milp(const Model& model, double time_limit_s = 1800.0) {
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    auto elapsed = [&] { return std::chrono::duration<double>(clock::now() - t0).count(); };

    if (!dump_model_path().empty()) {
        std::ofstream dump(dump_model_path(), std::ios::app);
        if (dump) {
            dump << "\\ model with " << model.num_vars() << " variables, " << model.num_rows()
                 << " rows\n";
            model.dump(dump);
            dump << "end\n";
        }
    }

    const double sign = model.obj_sense() == ObjSense::minimize ? 1.0 : -1.0;
    for (int j = 0; j < model.num_vars(); ++j)
        if (model.is_integral_var(j) && !std::isfinite(model.var(j).ub))
            throw ValidationError("integer variable without finite bounds: " + model.var(j).name);

    // When the objective only touches integral variables with integral
    // coefficients, LP bounds can be rounded before pruning.
    bool integral_objective = true;
    for (int j = 0; j < model.num_vars(); ++j) {
        double c = model.objective()[static_cast<std::size_t>(j)];
        if (c == 0.0) continue;
        if (!model.is_integral_var(j) || c != std::round(c)) {
            integral_objective = false;
            break;
        }
    }
    auto sharpen = [&](double bound) {
        return integral_objective ? std::ceil(bound - 1e-6) : bound;
    };

    struct Node {
        std::vector<double> lb, ub;
        double bound; // sign-adjusted (minimization) LP bound
    };

    std::vector<double> lb0(static_cast<std::size_t>(model.num_vars()));
    std::vector<double> ub0(static_cast<std::size_t>(model.num_vars()));
    for (int j = 0; j < model.num_vars(); ++j) {
        lb0[static_cast<std::size_t>(j)] = model.var(j).lb;
        ub0[static_cast<std::size_t>(j)] = model.var(j).ub;
    }

    MilpResult res;
    res.status = MilpStatus::time_limit_no_incumbent;
    bool have_incumbent = false;
    double inc_obj = kInf; // sign-adjusted
    std::vector<double> inc_x;
    bool exhausted = true;

    std::vector<Node> open;
    open.push_back(Node{std::move(lb0), std::move(ub0), -kInf});
    detail::Simplex simplex;

    auto most_fractional = [&](const std::vector<double>& x) {
        int best = -1;
        double best_frac = kIntTol;
        for (int j = 0; j < model.num_vars(); ++j) {
            if (!model.is_integral_var(j)) continue;
            double v = x[static_cast<std::size_t>(j)];
            double frac = std::fabs(v - std::round(v));
            double score = std::min(v - std::floor(v), std::ceil(v) - v);
            if (frac > kIntTol && score > best_frac) { best_frac = score; best = j; }
        }
        return best;
    };

    while (!open.empty()) {
        if (time_limit_s >= 0 && elapsed() > time_limit_s) { exhausted = false; break; }

        // Node selection: plunge until an incumbent exists, then best bound.
        std::size_t pick = open.size() - 1;
        if (have_incumbent) {
            for (std::size_t i = 0; i < open.size(); ++i)
                if (open[i].bound < open[pick].bound) pick = i;
        }
        Node node = std::move(open[pick]);
        open.erase(open.begin() + static_cast<std::ptrdiff_t>(pick));

        if (have_incumbent && node.bound >= inc_obj - 1e-9) continue;

        LpResult lp = simplex.solve(model, node.lb, node.ub);
        ++res.nodes;
        if (lp.status == LpStatus::infeasible) continue;
        if (lp.status == LpStatus::unbounded)
            throw ValidationError("unbounded LP relaxation in branch and bound");
        double bound = sharpen(sign * lp.objective);
        if (have_incumbent && bound >= inc_obj - 1e-9) continue;

        int frac_var = most_fractional(lp.x);
        if (frac_var < 0) {
            // Integral: round off tolerance noise and accept as incumbent.
            for (int j = 0; j < model.num_vars(); ++j)
                if (model.is_integral_var(j))
                    lp.x[static_cast<std::size_t>(j)] = std::round(lp.x[static_cast<std::size_t>(j)]);
            double obj = sign * model.eval_objective(lp.x);
            if (!have_incumbent || obj < inc_obj - 1e-9) {
                have_incumbent = true;
                inc_obj = obj;
                inc_x = lp.x;
            }
            continue;
        }

        double v = lp.x[static_cast<std::size_t>(frac_var)];
        Node down{node.lb, node.ub, bound};
        Node up{std::move(node.lb), std::move(node.ub), bound};
        down.ub[static_cast<std::size_t>(frac_var)] = std::floor(v);
        up.lb[static_cast<std::size_t>(frac_var)] = std::ceil(v);
        // Push the child nearest the LP value last so plunging explores it first.
        if (v - std::floor(v) <= 0.5) {
            open.push_back(std::move(up));
            open.push_back(std::move(down));
        } else {
            open.push_back(std::move(down));
            open.push_back(std::move(up));
        }

        if (have_incumbent) {
            double best_open = inc_obj;
            for (const auto& nd : open) best_open = std::min(best_open, nd.bound);
            detail::gap_trace_push(res, inc_obj - best_open);
        }
    }

    res.wall_seconds = elapsed();
    if (have_incumbent) {
        res.x = std::move(inc_x);
        res.objective = sign * inc_obj;
        if (exhausted && open.empty()) {
            res.status = MilpStatus::optimal;
            res.gap = 0.0;
        } else {
            res.status = MilpStatus::feasible_incumbent;
            double best_open = inc_obj;
            for (const auto& nd : open) best_open = std::min(best_open, nd.bound);
            res.gap = inc_obj - best_open;
        }
        detail::gap_trace_push(res, res.gap);
    } else if (exhausted && open.empty()) {
        res.status = MilpStatus::infeasible;
    } else {
        res.status = MilpStatus::time_limit_no_incumbent;
    }
    return res;
}

} // namespace gasplan::mip
