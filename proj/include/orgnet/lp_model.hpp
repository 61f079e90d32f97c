#pragma once
// Standard-form linear programs (minimization) with row relations and
// variable bounds, plus solver-independent solution checking: constraint
// residuals, duality gap, Farkas and ray certificate verification, and
// export to the LP text format.

#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "orgnet/core.hpp"

namespace orgnet::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Relation { LessEq, Equal, GreaterEq };

inline const char* to_string(Relation r) {
    switch (r) {
        case Relation::LessEq: return "<=";
        case Relation::Equal: return "=";
        case Relation::GreaterEq: return ">=";
    }
    return "?";
}

// One sparse constraint row: sum(coef * var) rel rhs.
struct Constraint {
    std::vector<std::pair<int, double>> terms;
    Relation rel = Relation::LessEq;
    double rhs = 0.0;
};

// Minimization problem over variables with per-variable bounds
// (default [0, +inf), matching nonnegativity of all flow/weight variables).
struct LpModel {
    int n_vars = 0;
    std::vector<double> objective;
    std::vector<Constraint> rows;
    std::vector<double> lower;
    std::vector<double> upper;

    int add_var(double cost = 0.0, double lo = 0.0, double hi = kInf) {
        objective.push_back(cost);
        lower.push_back(lo);
        upper.push_back(hi);
        return n_vars++;
    }

    int add_row(Relation rel, double rhs) {
        rows.push_back({{}, rel, rhs});
        return static_cast<int>(rows.size()) - 1;
    }

    void add_term(int row, int var, double coef) {
        rows.at(row).terms.emplace_back(var, coef);
    }

    int n_rows() const { return static_cast<int>(rows.size()); }

    // Structural sanity: finite coefficients, indices in range, lower <= upper.
    void validate() const {
        if (static_cast<int>(objective.size()) != n_vars ||
            static_cast<int>(lower.size()) != n_vars ||
            static_cast<int>(upper.size()) != n_vars)
            throw InputError("lp model: inconsistent array sizes");
        for (double c : objective)
            if (!std::isfinite(c)) throw InputError("lp model: non-finite objective coefficient");
        for (int j = 0; j < n_vars; ++j) {
            if (std::isnan(lower[j]) || std::isnan(upper[j]) || lower[j] > upper[j])
                throw InputError("lp model: bad bounds on variable " + std::to_string(j));
        }
        for (const auto& row : rows) {
            if (!std::isfinite(row.rhs)) throw InputError("lp model: non-finite rhs");
            for (const auto& [j, a] : row.terms) {
                if (j < 0 || j >= n_vars)
                    throw InputError("lp model: variable index out of range");
                if (!std::isfinite(a))
                    throw InputError("lp model: non-finite constraint coefficient");
            }
        }
    }
};

enum class SolveStatus { Optimal, Infeasible, Unbounded };

inline const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::Infeasible: return "infeasible";
        case SolveStatus::Unbounded: return "unbounded";
    }
    return "?";
}

// Certified solver output. For Optimal solves `primal` and `dual` are filled
// (one dual multiplier per input row, one reduced cost per variable). For
// Infeasible, `certificate` is a Farkas vector over rows; for Unbounded it is
// an improving feasible ray over variables (and `primal` holds the feasible
// point the ray emanates from).
struct LpSolution {
    SolveStatus status = SolveStatus::Optimal;
    double objective = 0.0;
    std::vector<double> primal;
    std::vector<double> dual;
    std::vector<double> reduced_costs;
    std::vector<double> certificate;
    long iterations = 0;
    long phase1_iterations = 0;
};

inline double row_activity(const Constraint& row, const std::vector<double>& x) {
    double a = 0.0;
    for (const auto& [j, c] : row.terms) a += c * x.at(j);
    return a;
}

// Violation of one row at point x (0 when satisfied).
inline double row_residual(const Constraint& row, const std::vector<double>& x) {
    const double act = row_activity(row, x);
    switch (row.rel) {
        case Relation::LessEq: return std::max(0.0, act - row.rhs);
        case Relation::Equal: return std::fabs(act - row.rhs);
        case Relation::GreaterEq: return std::max(0.0, row.rhs - act);
    }
    return 0.0;
}

// Lower bound on the optimum certified by the multipliers y: the Lagrangian
// bound b'y + sum_j min over [l_j, u_j] of d_j x_j with d = c - A'y.
// Reduced costs within `tol` of zero are clamped so that roundoff does not
// turn a finite bound into -inf through an infinite bound term.
inline double dual_bound(const LpModel& m, const std::vector<double>& y, double tol) {
    std::vector<double> d = m.objective;
    double yb = 0.0;
    for (int i = 0; i < m.n_rows(); ++i) {
        yb += y.at(i) * m.rows[i].rhs;
        for (const auto& [j, a] : m.rows[i].terms) d[j] -= y[i] * a;
    }
    double bound = yb;
    for (int j = 0; j < m.n_vars; ++j) {
        double dj = (std::fabs(d[j]) <= tol) ? 0.0 : d[j];
        if (dj > 0.0)
            bound += std::isfinite(m.lower[j]) ? dj * m.lower[j] : -kInf;
        else if (dj < 0.0)
            bound += std::isfinite(m.upper[j]) ? dj * m.upper[j] : -kInf;
    }
    return bound;
}

struct CheckReport {
    double max_row_residual = 0.0;
    double max_bound_violation = 0.0;
    double duality_gap = 0.0;       // |primal obj - dual bound|
    double dual_sign_violation = 0.0;  // y_i of the wrong sign for its row sense
    std::vector<int> violated_rows;
    double primal_objective = 0.0;
    double dual_objective = 0.0;

    bool ok(double tol_feas = 1e-8, double tol_gap = 1e-6) const {
        return max_row_residual <= tol_feas && max_bound_violation <= tol_feas &&
               dual_sign_violation <= tol_feas &&
               duality_gap <= tol_gap * (1.0 + std::fabs(primal_objective));
    }
};

// Re-evaluates an Optimal solution against the model, independently of any
// solver internals: every row residual, every bound, the dual sign
// conditions, and the duality gap.
inline CheckReport check_solution(const LpModel& m, const LpSolution& sol,
                                  double tol_feas = 1e-8) {
    if (sol.status != SolveStatus::Optimal)
        throw InputError("check_solution requires an Optimal solution");
    CheckReport rep;
    const auto& x = sol.primal;
    for (int i = 0; i < m.n_rows(); ++i) {
        double r = row_residual(m.rows[i], x);
        if (r > tol_feas) rep.violated_rows.push_back(i);
        rep.max_row_residual = std::max(rep.max_row_residual, r);
    }
    for (int j = 0; j < m.n_vars; ++j) {
        rep.max_bound_violation = std::max(rep.max_bound_violation, m.lower[j] - x.at(j));
        rep.max_bound_violation = std::max(rep.max_bound_violation, x.at(j) - m.upper[j]);
    }
    rep.max_bound_violation = std::max(rep.max_bound_violation, 0.0);
    for (int i = 0; i < m.n_rows(); ++i) {
        // Minimization senses: <= rows need y <= 0, >= rows need y >= 0.
        double y = sol.dual.at(i);
        if (m.rows[i].rel == Relation::LessEq)
            rep.dual_sign_violation = std::max(rep.dual_sign_violation, y);
        else if (m.rows[i].rel == Relation::GreaterEq)
            rep.dual_sign_violation = std::max(rep.dual_sign_violation, -y);
    }
    double obj = 0.0;
    for (int j = 0; j < m.n_vars; ++j) obj += m.objective[j] * x.at(j);
    rep.primal_objective = obj;
    rep.dual_objective = dual_bound(m, sol.dual, tol_feas);
    rep.duality_gap = std::fabs(obj - rep.dual_objective);
    return rep;
}

// Farkas check for "Ax rel b, l <= x <= u has no solution": the certificate y
// must satisfy the row-sense sign conditions and leave a positive margin
//   y'b - sum_j sup over [l_j, u_j] of (A'y)_j x_j > 0.
// Returns the margin (> 0 means the certificate is valid); sign violations
// beyond tol or an infinite sup make the margin -inf.
inline double farkas_margin(const LpModel& m, const std::vector<double>& y, double tol) {
    std::vector<double> q(m.n_vars, 0.0);
    double yb = 0.0;
    for (int i = 0; i < m.n_rows(); ++i) {
        const double yi = y.at(i);
        if (m.rows[i].rel == Relation::LessEq && yi > tol) return -kInf;
        if (m.rows[i].rel == Relation::GreaterEq && yi < -tol) return -kInf;
        yb += yi * m.rows[i].rhs;
        for (const auto& [j, a] : m.rows[i].terms) q[j] += yi * a;
    }
    double margin = yb;
    for (int j = 0; j < m.n_vars; ++j) {
        double qj = (std::fabs(q[j]) <= tol) ? 0.0 : q[j];
        if (qj > 0.0) {
            if (!std::isfinite(m.upper[j])) return -kInf;
            margin -= qj * m.upper[j];
        } else if (qj < 0.0) {
            if (!std::isfinite(m.lower[j])) return -kInf;
            margin -= qj * m.lower[j];
        }
    }
    return margin;
}

// An unbounded certificate is a recession direction r with negative objective
// value: A r respects every row sense, r respects the finite-bound directions,
// and c'r < 0. Returns true when all conditions hold within tol.
inline bool check_ray(const LpModel& m, const std::vector<double>& r, double tol) {
    if (static_cast<int>(r.size()) != m.n_vars) return false;
    for (int j = 0; j < m.n_vars; ++j) {
        if (std::isfinite(m.lower[j]) && r[j] < -tol) return false;
        if (std::isfinite(m.upper[j]) && r[j] > tol) return false;
    }
    for (const auto& row : m.rows) {
        double a = 0.0;
        for (const auto& [j, c] : row.terms) a += c * r[j];
        if (row.rel == Relation::LessEq && a > tol) return false;
        if (row.rel == Relation::GreaterEq && a < -tol) return false;
        if (row.rel == Relation::Equal && std::fabs(a) > tol) return false;
    }
    double cr = 0.0;
    for (int j = 0; j < m.n_vars; ++j) cr += m.objective[j] * r[j];
    return cr < -tol;
}

namespace detail {

inline std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace detail

// Writes the model in the LP text format so results can be cross-checked with
// any external solver. Import is intentionally not supported.
inline std::string to_lp_format(const LpModel& m,
                                const std::function<std::string(int)>& var_name = nullptr) {
    auto name = [&](int j) { return var_name ? var_name(j) : "x" + std::to_string(j); };
    std::string out = "Minimize\n obj:";
    bool any = false;
    for (int j = 0; j < m.n_vars; ++j) {
        if (m.objective[j] == 0.0) continue;
        out += (m.objective[j] >= 0 && any) ? " +" : " ";
        out += detail::num(m.objective[j]) + " " + name(j);
        any = true;
    }
    if (!any) out += " 0 " + name(0 < m.n_vars ? 0 : 0);
    out += "\nSubject To\n";
    for (int i = 0; i < m.n_rows(); ++i) {
        const auto& row = m.rows[i];
        out += " c" + std::to_string(i) + ":";
        if (row.terms.empty()) out += " 0 " + name(0);
        for (const auto& [j, a] : row.terms) {
            out += (a >= 0) ? " +" : " ";
            out += detail::num(a) + " " + name(j);
        }
        out += std::string(" ") + to_string(row.rel) + " " + detail::num(row.rhs) + "\n";
    }
    out += "Bounds\n";
    for (int j = 0; j < m.n_vars; ++j) {
        const double lo = m.lower[j], hi = m.upper[j];
        if (lo == 0.0 && hi == kInf) continue;  // LP-format default
        if (!std::isfinite(lo) && !std::isfinite(hi)) {
            out += " " + name(j) + " free\n";
        } else {
            out += " ";
            if (std::isfinite(lo)) out += detail::num(lo) + " <= ";
            else out += "-inf <= ";
            out += name(j);
            if (std::isfinite(hi)) out += " <= " + detail::num(hi);
            out += "\n";
        }
    }
    out += "End\n";
    return out;
}

}  // namespace orgnet::lp
