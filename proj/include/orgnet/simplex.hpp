#pragma once
// Two-phase revised simplex for LpModel. Bounded variables, slack-per-row
// internal form, artificial variables in phase 1 (so dual multipliers stay
// aligned with the input rows), sparse LU basis factorization with Markowitz
// pivoting and product-form updates between refactorizations. Dantzig pricing
// by default with an automatic switch to Bland's rule under degenerate
// stalling; Bland can also be forced for anti-cycling guarantees.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "orgnet/lp_model.hpp"

namespace orgnet::lp {

enum class Pricing { Dantzig, Bland };

struct IterateInfo {
    long iteration = 0;
    int phase = 0;
    double primal_objective = 0.0;  // objective of the current phase
    double dual_bound = 0.0;        // Lagrangian bound from the current multipliers
    double step = 0.0;
};

struct SolveOptions {
    double tol_feas = 1e-8;
    double tol_gap = 1e-6;
    long iter_cap = -1;  // < 0: defaults to 50 * (n_vars + n_rows)
    Pricing pricing = Pricing::Dantzig;
    int refactor_interval = 100;
    std::function<void(const IterateInfo&)> on_iterate;  // debug hook, may be empty
};

namespace detail {

// LU factorization of the basis with eta-style L operations and sparse U,
// plus product-form update etas pushed after each basis change.
// ftran solves B x = v (v indexed by row, result by basis position);
// btran solves B'y = v (v indexed by basis position, result by row).
class BasisFactor {
  public:
    // Each column is a list of (row, value) entries. Returns the basis
    // positions that could not be pivoted (empty on success); on deficiency
    // the factorization is unusable and the caller must repair and refactor.
    std::vector<int> factor(int m, const std::function<void(int, std::vector<std::pair<int, double>>&)>& get_col) {
        m_ = m;
        lops_.clear();
        urows_.clear();
        udiag_.clear();
        rowp_.clear();
        colp_.clear();
        updates_.clear();

        rows_.assign(m, {});
        colrows_.assign(m, {});
        row_nnz_.assign(m, 0);
        col_nnz_.assign(m, 0);
        row_active_.assign(m, true);
        col_active_.assign(m, true);

        std::vector<std::pair<int, double>> col;
        for (int p = 0; p < m; ++p) {
            col.clear();
            get_col(p, col);
            for (const auto& [r, v] : col) {
                if (v == 0.0) continue;
                rows_[r].emplace_back(p, v);
                colrows_[p].push_back(r);
                ++row_nnz_[r];
                ++col_nnz_[p];
            }
        }
        row_bucket_.assign(2, {});
        col_bucket_.assign(2, {});
        for (int r = 0; r < m; ++r) push_row_bucket(r);
        for (int p = 0; p < m; ++p) push_col_bucket(p);

        std::vector<int> deficient;
        for (int k = 0; k < m; ++k) {
            int pi = -1, pj = -1;
            if (!select_pivot(pi, pj)) break;
            eliminate(pi, pj);
        }
        for (int p = 0; p < m; ++p)
            if (col_active_[p]) deficient.push_back(p);
        return deficient;
    }

    void ftran(std::vector<double>& v) const {
        for (const auto& op : lops_) {
            const double piv = v[op.pivot_row];
            if (piv != 0.0)
                for (const auto& [r, mult] : op.mults) v[r] -= mult * piv;
        }
        std::vector<double>& x = scratch_;
        x.assign(m_, 0.0);
        for (int k = static_cast<int>(udiag_.size()) - 1; k >= 0; --k) {
            double s = v[rowp_[k]];
            for (const auto& [p, val] : urows_[k]) s -= val * x[p];
            x[colp_[k]] = s / udiag_[k];
        }
        v.swap(x);
        for (const auto& upd : updates_) {
            const double t = v[upd.pos] / upd.wp;
            if (t != 0.0)
                for (const auto& [p, wv] : upd.w) v[p] -= wv * t;
            v[upd.pos] = t;
        }
    }

    void btran(std::vector<double>& v) const {
        for (auto it = updates_.rbegin(); it != updates_.rend(); ++it) {
            double s = v[it->pos];
            for (const auto& [p, wv] : it->w) s -= wv * v[p];
            v[it->pos] = s / it->wp;
        }
        std::vector<double>& y = scratch_;
        y.assign(m_, 0.0);
        for (std::size_t k = 0; k < udiag_.size(); ++k) {
            const double t = v[colp_[k]] / udiag_[k];
            y[rowp_[k]] = t;
            if (t != 0.0)
                for (const auto& [p, val] : urows_[k]) v[p] -= val * t;
        }
        for (int k = static_cast<int>(lops_.size()) - 1; k >= 0; --k) {
            double s = 0.0;
            for (const auto& [r, mult] : lops_[k].mults) s += mult * y[r];
            y[lops_[k].pivot_row] -= s;
        }
        v.swap(y);
    }

    // w = current B^{-1} a_entering; position `pos` leaves the basis.
    void push_update(int pos, const std::vector<double>& w) {
        Update u;
        u.pos = pos;
        u.wp = w[pos];
        for (int i = 0; i < m_; ++i)
            if (i != pos && std::fabs(w[i]) > 1e-14) u.w.emplace_back(i, w[i]);
        updates_.push_back(std::move(u));
    }

    int n_updates() const { return static_cast<int>(updates_.size()); }

  private:
    struct LOp {
        int pivot_row;
        std::vector<std::pair<int, double>> mults;  // v[r] -= mult * v[pivot_row]
    };
    struct Update {
        int pos;
        double wp;
        std::vector<std::pair<int, double>> w;
    };

    int m_ = 0;
    std::vector<LOp> lops_;
    std::vector<std::vector<std::pair<int, double>>> urows_;  // off-diagonals (basis pos, val)
    std::vector<double> udiag_;
    std::vector<int> rowp_, colp_;
    std::vector<Update> updates_;
    mutable std::vector<double> scratch_;

    // Active-submatrix working state (only used inside factor()).
    std::vector<std::vector<std::pair<int, double>>> rows_;  // row -> (col, val)
    std::vector<std::vector<int>> colrows_;                  // col -> rows, lazy
    std::vector<int> row_nnz_, col_nnz_;
    std::vector<char> row_active_, col_active_;
    std::vector<std::vector<int>> row_bucket_, col_bucket_;  // by nnz count, lazy

    static constexpr double kStabilityTau = 0.01;
    static constexpr double kAbsPivotFloor = 1e-11;

    void push_row_bucket(int r) {
        if (!row_active_[r]) return;
        const int c = row_nnz_[r];
        if (c >= static_cast<int>(row_bucket_.size())) row_bucket_.resize(c + 1);
        row_bucket_[c].push_back(r);
    }
    void push_col_bucket(int p) {
        if (!col_active_[p]) return;
        const int c = col_nnz_[p];
        if (c >= static_cast<int>(col_bucket_.size())) col_bucket_.resize(c + 1);
        col_bucket_[c].push_back(p);
    }

    double col_max(int p) {
        double mx = 0.0;
        for (int r : colrows_[p]) {
            if (!row_active_[r]) continue;
            for (const auto& [c, v] : rows_[r])
                if (c == p) mx = std::max(mx, std::fabs(v));
        }
        return mx;
    }

    double entry(int r, int p) const {
        for (const auto& [c, v] : rows_[r])
            if (c == p) return v;
        return 0.0;
    }

    // Markowitz pivot selection over count buckets with a stability threshold.
    bool select_pivot(int& pi, int& pj) {
        long best_merit = -1;
        double best_abs = 0.0;
        int examined = 0;
        const int max_count = std::max(static_cast<int>(row_bucket_.size()),
                                       static_cast<int>(col_bucket_.size()));
        for (int c = 1; c < max_count; ++c) {
            if (c < static_cast<int>(col_bucket_.size())) {
                auto& bucket = col_bucket_[c];
                for (std::size_t bi = 0; bi < bucket.size();) {
                    const int p = bucket[bi];
                    if (!col_active_[p] || col_nnz_[p] != c) {  // stale
                        bucket[bi] = bucket.back();
                        bucket.pop_back();
                        continue;
                    }
                    ++bi;
                    const double cmax = col_max(p);
                    if (cmax <= kAbsPivotFloor) continue;
                    for (int r : colrows_[p]) {
                        if (!row_active_[r]) continue;
                        const double a = entry(r, p);
                        if (a == 0.0 || std::fabs(a) < kStabilityTau * cmax) continue;
                        const long merit =
                            static_cast<long>(row_nnz_[r] - 1) * (c - 1);
                        if (best_merit < 0 || merit < best_merit ||
                            (merit == best_merit && std::fabs(a) > best_abs)) {
                            best_merit = merit;
                            best_abs = std::fabs(a);
                            pi = r;
                            pj = p;
                        }
                    }
                    ++examined;
                }
            }
            if (c < static_cast<int>(row_bucket_.size())) {
                auto& bucket = row_bucket_[c];
                for (std::size_t bi = 0; bi < bucket.size();) {
                    const int r = bucket[bi];
                    if (!row_active_[r] || row_nnz_[r] != c) {
                        bucket[bi] = bucket.back();
                        bucket.pop_back();
                        continue;
                    }
                    ++bi;
                    for (const auto& [p, a] : rows_[r]) {
                        if (!col_active_[p] || a == 0.0) continue;
                        const double cmax = col_max(p);
                        if (cmax <= kAbsPivotFloor || std::fabs(a) < kStabilityTau * cmax)
                            continue;
                        const long merit =
                            static_cast<long>(c - 1) * (col_nnz_[p] - 1);
                        if (best_merit < 0 || merit < best_merit ||
                            (merit == best_merit && std::fabs(a) > best_abs)) {
                            best_merit = merit;
                            best_abs = std::fabs(a);
                            pi = r;
                            pj = p;
                        }
                    }
                    ++examined;
                }
            }
            // Buckets <= c are exhausted, so later candidates have merit >= c.
            if (best_merit >= 0 && (best_merit <= static_cast<long>(c) || examined >= 64))
                return true;
        }
        return best_merit >= 0;
    }

    void eliminate(int pi, int pj) {
        const double pivv = entry(pi, pj);
        const int k = static_cast<int>(udiag_.size());
        rowp_.push_back(pi);
        colp_.push_back(pj);
        udiag_.push_back(pivv);
        row_active_[pi] = false;
        col_active_[pj] = false;

        std::vector<std::pair<int, double>> urow;
        for (const auto& [p, v] : rows_[pi]) {
            if (p == pj || !col_active_[p]) continue;
            urow.emplace_back(p, v);
            --col_nnz_[p];
            push_col_bucket(p);
        }
        urows_.push_back(urow);

        LOp op;
        op.pivot_row = pi;
        for (int r : colrows_[pj]) {
            if (!row_active_[r]) continue;
            double arj = 0.0;
            auto& rr = rows_[r];
            for (std::size_t i = 0; i < rr.size(); ++i) {
                if (rr[i].first == pj) {
                    arj = rr[i].second;
                    rr[i] = rr.back();
                    rr.pop_back();
                    --row_nnz_[r];
                    break;
                }
            }
            if (arj == 0.0) continue;
            const double mult = arj / pivv;
            op.mults.emplace_back(r, mult);
            for (const auto& [p, v] : urows_[k]) {
                bool found = false;
                for (auto& [rc, rv] : rr) {
                    if (rc == p) {
                        rv -= mult * v;
                        found = true;
                        if (std::fabs(rv) < 1e-14) {
                            // defer removal: mark zero, drop below
                            rv = 0.0;
                        }
                        break;
                    }
                }
                if (!found) {
                    const double nv = -mult * v;
                    if (std::fabs(nv) >= 1e-14) {
                        rr.emplace_back(p, nv);
                        colrows_[p].push_back(r);
                        ++col_nnz_[p];
                        ++row_nnz_[r];
                        push_col_bucket(p);
                    }
                }
            }
            // drop exact/near-zero entries created by cancellation
            for (std::size_t i = 0; i < rr.size();) {
                if (rr[i].second == 0.0) {
                    const int p = rr[i].first;
                    rr[i] = rr.back();
                    rr.pop_back();
                    if (col_active_[p]) {
                        --col_nnz_[p];
                        push_col_bucket(p);
                    }
                    --row_nnz_[r];
                } else {
                    ++i;
                }
            }
            push_row_bucket(r);
        }
        colrows_[pj].clear();
        if (!op.mults.empty()) lops_.push_back(std::move(op));
        rows_[pi].clear();
    }
};

}  // namespace detail

// Self-contained exact-arithmetic-free simplex solve. Returns a certified
// LpSolution: primal/dual at Optimal, a Farkas row vector at Infeasible, an
// improving feasible ray at Unbounded. Throws InputError on malformed models
// and ResourceError when the iteration cap is exceeded.
inline LpSolution solve(const LpModel& model, const SolveOptions& opts = SolveOptions{}) {
    model.validate();

    const int n = model.n_vars;
    const int m = model.n_rows();
    const long iter_cap =
        opts.iter_cap >= 0 ? opts.iter_cap : 50L * (static_cast<long>(n) + m);
    const double tol_d = 1e-9;   // pricing (dual) tolerance
    const double tol_piv = 1e-9; // ratio-test pivot tolerance

    // Column layout: structurals [0, n), slacks [n, n+m), artificials appended.
    // Structural columns as CSC; duplicate terms within a row are summed.
    std::vector<std::vector<std::pair<int, double>>> acol(n);
    for (int i = 0; i < m; ++i)
        for (const auto& [j, a] : model.rows[i].terms)
            if (a != 0.0) acol[j].emplace_back(i, a);
    for (auto& col : acol) {
        std::sort(col.begin(), col.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        std::size_t out = 0;
        for (std::size_t i = 0; i < col.size();) {
            int r = col[i].first;
            double v = 0.0;
            while (i < col.size() && col[i].first == r) v += col[i++].second;
            if (v != 0.0) col[out++] = {r, v};
        }
        col.resize(out);
    }

    std::vector<double> lo(n + m), hi(n + m);
    for (int j = 0; j < n; ++j) {
        lo[j] = model.lower[j];
        hi[j] = model.upper[j];
    }
    std::vector<double> rhs(m);
    for (int i = 0; i < m; ++i) {
        rhs[i] = model.rows[i].rhs;
        switch (model.rows[i].rel) {
            case Relation::LessEq: lo[n + i] = 0.0; hi[n + i] = kInf; break;
            case Relation::Equal: lo[n + i] = 0.0; hi[n + i] = 0.0; break;
            case Relation::GreaterEq: lo[n + i] = -kInf; hi[n + i] = 0.0; break;
        }
    }

    std::vector<int> art_row;    // artificial column -> row
    std::vector<double> art_sign;

    auto n_cols = [&]() { return n + m + static_cast<int>(art_row.size()); };
    auto col_lo = [&](int j) { return j < n + m ? lo[j] : 0.0; };
    std::vector<double> art_hi;  // [0,inf) in phase 1, frozen to [0,0] in phase 2
    auto col_hi = [&](int j) { return j < n + m ? hi[j] : art_hi[j - n - m]; };

    auto for_each_entry = [&](int j, auto&& fn) {
        if (j < n) {
            for (const auto& [r, v] : acol[j]) fn(r, v);
        } else if (j < n + m) {
            fn(j - n, 1.0);
        } else {
            fn(art_row[j - n - m], art_sign[j - n - m]);
        }
    };

    enum class CStat : char { Basic, AtLower, AtUpper, FreeZero };
    std::vector<CStat> stat;
    std::vector<int> basis(m, -1);
    std::vector<double> x_basic(m, 0.0);

    auto nb_value = [&](int j) -> double {
        switch (stat[j]) {
            case CStat::AtLower: return col_lo(j);
            case CStat::AtUpper: return col_hi(j);
            default: return 0.0;
        }
    };

    // Initial nonbasic placement for structurals.
    stat.assign(n + m, CStat::AtLower);
    for (int j = 0; j < n; ++j) {
        if (std::isfinite(lo[j])) stat[j] = CStat::AtLower;
        else if (std::isfinite(hi[j])) stat[j] = CStat::AtUpper;
        else stat[j] = CStat::FreeZero;
    }

    // Row residuals at the initial nonbasic point decide slack vs artificial.
    std::vector<double> resid = rhs;
    for (int j = 0; j < n; ++j) {
        const double xj = nb_value(j);
        if (xj != 0.0)
            for (const auto& [r, v] : acol[j]) resid[r] -= v * xj;
    }
    double bscale = 1.0;
    for (int i = 0; i < m; ++i) bscale = std::max(bscale, std::fabs(rhs[i]));

    for (int i = 0; i < m; ++i) {
        const int sj = n + i;
        if (resid[i] >= lo[sj] - 0.0 && resid[i] <= hi[sj] + 0.0) {
            basis[i] = sj;
            stat[sj] = CStat::Basic;
            x_basic[i] = resid[i];
        } else {
            // Clamp the slack to its nearest bound and let an artificial carry
            // the remaining (signed) infeasibility.
            const double sv = std::min(std::max(resid[i], lo[sj]), hi[sj]);
            stat[sj] = (sv == hi[sj] && std::isfinite(hi[sj])) ? CStat::AtUpper : CStat::AtLower;
            const double delta = resid[i] - sv;
            art_row.push_back(i);
            art_sign.push_back(delta > 0 ? 1.0 : -1.0);
            art_hi.push_back(kInf);
            stat.push_back(CStat::Basic);
            basis[i] = n + m + static_cast<int>(art_row.size()) - 1;
            x_basic[i] = std::fabs(delta);
        }
    }

    std::vector<double> cost1(n_cols(), 0.0), cost2(n_cols(), 0.0);
    for (std::size_t a = 0; a < art_row.size(); ++a) cost1[n + m + a] = 1.0;
    for (int j = 0; j < n; ++j) cost2[j] = model.objective[j];

    detail::BasisFactor factor;
    bool need_refactor = true;
    long iterations = 0, phase1_iterations = 0;

    std::vector<double> work(m), cb(m), y(m), w(m);

    auto get_basis_col = [&](int p, std::vector<std::pair<int, double>>& out) {
        for_each_entry(basis[p], [&](int r, double v) { out.emplace_back(r, v); });
    };

    auto recompute_x_basic = [&]() {
        std::vector<double> v = rhs;
        for (int j = 0; j < n_cols(); ++j) {
            if (stat[j] == CStat::Basic) continue;
            const double xj = nb_value(j);
            if (xj != 0.0)
                for_each_entry(j, [&](int r, double a) { v[r] -= a * xj; });
        }
        factor.ftran(v);
        x_basic = v;
    };

    auto refactorize = [&]() {
        for (int attempt = 0; attempt < m + 1; ++attempt) {
            auto deficient = factor.factor(m, get_basis_col);
            if (deficient.empty()) break;
            // Basis repair: pair each unpivotable position with a row whose
            // slack is nonbasic and make that slack basic instead. Rare;
            // correctness only.
            std::vector<char> slack_basic(m, false);
            for (int p = 0; p < m; ++p)
                if (basis[p] >= n && basis[p] < n + m) slack_basic[basis[p] - n] = true;
            std::size_t di = 0;
            for (int r = 0; r < m && di < deficient.size(); ++r) {
                if (slack_basic[r]) continue;
                const int p = deficient[di];
                const int old = basis[p];
                stat[old] = std::isfinite(col_lo(old)) ? CStat::AtLower
                            : std::isfinite(col_hi(old)) ? CStat::AtUpper
                                                         : CStat::FreeZero;
                basis[p] = n + r;
                stat[n + r] = CStat::Basic;
                slack_basic[r] = true;
                ++di;
            }
            if (di < deficient.size())
                throw ResourceError("simplex: unable to repair singular basis");
        }
        recompute_x_basic();
        need_refactor = false;
    };

    auto primal_objective = [&](const std::vector<double>& cost) {
        double obj = 0.0;
        for (int j = 0; j < n_cols(); ++j)
            if (stat[j] != CStat::Basic && cost[j] != 0.0) obj += cost[j] * nb_value(j);
        for (int p = 0; p < m; ++p) obj += cost[basis[p]] * x_basic[p];
        return obj;
    };

    enum class PhaseEnd { Optimal, Unbounded };
    int entering_sigma = 0;
    std::vector<double> ray;  // filled on Unbounded

    auto run_phase = [&](int phase, const std::vector<double>& cost) -> PhaseEnd {
        bool bland = opts.pricing == Pricing::Bland;
        int degen_streak = 0;
        const int bland_after = 100 + m / 4;

        while (true) {
            if (iterations >= iter_cap)
                throw ResourceError("simplex: iteration cap exceeded (" +
                                    std::to_string(iter_cap) + ")");
            if (need_refactor || factor.n_updates() >= opts.refactor_interval) refactorize();

            for (int p = 0; p < m; ++p) cb[p] = cost[basis[p]];
            y = cb;
            factor.btran(y);

            auto lagrangian_bound = [&]() {
                double db = 0.0;
                for (int i = 0; i < m; ++i) db += y[i] * rhs[i];
                for (int j = 0; j < n_cols(); ++j) {
                    double d = cost[j];
                    for_each_entry(j, [&](int r, double a) { d -= y[r] * a; });
                    if (std::fabs(d) <= tol_d) continue;
                    if (d > 0)
                        db += std::isfinite(col_lo(j)) ? d * col_lo(j) : -kInf;
                    else
                        db += std::isfinite(col_hi(j)) ? d * col_hi(j) : -kInf;
                }
                return db;
            };

            // Pricing.
            auto price = [&]() -> std::pair<int, int> {
                int q = -1, sigma = 0;
                double best = tol_d;
                for (int j = 0; j < n_cols(); ++j) {
                    if (stat[j] == CStat::Basic) continue;
                    if (col_lo(j) == col_hi(j)) continue;  // fixed (incl. frozen artificials)
                    double d = cost[j];
                    for_each_entry(j, [&](int r, double a) { d -= y[r] * a; });
                    int s = 0;
                    if (stat[j] == CStat::AtLower && d < -best) s = 1;
                    else if (stat[j] == CStat::AtUpper && d > best) s = -1;
                    else if (stat[j] == CStat::FreeZero && std::fabs(d) > best) s = d > 0 ? -1 : 1;
                    if (s != 0) {
                        q = j;
                        sigma = s;
                        if (bland) break;
                        best = std::fabs(d);
                    }
                }
                return {q, sigma};
            };
            auto [q, sigma] = price();
            if (q < 0) {
                // Only certify optimality from a fresh factorization: stale
                // update etas can make the multipliers lie.
                if (factor.n_updates() == 0) return PhaseEnd::Optimal;
                refactorize();
                for (int p = 0; p < m; ++p) cb[p] = cost[basis[p]];
                y = cb;
                factor.btran(y);
                std::tie(q, sigma) = price();
                if (q < 0) return PhaseEnd::Optimal;
            }

            // Direction.
            std::fill(w.begin(), w.end(), 0.0);
            for_each_entry(q, [&](int r, double a) { w[r] = a; });
            factor.ftran(w);

            // Ratio test.
            double t_best = kInf;
            int leave_pos = -1;
            double leave_target = 0.0;
            double best_pivot = 0.0;
            for (int p = 0; p < m; ++p) {
                if (std::fabs(w[p]) <= tol_piv) continue;
                const double rho = -sigma * w[p];
                const int bj = basis[p];
                double t, target;
                if (rho > 0) {
                    if (!std::isfinite(col_hi(bj))) continue;
                    t = (col_hi(bj) - x_basic[p]) / rho;
                    target = col_hi(bj);
                } else {
                    if (!std::isfinite(col_lo(bj))) continue;
                    t = (col_lo(bj) - x_basic[p]) / rho;
                    target = col_lo(bj);
                }
                if (t < 0) t = 0;
                bool better;
                if (bland) {
                    better = t < t_best - 1e-12 ||
                             (t <= t_best + 1e-12 && (leave_pos < 0 || bj < basis[leave_pos]));
                } else {
                    better = t < t_best - 1e-12 ||
                             (t <= t_best + 1e-12 && std::fabs(w[p]) > best_pivot);
                }
                if (better) {
                    t_best = t;
                    leave_pos = p;
                    leave_target = target;
                    best_pivot = std::fabs(w[p]);
                }
            }
            const double lq = col_lo(q), hq = col_hi(q);
            const double t_flip = (std::isfinite(lq) && std::isfinite(hq)) ? hq - lq : kInf;

            const bool is_flip = std::isfinite(t_flip) && t_flip <= t_best;
            if (!is_flip && factor.n_updates() > 0) {
                // An unstable pivot through a long eta chain corrupts the
                // factors, and unboundedness must not be declared from stale
                // ones; in both cases redo the iteration freshly factorized.
                if (leave_pos < 0 || std::fabs(w[leave_pos]) < 1e-7) {
                    need_refactor = true;
                    continue;
                }
            }

            ++iterations;
            if (phase == 1) ++phase1_iterations;

            if (is_flip) {
                // Bound flip, no basis change.
                for (int p = 0; p < m; ++p)
                    if (w[p] != 0.0) x_basic[p] -= sigma * t_flip * w[p];
                stat[q] = stat[q] == CStat::AtLower ? CStat::AtUpper : CStat::AtLower;
                degen_streak = 0;
                if (opts.on_iterate)
                    opts.on_iterate({iterations, phase, primal_objective(cost),
                                     lagrangian_bound(), t_flip});
                continue;
            }
            if (leave_pos < 0) {
                // No blocking variable: unbounded direction.
                entering_sigma = sigma;
                ray.assign(n, 0.0);
                if (q < n) ray[q] = sigma;
                for (int p = 0; p < m; ++p)
                    if (basis[p] < n) ray[basis[p]] = -sigma * w[p];
                return PhaseEnd::Unbounded;
            }

            const double t = t_best;
            const double xq_new = nb_value(q) + sigma * t;
            for (int p = 0; p < m; ++p)
                if (w[p] != 0.0) x_basic[p] -= sigma * t * w[p];
            const int leaving = basis[leave_pos];
            stat[leaving] = (leave_target == col_hi(leaving) && std::isfinite(col_hi(leaving)))
                                ? CStat::AtUpper
                                : CStat::AtLower;
            basis[leave_pos] = q;
            stat[q] = CStat::Basic;
            x_basic[leave_pos] = xq_new;
            factor.push_update(leave_pos, w);

            if (t <= 1e-12) {
                if (++degen_streak > bland_after) bland = true;
            } else {
                degen_streak = 0;
                if (opts.pricing == Pricing::Dantzig) bland = false;
            }

            if (opts.on_iterate)
                opts.on_iterate({iterations, phase, primal_objective(cost),
                                 lagrangian_bound(), t});
        }
    };

    LpSolution sol;

    // Phase 1: minimize the artificial infeasibility sum.
    if (!art_row.empty()) {
        refactorize();
        const PhaseEnd end = run_phase(1, cost1);
        if (end == PhaseEnd::Unbounded)
            throw ResourceError("simplex: phase 1 reported unbounded (numerical failure)");
        // Fresh factorization for an accurate infeasibility measure.
        refactorize();
        const double infeas = primal_objective(cost1);
        if (infeas > opts.tol_feas * (1.0 + bscale)) {
            sol.status = SolveStatus::Infeasible;
            sol.objective = kInf;
            for (int p = 0; p < m; ++p) cb[p] = cost1[basis[p]];
            y = cb;
            factor.btran(y);
            sol.certificate = y;
            sol.iterations = iterations;
            sol.phase1_iterations = phase1_iterations;
            return sol;
        }
        // Freeze artificials at zero for phase 2.
        for (std::size_t a = 0; a < art_row.size(); ++a) art_hi[a] = 0.0;
        for (int p = 0; p < m; ++p)
            if (basis[p] >= n + m && std::fabs(x_basic[p]) <= opts.tol_feas) x_basic[p] = 0.0;
    } else {
        refactorize();
    }

    // Phase 2.
    const PhaseEnd end = run_phase(2, cost2);
    if (end == PhaseEnd::Unbounded) {
        sol.status = SolveStatus::Unbounded;
        sol.objective = -kInf;
        sol.certificate = ray;
        sol.primal.assign(n, 0.0);
        for (int j = 0; j < n; ++j)
            if (stat[j] != CStat::Basic) sol.primal[j] = nb_value(j);
        for (int p = 0; p < m; ++p)
            if (basis[p] < n) sol.primal[basis[p]] = x_basic[p];
        sol.iterations = iterations;
        sol.phase1_iterations = phase1_iterations;
        return sol;
    }

    // Final refresh for accuracy, then extract.
    refactorize();
    sol.status = SolveStatus::Optimal;
    sol.primal.assign(n, 0.0);
    for (int j = 0; j < n; ++j)
        if (stat[j] != CStat::Basic) sol.primal[j] = nb_value(j);
    for (int p = 0; p < m; ++p)
        if (basis[p] < n) sol.primal[basis[p]] = x_basic[p];
    for (int p = 0; p < m; ++p) cb[p] = cost2[basis[p]];
    y = cb;
    factor.btran(y);
    sol.dual = y;
    sol.reduced_costs.assign(n, 0.0);
    for (int j = 0; j < n; ++j) {
        double d = model.objective[j];
        for (const auto& [r, a] : acol[j]) d -= y[r] * a;
        sol.reduced_costs[j] = d;
    }
    double obj = 0.0;
    for (int j = 0; j < n; ++j) obj += model.objective[j] * sol.primal[j];
    sol.objective = obj;
    sol.iterations = iterations;
    sol.phase1_iterations = phase1_iterations;
    return sol;
}

}  // namespace orgnet::lp
