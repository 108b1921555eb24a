#include "qptrace/solver.hpp"

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace qptrace {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double eval_expr(const LinExpr& expr, const std::vector<double>& assignment) {
    double v = expr.constant;
    for (const LinTerm& t : expr.terms) v += t.coef * assignment[t.var];
    return v;
}

// ---------------------------------------------------------------------------
// Generic evaluation: given fixed binaries, determine the continuous part in
// closed form. Supported shapes: continuous vars pinned by equality rows with
// a single free unknown, then one-sided bounded vars (the |.| envelope).
// ---------------------------------------------------------------------------

struct EvalResult {
    bool feasible = false;
    std::vector<double> assignment;
    double objective = 0.0;
};

EvalResult evaluate_with_binaries(const MilpModel& model, const std::vector<double>& binvals,
                                  double tol = 1e-9) {
    const size_t nv = model.vars.size();
    std::vector<double> value(nv, 0.0);
    std::vector<char> fixed(nv, 0);
    for (size_t i = 0; i < nv; ++i) {
        if (model.vars[i].kind == VarKind::Binary) {
            value[i] = binvals[i];
            fixed[i] = 1;
        }
    }

    EvalResult out;

    // variables pinned by their own bounds are free information
    for (size_t i = 0; i < nv; ++i) {
        if (!fixed[i] && model.vars[i].lo == model.vars[i].hi) {
            value[i] = model.vars[i].lo;
            fixed[i] = 1;
        }
    }

    // alternate two determination rules until nothing changes:
    //  (a) an equality with a single undetermined variable pins it;
    //  (b) a variable whose every constraint involves only determined
    //      companions sits at the bound its objective sign prefers
    bool progress = true;
    while (progress) {
        progress = false;
        for (const Constraint& c : model.constraints) {
            if (c.sense != Sense::Eq) continue;
            int unknown = -1;
            double unknown_coef = 0.0;
            double rest = c.expr.constant;
            bool multiple = false;
            for (const LinTerm& t : c.expr.terms) {
                if (fixed[t.var]) {
                    rest += t.coef * value[t.var];
                } else if (unknown < 0) {
                    unknown = t.var;
                    unknown_coef = t.coef;
                } else {
                    multiple = true;
                }
            }
            if (unknown < 0 || multiple || unknown_coef == 0.0) continue;
            value[unknown] = (c.rhs - rest) / unknown_coef;
            fixed[unknown] = 1;
            progress = true;
        }
        if (progress) continue;

        for (size_t i = 0; i < nv; ++i) {
            if (fixed[i]) continue;
            double lo = model.vars[i].lo, hi = model.vars[i].hi;
            bool determinable = true;
            for (const Constraint& c : model.constraints) {
                double coef = 0.0, rest = c.expr.constant;
                bool involves = false, undetermined_other = false;
                for (const LinTerm& t : c.expr.terms) {
                    if (t.var == static_cast<int>(i)) {
                        coef = t.coef;
                        involves = true;
                    } else if (fixed[t.var]) {
                        rest += t.coef * value[t.var];
                    } else {
                        undetermined_other = true;
                    }
                }
                if (!involves) continue;
                if (undetermined_other) {
                    determinable = false;
                    break;
                }
                double bound = (c.rhs - rest) / coef;
                bool upper = (c.sense == Sense::Le) == (coef > 0);
                if (c.sense == Sense::Eq) {
                    lo = std::max(lo, bound);
                    hi = std::min(hi, bound);
                } else if (upper) {
                    hi = std::min(hi, bound);
                } else {
                    lo = std::max(lo, bound);
                }
            }
            if (!determinable) continue;
            if (lo > hi + tol) return out;  // infeasible under these binaries
            double obj_coef = 0.0;
            for (const LinTerm& t : model.objective.terms)
                if (t.var == static_cast<int>(i)) obj_coef += t.coef;
            double chosen;
            if (obj_coef > 0.0) {
                if (lo == -kInf) throw SolveError("objective unbounded below");
                chosen = lo;
            } else if (obj_coef < 0.0) {
                if (hi == kInf) throw SolveError("objective unbounded below");
                chosen = hi;
            } else {
                chosen = std::isfinite(lo) ? lo : (std::isfinite(hi) ? hi : 0.0);
            }
            value[i] = chosen;
            fixed[i] = 1;
            progress = true;
            break;  // bounds of later vars may now tighten; restart the scan
        }
    }
    for (size_t i = 0; i < nv; ++i)
        if (!fixed[i])
            throw SolveError(
                "model not supported by the built-in solvers: coupled continuous variables");

    // pass 3: verify everything
    for (size_t i = 0; i < nv; ++i)
        if (value[i] < model.vars[i].lo - tol || value[i] > model.vars[i].hi + tol) return out;
    for (const Constraint& c : model.constraints) {
        double lhs = eval_expr(c.expr, value);
        if (c.sense == Sense::Le && lhs > c.rhs + tol) return out;
        if (c.sense == Sense::Ge && lhs < c.rhs - tol) return out;
        if (c.sense == Sense::Eq && std::abs(lhs - c.rhs) > tol) return out;
    }
    out.feasible = true;
    out.assignment = std::move(value);
    out.objective = eval_expr(model.objective, out.assignment);
    return out;
}

// ---------------------------------------------------------------------------
// Attack-model structure: fit rows with one free residual each, |residual|
// envelopes feeding the objective, and binary-only side constraints.
// ---------------------------------------------------------------------------

struct Structure {
    struct Row {
        double target = 0.0;
        int eps_var = -1;
        int z_var = -1;
        double weight = 0.0;                       // objective weight of z
        std::vector<std::pair<int, double>> bins;  // (binary var, coefficient)
    };
    struct BinCon {
        std::vector<std::pair<int, double>> bins;
        Sense sense;
        double rhs;
    };
    std::vector<Row> rows;
    std::vector<BinCon> bincons;
    std::vector<int> binaries;                       // var ids
    std::vector<std::pair<int, double>> direct_obj;  // binary terms in the objective
    double obj_constant = 0.0;

    std::vector<std::vector<std::pair<int, double>>> var_rows;     // binary -> (row, coef)
    std::vector<std::vector<std::pair<int, double>>> var_bincons;  // binary -> (bincon, coef)

    void index(size_t n_vars) {
        var_rows.assign(n_vars, {});
        var_bincons.assign(n_vars, {});
        for (size_t r = 0; r < rows.size(); ++r)
            for (const auto& [v, c] : rows[r].bins)
                var_rows[v].push_back({static_cast<int>(r), c});
        for (size_t b = 0; b < bincons.size(); ++b)
            for (const auto& [v, c] : bincons[b].bins)
                var_bincons[v].push_back({static_cast<int>(b), c});
    }
};

std::optional<Structure> analyze_structure(const MilpModel& model) {
    Structure s;
    s.obj_constant = model.objective.constant;
    const size_t nv = model.vars.size();

    std::vector<double> obj_coef(nv, 0.0);
    for (const LinTerm& t : model.objective.terms) obj_coef[t.var] += t.coef;

    enum class Role { Unknown, Eps, Z };
    std::vector<Role> role(nv, Role::Unknown);

    for (size_t i = 0; i < nv; ++i) {
        if (model.vars[i].kind == VarKind::Binary) {
            s.binaries.push_back(static_cast<int>(i));
            if (obj_coef[i] != 0.0) s.direct_obj.push_back({static_cast<int>(i), obj_coef[i]});
        }
    }

    std::map<int, int> eps_row;  // eps var -> row index
    std::vector<std::pair<int, int>> abs_links;

    for (const Constraint& c : model.constraints) {
        bool all_binary = true;
        int cont_count = 0;
        for (const LinTerm& t : c.expr.terms) {
            if (model.vars[t.var].kind != VarKind::Binary) {
                all_binary = false;
                ++cont_count;
            }
        }
        if (all_binary) {
            Structure::BinCon bc;
            for (const LinTerm& t : c.expr.terms) bc.bins.push_back({t.var, t.coef});
            bc.sense = c.sense;
            bc.rhs = c.rhs - c.expr.constant;
            s.bincons.push_back(std::move(bc));
            continue;
        }
        if (c.sense == Sense::Eq && cont_count == 1) {
            Structure::Row row;
            bool ok = true;
            for (const LinTerm& t : c.expr.terms) {
                if (model.vars[t.var].kind == VarKind::Binary) {
                    row.bins.push_back({t.var, t.coef});
                } else if (t.coef == 1.0 && role[t.var] != Role::Z) {
                    row.eps_var = t.var;
                } else {
                    ok = false;
                }
            }
            if (!ok || row.eps_var < 0 || eps_row.count(row.eps_var)) return std::nullopt;
            if (obj_coef[row.eps_var] != 0.0) return std::nullopt;
            role[row.eps_var] = Role::Eps;
            row.target = c.rhs - c.expr.constant;
            eps_row[row.eps_var] = static_cast<int>(s.rows.size());
            s.rows.push_back(std::move(row));
            continue;
        }
        // |.| envelope halves: (+/-1 eps) + (-1 z) <= 0
        if (c.sense == Sense::Le && cont_count == 2 && c.expr.terms.size() == 2 &&
            c.expr.constant == 0.0 && c.rhs == 0.0) {
            int eps = -1, z = -1;
            for (const LinTerm& t : c.expr.terms) {
                if (t.coef == -1.0)
                    z = t.var;
                else if (t.coef == 1.0 || t.coef == -1.0)
                    eps = t.var;
            }
            // the -1 slot is ambiguous between (-eps, -z); resolve by objective
            if (z >= 0 && eps < 0) {
                for (const LinTerm& t : c.expr.terms)
                    if (t.var != z) eps = t.var;
            }
            if (eps < 0 || z < 0 || eps == z) return std::nullopt;
            if (obj_coef[z] == 0.0 && obj_coef[eps] != 0.0) std::swap(eps, z);
            role[z] = Role::Z;
            abs_links.push_back({eps, z});
            continue;
        }
        return std::nullopt;  // anything else is not attack-shaped
    }

    // resolve abs pairs: each (eps, z) must appear exactly twice
    std::map<std::pair<int, int>, int> link_count;
    for (auto& [eps, z] : abs_links) link_count[{eps, z}]++;
    for (const auto& [link, count] : link_count) {
        if (count != 2) return std::nullopt;
        auto it = eps_row.find(link.first);
        if (it == eps_row.end()) return std::nullopt;
        Structure::Row& row = s.rows[it->second];
        if (row.z_var >= 0) return std::nullopt;
        row.z_var = link.second;
        row.weight = obj_coef[link.second];
        if (row.weight < 0.0) return std::nullopt;
        if (model.vars[link.second].lo != 0.0) return std::nullopt;
    }
    for (const Structure::Row& row : s.rows)
        if (row.z_var < 0) return std::nullopt;
    // every continuous var must have found a role
    for (size_t i = 0; i < nv; ++i)
        if (model.vars[i].kind == VarKind::Continuous && role[i] == Role::Unknown)
            return std::nullopt;
    // eps must be free, z in the objective only
    for (const auto& [eps, rowidx] : eps_row) {
        if (model.vars[eps].lo != -kInf || model.vars[eps].hi != kInf) return std::nullopt;
    }
    s.index(nv);
    return s;
}

// Completes a structured solution from fixed binaries.
void fill_solution(const MilpModel& model, const Structure& s, std::vector<double>& assignment) {
    for (const Structure::Row& row : s.rows) {
        double sum = 0.0;
        for (const auto& [v, c] : row.bins) sum += c * assignment[v];
        double eps = row.target - sum;
        assignment[row.eps_var] = eps;
        assignment[row.z_var] = std::abs(eps);
    }
    (void)model;
}

bool bincons_satisfied(const Structure& s, const std::vector<double>& assignment, double tol) {
    for (const Structure::BinCon& bc : s.bincons) {
        double lhs = 0.0;
        for (const auto& [v, c] : bc.bins) lhs += c * assignment[v];
        if (bc.sense == Sense::Le && lhs > bc.rhs + tol) return false;
        if (bc.sense == Sense::Ge && lhs < bc.rhs - tol) return false;
        if (bc.sense == Sense::Eq && std::abs(lhs - bc.rhs) > tol) return false;
    }
    return true;
}

double structured_objective(const Structure& s, const std::vector<double>& assignment) {
    double obj = s.obj_constant;
    for (const Structure::Row& row : s.rows) {
        double sum = 0.0;
        for (const auto& [v, c] : row.bins) sum += c * assignment[v];
        obj += row.weight * std::abs(row.target - sum);
    }
    for (const auto& [v, c] : s.direct_obj) obj += c * assignment[v];
    return obj;
}

bool lex_less(const std::vector<double>& a, const std::vector<double>& b,
              const std::vector<int>& binaries) {
    for (int v : binaries) {
        if (a[v] != b[v]) return a[v] < b[v];
    }
    return false;
}

Solution exhaustive_structured(const MilpModel& model, const Structure& s) {
    const size_t nb = s.binaries.size();
    std::vector<double> assignment(model.vars.size(), 0.0);

    // incremental state under bit flips
    std::vector<double> row_sum(s.rows.size(), 0.0);
    std::vector<double> bincon_sum(s.bincons.size(), 0.0);
    int violated = 0;
    double obj = s.obj_constant;
    for (const Structure::Row& row : s.rows) obj += row.weight * std::abs(row.target);

    auto bincon_violated = [&](size_t b) {
        const Structure::BinCon& bc = s.bincons[b];
        double lhs = bincon_sum[b];
        if (bc.sense == Sense::Le) return lhs > bc.rhs + 1e-9;
        if (bc.sense == Sense::Ge) return lhs < bc.rhs - 1e-9;
        return std::abs(lhs - bc.rhs) > 1e-9;
    };
    for (size_t b = 0; b < s.bincons.size(); ++b) violated += bincon_violated(b);

    double best_obj = kInf;
    std::vector<double> best;
    auto consider = [&]() {
        if (violated > 0) return;
        // the running objective drifts under millions of incremental updates;
        // recompute exactly before accepting a candidate
        if (obj > best_obj + 1e-7) return;
        double exact = structured_objective(s, assignment);
        obj = exact;
        if (best.empty() || exact < best_obj ||
            (exact == best_obj && lex_less(assignment, best, s.binaries))) {
            best_obj = exact;
            best = assignment;
        }
    };
    consider();

    auto flip = [&](int v) {
        double delta = assignment[v] > 0.5 ? -1.0 : 1.0;
        assignment[v] += delta;
        for (const auto& [r, c] : s.var_rows[v]) {
            const Structure::Row& row = s.rows[r];
            obj -= row.weight * std::abs(row.target - row_sum[r]);
            row_sum[r] += c * delta;
            obj += row.weight * std::abs(row.target - row_sum[r]);
        }
        for (const auto& [b, c] : s.var_bincons[v]) {
            violated -= bincon_violated(b);
            bincon_sum[b] += c * delta;
            violated += bincon_violated(b);
        }
        for (const auto& [w, c] : s.direct_obj)
            if (w == v) obj += c * delta;
    };

    const uint64_t total = nb >= 63 ? 0 : (1ull << nb);
    for (uint64_t k = 1; k < total; ++k) {
        int bit = __builtin_ctzll(k);
        flip(s.binaries[nb - 1 - bit]);
        if ((k & 0x3ffff) == 0) obj = structured_objective(s, assignment);  // drift resync
        consider();
    }

    Solution sol;
    if (best.empty() && best_obj == kInf) {
        sol.status = SolveStatus::Infeasible;
        return sol;
    }
    fill_solution(model, s, best);
    sol.assignment = std::move(best);
    sol.objective = eval_expr(model.objective, sol.assignment);
    sol.status = SolveStatus::Optimal;
    return sol;
}

}  // namespace

const char* status_name(SolveStatus status) {
    switch (status) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::Feasible: return "feasible";
        case SolveStatus::Infeasible: return "infeasible";
        case SolveStatus::Timeout: return "timeout";
    }
    return "unknown";
}

Solution solve_exhaustive(const MilpModel& model, int max_binaries) {
    auto t0 = std::chrono::steady_clock::now();
    std::vector<int> binaries;
    for (size_t i = 0; i < model.vars.size(); ++i)
        if (model.vars[i].kind == VarKind::Binary) binaries.push_back(static_cast<int>(i));
    if (static_cast<int>(binaries.size()) > max_binaries)
        throw SolveError("exhaustive solver limited to " + std::to_string(max_binaries) +
                         " binaries, model has " + std::to_string(binaries.size()));

    Solution sol;
    if (auto s = analyze_structure(model)) {
        sol = exhaustive_structured(model, *s);
        sol.nodes = static_cast<int64_t>(1) << binaries.size();
        sol.elapsed_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return sol;
    }

    const size_t nb = binaries.size();
    double best_obj = kInf;
    std::vector<double> best;
    std::vector<double> binvals(model.vars.size(), 0.0);
    const uint64_t total = 1ull << nb;
    for (uint64_t k = 0; k < total; ++k) {
        for (size_t i = 0; i < nb; ++i)
            binvals[binaries[i]] = static_cast<double>((k >> (nb - 1 - i)) & 1ull);
        EvalResult r = evaluate_with_binaries(model, binvals);
        if (!r.feasible) continue;
        if (r.objective < best_obj) {  // first hit in lexicographic order wins ties
            best_obj = r.objective;
            best = std::move(r.assignment);
        }
    }
    if (best.empty() && best_obj == kInf) {
        sol.status = SolveStatus::Infeasible;
    } else {
        sol.assignment = std::move(best);
        sol.objective = best_obj;
        sol.status = SolveStatus::Optimal;
    }
    sol.nodes = static_cast<int64_t>(total);
    sol.elapsed_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return sol;
}

namespace {

struct BnbState {
    const MilpModel& model;
    const Structure& s;
    const BnbBudget& budget;
    std::chrono::steady_clock::time_point t0;

    std::vector<int> order;  // binary var ids in branching order
    std::vector<double> assignment;
    std::vector<double> row_sum;
    std::vector<int> row_unfixed;
    std::vector<double> bincon_fixed;
    std::vector<double> bincon_neg_cap;  // sum of min(coef, 0) over unfixed vars
    std::vector<double> bincon_pos_cap;  // sum of max(coef, 0) over unfixed vars
    double bound = 0.0;                  // admissible lower bound at the current node

    double incumbent_obj = kInf;
    std::vector<double> incumbent;
    bool has_incumbent = false;
    int64_t nodes = 0;
    bool aborted = false;

    BnbState(const MilpModel& m, const Structure& st, const BnbBudget& b)
        : model(m), s(st), budget(b), t0(std::chrono::steady_clock::now()) {}

    bool out_of_budget() {
        if (budget.node_limit >= 0 && nodes > budget.node_limit) return true;
        if ((nodes & 1023) == 0) {
            double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                            .count();
            if (budget.time_limit_s > 0 && dt > budget.time_limit_s) return true;
        }
        return false;
    }

    void offer_incumbent(const std::vector<double>& binassign) {
        std::vector<double> full = binassign;
        fill_solution(model, s, full);
        if (!bincons_satisfied(s, full, 1e-9)) return;
        double obj = structured_objective(s, full);
        if (!has_incumbent || obj < incumbent_obj) {
            incumbent_obj = obj;
            incumbent = std::move(full);
            has_incumbent = true;
        }
    }

    // returns false if the subtree is infeasible after this fix
    bool fix(int v, double val, double& bound_delta, std::vector<int>& rows_closed) {
        assignment[v] = val;
        for (const auto& [r, c] : s.var_rows[v]) {
            row_sum[r] += c * val;
            if (--row_unfixed[r] == 0) {
                double add = s.rows[r].weight * std::abs(s.rows[r].target - row_sum[r]);
                bound += add;
                bound_delta += add;
                rows_closed.push_back(r);
            }
        }
        bool feasible = true;
        for (const auto& [b, c] : s.var_bincons[v]) {
            bincon_fixed[b] += c * val;
            if (c < 0)
                bincon_neg_cap[b] -= c;
            else
                bincon_pos_cap[b] -= c;
            const Structure::BinCon& bc = s.bincons[b];
            double min_lhs = bincon_fixed[b] + bincon_neg_cap[b];
            double max_lhs = bincon_fixed[b] + bincon_pos_cap[b];
            if (bc.sense == Sense::Le && min_lhs > bc.rhs + 1e-9) feasible = false;
            if (bc.sense == Sense::Ge && max_lhs < bc.rhs - 1e-9) feasible = false;
            if (bc.sense == Sense::Eq &&
                (min_lhs > bc.rhs + 1e-9 || max_lhs < bc.rhs - 1e-9))
                feasible = false;
        }
        return feasible;
    }

    void unfix(int v, double val, double bound_delta, const std::vector<int>& rows_closed) {
        (void)rows_closed;
        bound -= bound_delta;
        for (const auto& [r, c] : s.var_rows[v]) {
            row_sum[r] -= c * val;
            ++row_unfixed[r];
        }
        for (const auto& [b, c] : s.var_bincons[v]) {
            bincon_fixed[b] -= c * val;
            if (c < 0)
                bincon_neg_cap[b] += c;
            else
                bincon_pos_cap[b] += c;
        }
        assignment[v] = 0.0;
    }

    double direct_coef(int v) const {
        for (const auto& [w, c] : s.direct_obj)
            if (w == v) return c;
        return 0.0;
    }

    void dfs(size_t depth) {
        if (aborted) return;
        ++nodes;
        if (out_of_budget()) {
            aborted = true;
            return;
        }
        if (bound >= incumbent_obj - 1e-12) return;  // cannot improve
        if (depth == order.size()) {
            std::vector<double> full = assignment;
            fill_solution(model, s, full);
            if (!bincons_satisfied(s, full, 1e-9)) return;
            double obj = structured_objective(s, full);
            if (!has_incumbent || obj < incumbent_obj) {
                incumbent_obj = obj;
                incumbent = std::move(full);
                has_incumbent = true;
            }
            return;
        }
        const int v = order[depth];

        // try the locally better value first: does taking the pulse reduce the
        // weighted residual over the rows it touches?
        double gain = direct_coef(v);
        for (const auto& [r, c] : s.var_rows[v]) {
            double res = s.rows[r].target - row_sum[r];
            gain += s.rows[r].weight * (std::abs(res - c) - std::abs(res));
        }
        const double first = gain < 0 ? 1.0 : 0.0;

        for (double val : {first, 1.0 - first}) {
            double bound_delta = 0.0;
            // swap the pending min(0, coef) slack for the realized contribution
            double dc = direct_coef(v);
            double direct_add = 0.0;
            if (dc != 0.0) {
                direct_add = val * dc - std::min(0.0, dc);
                bound += direct_add;
            }
            std::vector<int> rows_closed;
            bool feasible = fix(v, val, bound_delta, rows_closed);
            if (feasible) dfs(depth + 1);
            unfix(v, val, bound_delta, rows_closed);
            if (dc != 0.0) bound -= direct_add;
            if (aborted) return;
        }
    }
};

}  // namespace

Solution solve_bnb(const MilpModel& model, const BnbBudget& budget) {
    auto t0 = std::chrono::steady_clock::now();
    auto st = analyze_structure(model);
    if (!st) {
        if (model.binary_count() <= 25) return solve_exhaustive(model);
        throw SolveError("branch-and-bound requires the attack-model structure");
    }
    const Structure& s = *st;

    BnbState state(model, s, budget);
    state.assignment.assign(model.vars.size(), 0.0);
    state.row_sum.assign(s.rows.size(), 0.0);
    state.row_unfixed.assign(s.rows.size(), 0);
    for (size_t r = 0; r < s.rows.size(); ++r)
        state.row_unfixed[r] = static_cast<int>(s.rows[r].bins.size());
    state.bincon_fixed.assign(s.bincons.size(), 0.0);
    state.bincon_neg_cap.assign(s.bincons.size(), 0.0);
    state.bincon_pos_cap.assign(s.bincons.size(), 0.0);
    for (size_t b = 0; b < s.bincons.size(); ++b)
        for (const auto& [v, c] : s.bincons[b].bins) {
            if (c < 0)
                state.bincon_neg_cap[b] += c;
            else
                state.bincon_pos_cap[b] += c;
        }
    state.bound = s.obj_constant;
    for (const auto& [v, c] : s.direct_obj) state.bound += std::min(0.0, c);
    // rows with no binary coverage are fixed from the start
    for (size_t r = 0; r < s.rows.size(); ++r)
        if (s.rows[r].bins.empty())
            state.bound += s.rows[r].weight * std::abs(s.rows[r].target);

    // branching order: by event start time, then descending energy, then id
    std::vector<double> energy(model.vars.size(), 0.0);
    for (const Structure::Row& row : s.rows)
        for (const auto& [v, c] : row.bins) energy[v] += std::abs(c) * row.weight;
    state.order = s.binaries;
    std::sort(state.order.begin(), state.order.end(), [&](int a, int b) {
        auto ma = model.meta.find(a);
        auto mb = model.meta.find(b);
        int sa = ma != model.meta.end() ? ma->second.start : 0;
        int sb = mb != model.meta.end() ? mb->second.start : 0;
        if (sa != sb) return sa < sb;
        if (energy[a] != energy[b]) return energy[a] > energy[b];
        return a < b;
    });

    // greedy matching pass for the initial incumbent
    {
        std::vector<double> greedy(model.vars.size(), 0.0);
        std::vector<double> residual(s.rows.size(), 0.0);
        for (size_t r = 0; r < s.rows.size(); ++r) residual[r] = s.rows[r].target;
        std::vector<double> bc_sum(s.bincons.size(), 0.0);
        for (int v : state.order) {
            bool blocked = false;
            for (const auto& [b, c] : s.var_bincons[v]) {
                if (s.bincons[b].sense == Sense::Le && bc_sum[b] + c > s.bincons[b].rhs + 1e-9)
                    blocked = true;
            }
            if (blocked) continue;
            double gain = state.direct_coef(v);
            for (const auto& [r, c] : s.var_rows[v])
                gain += s.rows[r].weight * (std::abs(residual[r] - c) - std::abs(residual[r]));
            if (gain < -1e-12) {
                greedy[v] = 1.0;
                for (const auto& [r, c] : s.var_rows[v]) residual[r] -= c;
                for (const auto& [b, c] : s.var_bincons[v]) bc_sum[b] += c;
            }
        }
        state.offer_incumbent(greedy);
        state.offer_incumbent(std::vector<double>(model.vars.size(), 0.0));
    }

    state.dfs(0);

    Solution sol;
    sol.nodes = state.nodes;
    sol.elapsed_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!state.has_incumbent) {
        sol.status = state.aborted ? SolveStatus::Timeout : SolveStatus::Infeasible;
        return sol;
    }
    sol.assignment = std::move(state.incumbent);
    sol.objective = eval_expr(model.objective, sol.assignment);
    sol.status = state.aborted ? SolveStatus::Timeout : SolveStatus::Optimal;
    return sol;
}

namespace {

std::string shell_quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\'')
            out += "'\\''";
        else
            out += c;
    }
    out += "'";
    return out;
}

}  // namespace

Solution solve_external(const MilpModel& model, const std::string& command_template,
                        double timeout_s) {
    if (command_template.find("{lp}") == std::string::npos ||
        command_template.find("{sol}") == std::string::npos)
        throw SolveError("solver command template must contain {lp} and {sol}");

    namespace fs = std::filesystem;
    static int counter = 0;
    std::string stem = "qptrace_" + std::to_string(::getpid()) + "_" + std::to_string(counter++);
    fs::path lp_path = fs::temp_directory_path() / (stem + ".lp");
    fs::path sol_path = fs::temp_directory_path() / (stem + ".sol");

    {
        std::ofstream out(lp_path);
        out << write_lp(model);
    }

    std::string cmd = command_template;
    auto replace_all = [](std::string& text, const std::string& from, const std::string& to) {
        size_t pos = 0;
        while ((pos = text.find(from, pos)) != std::string::npos) {
            text.replace(pos, from.size(), to);
            pos += to.size();
        }
    };
    replace_all(cmd, "{lp}", lp_path.string());
    replace_all(cmd, "{sol}", sol_path.string());
    if (timeout_s > 0)
        cmd = "timeout " + std::to_string(timeout_s) + "s sh -c " + shell_quote(cmd);

    int rc = std::system(cmd.c_str());
    if (rc != 0) {
        std::error_code ec;
        fs::remove(lp_path, ec);
        fs::remove(sol_path, ec);
        throw SolveError("external solver failed with exit code " + std::to_string(rc));
    }

    std::ifstream in(sol_path);
    if (!in) throw SolveError("external solver produced no solution file");
    Solution sol;
    sol.assignment.assign(model.vars.size(), 0.0);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos || line[start] == '#') continue;
        std::istringstream ls(line);
        std::string name;
        double value;
        if (!(ls >> name >> value))
            throw SolveError("unparseable solver output at line " + std::to_string(lineno));
        auto v = model.find_var(name);
        if (!v) throw SolveError("unknown variable '" + name + "' in solver output");
        sol.assignment[v->id] = value;
    }
    std::error_code ec;
    fs::remove(lp_path, ec);
    fs::remove(sol_path, ec);

    // snap binaries that are integral within tolerance
    for (size_t i = 0; i < model.vars.size(); ++i) {
        if (model.vars[i].kind != VarKind::Binary) continue;
        double r = std::round(sol.assignment[i]);
        if (std::abs(sol.assignment[i] - r) <= 1e-6) sol.assignment[i] = r;
    }

    CheckReport report = check_solution(model, sol, 1e-6);
    if (!report.ok())
        throw SolveError("infeasible solution returned: " + report.violations.front().constraint +
                         " violated by " + std::to_string(report.violations.front().amount));
    sol.objective = report.objective;  // trust nothing the solver reported
    sol.status = SolveStatus::Feasible;
    return sol;
}

CheckReport check_solution(const MilpModel& model, const Solution& solution, double tol) {
    if (solution.assignment.size() != model.vars.size())
        throw SolveError("assignment does not cover the model's variables");
    CheckReport report;
    for (size_t i = 0; i < model.vars.size(); ++i) {
        const VarInfo& v = model.vars[i];
        double value = solution.assignment[i];
        if (v.kind == VarKind::Binary && std::abs(value - std::round(value)) > tol)
            report.violations.push_back({"integrality " + v.name,
                                         std::abs(value - std::round(value))});
        if (value < v.lo - tol)
            report.violations.push_back({"bound " + v.name, v.lo - value});
        else if (value > v.hi + tol)
            report.violations.push_back({"bound " + v.name, value - v.hi});
    }
    for (const Constraint& c : model.constraints) {
        double lhs = eval_expr(c.expr, solution.assignment);
        double violation = 0.0;
        if (c.sense == Sense::Le)
            violation = lhs - c.rhs;
        else if (c.sense == Sense::Ge)
            violation = c.rhs - lhs;
        else
            violation = std::abs(lhs - c.rhs);
        if (violation > tol) report.violations.push_back({c.name, violation});
    }
    report.objective = eval_expr(model.objective, solution.assignment);
    return report;
}

PulseSchedule decode_schedule(const MilpModel& model, const Solution& solution) {
    PulseSchedule sched;
    std::map<Channel, std::vector<std::pair<int, int>>> intervals;
    for (const auto& [var_id, meta] : model.meta) {
        if (var_id >= static_cast<int>(solution.assignment.size())) continue;
        if (solution.assignment[var_id] < 0.5) continue;
        sched.events.push_back({meta.label, meta.start});
        for (const auto& [chan, dur] : meta.durations) {
            intervals[chan].emplace_back(meta.start, meta.start + dur);
            sched.total_duration = std::max(sched.total_duration, meta.start + dur);
        }
    }
    for (auto& [chan, list] : intervals) {
        std::sort(list.begin(), list.end());
        for (size_t i = 1; i < list.size(); ++i)
            if (list[i].first < list[i - 1].second)
                throw SolveError("decoded schedule violates the channel constraint on " +
                                 chan.to_string());
    }
    std::sort(sched.events.begin(), sched.events.end(),
              [](const PulseEvent& a, const PulseEvent& b) {
                  if (a.start != b.start) return a.start < b.start;
                  return a.label < b.label;
              });
    return sched;
}

}  // namespace qptrace
