#pragma once

#include <limits>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "qptrace/tracesim.hpp"

namespace qptrace {

enum class VarKind { Binary, Continuous };

struct VarRef {
    int id = -1;
    bool valid() const { return id >= 0; }
};

struct VarInfo {
    std::string name;
    VarKind kind = VarKind::Continuous;
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
};

struct LinTerm {
    double coef;
    int var;
};

// Linear expression; canonicalize() sorts terms by variable id, merges
// duplicates and drops zero coefficients.
struct LinExpr {
    std::vector<LinTerm> terms;
    double constant = 0.0;

    LinExpr() = default;
    LinExpr(double coef, VarRef v) { terms.push_back({coef, v.id}); }

    LinExpr& add(double coef, VarRef v) {
        terms.push_back({coef, v.id});
        return *this;
    }
    LinExpr& add(double c) {
        constant += c;
        return *this;
    }
    void canonicalize();
};

enum class Sense { Le, Ge, Eq };

struct Constraint {
    std::string name;
    LinExpr expr;  // constant folded into rhs at serialization
    Sense sense = Sense::Le;
    double rhs = 0.0;
};

// What a decision variable means in schedule terms.
struct EventMeta {
    Label label;
    int start = 0;
    std::vector<std::pair<Channel, int>> durations;  // channel occupation lengths
};

struct MilpModel {
    std::vector<VarInfo> vars;
    std::vector<Constraint> constraints;
    LinExpr objective;  // minimized
    std::map<int, EventMeta> meta;

    VarRef add_binary(const std::string& name);
    VarRef add_continuous(const std::string& name,
                          double lo = -std::numeric_limits<double>::infinity(),
                          double hi = std::numeric_limits<double>::infinity());
    void add_constraint(const std::string& name, LinExpr expr, Sense sense, double rhs);
    std::optional<VarRef> find_var(const std::string& name) const;
    const Constraint* find_constraint(const std::string& name) const;
    int binary_count() const;

private:
    std::unordered_map<std::string, int> var_index_;
    std::unordered_map<std::string, int> constraint_index_;
};

// |expr| <= Z via expr <= Z and -expr <= Z; Z is continuous with lo 0. The
// caller adds Z to the objective. Names: z_<tag>, abs_p_<tag>, abs_n_<tag>.
VarRef add_abs(MilpModel& model, const LinExpr& expr, const std::string& tag);

// y = x1 OR x2 over binaries: y >= x1, y >= x2, y <= x1 + x2.
VarRef encode_or(MilpModel& model, VarRef x1, VarRef x2, const std::string& name);

// x1 + ... + xn (sense) k over binaries, unit weights.
void add_pseudo_boolean(MilpModel& model, const std::vector<VarRef>& vars, Sense sense, int k,
                        const std::string& name);

struct Disjunct {
    LinExpr expr;  // expr <= rhs when active
    double rhs;
};

// Big-M reformulation of expr1 <= rhs1 OR ... OR exprK <= rhsK. Each
// alternative j gets an indicator y_j, the constraint is relaxed by
// M_j (1 - y_j) with M_j = sum_i |a_i| + |rhs| + 1, and sum_j y_j >= 1.
std::vector<VarRef> add_bigm_disjunction(MilpModel& model, const std::vector<Disjunct>& alts,
                                         const std::string& name_prefix);

struct AttackModelOptions {
    int grid = 0;                 // start-time grid; 0 = library alignment
    double prune_threshold = 0.5; // candidate kept iff window energy >= thr * pulse energy
    int sample_stride = 1;        // fit/channel constraints every `stride` samples
    bool unique_gates = false;    // per-label at-most-one constraints
};

// Total-power reconstruction model. For every power-bearing label l and grid
// start t, a binary a_<labelIdx>_<t>; per sampled time x an equality
//   sum a_{l,t} P_l(x-t) + e_x = v(x)
// with e_x free; per channel and sampled x an at-most-one constraint over the
// variables occupying it; objective = sum_x z_x with z_x = |e_x|.
MilpModel build_attack_model(const PowerTrace& total_trace, const PulseLibrary& lib,
                             const AttackModelOptions& opts = {});

// LP text in the fixed grammar subset; deterministic (vars by id, constraints
// by insertion order).
std::string write_lp(const MilpModel& model);
MilpModel parse_lp(const std::string& text);

// Name-keyed structural equality: same variables (kind, bounds), same
// objective and same constraints with terms resolved by variable name.
// Variable ids may differ between the two models.
bool models_equivalent(const MilpModel& a, const MilpModel& b, double tol = 0.0);

// Variable-name -> (gate, qubits, start) sidecar for attack models.
nlohmann::json model_meta_to_json(const MilpModel& model);

struct ModelStats {
    int binaries = 0;
    int continuous = 0;
    int constraints = 0;
};
ModelStats model_stats(const MilpModel& model);

}  // namespace qptrace
