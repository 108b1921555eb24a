#include "qptrace/milp.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

namespace qptrace {

void LinExpr::canonicalize() {
    std::sort(terms.begin(), terms.end(),
              [](const LinTerm& a, const LinTerm& b) { return a.var < b.var; });
    std::vector<LinTerm> merged;
    for (const LinTerm& t : terms) {
        if (!merged.empty() && merged.back().var == t.var)
            merged.back().coef += t.coef;
        else
            merged.push_back(t);
    }
    merged.erase(std::remove_if(merged.begin(), merged.end(),
                                [](const LinTerm& t) { return t.coef == 0.0; }),
                 merged.end());
    terms = std::move(merged);
}

VarRef MilpModel::add_binary(const std::string& name) {
    if (var_index_.count(name)) throw ValidationError("duplicate variable name " + name);
    VarInfo v{name, VarKind::Binary, 0.0, 1.0};
    vars.push_back(std::move(v));
    var_index_[name] = static_cast<int>(vars.size()) - 1;
    return {static_cast<int>(vars.size()) - 1};
}

VarRef MilpModel::add_continuous(const std::string& name, double lo, double hi) {
    if (var_index_.count(name)) throw ValidationError("duplicate variable name " + name);
    VarInfo v{name, VarKind::Continuous, lo, hi};
    vars.push_back(std::move(v));
    var_index_[name] = static_cast<int>(vars.size()) - 1;
    return {static_cast<int>(vars.size()) - 1};
}

void MilpModel::add_constraint(const std::string& name, LinExpr expr, Sense sense, double rhs) {
    if (constraint_index_.count(name)) throw ValidationError("duplicate constraint name " + name);
    expr.canonicalize();
    for (const LinTerm& t : expr.terms)
        if (t.var < 0 || t.var >= static_cast<int>(vars.size()))
            throw ValidationError("constraint " + name + " references an undeclared variable");
    constraints.push_back({name, std::move(expr), sense, rhs});
    constraint_index_[name] = static_cast<int>(constraints.size()) - 1;
}

std::optional<VarRef> MilpModel::find_var(const std::string& name) const {
    auto it = var_index_.find(name);
    if (it == var_index_.end()) return std::nullopt;
    return VarRef{it->second};
}

const Constraint* MilpModel::find_constraint(const std::string& name) const {
    auto it = constraint_index_.find(name);
    return it == constraint_index_.end() ? nullptr : &constraints[it->second];
}

int MilpModel::binary_count() const {
    int n = 0;
    for (const VarInfo& v : vars) n += v.kind == VarKind::Binary;
    return n;
}

VarRef add_abs(MilpModel& model, const LinExpr& expr, const std::string& tag) {
    VarRef z = model.add_continuous("z_" + tag, 0.0);
    LinExpr pos = expr;
    pos.add(-1.0, z);
    double rhs_p = -pos.constant;
    pos.constant = 0.0;
    model.add_constraint("abs_p_" + tag, pos, Sense::Le, rhs_p);
    LinExpr neg;
    for (const LinTerm& t : expr.terms) neg.add(-t.coef, VarRef{t.var});
    neg.add(-1.0, z);
    model.add_constraint("abs_n_" + tag, neg, Sense::Le, expr.constant);
    return z;
}

VarRef encode_or(MilpModel& model, VarRef x1, VarRef x2, const std::string& name) {
    for (VarRef x : {x1, x2})
        if (!x.valid() || model.vars[x.id].kind != VarKind::Binary)
            throw ValidationError("encode_or requires binary arguments");
    VarRef y = model.add_binary(name);
    model.add_constraint(name + "_ge1", LinExpr(1.0, y).add(-1.0, x1), Sense::Ge, 0.0);
    model.add_constraint(name + "_ge2", LinExpr(1.0, y).add(-1.0, x2), Sense::Ge, 0.0);
    model.add_constraint(name + "_le", LinExpr(1.0, y).add(-1.0, x1).add(-1.0, x2), Sense::Le,
                         0.0);
    return y;
}

void add_pseudo_boolean(MilpModel& model, const std::vector<VarRef>& vars, Sense sense, int k,
                        const std::string& name) {
    if (vars.empty()) throw ValidationError("pseudo-boolean constraint over no variables");
    if (k < 0) throw ValidationError("pseudo-boolean bound must be >= 0");
    LinExpr expr;
    for (VarRef v : vars) {
        if (!v.valid() || model.vars[v.id].kind != VarKind::Binary)
            throw ValidationError("pseudo-boolean constraints require binary variables");
        expr.add(1.0, v);
    }
    model.add_constraint(name, std::move(expr), sense, k);
}

std::vector<VarRef> add_bigm_disjunction(MilpModel& model, const std::vector<Disjunct>& alts,
                                         const std::string& name_prefix) {
    if (alts.empty()) throw ValidationError("disjunction over no alternatives");
    std::vector<VarRef> indicators;
    for (size_t j = 0; j < alts.size(); ++j) {
        for (const LinTerm& t : alts[j].expr.terms)
            if (!std::isfinite(t.coef))
                throw ValidationError("disjunct coefficients must be finite");
        VarRef y = model.add_binary(name_prefix + "_y" + std::to_string(j));
        indicators.push_back(y);
        LinExpr relaxed = alts[j].expr;
        double folded_rhs = alts[j].rhs - relaxed.constant;
        relaxed.constant = 0.0;
        double big_m = std::abs(folded_rhs) + 1.0;
        for (const LinTerm& t : relaxed.terms) big_m += std::abs(t.coef);
        // expr <= rhs + M (1 - y)   <=>   expr + M y <= rhs + M
        relaxed.add(big_m, y);
        model.add_constraint(name_prefix + "_alt" + std::to_string(j), std::move(relaxed),
                             Sense::Le, folded_rhs + big_m);
    }
    add_pseudo_boolean(model, indicators, Sense::Ge, 1, name_prefix + "_pick");
    return indicators;
}

MilpModel build_attack_model(const PowerTrace& total_trace, const PulseLibrary& lib,
                             const AttackModelOptions& opts) {
    if (!total_trace.is_total())
        throw ValidationError("attack model needs a total-power trace");
    const int grid = opts.grid > 0 ? opts.grid : lib.alignment;
    if (grid % lib.alignment != 0)
        throw ValidationError("grid must be a multiple of the library alignment");
    if (opts.sample_stride <= 0) throw ValidationError("sample stride must be positive");
    const auto& v = total_trace.samples;
    const int n = static_cast<int>(v.size());

    struct Candidate {
        int label_idx;
        int start;
        std::vector<double> contribution;  // P_l(k), k in [0, max duration)
        VarRef var;
    };

    MilpModel model;
    std::vector<Candidate> candidates;

    for (size_t li = 0; li < lib.pulses.size(); ++li) {
        const BasisPulse& pulse = lib.pulses[li];
        if (!pulse.label.emits_power()) continue;
        const int d_max = pulse.max_duration();
        std::vector<double> contribution(d_max, 0.0);
        for (const auto& [chan, wf] : pulse.waveforms)
            for (size_t k = 0; k < wf.size(); ++k) contribution[k] += std::norm(wf[k]);
        double pulse_energy = 0.0;
        for (double p : contribution) pulse_energy += p;
        if (pulse_energy <= 0.0) continue;

        for (int t = 0; t + d_max <= n; t += grid) {
            if (opts.prune_threshold > 0.0) {
                double window = 0.0;
                for (int k = 0; k < d_max; ++k)
                    if (contribution[k] > 0.0) window += v[t + k];
                if (window < opts.prune_threshold * pulse_energy) continue;
            }
            candidates.push_back({static_cast<int>(li), t, contribution, VarRef{}});
        }
    }

    double trace_energy = 0.0;
    for (double s : v) trace_energy += std::abs(s);
    if (candidates.empty() && trace_energy > 1e-9)
        throw ValidationError(
            "no decision variables survive pruning although the trace carries energy; "
            "lower prune_threshold or refine the grid");

    for (Candidate& c : candidates) {
        c.var = model.add_binary("a_" + std::to_string(c.label_idx) + "_" +
                                 std::to_string(c.start));
        const BasisPulse& pulse = lib.pulses[c.label_idx];
        EventMeta meta;
        meta.label = pulse.label;
        meta.start = c.start;
        for (const auto& [chan, wf] : pulse.waveforms)
            meta.durations.emplace_back(chan, static_cast<int>(wf.size()));
        model.meta[c.var.id] = std::move(meta);
    }

    // fit constraints and their free residuals
    std::vector<VarRef> eps(n, VarRef{});
    for (int x = 0; x < n; x += opts.sample_stride) {
        LinExpr fit;
        for (const Candidate& c : candidates) {
            int k = x - c.start;
            if (k < 0 || k >= static_cast<int>(c.contribution.size())) continue;
            if (c.contribution[k] == 0.0) continue;
            fit.add(c.contribution[k], c.var);
        }
        eps[x] = model.add_continuous("e_" + std::to_string(x));
        fit.add(1.0, eps[x]);
        model.add_constraint("fit_" + std::to_string(x), std::move(fit), Sense::Eq, v[x]);
    }

    // channel constraints: at most one pulse per channel per sampled step
    const int n_qubits = lib.device.n_qubits;
    for (Channel chan : build_channels(lib.device)) {
        const int ci = chan.canonical_index(n_qubits);
        for (int x = 0; x < n; x += opts.sample_stride) {
            LinExpr sum;
            int terms = 0;
            for (const Candidate& c : candidates) {
                const BasisPulse& pulse = lib.pulses[c.label_idx];
                const auto* wf = pulse.waveform(chan);
                if (!wf) continue;
                int k = x - c.start;
                if (k < 0 || k >= static_cast<int>(wf->size())) continue;
                sum.add(1.0, c.var);
                ++terms;
            }
            if (terms >= 2)
                model.add_constraint("ch_" + std::to_string(ci) + "_" + std::to_string(x),
                                     std::move(sum), Sense::Le, 1.0);
        }
    }

    if (opts.unique_gates) {
        std::map<int, std::vector<VarRef>> by_label;
        for (const Candidate& c : candidates) by_label[c.label_idx].push_back(c.var);
        for (const auto& [li, vars] : by_label)
            add_pseudo_boolean(model, vars, Sense::Le, 1, "uniq_" + std::to_string(li));
    }

    for (int x = 0; x < n; x += opts.sample_stride) {
        VarRef z = add_abs(model, LinExpr(1.0, eps[x]), std::to_string(x));
        model.objective.add(1.0, z);
    }
    model.objective.canonicalize();
    return model;
}

namespace {

std::string fmt_num(double v) {
    if (v == std::numeric_limits<double>::infinity()) return "inf";
    if (v == -std::numeric_limits<double>::infinity()) return "-inf";
    if (v == 0.0) return "0";
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string fmt_expr(const LinExpr& expr, const std::vector<VarInfo>& vars) {
    std::string out;
    bool first = true;
    for (const LinTerm& t : expr.terms) {
        double c = t.coef;
        if (first) {
            if (c < 0) out += "-";
        } else {
            out += c < 0 ? " - " : " + ";
        }
        double mag = std::abs(c);
        if (mag != 1.0) {
            out += fmt_num(mag);
            out += " ";
        }
        out += vars[t.var].name;
        first = false;
    }
    if (expr.constant != 0.0) {
        if (first)
            out += fmt_num(expr.constant);
        else
            out += (expr.constant < 0 ? " - " : " + ") + fmt_num(std::abs(expr.constant));
        first = false;
    }
    if (first) out = "0";
    return out;
}

const char* sense_token(Sense s) {
    switch (s) {
        case Sense::Le: return "<=";
        case Sense::Ge: return ">=";
        case Sense::Eq: return "=";
    }
    return "=";
}

}  // namespace

std::string write_lp(const MilpModel& model) {
    std::string out;
    LinExpr obj = model.objective;
    obj.canonicalize();
    out += "Minimize\n obj: " + fmt_expr(obj, model.vars) + "\n";
    out += "Subject To\n";
    for (const Constraint& c : model.constraints) {
        LinExpr expr = c.expr;
        expr.canonicalize();
        double rhs = c.rhs - expr.constant;
        expr.constant = 0.0;
        out += " " + c.name + ": " + fmt_expr(expr, model.vars) + " " + sense_token(c.sense) +
               " " + fmt_num(rhs) + "\n";
    }
    std::string bounds;
    const double inf = std::numeric_limits<double>::infinity();
    for (const VarInfo& v : model.vars) {
        if (v.kind == VarKind::Binary) continue;
        if (v.lo == 0.0 && v.hi == inf) continue;  // LP default
        if (v.lo == -inf && v.hi == inf)
            bounds += " " + v.name + " free\n";
        else
            bounds += " " + fmt_num(v.lo) + " <= " + v.name + " <= " + fmt_num(v.hi) + "\n";
    }
    if (!bounds.empty()) out += "Bounds\n" + bounds;
    std::string binaries;
    std::string line;
    for (const VarInfo& v : model.vars) {
        if (v.kind != VarKind::Binary) continue;
        if (!line.empty() && line.size() + 1 + v.name.size() > 250) {
            binaries += " " + line + "\n";
            line.clear();
        }
        if (!line.empty()) line += " ";
        line += v.name;
    }
    if (!line.empty()) binaries += " " + line + "\n";
    if (!binaries.empty()) out += "Binary\n" + binaries;
    out += "End\n";
    return out;
}

namespace {

struct LpToken {
    enum class Kind { Ident, Number, Symbol, End } kind;
    std::string text;
    double number = 0.0;
    int line = 1;
};

class LpLexer {
public:
    explicit LpLexer(const std::string& text) : text_(text) {}

    LpToken next() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '\n') {
                ++line_;
                ++pos_;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_;
            } else if (c == '\\') {  // LP comment to end of line
                while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
            } else {
                break;
            }
        }
        LpToken t;
        t.line = line_;
        if (pos_ >= text_.size()) {
            t.kind = LpToken::Kind::End;
            return t;
        }
        char c = text_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t start = pos_;
            while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                                           text_[pos_] == '_' || text_[pos_] == '.'))
                ++pos_;
            t.kind = LpToken::Kind::Ident;
            t.text = text_.substr(start, pos_ - start);
            return t;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.' ||
                    text_[pos_] == 'e' || text_[pos_] == 'E' ||
                    ((text_[pos_] == '+' || text_[pos_] == '-') &&
                     (text_[pos_ - 1] == 'e' || text_[pos_ - 1] == 'E'))))
                ++pos_;
            t.kind = LpToken::Kind::Number;
            t.text = text_.substr(start, pos_ - start);
            t.number = std::stod(t.text);
            return t;
        }
        if ((c == '<' || c == '>') && pos_ + 1 < text_.size() && text_[pos_ + 1] == '=') {
            pos_ += 2;
            t.kind = LpToken::Kind::Symbol;
            t.text = std::string(1, c) + "=";
            return t;
        }
        ++pos_;
        t.kind = LpToken::Kind::Symbol;
        t.text = std::string(1, c);
        return t;
    }

private:
    const std::string& text_;
    size_t pos_ = 0;
    int line_ = 1;
};

bool is_section(const LpToken& t) {
    return t.kind == LpToken::Kind::Ident &&
           (t.text == "Subject" || t.text == "Bounds" || t.text == "Binary" || t.text == "End");
}

}  // namespace

MilpModel parse_lp(const std::string& text) {
    LpLexer lexer(text);
    LpToken cur = lexer.next();
    auto advance = [&]() { cur = lexer.next(); };
    auto expect_ident = [&](const std::string& word) {
        if (cur.kind != LpToken::Kind::Ident || cur.text != word)
            throw ParseError("expected '" + word + "' in LP file", cur.line);
        advance();
    };

    MilpModel model;
    std::map<std::string, std::vector<LinTerm>*> pending;  // unused; names resolved eagerly
    (void)pending;
    auto var_of = [&](const std::string& name) -> VarRef {
        if (auto v = model.find_var(name)) return *v;
        return model.add_continuous(name, 0.0);  // LP default bounds
    };

    // signed linear expression; stops at sense symbols or section keywords
    auto parse_expr = [&](LinExpr& out) {
        bool expect_term = true;
        double sign = 1.0;
        while (true) {
            if (cur.kind == LpToken::Kind::Symbol && (cur.text == "+" || cur.text == "-")) {
                sign *= cur.text == "-" ? -1.0 : 1.0;
                expect_term = true;
                advance();
                continue;
            }
            if (cur.kind == LpToken::Kind::Number) {
                double value = cur.number;
                advance();
                if (cur.kind == LpToken::Kind::Ident && !is_section(cur)) {
                    out.add(sign * value, var_of(cur.text));
                    advance();
                } else {
                    out.add(sign * value);
                }
                sign = 1.0;
                expect_term = false;
                continue;
            }
            if (cur.kind == LpToken::Kind::Ident && !is_section(cur) && expect_term) {
                if (cur.text == "inf") {
                    out.add(sign * std::numeric_limits<double>::infinity());
                } else {
                    out.add(sign, var_of(cur.text));
                }
                advance();
                sign = 1.0;
                expect_term = false;
                continue;
            }
            break;
        }
    };

    expect_ident("Minimize");
    expect_ident("obj");
    if (cur.kind != LpToken::Kind::Symbol || cur.text != ":")
        throw ParseError("expected ':' after obj", cur.line);
    advance();
    parse_expr(model.objective);
    model.objective.canonicalize();

    expect_ident("Subject");
    expect_ident("To");
    while (!is_section(cur) && cur.kind != LpToken::Kind::End) {
        if (cur.kind != LpToken::Kind::Ident)
            throw ParseError("expected constraint name", cur.line);
        std::string name = cur.text;
        advance();
        if (cur.kind != LpToken::Kind::Symbol || cur.text != ":")
            throw ParseError("expected ':' after constraint name", cur.line);
        advance();
        LinExpr expr;
        parse_expr(expr);
        Sense sense;
        if (cur.kind == LpToken::Kind::Symbol && cur.text == "<=")
            sense = Sense::Le;
        else if (cur.kind == LpToken::Kind::Symbol && cur.text == ">=")
            sense = Sense::Ge;
        else if (cur.kind == LpToken::Kind::Symbol && cur.text == "=")
            sense = Sense::Eq;
        else
            throw ParseError("expected <=, >= or = in constraint " + name, cur.line);
        advance();
        double rhs_sign = 1.0;
        while (cur.kind == LpToken::Kind::Symbol && (cur.text == "-" || cur.text == "+")) {
            rhs_sign *= cur.text == "-" ? -1.0 : 1.0;
            advance();
        }
        double rhs;
        if (cur.kind == LpToken::Kind::Number)
            rhs = cur.number;
        else if (cur.kind == LpToken::Kind::Ident && cur.text == "inf")
            rhs = std::numeric_limits<double>::infinity();
        else
            throw ParseError("expected numeric rhs in constraint " + name, cur.line);
        advance();
        model.add_constraint(name, std::move(expr), sense, rhs_sign * rhs);
    }

    if (cur.kind == LpToken::Kind::Ident && cur.text == "Bounds") {
        advance();
        while (!is_section(cur) && cur.kind != LpToken::Kind::End) {
            double sign = 1.0;
            while (cur.kind == LpToken::Kind::Symbol && (cur.text == "-" || cur.text == "+")) {
                sign *= cur.text == "-" ? -1.0 : 1.0;
                advance();
            }
            if (cur.kind == LpToken::Kind::Number ||
                (cur.kind == LpToken::Kind::Ident && cur.text == "inf")) {
                double lo = cur.kind == LpToken::Kind::Number
                                ? sign * cur.number
                                : sign * std::numeric_limits<double>::infinity();
                advance();
                if (cur.kind != LpToken::Kind::Symbol || cur.text != "<=")
                    throw ParseError("expected '<=' in bound", cur.line);
                advance();
                if (cur.kind != LpToken::Kind::Ident)
                    throw ParseError("expected variable in bound", cur.line);
                VarRef v = var_of(cur.text);
                advance();
                model.vars[v.id].lo = lo;
                if (cur.kind == LpToken::Kind::Symbol && cur.text == "<=") {
                    advance();
                    double s2 = 1.0;
                    while (cur.kind == LpToken::Kind::Symbol &&
                           (cur.text == "-" || cur.text == "+")) {
                        s2 *= cur.text == "-" ? -1.0 : 1.0;
                        advance();
                    }
                    if (cur.kind == LpToken::Kind::Number)
                        model.vars[v.id].hi = s2 * cur.number;
                    else if (cur.kind == LpToken::Kind::Ident && cur.text == "inf")
                        model.vars[v.id].hi = s2 * std::numeric_limits<double>::infinity();
                    else
                        throw ParseError("expected upper bound", cur.line);
                    advance();
                }
            } else if (cur.kind == LpToken::Kind::Ident) {
                VarRef v = var_of(cur.text);
                advance();
                if (cur.kind == LpToken::Kind::Ident && cur.text == "free") {
                    model.vars[v.id].lo = -std::numeric_limits<double>::infinity();
                    model.vars[v.id].hi = std::numeric_limits<double>::infinity();
                    advance();
                } else
                    throw ParseError("expected 'free' after variable name", cur.line);
            } else {
                throw ParseError("malformed bound", cur.line);
            }
        }
    }

    if (cur.kind == LpToken::Kind::Ident && cur.text == "Binary") {
        advance();
        while (cur.kind == LpToken::Kind::Ident && cur.text != "End") {
            VarRef v = var_of(cur.text);
            model.vars[v.id].kind = VarKind::Binary;
            model.vars[v.id].lo = 0.0;
            model.vars[v.id].hi = 1.0;
            advance();
        }
    }
    expect_ident("End");
    return model;
}

namespace {

using NamedTerms = std::map<std::string, double>;

NamedTerms named_terms(const LinExpr& expr, const std::vector<VarInfo>& vars) {
    NamedTerms out;
    for (const LinTerm& t : expr.terms) out[vars[t.var].name] += t.coef;
    std::erase_if(out, [](const auto& kv) { return kv.second == 0.0; });
    return out;
}

bool close(double a, double b, double tol) {
    if (a == b) return true;
    return std::abs(a - b) <= tol;
}

bool terms_equal(const NamedTerms& a, const NamedTerms& b, double tol) {
    if (a.size() != b.size()) return false;
    for (const auto& [name, coef] : a) {
        auto it = b.find(name);
        if (it == b.end() || !close(coef, it->second, tol)) return false;
    }
    return true;
}

}  // namespace

bool models_equivalent(const MilpModel& a, const MilpModel& b, double tol) {
    if (a.vars.size() != b.vars.size() || a.constraints.size() != b.constraints.size())
        return false;
    for (const VarInfo& v : a.vars) {
        auto other = b.find_var(v.name);
        if (!other) return false;
        const VarInfo& w = b.vars[other->id];
        if (v.kind != w.kind || !close(v.lo, w.lo, tol) || !close(v.hi, w.hi, tol)) return false;
    }
    LinExpr obj_a = a.objective, obj_b = b.objective;
    obj_a.canonicalize();
    obj_b.canonicalize();
    if (!terms_equal(named_terms(obj_a, a.vars), named_terms(obj_b, b.vars), tol)) return false;
    if (!close(obj_a.constant, obj_b.constant, tol)) return false;
    for (const Constraint& c : a.constraints) {
        const Constraint* d = b.find_constraint(c.name);
        if (!d || c.sense != d->sense) return false;
        LinExpr ea = c.expr, eb = d->expr;
        ea.canonicalize();
        eb.canonicalize();
        double rhs_a = c.rhs - ea.constant, rhs_b = d->rhs - eb.constant;
        ea.constant = eb.constant = 0.0;
        if (!close(rhs_a, rhs_b, tol)) return false;
        if (!terms_equal(named_terms(ea, a.vars), named_terms(eb, b.vars), tol)) return false;
    }
    return true;
}

nlohmann::json model_meta_to_json(const MilpModel& model) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [var_id, meta] : model.meta) {
        nlohmann::json entry;
        entry["gate"] = gate_name(meta.label.gate);
        entry["qubits"] = meta.label.qubits;
        entry["start"] = meta.start;
        j[model.vars[var_id].name] = std::move(entry);
    }
    return j;
}

ModelStats model_stats(const MilpModel& model) {
    ModelStats s;
    for (const VarInfo& v : model.vars)
        (v.kind == VarKind::Binary ? s.binaries : s.continuous)++;
    s.constraints = static_cast<int>(model.constraints.size());
    return s;
}

}  // namespace qptrace
