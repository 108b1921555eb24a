#include "doctest.h"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "helpers.hpp"

using namespace qptrace;

namespace {

VarRef var_for_event(const MilpModel& model, const Label& label, int start) {
    for (const auto& [id, meta] : model.meta)
        if (meta.label == label && meta.start == start) return VarRef{id};
    throw std::runtime_error("no decision variable for " + label.to_string() + " @ " +
                             std::to_string(start));
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    REQUIRE_MESSAGE(in.good(), "missing file ", path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// The three committed LP fixtures.
MilpModel fixture_abs_model() {
    MilpModel m;
    VarRef x = m.add_binary("x");
    VarRef z = add_abs(m, LinExpr(1.0, x).add(-1.0), "0");
    m.objective.add(1.0, z);
    return m;
}

MilpModel fixture_figure_model() {
    PulseLibrary lib = qptest::figure_library();
    PowerTrace trace;
    trace.samples = {0.7, 0.6, 0.3, 0.9, 0.4, 0.0};
    AttackModelOptions opts;
    opts.grid = 1;
    opts.prune_threshold = 0.0;
    return build_attack_model(trace, lib, opts);
}

MilpModel fixture_logic_model() {
    MilpModel m;
    VarRef a = m.add_binary("a");
    VarRef b = m.add_binary("b");
    VarRef y = encode_or(m, a, b, "y");
    add_pseudo_boolean(m, {a, b, y}, Sense::Le, 2, "cap");
    add_bigm_disjunction(m, {{LinExpr(1.0, a).add(1.0, b), 1.0}, {LinExpr(1.0, y), 0.0}},
                         "excl");
    m.objective.add(1.0, a).add(-2.0, b).add(0.5, y);
    return m;
}

}  // namespace

TEST_CASE("add_abs builds the two-sided envelope") {
    SUBCASE("|x - 3| with x pinned to 5") {
        MilpModel m;
        VarRef x = m.add_continuous("x", 5.0, 5.0);
        VarRef z = add_abs(m, LinExpr(1.0, x).add(-3.0), "0");
        m.objective.add(1.0, z);
        Solution sol = solve_exhaustive(m);
        REQUIRE(sol.status == SolveStatus::Optimal);
        CHECK(sol.objective == doctest::Approx(2.0).epsilon(1e-9));
    }

    SUBCASE("|0| is 0") {
        MilpModel m;
        VarRef z = add_abs(m, LinExpr{}, "0");
        m.objective.add(1.0, z);
        Solution sol = solve_exhaustive(m);
        REQUIRE(sol.status == SolveStatus::Optimal);
        CHECK(sol.objective == doctest::Approx(0.0));
    }

    SUBCASE("random pinned values recover their magnitude") {
        Rng rng(6);
        for (int trial = 0; trial < 25; ++trial) {
            double v = rng.uniform(-10, 10);
            MilpModel m;
            VarRef x = m.add_continuous("x", v, v);
            VarRef z = add_abs(m, LinExpr(1.0, x), "0");
            m.objective.add(1.0, z);
            Solution sol = solve_exhaustive(m);
            REQUIRE(sol.status == SolveStatus::Optimal);
            CHECK(sol.objective == doctest::Approx(std::abs(v)).epsilon(1e-9));
        }
    }

    SUBCASE("duplicate tags are rejected") {
        MilpModel m;
        add_abs(m, LinExpr{}, "0");
        CHECK_THROWS_AS(add_abs(m, LinExpr{}, "0"), ValidationError);
    }
}

TEST_CASE("encode_or matches the truth table") {
    for (int x1 = 0; x1 <= 1; ++x1) {
        for (int x2 = 0; x2 <= 1; ++x2) {
            MilpModel m;
            VarRef a = m.add_binary("a");
            VarRef b = m.add_binary("b");
            VarRef y = encode_or(m, a, b, "y");
            m.add_constraint("fix_a", LinExpr(1.0, a), Sense::Eq, x1);
            m.add_constraint("fix_b", LinExpr(1.0, b), Sense::Eq, x2);
            Solution sol = solve_exhaustive(m);
            REQUIRE(sol.status == SolveStatus::Optimal);
            CHECK(sol.assignment[y.id] == doctest::Approx(x1 || x2 ? 1.0 : 0.0));
        }
    }

    MilpModel m;
    VarRef a = m.add_binary("a");
    VarRef c = m.add_continuous("c");
    CHECK_THROWS_AS(encode_or(m, a, c, "y"), ValidationError);
}

TEST_CASE("pseudo-boolean cardinality constraints") {
    MilpModel m;
    std::vector<VarRef> vars;
    for (int i = 0; i < 4; ++i) vars.push_back(m.add_binary("a" + std::to_string(i)));
    add_pseudo_boolean(m, vars, Sense::Le, 1, "at_most_one");
    CHECK(write_lp(m).find("at_most_one: a0 + a1 + a2 + a3 <= 1") != std::string::npos);

    add_pseudo_boolean(m, vars, Sense::Ge, 1, "at_least_one");
    CHECK(write_lp(m).find("at_least_one: a0 + a1 + a2 + a3 >= 1") != std::string::npos);

    SUBCASE("single variable pinned by equality") {
        add_pseudo_boolean(m, {vars[0]}, Sense::Eq, 1, "pin");
        m.objective.add(1.0, vars[0]);
        Solution sol = solve_exhaustive(m);
        REQUIRE(sol.status == SolveStatus::Optimal);
        CHECK(sol.assignment[vars[0].id] == 1.0);
    }

    SUBCASE("empty variable list is rejected") {
        CHECK_THROWS_AS(add_pseudo_boolean(m, {}, Sense::Le, 1, "nope"), ValidationError);
    }
}

TEST_CASE("big-M disjunction") {
    SUBCASE("a single alternative behaves like a plain constraint") {
        MilpModel m;
        VarRef x = m.add_binary("x");
        add_bigm_disjunction(m, {{LinExpr(1.0, x), 0.0}}, "only");
        m.objective.add(-1.0, x);  // pull x up
        Solution sol = solve_exhaustive(m);
        REQUIRE(sol.status == SolveStatus::Optimal);
        CHECK(sol.assignment[x.id] == 0.0);  // x <= 0 still binds
    }

    SUBCASE("mutually exclusive alternatives match direct enumeration") {
        // x1 + x2 <= 0  OR  -(x1 + x2) <= -2: feasible iff both off or both on
        auto build = [](int v1, int v2) {
            MilpModel m;
            VarRef x1 = m.add_binary("x1");
            VarRef x2 = m.add_binary("x2");
            add_bigm_disjunction(
                m, {{LinExpr(1.0, x1).add(1.0, x2), 0.0},
                    {LinExpr(-1.0, x1).add(-1.0, x2), -2.0}},
                "d");
            m.add_constraint("fix1", LinExpr(1.0, x1), Sense::Eq, v1);
            m.add_constraint("fix2", LinExpr(1.0, x2), Sense::Eq, v2);
            return solve_exhaustive(m);
        };
        CHECK(build(0, 0).status == SolveStatus::Optimal);
        CHECK(build(1, 1).status == SolveStatus::Optimal);
        CHECK(build(0, 1).status == SolveStatus::Infeasible);
        CHECK(build(1, 0).status == SolveStatus::Infeasible);
    }

    SUBCASE("an unsatisfiable alternative has its indicator forced off") {
        MilpModel m;
        VarRef x = m.add_binary("x");
        auto ys = add_bigm_disjunction(m, {{LinExpr{}, -1.0}, {LinExpr(1.0, x), 1.0}}, "d");
        m.objective.add(-1.0, VarRef{ys[0].id});  // try to pull y0 up
        Solution sol = solve_exhaustive(m);
        REQUIRE(sol.status == SolveStatus::Optimal);
        CHECK(sol.assignment[ys[0].id] == 0.0);
    }

    SUBCASE("empty disjunction is rejected") {
        MilpModel m;
        CHECK_THROWS_AS(add_bigm_disjunction(m, {}, "d"), ValidationError);
    }
}

TEST_CASE("the hypothetical 2-qubit encoding has 12 binary decision variables") {
    MilpModel model = fixture_figure_model();
    CHECK(model_stats(model).binaries == 12);

    PulseLibrary lib = qptest::figure_library();
    Label x1 = make_single_qubit_label(GateKind::X, 0);
    Label sx1 = make_single_qubit_label(GateKind::SX, 0);
    Label x2 = make_single_qubit_label(GateKind::X, 1);

    // start-position counts per gate: 4 + 3 + 5
    int n_x1 = 0, n_sx1 = 0, n_x2 = 0;
    for (const auto& [id, meta] : model.meta) {
        if (meta.label == x1) ++n_x1;
        if (meta.label == sx1) ++n_sx1;
        if (meta.label == x2) ++n_x2;
    }
    CHECK(n_x1 == 4);
    CHECK(n_sx1 == 3);
    CHECK(n_x2 == 5);

    SUBCASE("channel constraints at the last overlapping step") {
        const Constraint* ch0 = model.find_constraint("ch_0_4");
        REQUIRE(ch0);
        std::set<int> got;
        for (const LinTerm& t : ch0->expr.terms) got.insert(t.var);
        std::set<int> want = {var_for_event(model, x1, 2).id, var_for_event(model, x1, 3).id,
                              var_for_event(model, sx1, 1).id,
                              var_for_event(model, sx1, 2).id};
        CHECK(got == want);
        CHECK(ch0->sense == Sense::Le);
        CHECK(ch0->rhs == 1.0);

        const Constraint* ch1 = model.find_constraint("ch_1_4");
        REQUIRE(ch1);
        std::set<int> got1;
        for (const LinTerm& t : ch1->expr.terms) got1.insert(t.var);
        std::set<int> want1 = {var_for_event(model, x2, 3).id, var_for_event(model, x2, 4).id};
        CHECK(got1 == want1);
    }

    SUBCASE("the final fit row mixes the three trailing pulses") {
        const Constraint* fit5 = model.find_constraint("fit_5");
        REQUIRE(fit5);
        std::map<int, double> coef;
        for (const LinTerm& t : fit5->expr.terms) coef[t.var] = t.coef;
        CHECK(coef[var_for_event(model, x1, 3).id] == doctest::Approx(0.4));   // p_X,C1(2)
        CHECK(coef[var_for_event(model, sx1, 2).id] == doctest::Approx(0.2));  // p_SX,C1(3)
        CHECK(coef[var_for_event(model, x2, 4).id] == doctest::Approx(0.6));   // p_X,C2(1)
    }

    SUBCASE("unique-gates option reproduces the per-gate at-most-one rows") {
        PowerTrace trace;
        trace.samples = {0.7, 0.6, 0.3, 0.9, 0.4, 0.0};
        AttackModelOptions opts;
        opts.grid = 1;
        opts.prune_threshold = 0.0;
        opts.unique_gates = true;
        MilpModel with_unique = build_attack_model(trace, lib, opts);
        int uniq = 0;
        for (const Constraint& c : with_unique.constraints)
            if (c.name.rfind("uniq_", 0) == 0) {
                ++uniq;
                CHECK(c.sense == Sense::Le);
                CHECK(c.rhs == 1.0);
            }
        CHECK(uniq == 3);
    }
}

TEST_CASE("a silent trace prunes every candidate") {
    PulseLibrary lib = qptest::toy_library(2, 17);
    PowerTrace trace;
    trace.samples.assign(96, 0.0);
    AttackModelOptions opts;
    opts.prune_threshold = 0.5;
    MilpModel model = build_attack_model(trace, lib, opts);
    CHECK(model_stats(model).binaries == 0);
    Solution sol = solve_bnb(model);
    REQUIRE(sol.status == SolveStatus::Optimal);
    CHECK(sol.objective == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("ground truth stays feasible and optimal at zero") {
    for (uint64_t seed = 40; seed < 45; ++seed) {
        PulseLibrary lib = qptest::toy_library(3, seed);
        Rng rng(seed);
        GateCircuit c = qptest::random_circuit(lib.device, 3, rng.uniform_int(2, 5), rng, false);
        PulseSchedule truth = schedule_circuit(c, lib);
        if (truth.total_duration == 0) continue;
        PowerTrace total = simulate_total(truth, lib);
        MilpModel model = build_attack_model(total, lib, AttackModelOptions{});

        Solution truth_sol;
        truth_sol.assignment.assign(model.vars.size(), 0.0);
        for (const PulseEvent& e : truth.events) {
            if (e.label.is_virtual() || e.label.gate == GateKind::I) continue;
            // pruning soundness: the event's variable must exist
            truth_sol.assignment[var_for_event(model, e.label, e.start).id] = 1.0;
        }
        // residuals are zero, so are their envelopes: defaults already hold
        CheckReport report = check_solution(model, truth_sol, 1e-6);
        CHECK(report.ok());
        CHECK(report.objective <= 1e-9);
    }
}

TEST_CASE("a pruned model with live trace energy is diagnosed") {
    PulseLibrary lib = qptest::toy_library(2, 3);
    PowerTrace trace;
    trace.samples.assign(8, 0.05);  // energy but far below any pulse
    trace.samples.resize(96, 0.0);
    AttackModelOptions opts;
    opts.prune_threshold = 5.0;  // absurdly strict
    CHECK_THROWS_WITH_AS(build_attack_model(trace, lib, opts), doctest::Contains("prune"),
                         ValidationError);
}

TEST_CASE("canonicalize merges, sorts and is idempotent") {
    MilpModel m;
    VarRef a = m.add_binary("a");
    VarRef b = m.add_binary("b");
    LinExpr e;
    e.add(2.0, b).add(1.0, a).add(3.0, b).add(-1.0, a).add(0.5);
    e.canonicalize();
    REQUIRE(e.terms.size() == 1);  // a cancels
    CHECK(e.terms[0].var == b.id);
    CHECK(e.terms[0].coef == 5.0);
    LinExpr again = e;
    again.canonicalize();
    CHECK(again.terms.size() == e.terms.size());
    CHECK(again.terms[0].coef == e.terms[0].coef);

    SUBCASE("constraints reject undeclared variables") {
        MilpModel other;
        LinExpr bad;
        bad.add(1.0, VarRef{57});
        CHECK_THROWS_AS(other.add_constraint("c", bad, Sense::Le, 0.0), ValidationError);
    }
}

TEST_CASE("attack models are linear and degree-1 by construction") {
    MilpModel model = fixture_figure_model();
    for (const Constraint& c : model.constraints) {
        std::set<int> seen;
        for (const LinTerm& t : c.expr.terms) {
            CHECK(std::isfinite(t.coef));
            CHECK(seen.insert(t.var).second);  // no duplicate vars after canonicalize
        }
    }
}

TEST_CASE("lp golden files") {
    const std::string dir = std::string(QPTRACE_TEST_DIR) + "/golden/";
    struct Fixture {
        const char* name;
        MilpModel model;
    };
    std::vector<Fixture> fixtures;
    fixtures.push_back({"abs_model.lp", fixture_abs_model()});
    fixtures.push_back({"figure_model.lp", fixture_figure_model()});
    fixtures.push_back({"logic_model.lp", fixture_logic_model()});

    for (auto& [name, model] : fixtures) {
        CAPTURE(name);
        std::string text = write_lp(model);
        SUBCASE("byte-identical to the committed golden") {
            CHECK(text == read_file(dir + name));
        }
        SUBCASE("re-parse yields the canonical model") {
            MilpModel back = parse_lp(text);
            CHECK(models_equivalent(model, back));
        }
        SUBCASE("deterministic across calls") {
            CHECK(write_lp(model) == text);
        }
    }
}

TEST_CASE("meta sidecar names every decision variable") {
    MilpModel model = fixture_figure_model();
    nlohmann::json j = model_meta_to_json(model);
    CHECK(j.size() == 12);
    for (const auto& [id, meta] : model.meta) {
        const std::string& name = model.vars[id].name;
        REQUIRE(j.contains(name));
        CHECK(j[name]["start"] == meta.start);
    }
}
