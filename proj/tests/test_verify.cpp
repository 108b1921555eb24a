#include "doctest.h"

#include <fstream>

#include <nlohmann/json.hpp>

#include "helpers.hpp"

using namespace qptrace;

namespace {

PulseLibrary lib5() {
    return synth_library(standard_topology(TopologyKind::TShape5, 5), SynthProfile{}, 77);
}

// a 4-qubit circuit with the published adder gate profile: 33 gates total,
// 13 rz, 20 x/sx/cx
GateCircuit adder_style_circuit() {
    GateCircuit c;
    c.n_qubits = 4;
    Rng rng(404);
    std::vector<std::pair<int, int>> pairs = {{0, 1}, {1, 2}, {2, 3}, {1, 0}, {2, 1}, {3, 2}};
    int rz = 13, cx = 8, sx = 7, x = 5;  // 13 + 20 = 33
    std::vector<Gate> gates;
    for (int i = 0; i < rz; ++i)
        gates.push_back({GateKind::RZ, {rng.uniform_int(0, 3)}, rng.uniform(-3.0, 3.0)});
    for (int i = 0; i < cx; ++i) {
        auto [a, b] = pairs[rng.uniform_int(0, 5)];
        gates.push_back({GateKind::CX, {a, b}, 0.0});
    }
    for (int i = 0; i < sx; ++i) gates.push_back({GateKind::SX, {rng.uniform_int(0, 3)}, 0.0});
    for (int i = 0; i < x; ++i) gates.push_back({GateKind::X, {rng.uniform_int(0, 3)}, 0.0});
    // deterministic shuffle
    for (size_t i = gates.size(); i > 1; --i)
        std::swap(gates[i - 1], gates[rng.uniform_int(0, static_cast<int>(i) - 1)]);
    c.gates = gates;
    return c;
}

}  // namespace

TEST_CASE("identical schedules compare exact") {
    PulseLibrary lib = lib5();
    Rng rng(7);
    GateCircuit c = qptest::random_circuit(lib.device, 5, 12, rng);
    PulseSchedule truth = schedule_circuit(c, lib);
    MatchReport report = compare(truth, truth, lib);
    CHECK(report.recovered_exact);
    CHECK(report.start_time_exact);
    CHECK(report.tier == MatchTier::Exact);
    CHECK(report.trace_residual == 0.0);
    for (const GateVerdict& v : report.per_gate) CHECK(v.recovered);
}

TEST_CASE("rz events do not count against recovery") {
    PulseLibrary lib = lib5();
    PulseSchedule truth, recovered;
    truth.events.push_back({make_single_qubit_label(GateKind::X, 0), 0});
    truth.events.push_back({make_single_qubit_label(GateKind::RZ, 1), 0});
    truth.total_duration = 160;
    recovered.events.push_back({make_single_qubit_label(GateKind::X, 0), 0});
    recovered.total_duration = 160;
    MatchReport report = compare(truth, recovered, lib);
    CHECK(report.recovered_exact);
    CHECK(report.truth_counts.total == 2);
    CHECK(report.truth_counts.rz == 1);
    CHECK(report.recovered_counts.total == 1);
}

TEST_CASE("adder-style gate counts match the published row") {
    GateCircuit c = adder_style_circuit();
    GateCounts counts = count_gates(c);
    CHECK(counts.total == 33);
    CHECK(counts.rz == 13);
    CHECK(counts.xsxcx == 20);

    Device dev = standard_topology(TopologyKind::Line, 4);
    PulseLibrary lib = synth_library(dev, SynthProfile{}, 4);
    PulseSchedule sched = schedule_circuit(c, lib);
    GateCounts sched_counts = count_gates(sched);
    CHECK(sched_counts.total == 33);
    CHECK(sched_counts.rz == 13);
    CHECK(sched_counts.xsxcx == 20);
    MatchReport report = compare(sched, sched, lib);
    CHECK(report.truth_counts.total == 33);
    CHECK(report.recovered_exact);
}

TEST_CASE("exactness is symmetric and residual tracks equality") {
    PulseLibrary lib = lib5();
    for (uint64_t seed = 0; seed < 10; ++seed) {
        Rng rng(seed);
        GateCircuit c1 = qptest::random_circuit(lib.device, 5, 6, rng);
        GateCircuit c2 = qptest::random_circuit(lib.device, 5, 6, rng);
        PulseSchedule s1 = schedule_circuit(c1, lib);
        PulseSchedule s2 = schedule_circuit(c2, lib);
        MatchReport ab = compare(s1, s2, lib);
        MatchReport ba = compare(s2, s1, lib);
        CHECK(ab.recovered_exact == ba.recovered_exact);
        CHECK(ab.trace_residual == doctest::Approx(ba.trace_residual).epsilon(1e-12));
        bool traces_equal = ab.trace_residual <= 1e-12;
        auto ta = simulate_total(s1, lib), tb = simulate_total(s2, lib);
        size_t n = std::max(ta.samples.size(), tb.samples.size());
        ta.samples.resize(n, 0.0);
        tb.samples.resize(n, 0.0);
        bool elementwise = true;
        for (size_t x = 0; x < n; ++x)
            if (std::abs(ta.samples[x] - tb.samples[x]) > 1e-12) elementwise = false;
        CHECK(traces_equal == elementwise);
    }
}

TEST_CASE("match tiers weaken in order") {
    PulseLibrary lib = lib5();
    PulseSchedule truth;
    truth.events.push_back({make_single_qubit_label(GateKind::X, 0), 0});
    truth.events.push_back({make_single_qubit_label(GateKind::SX, 1), 0});
    truth.total_duration = 160;

    SUBCASE("shifted starts keep the ordered-gates tier") {
        PulseSchedule shifted = truth;
        for (PulseEvent& e : shifted.events) e.start += 160;
        shifted.total_duration = 320;
        MatchReport r = compare(truth, shifted, lib);
        CHECK(!r.recovered_exact);
        CHECK(r.tier == MatchTier::OrderedGates);
    }

    SUBCASE("reordered gates fall back to the multiset tier") {
        PulseSchedule reordered;
        // swap starts so q1's pulse comes first in gate order
        reordered.events.push_back({make_single_qubit_label(GateKind::SX, 1), 0});
        reordered.events.push_back({make_single_qubit_label(GateKind::X, 0), 160});
        reordered.total_duration = 320;
        MatchReport r = compare(truth, reordered, lib);
        CHECK(r.tier == MatchTier::GateMultiset);
    }

    SUBCASE("different gates mismatch") {
        PulseSchedule other;
        other.events.push_back({make_single_qubit_label(GateKind::X, 2), 0});
        other.total_duration = 160;
        CHECK(compare(truth, other, lib).tier == MatchTier::Mismatch);
    }
}

TEST_CASE("channel depth is a critical path") {
    PulseLibrary lib = lib5();
    PulseSchedule sched;
    // two parallel single-qubit pulses then a CX joining them
    sched.events.push_back({make_single_qubit_label(GateKind::X, 0), 0});
    sched.events.push_back({make_single_qubit_label(GateKind::X, 1), 0});
    sched.events.push_back({make_cx_label(lib.device, 0, 1), 160});
    sched.total_duration = 160 + lib.at(make_cx_label(lib.device, 0, 1)).max_duration();
    CHECK(channel_depth(sched, lib) == 2);
}

TEST_CASE("benchmark harness") {
    PulseLibrary lib = lib5();
    qptest::TempDir tmp("bench");

    SUBCASE("empty directory, empty table") {
        BenchConfig config;
        auto rows = run_benchmark(tmp.path.string(), lib, config);
        CHECK(rows.empty());
        CHECK(benchmark_csv(rows).rfind("name,qubits,total_gates", 0) == 0);
    }

    SUBCASE("generated suite recovers noiselessly and reports errors in-band") {
        for (uint64_t seed = 0; seed < 4; ++seed) {
            Rng rng(seed);
            GateCircuit c = qptest::random_circuit(lib.device, 4, 8, rng);
            std::ofstream(tmp.file("circ" + std::to_string(seed) + ".qasm"))
                << circuit_to_qasm(c);
        }
        std::ofstream(tmp.file("zbroken.qasm")) << "OPENQASM 2.0;\nqreg q[1];\nh q[0];\n";

        BenchConfig config;
        config.attack = AttackKind::PerChannel;
        auto rows = run_benchmark(tmp.path.string(), lib, config);
        REQUIRE(rows.size() == 5);
        for (size_t i = 0; i < 4; ++i) {
            CAPTURE(rows[i].name);
            CHECK(rows[i].error.empty());
            CHECK(rows[i].tier == MatchTier::Exact);
        }
        CHECK(!rows[4].error.empty());

        std::string csv = benchmark_csv(rows);
        CHECK(csv.find("error") != std::string::npos);
        CHECK(benchmark_table(rows).find("circ0") != std::string::npos);
    }
}

TEST_CASE("match report serializes") {
    PulseLibrary lib = lib5();
    PulseSchedule truth;
    truth.events.push_back({make_single_qubit_label(GateKind::X, 0), 0});
    truth.total_duration = 160;
    nlohmann::json j = match_report_to_json(compare(truth, truth, lib));
    CHECK(j["recovered_exact"] == true);
    CHECK(j["match_tier"] == "exact");
    CHECK(j["per_gate"].size() == 1);
}
