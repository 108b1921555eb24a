#include "doctest.h"

#include <nlohmann/json.hpp>

#include "helpers.hpp"

using namespace qptrace;

namespace {

const char* kDemoQasm = R"(OPENQASM 2.0;
include "qelib1.inc";
qreg q[2];
sx q[1];
sx q[0];
sx q[1];
cx q[0],q[1];
cx q[1],q[0];
cx q[0],q[1];
)";

PulseLibrary demo_library() {
    Device dev = standard_topology(TopologyKind::Line, 2);
    return synth_library(dev, SynthProfile{}, 11);
}

}  // namespace

TEST_CASE("parses the demonstration program") {
    GateCircuit c = parse_qasm(kDemoQasm);
    REQUIRE(c.gates.size() == 6);
    CHECK(c.n_qubits == 2);
    CHECK(c.gates[0].kind == GateKind::SX);
    CHECK(c.gates[0].qubits == std::vector<int>{1});
    CHECK(c.gates[3].kind == GateKind::CX);
    CHECK(c.gates[3].qubits == std::vector<int>{0, 1});
}

TEST_CASE("single x gate") {
    GateCircuit c = parse_qasm("OPENQASM 2.0;\nqreg q[1];\nx q[0];\n");
    REQUIRE(c.gates.size() == 1);
    CHECK(c.gates[0].kind == GateKind::X);
}

TEST_CASE("non-basis gate is rejected with its line") {
    try {
        parse_qasm("OPENQASM 2.0;\nqreg q[1];\nh q[0];\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line == 3);
        CHECK(std::string(e.what()).find("non-basis") != std::string::npos);
    }
}

TEST_CASE("rz angle expressions") {
    GateCircuit c = parse_qasm(
        "OPENQASM 2.0;\nqreg q[1];\n"
        "rz(pi/2) q[0];\nrz(-pi/4) q[0];\nrz(3*pi/4) q[0];\nrz(0.25) q[0];\n"
        "rz(pi/2 + pi/4) q[0];\nrz(-(pi - 1)/2) q[0];\n");
    REQUIRE(c.gates.size() == 6);
    const double pi = 3.14159265358979323846;
    CHECK(c.gates[0].angle == doctest::Approx(pi / 2));
    CHECK(c.gates[1].angle == doctest::Approx(-pi / 4));
    CHECK(c.gates[2].angle == doctest::Approx(3 * pi / 4));
    CHECK(c.gates[3].angle == doctest::Approx(0.25));
    CHECK(c.gates[4].angle == doctest::Approx(3 * pi / 4));
    CHECK(c.gates[5].angle == doctest::Approx(-(pi - 1) / 2));
}

TEST_CASE("barrier and measure are recorded, not scheduled") {
    GateCircuit c = parse_qasm(
        "OPENQASM 2.0;\nqreg q[2];\ncreg c[2];\n"
        "x q[0];\nbarrier q;\nbarrier q[0],q[1];\nmeasure q[0] -> c[0];\nmeasure q -> c;\n");
    CHECK(c.gates.size() == 1);
    REQUIRE(c.directives.size() == 4);
    CHECK(c.directives[0].kind == Directive::Kind::Barrier);
    CHECK(c.directives[2].kind == Directive::Kind::Measure);

    PulseLibrary lib = demo_library();
    PulseSchedule sched = schedule_circuit(c, lib);
    CHECK(sched.events.size() == 1);
}

TEST_CASE("parser error paths") {
    CHECK_THROWS_AS(parse_qasm("OPENQASM 2.0;\nqreg q[1];\nx q[3];\n"), ParseError);
    CHECK_THROWS_AS(parse_qasm("OPENQASM 2.0;\nqreg q[2];\ncx q[0],q[0];\n"), ParseError);
    CHECK_THROWS_AS(parse_qasm("OPENQASM 1.0;\nqreg q[1];\n"), ParseError);
    CHECK_THROWS_AS(parse_qasm("OPENQASM 2.0;\nqreg q[1];\nx q[0]\n"), ParseError);
    CHECK_THROWS_AS(parse_qasm("qreg q[1];\n"), ParseError);
}

TEST_CASE("demonstration circuit schedules to the published start times") {
    PulseLibrary lib = demo_library();
    GateCircuit c = parse_qasm(kDemoQasm);
    PulseSchedule sched = schedule_circuit(c, lib);

    std::vector<int> starts;
    for (const PulseEvent& e : sched.events) starts.push_back(e.start);
    CHECK(starts == std::vector<int>{0, 160, 160, 320, 1696, 3232});
    CHECK(sched.total_duration == 4608);

    // the table's instruction column
    CHECK(sched.events[0].label == make_single_qubit_label(GateKind::SX, 1));
    CHECK(sched.events[1].label == make_single_qubit_label(GateKind::SX, 0));
    CHECK(sched.events[2].label == make_single_qubit_label(GateKind::SX, 1));
    CHECK(sched.events[3].label == make_cx_label(lib.device, 0, 1));
    CHECK(sched.events[4].label == make_cx_label(lib.device, 1, 0));
    CHECK(sched.events[5].label == make_cx_label(lib.device, 0, 1));
}

TEST_CASE("asap policy starts the second sx immediately") {
    PulseLibrary lib = demo_library();
    GateCircuit c = parse_qasm(kDemoQasm);
    PulseSchedule sched = schedule_circuit(c, lib, SchedulePolicy::Asap);
    std::vector<int> starts;
    for (const PulseEvent& e : sched.events) starts.push_back(e.start);
    CHECK(starts == std::vector<int>{0, 0, 160, 320, 1696, 3232});
    CHECK(sched.total_duration == 4608);
}

TEST_CASE("empty circuit gives an empty schedule") {
    PulseLibrary lib = demo_library();
    GateCircuit c;
    c.n_qubits = 2;
    PulseSchedule sched = schedule_circuit(c, lib);
    CHECK(sched.events.empty());
    CHECK(sched.total_duration == 0);
}

TEST_CASE("independent gates share a start") {
    PulseLibrary lib = demo_library();
    GateCircuit c = parse_qasm("OPENQASM 2.0;\nqreg q[2];\nx q[0];\nx q[1];\n");
    PulseSchedule sched = schedule_circuit(c, lib);
    CHECK(sched.events[0].start == 0);
    CHECK(sched.events[1].start == 0);
}

TEST_CASE("cx on a non-coupled pair fails") {
    Device dev = standard_topology(TopologyKind::Line, 3);
    PulseLibrary lib = synth_library(dev, SynthProfile{}, 5);
    GateCircuit c = parse_qasm("OPENQASM 2.0;\nqreg q[3];\ncx q[0],q[2];\n");
    CHECK_THROWS_AS(schedule_circuit(c, lib), ValidationError);
}

TEST_CASE("identity occupies the drive channel") {
    PulseLibrary lib = demo_library();
    GateCircuit c = parse_qasm("OPENQASM 2.0;\nqreg q[1];\nid q[0];\nx q[0];\n");
    PulseSchedule sched = schedule_circuit(c, lib);
    REQUIRE(sched.events.size() == 2);
    CHECK(sched.events[0].label.gate == GateKind::I);
    CHECK(sched.events[0].start == 0);
    CHECK(sched.events[1].start == 160);
}

TEST_CASE("schedule_to_gates recovers the demonstration order") {
    PulseLibrary lib = demo_library();
    PulseSchedule sched = schedule_circuit(parse_qasm(kDemoQasm), lib);
    GateCircuit gates = schedule_to_gates(sched, 2);
    REQUIRE(gates.gates.size() == 6);
    CHECK(gates.gates[0].kind == GateKind::SX);
    CHECK(gates.gates[0].qubits == std::vector<int>{1});
    CHECK(gates.gates[1].qubits == std::vector<int>{0});  // tie at 160: drive 0 first
    CHECK(gates.gates[2].qubits == std::vector<int>{1});
    CHECK(gates.gates[3].kind == GateKind::CX);

    SUBCASE("empty and rz-only schedules collapse") {
        PulseSchedule empty;
        CHECK(schedule_to_gates(empty, 2).gates.empty());
        PulseSchedule rz_only;
        rz_only.events.push_back({make_single_qubit_label(GateKind::RZ, 0), 0});
        CHECK(schedule_to_gates(rz_only, 2).gates.empty());
    }
}

TEST_CASE("scheduling always satisfies the channel constraint") {
    Device dev = standard_topology(TopologyKind::TShape5, 5);
    PulseLibrary lib = synth_library(dev, SynthProfile{}, 1);
    for (uint64_t seed = 0; seed < 25; ++seed) {
        Rng rng(seed);
        GateCircuit c = qptest::random_circuit(dev, 5, rng.uniform_int(1, 25), rng);
        PulseSchedule sched = schedule_circuit(c, lib);
        CHECK(qptest::channels_exclusive(sched, lib));
    }
}

TEST_CASE("round trip on channel-serialized circuits") {
    // every consecutive pair shares a qubit, so the gate order is forced
    Device dev = standard_topology(TopologyKind::Line, 3);
    PulseLibrary lib = synth_library(dev, SynthProfile{}, 2);
    for (uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed);
        GateCircuit c;
        c.n_qubits = 3;
        int cursor = rng.uniform_int(0, 2);
        for (int i = 0; i < 10; ++i) {
            double roll = rng.uniform();
            Gate g;
            if (roll < 0.35 && cursor < 2) {
                g.kind = GateKind::CX;
                g.qubits = {cursor, cursor + 1};
            } else if (roll < 0.7) {
                g.kind = GateKind::X;
                g.qubits = {cursor};
            } else {
                g.kind = GateKind::RZ;
                g.qubits = {cursor};
                g.angle = 0.5;
            }
            c.gates.push_back(g);
        }
        GateCircuit back = schedule_to_gates(schedule_circuit(c, lib), 3);
        std::vector<std::pair<GateKind, std::vector<int>>> want, got;
        for (const Gate& g : c.gates)
            if (g.kind != GateKind::RZ) want.emplace_back(g.kind, g.qubits);
        for (const Gate& g : back.gates) got.emplace_back(g.kind, g.qubits);
        CHECK(want == got);
    }
}

TEST_CASE("appending a gate never shortens the schedule") {
    Device dev = standard_topology(TopologyKind::Line, 3);
    PulseLibrary lib = synth_library(dev, SynthProfile{}, 9);
    Rng rng(4);
    GateCircuit c = qptest::random_circuit(dev, 3, 8, rng);
    int prev = schedule_circuit(c, lib).total_duration;
    for (int i = 0; i < 10; ++i) {
        GateCircuit more = qptest::random_circuit(dev, 3, 1, rng);
        c.gates.push_back(more.gates[0]);
        int now = schedule_circuit(c, lib).total_duration;
        CHECK(now >= prev);
        prev = now;
    }
}

TEST_CASE("schedule JSON round trip") {
    PulseLibrary lib = demo_library();
    PulseSchedule sched = schedule_circuit(parse_qasm(kDemoQasm), lib);
    PulseSchedule back = schedule_from_json(schedule_to_json(sched), lib);
    CHECK(back.events == sched.events);
    CHECK(back.total_duration == sched.total_duration);
}
