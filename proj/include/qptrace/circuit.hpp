#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "qptrace/pulselib.hpp"

namespace qptrace {

struct Gate {
    GateKind kind;
    std::vector<int> qubits;
    double angle = 0.0;  // RZ only
};

// barrier/measure statements are kept for provenance but never scheduled
struct Directive {
    enum class Kind { Barrier, Measure } kind;
    std::vector<int> qubits;  // empty = whole register
    int line = 0;
};

struct GateCircuit {
    int n_qubits = 0;
    std::vector<Gate> gates;
    std::vector<Directive> directives;
};

// Accepted subset: OPENQASM 2.0 header, optional include, one qreg, optional
// creg, then id/x/sx/rz(expr)/cx/barrier/measure statements. rz angles are
// arithmetic over literals and pi with + - * / and unary minus.
GateCircuit parse_qasm(const std::string& text);
GateCircuit load_qasm(const std::string& path);
std::string circuit_to_qasm(const GateCircuit& circuit);

struct PulseEvent {
    Label label;
    int start = 0;

    bool operator==(const PulseEvent& o) const {
        return start == o.start && label == o.label;
    }
};

struct PulseSchedule {
    std::vector<PulseEvent> events;  // sorted by (start, canonical channel)
    int total_duration = 0;
};

enum class SchedulePolicy { Alap, Asap };

// Maps a gate circuit onto pulse start times. ALAP (the default, matching
// production scheduling of transpiled circuits) pushes every gate as late as
// its successors allow; ASAP starts each gate at the max free-time over the
// channels its label occupies. RZ takes zero time; I occupies the drive
// channel for one single-qubit duration at zero amplitude.
PulseSchedule schedule_circuit(const GateCircuit& circuit, const PulseLibrary& lib,
                               SchedulePolicy policy = SchedulePolicy::Alap);

// Gates ordered by (start, canonical channel); RZ events dropped since they
// are unobservable in traces.
GateCircuit schedule_to_gates(const PulseSchedule& schedule, int n_qubits);

// Duration of a label's occupation of a given channel.
int label_duration_on(const PulseLibrary& lib, const Label& label, Channel channel);

// Throws ValidationError if any channel carries two overlapping pulses.
void validate_channel_constraint(const PulseSchedule& schedule, const PulseLibrary& lib);

nlohmann::json schedule_to_json(const PulseSchedule& schedule);
PulseSchedule schedule_from_json(const nlohmann::json& j, const PulseLibrary& lib);
void save_schedule(const PulseSchedule& schedule, const std::string& path);
PulseSchedule load_schedule(const std::string& path, const PulseLibrary& lib);

}  // namespace qptrace
