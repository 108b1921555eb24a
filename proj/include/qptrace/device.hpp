#pragma once

#include <compare>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "qptrace/common.hpp"

namespace qptrace {

enum class GateKind { I, RZ, X, SX, CX };

const char* gate_name(GateKind kind);
GateKind gate_from_name(const std::string& name);
int gate_arity(GateKind kind);

enum class ChannelKind { Drive, Control };

// One hardware channel: drive channels carry single-qubit pulses to a qubit,
// control channels belong to a directed qubit coupling.
struct Channel {
    ChannelKind kind;
    int index;

    auto operator<=>(const Channel&) const = default;

    // drives first (ascending), then controls (ascending)
    int canonical_index(int n_qubits) const {
        return kind == ChannelKind::Drive ? index : n_qubits + index;
    }
    std::string to_string() const {
        return (kind == ChannelKind::Drive ? "d" : "c") + std::to_string(index);
    }
};

Channel parse_channel(const std::string& text);

// Device topology: qubit count plus the ordered list of directed couplings.
// Control channel j corresponds to couplings[j].
struct Device {
    std::string name;
    int n_qubits = 0;
    std::vector<std::pair<int, int>> couplings;
    std::string dt_label = "dt";

    void validate() const;
    bool has_coupling(int a, int b) const;
    // position of (a, b) in couplings; throws ValidationError if absent
    int coupling_index(int a, int b) const;
};

// A basis-gate instance bound to concrete channels; uniquely identifies a
// basis pulse in the library.
struct Label {
    GateKind gate;
    std::vector<int> qubits;
    std::vector<Channel> channels;

    // RZ is a frame change with no pulse at all.
    bool is_virtual() const { return gate == GateKind::RZ; }
    // I occupies its drive channel but emits zero amplitude.
    bool emits_power() const {
        return gate == GateKind::X || gate == GateKind::SX || gate == GateKind::CX;
    }

    bool operator==(const Label& o) const { return gate == o.gate && qubits == o.qubits; }
    bool operator<(const Label& o) const {
        if (gate != o.gate) return gate < o.gate;
        return qubits < o.qubits;
    }
    std::string to_string() const;  // e.g. "X(q1)", "CX(q0->q1)"
};

Label make_single_qubit_label(GateKind kind, int qubit);
Label make_cx_label(const Device& device, int control, int target);

// n_qubits drive channels followed by one control channel per coupling.
std::vector<Channel> build_channels(const Device& device);

// Restricts which gates exist on which qubits; used for hypothetical devices
// with reduced basis-gate sets.
struct GateAvailability {
    std::set<GateKind> gates = {GateKind::I, GateKind::RZ, GateKind::X, GateKind::SX,
                                GateKind::CX};
    // gate -> allowed qubits; absent entry means all qubits
    std::vector<std::pair<GateKind, std::vector<int>>> qubit_restrictions;

    bool allows(GateKind kind, int qubit) const;
};

// Canonical label set: per qubit I, X, SX, RZ (RZ virtual), then one CX label
// per directed coupling, in coupling order.
std::vector<Label> enumerate_labels(const Device& device);
std::vector<Label> enumerate_labels(const Device& device, const GateAvailability& avail);

enum class TopologyKind { Line, TShape5, HShape7 };

// Deterministic coupling lists for the standard coupling-map shapes. Both
// directions of every edge are present, (a,b) immediately followed by (b,a).
Device standard_topology(TopologyKind kind, int n_qubits);
TopologyKind topology_from_name(const std::string& name);

nlohmann::json device_to_json(const Device& device);
Device device_from_json(const nlohmann::json& j);
void save_device(const Device& device, const std::string& path);
Device load_device(const std::string& path);

}  // namespace qptrace
