#include "qptrace/device.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

namespace qptrace {

const char* gate_name(GateKind kind) {
    switch (kind) {
        case GateKind::I: return "i";
        case GateKind::RZ: return "rz";
        case GateKind::X: return "x";
        case GateKind::SX: return "sx";
        case GateKind::CX: return "cx";
    }
    throw Error("unreachable gate kind");
}

GateKind gate_from_name(const std::string& name) {
    if (name == "i" || name == "id") return GateKind::I;
    if (name == "rz") return GateKind::RZ;
    if (name == "x") return GateKind::X;
    if (name == "sx") return GateKind::SX;
    if (name == "cx") return GateKind::CX;
    throw ValidationError("unknown gate name: " + name);
}

int gate_arity(GateKind kind) { return kind == GateKind::CX ? 2 : 1; }

Channel parse_channel(const std::string& text) {
    if (text.size() < 2 || (text[0] != 'd' && text[0] != 'c'))
        throw FormatError("bad channel name: " + text);
    ChannelKind kind = text[0] == 'd' ? ChannelKind::Drive : ChannelKind::Control;
    try {
        return Channel{kind, std::stoi(text.substr(1))};
    } catch (const std::exception&) {
        throw FormatError("bad channel name: " + text);
    }
}

void Device::validate() const {
    if (n_qubits <= 0) throw ValidationError("device must have a positive qubit count");
    std::set<std::pair<int, int>> seen;
    for (const auto& [a, b] : couplings) {
        if (a < 0 || b < 0 || a >= n_qubits || b >= n_qubits)
            throw ValidationError("coupling (" + std::to_string(a) + "," + std::to_string(b) +
                                  ") references a qubit outside the device");
        if (a == b)
            throw ValidationError("self-coupling (" + std::to_string(a) + "," +
                                  std::to_string(a) + ") is not allowed");
        if (!seen.insert({a, b}).second)
            throw ValidationError("duplicate coupling (" + std::to_string(a) + "," +
                                  std::to_string(b) + ")");
    }
}

bool Device::has_coupling(int a, int b) const {
    return std::find(couplings.begin(), couplings.end(), std::make_pair(a, b)) !=
           couplings.end();
}

int Device::coupling_index(int a, int b) const {
    auto it = std::find(couplings.begin(), couplings.end(), std::make_pair(a, b));
    if (it == couplings.end())
        throw ValidationError("no coupling (" + std::to_string(a) + "," + std::to_string(b) +
                              ") on device " + name);
    return static_cast<int>(it - couplings.begin());
}

std::string Label::to_string() const {
    if (gate == GateKind::CX)
        return "CX(q" + std::to_string(qubits[0]) + "->q" + std::to_string(qubits[1]) + ")";
    std::string n = gate_name(gate);
    std::transform(n.begin(), n.end(), n.begin(), ::toupper);
    return n + "(q" + std::to_string(qubits[0]) + ")";
}

Label make_single_qubit_label(GateKind kind, int qubit) {
    if (kind == GateKind::CX) throw ValidationError("CX is not a single-qubit gate");
    Label l;
    l.gate = kind;
    l.qubits = {qubit};
    l.channels = {Channel{ChannelKind::Drive, qubit}};
    return l;
}

Label make_cx_label(const Device& device, int control, int target) {
    Label l;
    l.gate = GateKind::CX;
    l.qubits = {control, target};
    l.channels = {Channel{ChannelKind::Drive, control}, Channel{ChannelKind::Drive, target},
                  Channel{ChannelKind::Control, device.coupling_index(control, target)}};
    std::sort(l.channels.begin(), l.channels.end());
    return l;
}

std::vector<Channel> build_channels(const Device& device) {
    device.validate();
    std::vector<Channel> out;
    out.reserve(device.n_qubits + device.couplings.size());
    for (int q = 0; q < device.n_qubits; ++q) out.push_back({ChannelKind::Drive, q});
    for (int j = 0; j < static_cast<int>(device.couplings.size()); ++j)
        out.push_back({ChannelKind::Control, j});
    return out;
}

bool GateAvailability::allows(GateKind kind, int qubit) const {
    if (!gates.count(kind)) return false;
    for (const auto& [g, qs] : qubit_restrictions)
        if (g == kind) return std::find(qs.begin(), qs.end(), qubit) != qs.end();
    return true;
}

std::vector<Label> enumerate_labels(const Device& device) {
    return enumerate_labels(device, GateAvailability{});
}

std::vector<Label> enumerate_labels(const Device& device, const GateAvailability& avail) {
    device.validate();
    std::vector<Label> out;
    for (int q = 0; q < device.n_qubits; ++q) {
        for (GateKind kind : {GateKind::I, GateKind::X, GateKind::SX, GateKind::RZ})
            if (avail.allows(kind, q)) out.push_back(make_single_qubit_label(kind, q));
    }
    if (avail.gates.count(GateKind::CX))
        for (const auto& [a, b] : device.couplings) out.push_back(make_cx_label(device, a, b));
    return out;
}

namespace {

Device from_edges(const std::string& name, int n,
                  const std::vector<std::pair<int, int>>& edges) {
    Device d;
    d.name = name;
    d.n_qubits = n;
    for (const auto& [a, b] : edges) {
        d.couplings.emplace_back(a, b);
        d.couplings.emplace_back(b, a);
    }
    d.validate();
    return d;
}

}  // namespace

Device standard_topology(TopologyKind kind, int n_qubits) {
    switch (kind) {
        case TopologyKind::Line: {
            if (n_qubits < 1) throw ValidationError("line topology needs >= 1 qubit");
            std::vector<std::pair<int, int>> edges;
            for (int i = 0; i + 1 < n_qubits; ++i) edges.emplace_back(i, i + 1);
            return from_edges("line" + std::to_string(n_qubits), n_qubits, edges);
        }
        case TopologyKind::TShape5:
            if (n_qubits != 5) throw ValidationError("T-shape topology requires 5 qubits");
            return from_edges("tshape5", 5, {{0, 1}, {1, 2}, {1, 3}, {3, 4}});
        case TopologyKind::HShape7:
            if (n_qubits != 7) throw ValidationError("H-shape topology requires 7 qubits");
            return from_edges("hshape7", 7, {{0, 1}, {1, 2}, {1, 3}, {3, 5}, {4, 5}, {5, 6}});
    }
    throw Error("unreachable topology kind");
}

TopologyKind topology_from_name(const std::string& name) {
    if (name == "line") return TopologyKind::Line;
    if (name == "tshape5") return TopologyKind::TShape5;
    if (name == "hshape7") return TopologyKind::HShape7;
    throw ValidationError("unknown topology: " + name);
}

nlohmann::json device_to_json(const Device& device) {
    nlohmann::json j;
    j["name"] = device.name;
    j["n_qubits"] = device.n_qubits;
    j["couplings"] = nlohmann::json::array();
    for (const auto& [a, b] : device.couplings) j["couplings"].push_back({a, b});
    j["dt_label"] = device.dt_label;
    return j;
}

Device device_from_json(const nlohmann::json& j) {
    Device d;
    try {
        d.name = j.at("name").get<std::string>();
        d.n_qubits = j.at("n_qubits").get<int>();
        for (const auto& pair : j.at("couplings")) {
            if (!pair.is_array() || pair.size() != 2)
                throw FormatError("coupling entries must be [a, b] pairs");
            d.couplings.emplace_back(pair[0].get<int>(), pair[1].get<int>());
        }
        if (j.contains("dt_label")) d.dt_label = j.at("dt_label").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("bad device JSON: ") + e.what());
    }
    d.validate();
    return d;
}

void save_device(const Device& device, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot open " + path + " for writing");
    out << device_to_json(device).dump(2) << "\n";
}

Device load_device(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("malformed JSON in ") + path + ": " + e.what());
    }
    return device_from_json(j);
}

}  // namespace qptrace
