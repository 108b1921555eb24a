#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "qptrace/milp.hpp"
#include "qptrace/solver.hpp"
#include "qptrace/tracesim.hpp"
#include "qptrace/verify.hpp"

namespace qptest {

using namespace qptrace;

// The paper-style hypothetical 2-qubit device: basis gates {X, SX}, SX only
// on qubit 0, no couplings. X(q0) lasts 3 dt, SX(q0) 4 dt, X(q1) 2 dt.
inline PulseLibrary figure_library() {
    Device dev;
    dev.name = "hypo2";
    dev.n_qubits = 2;

    PulseLibrary lib;
    lib.device = dev;
    lib.alignment = 1;

    auto add = [&lib](GateKind kind, int qubit, std::vector<double> power) {
        BasisPulse p;
        p.label = make_single_qubit_label(kind, qubit);
        std::vector<cplx> wf;
        for (double v : power) wf.emplace_back(std::sqrt(v), 0.0);
        p.waveforms.emplace_back(p.label.channels[0], std::move(wf));
        lib.pulses.push_back(std::move(p));
    };
    add(GateKind::X, 0, {0.3, 0.9, 0.4});
    add(GateKind::SX, 0, {0.1, 0.5, 0.5, 0.2});
    add(GateKind::X, 1, {0.7, 0.6});
    return lib;
}

inline GateAvailability figure_availability() {
    GateAvailability avail;
    avail.gates = {GateKind::X, GateKind::SX};
    avail.qubit_restrictions = {{GateKind::SX, {0}}};
    return avail;
}

// Toy synthetic library used by the MILP plant-and-recover tests.
inline PulseLibrary toy_library(int n_qubits, uint64_t seed) {
    Device dev = standard_topology(TopologyKind::Line, n_qubits);
    SynthProfile profile;
    profile.sq_duration = 16;
    profile.cx_duration_base = 48;
    profile.alignment = 8;
    return synth_library(dev, profile, seed);
}

// Random circuit over {X, SX, CX, RZ}; CX pairs are legal couplings among the
// first `n_qubits` qubits of the library's device.
inline GateCircuit random_circuit(const Device& device, int n_qubits, int n_gates, Rng& rng,
                                  bool with_rz = true) {
    std::vector<std::pair<int, int>> couplings;
    for (const auto& [a, b] : device.couplings)
        if (a < n_qubits && b < n_qubits) couplings.emplace_back(a, b);

    GateCircuit circuit;
    circuit.n_qubits = device.n_qubits;
    for (int i = 0; i < n_gates; ++i) {
        double roll = rng.uniform();
        Gate g;
        if (!couplings.empty() && roll < 0.3) {
            g.kind = GateKind::CX;
            auto [a, b] = couplings[rng.uniform_int(0, static_cast<int>(couplings.size()) - 1)];
            g.qubits = {a, b};
        } else if (with_rz && roll > 0.85) {
            g.kind = GateKind::RZ;
            g.qubits = {rng.uniform_int(0, n_qubits - 1)};
            g.angle = rng.uniform(-3.14159, 3.14159);
        } else {
            g.kind = roll < 0.6 ? GateKind::X : GateKind::SX;
            g.qubits = {rng.uniform_int(0, n_qubits - 1)};
        }
        circuit.gates.push_back(std::move(g));
    }
    return circuit;
}

// Interval scanner independent of validate_channel_constraint: brute-force
// per-sample occupancy count.
inline bool channels_exclusive(const PulseSchedule& schedule, const PulseLibrary& lib) {
    std::map<Channel, std::vector<int>> occupancy;
    for (Channel c : build_channels(lib.device))
        occupancy[c] = std::vector<int>(schedule.total_duration, 0);
    for (const PulseEvent& e : schedule.events) {
        if (e.label.is_virtual()) continue;
        const BasisPulse& pulse = lib.at(e.label);
        for (const auto& [chan, wf] : pulse.waveforms)
            for (size_t k = 0; k < wf.size(); ++k) {
                size_t x = e.start + k;
                if (x >= occupancy[chan].size()) return false;
                if (++occupancy[chan][x] > 1) return false;
            }
    }
    return true;
}

// Attack-shaped random model: fit rows + |.| objective + at-most-one side
// constraints, with a planted assignment so instances are near-feasible.
inline MilpModel random_structured_model(uint64_t seed, int max_binaries = 16) {
    Rng rng(seed);
    MilpModel model;
    const int nb = rng.uniform_int(2, max_binaries);
    const int nrows = rng.uniform_int(2, 12);
    std::vector<VarRef> bins;
    std::vector<int> planted;
    for (int i = 0; i < nb; ++i) {
        bins.push_back(model.add_binary("a_" + std::to_string(i)));
        planted.push_back(rng.uniform() < 0.4);
    }
    std::vector<LinExpr> rows(nrows);
    std::vector<double> targets(nrows, 0.0);
    for (int i = 0; i < nb; ++i) {
        int deg = rng.uniform_int(1, 3);
        for (int d = 0; d < deg; ++d) {
            int r = rng.uniform_int(0, nrows - 1);
            double coef = rng.uniform(0.1, 1.5);
            rows[r].add(coef, bins[i]);
            if (planted[i]) targets[r] += coef;
        }
    }
    for (int r = 0; r < nrows; ++r) {
        double noise = rng.uniform(-0.2, 0.2);
        VarRef e = model.add_continuous("e_" + std::to_string(r));
        LinExpr fit = rows[r];
        fit.add(1.0, e);
        model.add_constraint("fit_" + std::to_string(r), fit, Sense::Eq, targets[r] + noise);
        VarRef z = add_abs(model, LinExpr(1.0, e), std::to_string(r));
        model.objective.add(1.0, z);
    }
    if (rng.uniform() < 0.5 && nb >= 3) {
        std::vector<VarRef> subset;
        for (int i = 0; i < nb; ++i)
            if (rng.uniform() < 0.4) subset.push_back(bins[i]);
        if (subset.size() >= 2)
            add_pseudo_boolean(model, subset, Sense::Le,
                               std::max(1, static_cast<int>(subset.size()) - 1), "side");
    }
    model.objective.canonicalize();
    return model;
}

struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& tag) {
        path = std::filesystem::temp_directory_path() /
               ("qptest_" + tag + "_" + std::to_string(::getpid()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace qptest
