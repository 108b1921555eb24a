#include "qptrace/verify.hpp"

#include <algorithm>
#include <filesystem>
#include <iomanip>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

namespace qptrace {

const char* tier_name(MatchTier tier) {
    switch (tier) {
        case MatchTier::Exact: return "exact";
        case MatchTier::OrderedGates: return "ordered";
        case MatchTier::GateMultiset: return "multiset";
        case MatchTier::Mismatch: return "mismatch";
    }
    return "unknown";
}

namespace {

std::vector<PulseEvent> strip_rz(const PulseSchedule& schedule) {
    std::vector<PulseEvent> out;
    for (const PulseEvent& e : schedule.events)
        if (!e.label.is_virtual()) out.push_back(e);
    std::sort(out.begin(), out.end(), [](const PulseEvent& a, const PulseEvent& b) {
        if (a.start != b.start) return a.start < b.start;
        return a.label < b.label;
    });
    return out;
}

std::vector<std::pair<GateKind, std::vector<int>>> gate_seq(const std::vector<PulseEvent>& ev) {
    std::vector<std::pair<GateKind, std::vector<int>>> out;
    for (const PulseEvent& e : ev) out.emplace_back(e.label.gate, e.label.qubits);
    return out;
}

}  // namespace

GateCounts count_gates(const PulseSchedule& schedule) {
    GateCounts c;
    for (const PulseEvent& e : schedule.events) {
        ++c.total;
        if (e.label.gate == GateKind::RZ) ++c.rz;
        if (e.label.emits_power()) ++c.xsxcx;
    }
    return c;
}

GateCounts count_gates(const GateCircuit& circuit) {
    GateCounts c;
    for (const Gate& g : circuit.gates) {
        ++c.total;
        if (g.kind == GateKind::RZ) ++c.rz;
        if (g.kind == GateKind::X || g.kind == GateKind::SX || g.kind == GateKind::CX) ++c.xsxcx;
    }
    return c;
}

MatchReport compare(const PulseSchedule& truth, const PulseSchedule& recovered,
                    const PulseLibrary& lib) {
    MatchReport report;
    report.truth_counts = count_gates(truth);
    report.recovered_counts = count_gates(recovered);

    auto t = strip_rz(truth);
    auto r = strip_rz(recovered);

    report.recovered_exact = t == r;
    report.start_time_exact = report.recovered_exact;

    for (const PulseEvent& e : t) {
        bool hit = std::find(r.begin(), r.end(), e) != r.end();
        report.per_gate.push_back({e.label, e.start, hit});
    }

    if (report.recovered_exact) {
        report.tier = MatchTier::Exact;
    } else if (gate_seq(t) == gate_seq(r)) {
        report.tier = MatchTier::OrderedGates;
    } else {
        auto mt = gate_seq(t);
        auto mr = gate_seq(r);
        std::sort(mt.begin(), mt.end());
        std::sort(mr.begin(), mr.end());
        report.tier = mt == mr ? MatchTier::GateMultiset : MatchTier::Mismatch;
    }

    PulseSchedule ts = truth, rs = recovered;
    int len = std::max(ts.total_duration, rs.total_duration);
    ts.total_duration = rs.total_duration = len;
    auto total_t = simulate_total(ts, lib);
    auto total_r = simulate_total(rs, lib);
    report.trace_residual = len == 0 ? 0.0 : sad(total_t.samples, total_r.samples);
    report.zero_residual_ambiguity = !report.recovered_exact && report.trace_residual <= 1e-9;
    return report;
}

int channel_depth(const PulseSchedule& schedule, const PulseLibrary& lib) {
    std::map<Channel, int> depth_at;
    std::vector<PulseEvent> events = strip_rz(schedule);
    int out = 0;
    for (const PulseEvent& e : events) {
        const BasisPulse& pulse = lib.at(e.label);
        int d = 0;
        for (const auto& [chan, wf] : pulse.waveforms) d = std::max(d, depth_at[chan]);
        ++d;
        for (const auto& [chan, wf] : pulse.waveforms) depth_at[chan] = d;
        out = std::max(out, d);
    }
    return out;
}

std::vector<BenchRow> run_benchmark(const std::string& suite_dir, const PulseLibrary& lib,
                                    const BenchConfig& config) {
    namespace fs = std::filesystem;
    std::vector<std::string> files;
    if (!fs::exists(suite_dir)) throw FormatError("no such suite directory: " + suite_dir);
    for (const auto& entry : fs::directory_iterator(suite_dir))
        if (entry.is_regular_file() && entry.path().extension() == ".qasm")
            files.push_back(entry.path().string());
    std::sort(files.begin(), files.end());

    std::vector<BenchRow> rows;
    for (const std::string& path : files) {
        BenchRow row;
        row.name = fs::path(path).stem().string();
        try {
            GateCircuit circuit = load_qasm(path);
            row.qubits = circuit.n_qubits;
            row.counts = count_gates(circuit);
            PulseSchedule truth = schedule_circuit(circuit, lib, config.policy);
            row.total_dt = truth.total_duration;
            row.depth = channel_depth(truth, lib);

            MatchTier tier = MatchTier::Exact;
            if (config.attack == AttackKind::PerChannel || config.attack == AttackKind::Both) {
                auto traces = simulate_per_channel(truth, lib);
                if (config.noise_sigma > 0) {
                    uint64_t k = 0;
                    for (auto& [chan, trace] : traces)
                        trace = add_noise(trace, config.noise_sigma,
                                          mix_seed(config.seed, "chan", k++));
                }
                PerChannelReport att = attack_per_channel(traces, lib, config.detect);
                row.solver_time_s += att.elapsed_s;
                MatchReport m = compare(truth, att.schedule, lib);
                tier = std::max(tier, m.tier);
                row.objective = att.aggregate_distance;
            }
            if (config.attack == AttackKind::Total || config.attack == AttackKind::Both) {
                PowerTrace total = simulate_total(truth, lib);
                if (config.noise_sigma > 0)
                    total = add_noise(total, config.noise_sigma, mix_seed(config.seed, "total"));
                MilpModel model = build_attack_model(total, lib, config.milp);
                row.stats = model_stats(model);
                Solution sol = solve_bnb(model, config.budget);
                row.solver_time_s += sol.elapsed_s;
                row.objective = sol.objective;
                MatchReport m = compare(truth, decode_schedule(model, sol), lib);
                tier = std::max(tier, m.tier);
            }
            row.tier = tier;
        } catch (const std::exception& e) {
            row.error = e.what();
            row.tier = MatchTier::Mismatch;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string benchmark_csv(const std::vector<BenchRow>& rows) {
    std::ostringstream out;
    out << "name,qubits,total_gates,rz_gates,xsxcx_gates,total_dt,binaries,continuous,"
           "constraints,solver_time_s,objective,match_tier\n";
    for (const BenchRow& r : rows) {
        out << r.name << "," << r.qubits << "," << r.counts.total << "," << r.counts.rz << ","
            << r.counts.xsxcx << "," << r.total_dt << "," << r.stats.binaries << ","
            << r.stats.continuous << "," << r.stats.constraints << "," << std::fixed
            << std::setprecision(3) << r.solver_time_s << "," << std::setprecision(9)
            << r.objective << "," << (r.error.empty() ? tier_name(r.tier) : "error") << "\n";
        out.unsetf(std::ios::fixed);
    }
    return out.str();
}

std::string benchmark_table(const std::vector<BenchRow>& rows) {
    std::ostringstream out;
    out << std::left << std::setw(20) << "circuit" << std::right << std::setw(7) << "qubits"
        << std::setw(7) << "gates" << std::setw(6) << "rz" << std::setw(7) << "xsxcx"
        << std::setw(7) << "depth" << std::setw(10) << "total_dt" << std::setw(9) << "bins"
        << std::setw(9) << "constrs" << std::setw(10) << "time_s" << std::setw(13) << "objective"
        << "  recovered\n";
    for (const BenchRow& r : rows) {
        out << std::left << std::setw(20) << r.name << std::right << std::setw(7) << r.qubits
            << std::setw(7) << r.counts.total << std::setw(6) << r.counts.rz << std::setw(7)
            << r.counts.xsxcx << std::setw(7) << r.depth << std::setw(10) << r.total_dt
            << std::setw(9) << r.stats.binaries << std::setw(9) << r.stats.constraints
            << std::setw(10) << std::fixed << std::setprecision(3) << r.solver_time_s
            << std::setw(13) << std::setprecision(6) << r.objective << "  "
            << (r.error.empty() ? tier_name(r.tier) : ("error: " + r.error)) << "\n";
        out.unsetf(std::ios::fixed);
    }
    return out.str();
}

nlohmann::json match_report_to_json(const MatchReport& report) {
    nlohmann::json j;
    j["truth_counts"] = {{"total", report.truth_counts.total},
                         {"rz", report.truth_counts.rz},
                         {"xsxcx", report.truth_counts.xsxcx}};
    j["recovered_counts"] = {{"total", report.recovered_counts.total},
                             {"rz", report.recovered_counts.rz},
                             {"xsxcx", report.recovered_counts.xsxcx}};
    j["recovered_exact"] = report.recovered_exact;
    j["start_time_exact"] = report.start_time_exact;
    j["match_tier"] = tier_name(report.tier);
    j["trace_residual"] = report.trace_residual;
    j["zero_residual_ambiguity"] = report.zero_residual_ambiguity;
    nlohmann::json verdicts = nlohmann::json::array();
    for (const GateVerdict& v : report.per_gate) {
        nlohmann::json jv;
        jv["gate"] = gate_name(v.label.gate);
        jv["qubits"] = v.label.qubits;
        jv["start"] = v.start;
        jv["recovered"] = v.recovered;
        verdicts.push_back(std::move(jv));
    }
    j["per_gate"] = std::move(verdicts);
    return j;
}

}  // namespace qptrace
