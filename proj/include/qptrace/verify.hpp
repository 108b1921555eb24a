#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "qptrace/milp.hpp"
#include "qptrace/perchan.hpp"
#include "qptrace/solver.hpp"

namespace qptrace {

struct GateCounts {
    int total = 0;
    int rz = 0;
    int xsxcx = 0;
};

enum class MatchTier { Exact, OrderedGates, GateMultiset, Mismatch };
const char* tier_name(MatchTier tier);

struct GateVerdict {
    Label label;
    int start = 0;
    bool recovered = false;
};

struct MatchReport {
    GateCounts truth_counts;
    GateCounts recovered_counts;
    bool recovered_exact = false;    // identical (label, start) sets, RZ excluded
    bool start_time_exact = false;   // alias of recovered_exact, kept explicit
    MatchTier tier = MatchTier::Mismatch;
    std::vector<GateVerdict> per_gate;  // one entry per truth event (RZ excluded)
    double trace_residual = 0.0;        // SAD between the two simulated totals
    bool zero_residual_ambiguity = false;  // differing events, identical trace
};

// RZ events are stripped from both sides first: they leave no pulse and are
// declared unrecoverable. Tiers weaken from exact (label, start) sets through
// ordered gate sequence to gate multiset.
MatchReport compare(const PulseSchedule& truth, const PulseSchedule& recovered,
                    const PulseLibrary& lib);

GateCounts count_gates(const PulseSchedule& schedule);
GateCounts count_gates(const GateCircuit& circuit);

// Longest chain of events linked by shared channels; a proxy for circuit depth.
int channel_depth(const PulseSchedule& schedule, const PulseLibrary& lib);

enum class AttackKind { PerChannel, Total, Both };

struct BenchConfig {
    AttackKind attack = AttackKind::PerChannel;
    DetectOptions detect;
    AttackModelOptions milp;
    BnbBudget budget;
    double noise_sigma = 0.0;
    uint64_t seed = 0;
    SchedulePolicy policy = SchedulePolicy::Alap;
};

struct BenchRow {
    std::string name;
    int qubits = 0;
    GateCounts counts;
    int depth = 0;
    int total_dt = 0;
    ModelStats stats;
    double solver_time_s = 0.0;
    double objective = 0.0;
    MatchTier tier = MatchTier::Mismatch;
    std::string error;  // non-empty when this circuit failed
};

// Runs schedule -> simulate -> attack -> compare on every .qasm file in
// suite_dir (sorted by filename). Per-circuit failures are recorded and the
// harness continues.
std::vector<BenchRow> run_benchmark(const std::string& suite_dir, const PulseLibrary& lib,
                                    const BenchConfig& config);

// name,qubits,total_gates,rz_gates,xsxcx_gates,total_dt,binaries,continuous,
// constraints,solver_time_s,objective,match_tier
std::string benchmark_csv(const std::vector<BenchRow>& rows);
std::string benchmark_table(const std::vector<BenchRow>& rows);

nlohmann::json match_report_to_json(const MatchReport& report);

}  // namespace qptrace
