#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "qptrace/metrics.hpp"
#include "qptrace/tracesim.hpp"

namespace qptrace {

// One matchable instruction on a drive channel: the anchor-channel power
// profile plus the profiles on every channel the label touches, pre-binned
// for comparison.
struct CandidateProfile {
    Label label;
    Channel anchor;
    std::vector<double> anchor_profile;  // raw power samples on the anchor channel
    std::vector<std::pair<Channel, std::vector<double>>> full_profiles;  // canonical order
    std::vector<double> binned_concat;   // bin-summed, channels concatenated
    double total_energy = 0.0;
};

// One profile per single-qubit pulse label on the drive channel (X, SX) plus
// every CX label whose drive channels include it. I and RZ carry no power.
std::vector<CandidateProfile> build_profiles(const PulseLibrary& lib, Channel channel);

struct DetectOptions {
    double tau = 0.05;     // acceptance threshold on sqrt(JSD)
    double tau_cx = 0.05;  // CX threshold for the priority rule
    int bin = 0;           // comparison bin width in dt; 0 = library alignment
};

struct Detection {
    int start = 0;
    Label label;
    double distance = 0.0;
    std::vector<std::pair<Label, double>> rejected_alternatives;  // ascending distance
};

// Distance of one candidate at start t: sqrt(JSD) between the normalized
// bin-summed trace segments and the candidate profile, jointly over all the
// candidate's channels. Returns nullopt if the candidate does not fit.
std::optional<double> candidate_distance(const std::map<Channel, PowerTrace>& traces, int t,
                                         const CandidateProfile& candidate, int bin);

// Selection rule shared with the published-distance fixture: any CX with
// distance <= tau_cx beats every non-CX candidate (its drive prefix is
// indistinguishable from SX); otherwise the minimum-distance candidate wins
// if it clears tau. Returns an index into `scored`, or nullopt.
std::optional<size_t> select_candidate(
    const std::vector<std::pair<bool, double>>& scored /* (is_cx, distance) */, double tau,
    double tau_cx);

std::optional<Detection> detect_at(const std::map<Channel, PowerTrace>& traces, int t,
                                   Channel channel, const std::vector<CandidateProfile>& profiles,
                                   const DetectOptions& opts);

// Greedy left-to-right scan on one drive channel. Skips silent windows,
// commits a detection only at a local minimum of its distance curve, then
// jumps past the detected pulse.
std::vector<Detection> reconstruct_channel(const std::map<Channel, PowerTrace>& traces,
                                           Channel channel,
                                           const std::vector<CandidateProfile>& profiles,
                                           const PulseLibrary& lib, const DetectOptions& opts);

// Deduplicates CX detections seen from both drive channels, verifies each CX
// has energy in its control-channel window, and rejects inconsistent
// overlapping duplicates. The result satisfies the channel constraint.
PulseSchedule merge_channels(const std::map<Channel, std::vector<Detection>>& by_channel,
                             const PulseLibrary& lib,
                             const std::map<Channel, PowerTrace>& traces);

struct PerChannelReport {
    PulseSchedule schedule;
    std::map<Channel, std::vector<Detection>> detections;
    double aggregate_distance = 0.0;  // sum over channels of full-trace sqrt(JSD)
    double elapsed_s = 0.0;
};

// Full attack: scan every drive channel, merge, and score the result against
// the measured traces.
PerChannelReport attack_per_channel(const std::map<Channel, PowerTrace>& traces,
                                    const PulseLibrary& lib, const DetectOptions& opts = {});

nlohmann::json detections_to_json(const std::map<Channel, std::vector<Detection>>& by_channel);

}  // namespace qptrace
