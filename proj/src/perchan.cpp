#include "qptrace/perchan.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include <nlohmann/json.hpp>

namespace qptrace {

namespace {

std::vector<double> bin_sum(std::span<const double> v, int bin) {
    size_t n = (v.size() + bin - 1) / bin;
    std::vector<double> out(n, 0.0);
    for (size_t i = 0; i < v.size(); ++i) out[i / bin] += v[i];
    return out;
}

int effective_bin(const DetectOptions& opts, const PulseLibrary& lib) {
    return opts.bin > 0 ? opts.bin : lib.alignment;
}

}  // namespace

std::vector<CandidateProfile> build_profiles(const PulseLibrary& lib, Channel channel) {
    if (channel.kind != ChannelKind::Drive)
        throw ValidationError("profiles are built for drive channels only");
    std::vector<CandidateProfile> out;
    for (const BasisPulse& pulse : lib.pulses) {
        if (!pulse.label.emits_power()) continue;
        if (!pulse.waveform(channel)) continue;
        CandidateProfile cand;
        cand.label = pulse.label;
        cand.anchor = channel;
        cand.anchor_profile = power_profile(pulse, channel);
        for (const auto& [chan, wf] : pulse.waveforms)
            cand.full_profiles.emplace_back(chan, power_profile(pulse, chan));
        for (const auto& [chan, prof] : cand.full_profiles) {
            auto binned = bin_sum(prof, lib.alignment);
            cand.binned_concat.insert(cand.binned_concat.end(), binned.begin(), binned.end());
        }
        cand.total_energy = pulse.total_energy();
        out.push_back(std::move(cand));
    }
    return out;
}

std::optional<double> candidate_distance(const std::map<Channel, PowerTrace>& traces, int t,
                                         const CandidateProfile& candidate, int bin) {
    std::vector<double> measured;
    for (const auto& [chan, prof] : candidate.full_profiles) {
        auto it = traces.find(chan);
        if (it == traces.end())
            throw ValidationError("no trace for channel " + chan.to_string());
        const std::vector<double>& samples = it->second.samples;
        if (t < 0 || t + prof.size() > samples.size()) return std::nullopt;  // does not fit
        auto binned = bin_sum(std::span(samples).subspan(t, prof.size()), bin);
        measured.insert(measured.end(), binned.begin(), binned.end());
    }
    // binned_concat was built with the library alignment; recompute only if a
    // different bin was requested
    const std::vector<double>* profile = &candidate.binned_concat;
    std::vector<double> reprofile;
    size_t expect = 0;
    for (const auto& [chan, prof] : candidate.full_profiles)
        expect += (prof.size() + bin - 1) / bin;
    if (expect != candidate.binned_concat.size()) {
        for (const auto& [chan, prof] : candidate.full_profiles) {
            auto binned = bin_sum(prof, bin);
            reprofile.insert(reprofile.end(), binned.begin(), binned.end());
        }
        profile = &reprofile;
    }
    return js_distance(normalize(measured), normalize(*profile));
}

std::optional<size_t> select_candidate(const std::vector<std::pair<bool, double>>& scored,
                                       double tau, double tau_cx) {
    std::optional<size_t> best_cx, best_any;
    for (size_t i = 0; i < scored.size(); ++i) {
        const auto& [is_cx, dist] = scored[i];
        if (is_cx && dist <= tau_cx && (!best_cx || dist < scored[*best_cx].second)) best_cx = i;
        if (dist <= tau && (!best_any || dist < scored[*best_any].second)) best_any = i;
    }
    if (best_cx) return best_cx;
    return best_any;
}

std::optional<Detection> detect_at(const std::map<Channel, PowerTrace>& traces, int t,
                                   Channel channel, const std::vector<CandidateProfile>& profiles,
                                   const DetectOptions& opts) {
    (void)channel;
    int bin = opts.bin > 0 ? opts.bin : 1;
    std::vector<std::pair<bool, double>> scored;
    std::vector<size_t> index;  // scored position -> profiles position
    for (size_t i = 0; i < profiles.size(); ++i) {
        auto d = candidate_distance(traces, t, profiles[i], bin);
        if (!d) continue;
        scored.emplace_back(profiles[i].label.gate == GateKind::CX, *d);
        index.push_back(i);
    }
    auto pick = select_candidate(scored, opts.tau, opts.tau_cx);
    if (!pick) return std::nullopt;
    Detection det;
    det.start = t;
    det.label = profiles[index[*pick]].label;
    det.distance = scored[*pick].second;
    for (size_t k = 0; k < scored.size(); ++k)
        if (k != *pick)
            det.rejected_alternatives.emplace_back(profiles[index[k]].label, scored[k].second);
    std::sort(det.rejected_alternatives.begin(), det.rejected_alternatives.end(),
              [](const auto& a, const auto& b) { return a.second < b.second; });
    return det;
}

std::vector<Detection> reconstruct_channel(const std::map<Channel, PowerTrace>& traces,
                                           Channel channel,
                                           const std::vector<CandidateProfile>& profiles,
                                           const PulseLibrary& lib, const DetectOptions& opts) {
    std::vector<Detection> out;
    auto it = traces.find(channel);
    if (it == traces.end())
        throw ValidationError("no trace for channel " + channel.to_string());
    const std::vector<double>& samples = it->second.samples;
    const int n = static_cast<int>(samples.size());
    const int grid = lib.alignment;
    const int sq = lib.single_qubit_duration();
    const double silent = 1e-6 * lib.max_power();

    DetectOptions scan_opts = opts;
    scan_opts.bin = effective_bin(opts, lib);

    int t = 0;
    while (t < n) {
        bool quiet = true;
        for (int x = t; x < std::min(t + sq, n); ++x)
            if (samples[x] >= silent) {
                quiet = false;
                break;
            }
        if (quiet) {
            t += grid;
            continue;
        }
        auto det = detect_at(traces, t, channel, profiles, scan_opts);
        if (det) {
            // commit only at a local minimum of the chosen label's distance
            // curve, so a noisy partial overlap one grid step early does not
            // preempt the true start
            const CandidateProfile* cand = nullptr;
            for (const auto& p : profiles)
                if (p.label == det->label) cand = &p;
            auto ahead = candidate_distance(traces, t + grid, *cand, scan_opts.bin);
            if (ahead && *ahead < det->distance) {
                t += grid;
                continue;
            }
            out.push_back(*det);
            int dur = 0;
            for (const auto& [chan, prof] : cand->full_profiles)
                if (chan == channel) dur = static_cast<int>(prof.size());
            t += std::max(dur, grid);
        } else {
            t += grid;
        }
    }
    return out;
}

PulseSchedule merge_channels(const std::map<Channel, std::vector<Detection>>& by_channel,
                             const PulseLibrary& lib,
                             const std::map<Channel, PowerTrace>& traces) {
    std::vector<PulseEvent> events;
    std::vector<std::pair<Label, int>> cx_seen;
    for (const auto& [chan, detections] : by_channel) {
        for (const Detection& det : detections) {
            if (det.label.gate != GateKind::CX) {
                events.push_back({det.label, det.start});
                continue;
            }
            bool dup = false;
            for (const auto& [label, start] : cx_seen) {
                if (label == det.label && start == det.start) {
                    dup = true;
                    break;
                }
                if (label == det.label) {
                    int dur = lib.at(label).max_duration();
                    bool overlap = det.start < start + dur && start < det.start + dur;
                    if (overlap)
                        throw ValidationError(
                            "inconsistent duplicate CX " + label.to_string() + " at " +
                            std::to_string(start) + " vs " + std::to_string(det.start));
                }
            }
            if (dup) continue;
            cx_seen.emplace_back(det.label, det.start);
            events.push_back({det.label, det.start});
        }
    }

    // every kept CX must show energy in its control-channel window
    std::vector<PulseEvent> kept;
    for (const PulseEvent& e : events) {
        if (e.label.gate == GateKind::CX) {
            Channel control{ChannelKind::Control, -1};
            for (Channel c : e.label.channels)
                if (c.kind == ChannelKind::Control) control = c;
            const BasisPulse& pulse = lib.at(e.label);
            auto profile = power_profile(pulse, control);
            double expected = 0.0;
            for (double p : profile) expected += p;
            auto it = traces.find(control);
            if (it == traces.end())
                throw ValidationError("no trace for channel " + control.to_string());
            double got = 0.0;
            for (size_t k = 0; k < profile.size(); ++k) {
                size_t x = static_cast<size_t>(e.start) + k;
                if (x < it->second.samples.size()) got += it->second.samples[x];
            }
            if (got < 0.5 * expected) continue;  // no cross-resonance tone: spurious
        }
        kept.push_back(e);
    }

    PulseSchedule sched;
    sched.events = std::move(kept);
    std::sort(sched.events.begin(), sched.events.end(),
              [&](const PulseEvent& a, const PulseEvent& b) {
                  if (a.start != b.start) return a.start < b.start;
                  int ca = a.label.channels.front().canonical_index(lib.device.n_qubits);
                  int cb = b.label.channels.front().canonical_index(lib.device.n_qubits);
                  if (ca != cb) return ca < cb;
                  return a.label < b.label;
              });
    for (const PulseEvent& e : sched.events)
        sched.total_duration =
            std::max(sched.total_duration, e.start + lib.at(e.label).max_duration());
    validate_channel_constraint(sched, lib);
    return sched;
}

PerChannelReport attack_per_channel(const std::map<Channel, PowerTrace>& traces,
                                    const PulseLibrary& lib, const DetectOptions& opts) {
    auto t0 = std::chrono::steady_clock::now();
    PerChannelReport report;
    for (Channel c : build_channels(lib.device)) {
        if (c.kind != ChannelKind::Drive) continue;
        auto profiles = build_profiles(lib, c);
        report.detections[c] = reconstruct_channel(traces, c, profiles, lib, opts);
    }
    report.schedule = merge_channels(report.detections, lib, traces);

    // aggregate per-channel goal: plain sum over channels of the sqrt(JSD)
    // between the recovered schedule's traces and the measured ones
    PulseSchedule padded = report.schedule;
    size_t measured_len = 0;
    for (const auto& [c, tr] : traces) measured_len = std::max(measured_len, tr.dt_count());
    padded.total_duration = std::max<int>(padded.total_duration,
                                          static_cast<int>(measured_len));
    auto simulated = simulate_per_channel(padded, lib);
    for (const auto& [c, sim] : simulated) {
        auto it = traces.find(c);
        if (it == traces.end() || it->second.samples.empty() || sim.samples.empty()) continue;
        std::vector<double> a = sim.samples, b = it->second.samples;
        size_t len = std::max(a.size(), b.size());
        a.resize(len, 0.0);
        b.resize(len, 0.0);
        report.aggregate_distance += js_distance(normalize(a), normalize(b));
    }
    report.elapsed_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

nlohmann::json detections_to_json(const std::map<Channel, std::vector<Detection>>& by_channel) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& [chan, detections] : by_channel) {
        for (const Detection& det : detections) {
            nlohmann::json j;
            j["channel"] = chan.to_string();
            j["start"] = det.start;
            j["gate"] = gate_name(det.label.gate);
            j["qubits"] = det.label.qubits;
            j["distance"] = det.distance;
            nlohmann::json alts = nlohmann::json::array();
            for (const auto& [label, dist] : det.rejected_alternatives) {
                nlohmann::json ja;
                ja["gate"] = gate_name(label.gate);
                ja["qubits"] = label.qubits;
                ja["distance"] = dist;
                alts.push_back(std::move(ja));
            }
            j["alternatives"] = std::move(alts);
            out.push_back(std::move(j));
        }
    }
    return out;
}

}  // namespace qptrace
