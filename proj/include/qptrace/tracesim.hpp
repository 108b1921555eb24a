#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qptrace/circuit.hpp"

namespace qptrace {

// A power trace on one channel, or the sum over all channels (scope absent).
struct PowerTrace {
    std::optional<Channel> scope;  // nullopt = total
    std::vector<double> samples;

    bool is_total() const { return !scope.has_value(); }
    size_t dt_count() const { return samples.size(); }
};

// trace[c][x] = sum over events covering x of |p_{l,c}(x - t)|^2. The channel
// constraint guarantees at most one pulse contributes per (channel, sample).
std::map<Channel, PowerTrace> simulate_per_channel(const PulseSchedule& schedule,
                                                   const PulseLibrary& lib);

// Elementwise sum over channels; computed directly from the events so it can
// be cross-checked against simulate_per_channel.
PowerTrace simulate_total(const PulseSchedule& schedule, const PulseLibrary& lib);

// Adds i.i.d. Gaussian(0, sigma) to every sample; samples may go negative.
PowerTrace add_noise(const PowerTrace& trace, double sigma, uint64_t seed);

// Binary format: magic "QPTR", version u32, scope tag (u8 kind + u32 index),
// dt_count u64, float64 samples, all little-endian.
void write_trace(const PowerTrace& trace, const std::string& path);
PowerTrace read_trace(const std::string& path);
void write_trace_csv(const PowerTrace& trace, const std::string& path);

}  // namespace qptrace
