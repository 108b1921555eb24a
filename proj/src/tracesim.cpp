#include "qptrace/tracesim.hpp"

#include <cstring>
#include <fstream>

namespace qptrace {

std::map<Channel, PowerTrace> simulate_per_channel(const PulseSchedule& schedule,
                                                   const PulseLibrary& lib) {
    std::map<Channel, PowerTrace> out;
    for (Channel c : build_channels(lib.device)) {
        out[c].scope = c;
        out[c].samples.assign(schedule.total_duration, 0.0);
    }
    for (const PulseEvent& e : schedule.events) {
        if (e.label.is_virtual()) continue;
        const BasisPulse& pulse = lib.at(e.label);  // throws if the label is missing
        for (const auto& [chan, wf] : pulse.waveforms) {
            auto it = out.find(chan);
            if (it == out.end())
                throw ValidationError("event on unknown channel " + chan.to_string());
            std::vector<double>& samples = it->second.samples;
            for (size_t k = 0; k < wf.size(); ++k) {
                size_t x = static_cast<size_t>(e.start) + k;
                if (x < samples.size()) samples[x] += std::norm(wf[k]);
            }
        }
    }
    return out;
}

PowerTrace simulate_total(const PulseSchedule& schedule, const PulseLibrary& lib) {
    PowerTrace total;
    total.samples.assign(schedule.total_duration, 0.0);
    for (const PulseEvent& e : schedule.events) {
        if (e.label.is_virtual()) continue;
        const BasisPulse& pulse = lib.at(e.label);
        for (const auto& [chan, wf] : pulse.waveforms) {
            for (size_t k = 0; k < wf.size(); ++k) {
                size_t x = static_cast<size_t>(e.start) + k;
                if (x < total.samples.size()) total.samples[x] += std::norm(wf[k]);
            }
        }
    }
    return total;
}

PowerTrace add_noise(const PowerTrace& trace, double sigma, uint64_t seed) {
    if (sigma < 0) throw ValidationError("noise sigma must be >= 0");
    PowerTrace out = trace;
    if (sigma == 0) return out;
    Rng rng(mix_seed(seed, "noise"));
    for (double& x : out.samples) x += sigma * rng.gaussian();
    return out;
}

namespace {

constexpr char kMagic[4] = {'Q', 'P', 'T', 'R'};
constexpr uint32_t kVersion = 1;

template <typename T>
void put(std::ofstream& out, T value) {
    // the toolchain targets little-endian hosts; the format is little-endian
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::ifstream& in) {
    T value;
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in) throw FormatError("truncated trace file");
    return value;
}

}  // namespace

void write_trace(const PowerTrace& trace, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot open " + path + " for writing");
    out.write(kMagic, 4);
    put(out, kVersion);
    uint8_t kind = trace.is_total() ? 0 : (trace.scope->kind == ChannelKind::Drive ? 1 : 2);
    put(out, kind);
    put(out, static_cast<uint32_t>(trace.is_total() ? 0 : trace.scope->index));
    put(out, static_cast<uint64_t>(trace.samples.size()));
    for (double s : trace.samples) put(out, s);
}

PowerTrace read_trace(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw FormatError(path + " is not a trace file (bad magic)");
    uint32_t version = get<uint32_t>(in);
    if (version != kVersion)
        throw FormatError("unsupported trace version " + std::to_string(version));
    uint8_t kind = get<uint8_t>(in);
    uint32_t index = get<uint32_t>(in);
    uint64_t count = get<uint64_t>(in);
    PowerTrace trace;
    if (kind == 1)
        trace.scope = Channel{ChannelKind::Drive, static_cast<int>(index)};
    else if (kind == 2)
        trace.scope = Channel{ChannelKind::Control, static_cast<int>(index)};
    else if (kind != 0)
        throw FormatError("bad scope tag in " + path);
    trace.samples.resize(count);
    for (uint64_t i = 0; i < count; ++i) trace.samples[i] = get<double>(in);
    return trace;
}

void write_trace_csv(const PowerTrace& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot open " + path + " for writing");
    out.precision(17);
    for (size_t i = 0; i < trace.samples.size(); ++i) out << i << "," << trace.samples[i] << "\n";
}

}  // namespace qptrace
