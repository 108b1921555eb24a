#pragma once

#include <complex>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "qptrace/device.hpp"

namespace qptrace {

using cplx = std::complex<double>;

// Gaussian with derivative correction: amp * g^(x) * (1 + i*beta*(-(x-mu)/sigma^2)),
// g^ lifted so the virtual samples at x = -1 and x = d are exactly zero.
struct DragEnvelope {
    int duration;
    cplx amp;
    double sigma;
    double beta;
};

// Flat top of `width` samples with lifted-Gaussian rise and mirrored fall.
struct GaussianSquareEnvelope {
    int duration;
    cplx amp;
    double sigma;
    int width;
};

struct DelayEnvelope {
    int duration;
};

using Envelope = std::variant<DragEnvelope, GaussianSquareEnvelope, DelayEnvelope>;

std::vector<cplx> sample_envelope(const Envelope& env);

// One calibrated basis pulse: complex waveform per channel, sample k being the
// amplitude at offset k from the pulse start. The waveform length on a channel
// is the pulse's duration there; the channel is occupied for that long.
struct BasisPulse {
    Label label;
    std::vector<std::pair<Channel, std::vector<cplx>>> waveforms;  // canonical channel order

    const std::vector<cplx>* waveform(Channel c) const;
    int duration_on(Channel c) const;  // throws on unknown channel
    int max_duration() const;
    double total_energy() const;  // sum over channels and samples of |amp|^2
};

// element k = |waveform[k]|^2; throws ValidationError on a channel the pulse
// does not touch
std::vector<double> power_profile(const BasisPulse& pulse, Channel channel);

// Synthesis knobs. CX durations alternate cx_duration_base and
// cx_duration_base + sq_duration by coupling index, so the two directions of
// an edge always differ.
struct SynthProfile {
    int sq_duration = 160;
    int cx_duration_base = 1376;
    int alignment = 16;
};

struct PulseLibrary {
    Device device;
    int alignment = 16;
    std::vector<BasisPulse> pulses;  // canonical label order

    const BasisPulse* find(const Label& label) const;
    const BasisPulse& at(const Label& label) const;  // throws if missing
    int label_index(const Label& label) const;       // position in `pulses`
    int single_qubit_duration() const;
    double max_power() const;  // max |amp|^2 over every pulse sample

    // checks waveform/duration invariants; with require_complete also checks
    // that every non-virtual label of the device has an entry
    void validate(bool require_complete = true) const;
};

// Deterministic synthetic library. X pulses are narrow DRAG envelopes, SX wide
// flat ones at half the X amplitude; CX carries the target qubit's exact SX
// waveform as its target-drive prefix, plus flat-top segments on both drives
// and a full-length flat-top on the control channel.
PulseLibrary synth_library(const Device& device, const SynthProfile& profile, uint64_t seed);

nlohmann::json library_to_json(const PulseLibrary& lib);
PulseLibrary library_from_json(const nlohmann::json& j);
void save_library(const PulseLibrary& lib, const std::string& path);
PulseLibrary load_library(const std::string& path);

}  // namespace qptrace
