#include "qptrace/pulselib.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

namespace qptrace {

namespace {

void check_positive_duration(int d) {
    if (d <= 0) throw ValidationError("envelope duration must be positive");
}

std::vector<cplx> sample_drag(const DragEnvelope& e) {
    check_positive_duration(e.duration);
    if (e.sigma <= 0) throw ValidationError("drag sigma must be positive");
    const double mu = (e.duration - 1) / 2.0;
    const double denom = 2.0 * e.sigma * e.sigma;
    const double g_edge = std::exp(-(-1.0 - mu) * (-1.0 - mu) / denom);
    std::vector<cplx> out(e.duration);
    for (int x = 0; x < e.duration; ++x) {
        double g = std::exp(-(x - mu) * (x - mu) / denom);
        double lifted = (g - g_edge) / (1.0 - g_edge);
        double deriv = -(x - mu) / (e.sigma * e.sigma);
        out[x] = e.amp * lifted * cplx{1.0, e.beta * deriv};
    }
    return out;
}

std::vector<cplx> sample_gaussian_square(const GaussianSquareEnvelope& e) {
    check_positive_duration(e.duration);
    if (e.sigma <= 0) throw ValidationError("gaussian-square sigma must be positive");
    if (e.width < 0 || e.width >= e.duration)
        throw ValidationError("gaussian-square width must lie in [0, duration)");
    const double rise = (e.duration - e.width) / 2.0;
    const double denom = 2.0 * e.sigma * e.sigma;
    const double g_edge = std::exp(-(-1.0 - rise) * (-1.0 - rise) / denom);
    std::vector<cplx> out(e.duration);
    for (int x = 0; x < e.duration; ++x) {
        double g;
        if (x < rise)
            g = std::exp(-(x - rise) * (x - rise) / denom);
        else if (x > (e.duration - 1) - rise)
            g = std::exp(-(x - ((e.duration - 1) - rise)) * (x - ((e.duration - 1) - rise)) /
                         denom);
        else
            g = 1.0;
        out[x] = e.amp * ((g - g_edge) / (1.0 - g_edge));
    }
    return out;
}

}  // namespace

std::vector<cplx> sample_envelope(const Envelope& env) {
    if (const auto* d = std::get_if<DragEnvelope>(&env)) return sample_drag(*d);
    if (const auto* g = std::get_if<GaussianSquareEnvelope>(&env))
        return sample_gaussian_square(*g);
    const auto& delay = std::get<DelayEnvelope>(env);
    check_positive_duration(delay.duration);
    return std::vector<cplx>(delay.duration, cplx{0.0, 0.0});
}

const std::vector<cplx>* BasisPulse::waveform(Channel c) const {
    for (const auto& [chan, wf] : waveforms)
        if (chan == c) return &wf;
    return nullptr;
}

int BasisPulse::duration_on(Channel c) const {
    const auto* wf = waveform(c);
    if (!wf)
        throw ValidationError("pulse " + label.to_string() + " has no waveform on channel " +
                              c.to_string());
    return static_cast<int>(wf->size());
}

int BasisPulse::max_duration() const {
    int d = 0;
    for (const auto& [chan, wf] : waveforms) d = std::max(d, static_cast<int>(wf.size()));
    return d;
}

double BasisPulse::total_energy() const {
    double e = 0.0;
    for (const auto& [chan, wf] : waveforms)
        for (const cplx& s : wf) e += std::norm(s);
    return e;
}

std::vector<double> power_profile(const BasisPulse& pulse, Channel channel) {
    const auto* wf = pulse.waveform(channel);
    if (!wf)
        throw ValidationError("pulse " + pulse.label.to_string() +
                              " has no waveform on channel " + channel.to_string());
    std::vector<double> out(wf->size());
    for (size_t k = 0; k < wf->size(); ++k) out[k] = std::norm((*wf)[k]);
    return out;
}

const BasisPulse* PulseLibrary::find(const Label& label) const {
    for (const auto& p : pulses)
        if (p.label == label) return &p;
    return nullptr;
}

const BasisPulse& PulseLibrary::at(const Label& label) const {
    const BasisPulse* p = find(label);
    if (!p) throw ValidationError("library has no pulse for label " + label.to_string());
    return *p;
}

int PulseLibrary::label_index(const Label& label) const {
    for (size_t i = 0; i < pulses.size(); ++i)
        if (pulses[i].label == label) return static_cast<int>(i);
    throw ValidationError("library has no pulse for label " + label.to_string());
}

int PulseLibrary::single_qubit_duration() const {
    for (const auto& p : pulses)
        if (p.label.gate != GateKind::CX) return p.max_duration();
    throw ValidationError("library has no single-qubit pulses");
}

double PulseLibrary::max_power() const {
    double m = 0.0;
    for (const auto& p : pulses)
        for (const auto& [chan, wf] : p.waveforms)
            for (const cplx& s : wf) m = std::max(m, std::norm(s));
    return m;
}

void PulseLibrary::validate(bool require_complete) const {
    device.validate();
    if (alignment <= 0) throw ValidationError("alignment must be positive");
    int sq_duration = -1;
    for (const auto& p : pulses) {
        if (p.waveforms.empty())
            throw ValidationError("pulse " + p.label.to_string() + " has no waveforms");
        for (const auto& [chan, wf] : p.waveforms) {
            if (wf.empty())
                throw ValidationError("pulse " + p.label.to_string() +
                                      " has an empty waveform on " + chan.to_string());
            if (static_cast<int>(wf.size()) % alignment != 0)
                throw ValidationError("pulse " + p.label.to_string() + " duration " +
                                      std::to_string(wf.size()) +
                                      " is not a multiple of the alignment");
            for (const cplx& s : wf)
                if (std::abs(s) > 1.0 + 1e-12)
                    throw ValidationError("pulse " + p.label.to_string() +
                                          " has |amplitude| > 1");
        }
        if (p.label.gate != GateKind::CX) {
            int d = p.max_duration();
            if (sq_duration < 0) sq_duration = d;
            if (d != sq_duration)
                throw ValidationError("single-qubit pulse durations differ within the library");
        }
    }
    if (require_complete) {
        for (const Label& l : enumerate_labels(device)) {
            if (l.is_virtual()) continue;
            if (!find(l)) throw ValidationError("incomplete library: missing " + l.to_string());
        }
    }
}

namespace {

struct QubitParams {
    double amp_x, sigma_x, beta_x;
    double sigma_sx, beta_sx;
};

QubitParams qubit_params(int duration, uint64_t seed, int qubit) {
    Rng rng(mix_seed(seed, "sq", qubit));
    QubitParams p;
    const double halfwidth = (duration - 1) / 2.0;
    p.amp_x = rng.uniform(0.78, 0.90);
    // X narrow, SX wide: the distinct shapes keep the two distinguishable
    // after power normalization even though SX is just a weaker rotation.
    // beta scales with sigma^2/halfwidth so |1 + i*beta*(x-mu)/sigma^2| stays
    // bounded and |amplitude| <= 1 holds at every duration.
    p.sigma_x = duration * rng.uniform(0.13, 0.17);
    p.beta_x = rng.uniform(0.15, 0.35) * p.sigma_x * p.sigma_x / halfwidth;
    p.sigma_sx = duration * rng.uniform(0.42, 0.50);
    p.beta_sx = rng.uniform(0.3, 0.6) * p.sigma_sx * p.sigma_sx / halfwidth;
    return p;
}

std::vector<cplx> x_waveform(int duration, const QubitParams& p) {
    return sample_envelope(DragEnvelope{duration, p.amp_x, p.sigma_x, p.beta_x});
}

std::vector<cplx> sx_waveform(int duration, const QubitParams& p) {
    return sample_envelope(DragEnvelope{duration, p.amp_x / 2.0, p.sigma_sx, p.beta_sx});
}

void paste(std::vector<cplx>& dst, int offset, const std::vector<cplx>& src) {
    for (size_t k = 0; k < src.size(); ++k) dst[offset + k] = src[k];
}

}  // namespace

PulseLibrary synth_library(const Device& device, const SynthProfile& profile, uint64_t seed) {
    device.validate();
    if (profile.alignment <= 0) throw ValidationError("alignment must be positive");
    if (profile.sq_duration % profile.alignment != 0 ||
        profile.cx_duration_base % profile.alignment != 0)
        throw ValidationError("durations must be multiples of the alignment");
    const int sq = profile.sq_duration;

    PulseLibrary lib;
    lib.device = device;
    lib.alignment = profile.alignment;

    for (const Label& label : enumerate_labels(device)) {
        if (label.is_virtual()) continue;
        BasisPulse pulse;
        pulse.label = label;
        if (label.gate == GateKind::I) {
            pulse.waveforms.emplace_back(label.channels[0],
                                         sample_envelope(DelayEnvelope{sq}));
        } else if (label.gate == GateKind::X) {
            pulse.waveforms.emplace_back(
                label.channels[0], x_waveform(sq, qubit_params(sq, seed, label.qubits[0])));
        } else if (label.gate == GateKind::SX) {
            pulse.waveforms.emplace_back(
                label.channels[0], sx_waveform(sq, qubit_params(sq, seed, label.qubits[0])));
        } else {
            const int ctl = label.qubits[0];
            const int tgt = label.qubits[1];
            const int j = device.coupling_index(ctl, tgt);
            const int dur = profile.cx_duration_base + sq * (j % 2);
            Rng rng(mix_seed(seed, "cx", j));

            // control-qubit drive: flat-top prefix, then a rotary tone
            std::vector<cplx> ctl_wf(dur, cplx{0, 0});
            paste(ctl_wf, 0,
                  sample_envelope(GaussianSquareEnvelope{
                      sq, rng.uniform(0.6, 0.8), sq / 4.0, sq / 2}));
            paste(ctl_wf, sq,
                  sample_envelope(GaussianSquareEnvelope{dur - sq, rng.uniform(0.5, 0.7),
                                                         sq / 4.0, dur - 3 * sq}));

            // target drive: the qubit's SX pulse, bit-identical, then a rotary tone
            std::vector<cplx> tgt_wf(dur, cplx{0, 0});
            paste(tgt_wf, 0, sx_waveform(sq, qubit_params(sq, seed, tgt)));
            paste(tgt_wf, sq,
                  sample_envelope(GaussianSquareEnvelope{dur - sq, rng.uniform(0.5, 0.7),
                                                         sq / 4.0, dur - 3 * sq}));

            // coupling channel: full-length cross-resonance tone
            double phase = rng.uniform(0.0, 6.283185307179586);
            cplx cr_amp = std::polar(rng.uniform(0.75, 0.90), phase);
            std::vector<cplx> cr_wf = sample_envelope(
                GaussianSquareEnvelope{dur, cr_amp, sq / 2.0, dur - 2 * sq});

            for (Channel c : label.channels) {
                if (c.kind == ChannelKind::Control)
                    pulse.waveforms.emplace_back(c, cr_wf);
                else if (c.index == ctl)
                    pulse.waveforms.emplace_back(c, ctl_wf);
                else
                    pulse.waveforms.emplace_back(c, tgt_wf);
            }
        }
        lib.pulses.push_back(std::move(pulse));
    }
    lib.validate();
    return lib;
}

nlohmann::json library_to_json(const PulseLibrary& lib) {
    nlohmann::json j;
    j["device"] = device_to_json(lib.device);
    j["alignment"] = lib.alignment;
    j["pulses"] = nlohmann::json::array();
    for (const BasisPulse& p : lib.pulses) {
        nlohmann::json jp;
        jp["gate"] = gate_name(p.label.gate);
        jp["qubits"] = p.label.qubits;
        nlohmann::json chans = nlohmann::json::array();
        for (Channel c : p.label.channels) chans.push_back(c.to_string());
        jp["channels"] = chans;
        nlohmann::json wf_obj = nlohmann::json::object();
        nlohmann::json dur_obj = nlohmann::json::object();
        for (const auto& [chan, wf] : p.waveforms) {
            nlohmann::json samples = nlohmann::json::array();
            for (const cplx& s : wf) samples.push_back({s.real(), s.imag()});
            wf_obj[chan.to_string()] = std::move(samples);
            dur_obj[chan.to_string()] = wf.size();
        }
        jp["waveforms"] = std::move(wf_obj);
        jp["durations"] = std::move(dur_obj);
        j["pulses"].push_back(std::move(jp));
    }
    return j;
}

PulseLibrary library_from_json(const nlohmann::json& j) {
    PulseLibrary lib;
    try {
        lib.device = device_from_json(j.at("device"));
        lib.alignment = j.at("alignment").get<int>();
        for (const auto& jp : j.at("pulses")) {
            BasisPulse p;
            GateKind kind = gate_from_name(jp.at("gate").get<std::string>());
            std::vector<int> qubits = jp.at("qubits").get<std::vector<int>>();
            if (kind == GateKind::CX)
                p.label = make_cx_label(lib.device, qubits.at(0), qubits.at(1));
            else
                p.label = make_single_qubit_label(kind, qubits.at(0));
            const auto& durs = jp.at("durations");
            for (const auto& [key, samples] : jp.at("waveforms").items()) {
                Channel chan = parse_channel(key);
                std::vector<cplx> wf;
                wf.reserve(samples.size());
                for (const auto& pair : samples) {
                    if (!pair.is_array() || pair.size() != 2)
                        throw FormatError("waveform samples must be [re, im] pairs");
                    wf.emplace_back(pair[0].get<double>(), pair[1].get<double>());
                }
                if (!durs.contains(key) ||
                    durs.at(key).get<size_t>() != wf.size())
                    throw ValidationError("duration mismatch for " + p.label.to_string() +
                                          " on " + key);
                p.waveforms.emplace_back(chan, std::move(wf));
            }
            std::sort(p.waveforms.begin(), p.waveforms.end(),
                      [&](const auto& a, const auto& b) {
                          return a.first.canonical_index(lib.device.n_qubits) <
                                 b.first.canonical_index(lib.device.n_qubits);
                      });
            lib.pulses.push_back(std::move(p));
        }
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("bad library JSON: ") + e.what());
    }
    lib.validate();
    return lib;
}

void save_library(const PulseLibrary& lib, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot open " + path + " for writing");
    out << library_to_json(lib).dump() << "\n";
}

PulseLibrary load_library(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("malformed JSON in ") + path + ": " + e.what());
    }
    return library_from_json(j);
}

}  // namespace qptrace
