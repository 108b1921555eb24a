#include "qptrace/circuit.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

namespace qptrace {

namespace {

struct Token {
    enum class Kind { Ident, Number, Symbol, String, End } kind;
    std::string text;
    double number = 0.0;
    int line = 1;
};

class Lexer {
public:
    explicit Lexer(const std::string& text) : text_(text) {}

    Token next() {
        skip_ws();
        Token t;
        t.line = line_;
        if (pos_ >= text_.size()) {
            t.kind = Token::Kind::End;
            return t;
        }
        char c = text_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                ++pos_;
            t.kind = Token::Kind::Ident;
            t.text = text_.substr(start, pos_ - start);
            return t;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.' ||
                    text_[pos_] == 'e' || text_[pos_] == 'E' ||
                    ((text_[pos_] == '+' || text_[pos_] == '-') && pos_ > start &&
                     (text_[pos_ - 1] == 'e' || text_[pos_ - 1] == 'E'))))
                ++pos_;
            t.kind = Token::Kind::Number;
            t.text = text_.substr(start, pos_ - start);
            try {
                t.number = std::stod(t.text);
            } catch (const std::exception&) {
                throw ParseError("bad numeric literal '" + t.text + "'", t.line);
            }
            return t;
        }
        if (c == '"') {
            size_t start = ++pos_;
            while (pos_ < text_.size() && text_[pos_] != '"') ++pos_;
            if (pos_ >= text_.size()) throw ParseError("unterminated string", t.line);
            t.kind = Token::Kind::String;
            t.text = text_.substr(start, pos_ - start);
            ++pos_;
            return t;
        }
        if (c == '-' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') {
            pos_ += 2;
            t.kind = Token::Kind::Symbol;
            t.text = "->";
            return t;
        }
        ++pos_;
        t.kind = Token::Kind::Symbol;
        t.text = std::string(1, c);
        return t;
    }

private:
    void skip_ws() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '\n') {
                ++line_;
                ++pos_;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_;
            } else if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '/') {
                while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
            } else {
                break;
            }
        }
    }

    const std::string& text_;
    size_t pos_ = 0;
    int line_ = 1;
};

class QasmParser {
public:
    explicit QasmParser(const std::string& text) : lexer_(text) { advance(); }

    GateCircuit parse() {
        expect_ident("OPENQASM");
        if (cur_.kind != Token::Kind::Number || cur_.text != "2.0")
            throw ParseError("expected version 2.0", cur_.line);
        advance();
        expect_symbol(";");
        while (cur_.kind == Token::Kind::Ident && cur_.text == "include") {
            advance();
            if (cur_.kind != Token::Kind::String)
                throw ParseError("expected include file name", cur_.line);
            advance();
            expect_symbol(";");
        }
        parse_qreg();
        if (cur_.kind == Token::Kind::Ident && cur_.text == "creg") parse_creg();
        while (cur_.kind != Token::Kind::End) parse_statement();
        return std::move(circuit_);
    }

private:
    void advance() { cur_ = lexer_.next(); }

    void expect_ident(const std::string& word) {
        if (cur_.kind != Token::Kind::Ident || cur_.text != word)
            throw ParseError("expected '" + word + "'", cur_.line);
        advance();
    }

    void expect_symbol(const std::string& sym) {
        if (cur_.kind != Token::Kind::Symbol || cur_.text != sym)
            throw ParseError("expected '" + sym + "'", cur_.line);
        advance();
    }

    void parse_qreg() {
        expect_ident("qreg");
        if (cur_.kind != Token::Kind::Ident) throw ParseError("expected register name", cur_.line);
        qreg_name_ = cur_.text;
        advance();
        expect_symbol("[");
        if (cur_.kind != Token::Kind::Number) throw ParseError("expected register size", cur_.line);
        circuit_.n_qubits = static_cast<int>(cur_.number);
        if (circuit_.n_qubits <= 0) throw ParseError("qreg size must be positive", cur_.line);
        advance();
        expect_symbol("]");
        expect_symbol(";");
    }

    void parse_creg() {
        expect_ident("creg");
        if (cur_.kind != Token::Kind::Ident) throw ParseError("expected register name", cur_.line);
        creg_name_ = cur_.text;
        advance();
        expect_symbol("[");
        if (cur_.kind != Token::Kind::Number) throw ParseError("expected register size", cur_.line);
        advance();
        expect_symbol("]");
        expect_symbol(";");
    }

    int parse_qubit_ref() {
        if (cur_.kind != Token::Kind::Ident || cur_.text != qreg_name_)
            throw ParseError("expected qubit reference '" + qreg_name_ + "[i]'", cur_.line);
        int line = cur_.line;
        advance();
        expect_symbol("[");
        if (cur_.kind != Token::Kind::Number) throw ParseError("expected qubit index", cur_.line);
        int q = static_cast<int>(cur_.number);
        advance();
        expect_symbol("]");
        if (q < 0 || q >= circuit_.n_qubits)
            throw ParseError("qubit index " + std::to_string(q) + " out of range", line);
        return q;
    }

    double parse_expr() {
        double v = parse_term();
        while (cur_.kind == Token::Kind::Symbol && (cur_.text == "+" || cur_.text == "-")) {
            bool plus = cur_.text == "+";
            advance();
            double rhs = parse_term();
            v = plus ? v + rhs : v - rhs;
        }
        return v;
    }

    double parse_term() {
        double v = parse_factor();
        while (cur_.kind == Token::Kind::Symbol && (cur_.text == "*" || cur_.text == "/")) {
            bool mul = cur_.text == "*";
            advance();
            double rhs = parse_factor();
            if (!mul && rhs == 0.0) throw ParseError("division by zero in angle", cur_.line);
            v = mul ? v * rhs : v / rhs;
        }
        return v;
    }

    double parse_factor() {
        if (cur_.kind == Token::Kind::Symbol && (cur_.text == "-" || cur_.text == "+")) {
            bool neg = cur_.text == "-";
            advance();
            double v = parse_factor();
            return neg ? -v : v;
        }
        if (cur_.kind == Token::Kind::Symbol && cur_.text == "(") {
            advance();
            double v = parse_expr();
            expect_symbol(")");
            return v;
        }
        if (cur_.kind == Token::Kind::Number) {
            double v = cur_.number;
            advance();
            return v;
        }
        if (cur_.kind == Token::Kind::Ident && cur_.text == "pi") {
            advance();
            return 3.14159265358979323846;
        }
        throw ParseError("expected angle expression", cur_.line);
    }

    void parse_statement() {
        if (cur_.kind != Token::Kind::Ident)
            throw ParseError("expected a statement", cur_.line);
        const std::string word = cur_.text;
        const int line = cur_.line;
        if (word == "barrier") {
            advance();
            Directive d{Directive::Kind::Barrier, {}, line};
            parse_directive_args(d);
            circuit_.directives.push_back(std::move(d));
            return;
        }
        if (word == "measure") {
            advance();
            Directive d{Directive::Kind::Measure, {}, line};
            if (cur_.kind == Token::Kind::Ident && cur_.text == qreg_name_) {
                // either q[i] or the whole register
                Token save = cur_;
                advance();
                if (cur_.kind == Token::Kind::Symbol && cur_.text == "[") {
                    advance();
                    if (cur_.kind != Token::Kind::Number)
                        throw ParseError("expected qubit index", cur_.line);
                    d.qubits.push_back(static_cast<int>(cur_.number));
                    advance();
                    expect_symbol("]");
                }
                (void)save;
            } else {
                throw ParseError("expected qubit reference after 'measure'", cur_.line);
            }
            expect_symbol("->");
            // creg target: name or name[i]
            if (cur_.kind != Token::Kind::Ident || cur_.text != creg_name_)
                throw ParseError("expected classical register target", cur_.line);
            advance();
            if (cur_.kind == Token::Kind::Symbol && cur_.text == "[") {
                advance();
                if (cur_.kind != Token::Kind::Number)
                    throw ParseError("expected bit index", cur_.line);
                advance();
                expect_symbol("]");
            }
            expect_symbol(";");
            circuit_.directives.push_back(std::move(d));
            return;
        }
        if (word == "id" || word == "i" || word == "x" || word == "sx") {
            advance();
            Gate g;
            g.kind = gate_from_name(word);
            g.qubits.push_back(parse_qubit_ref());
            expect_symbol(";");
            circuit_.gates.push_back(std::move(g));
            return;
        }
        if (word == "rz") {
            advance();
            expect_symbol("(");
            double angle = parse_expr();
            expect_symbol(")");
            Gate g;
            g.kind = GateKind::RZ;
            g.angle = angle;
            g.qubits.push_back(parse_qubit_ref());
            expect_symbol(";");
            circuit_.gates.push_back(std::move(g));
            return;
        }
        if (word == "cx") {
            advance();
            Gate g;
            g.kind = GateKind::CX;
            g.qubits.push_back(parse_qubit_ref());
            expect_symbol(",");
            g.qubits.push_back(parse_qubit_ref());
            if (g.qubits[0] == g.qubits[1])
                throw ParseError("cx requires distinct qubits", line);
            expect_symbol(";");
            circuit_.gates.push_back(std::move(g));
            return;
        }
        throw ParseError("non-basis gate '" + word + "'", line);
    }

    void parse_directive_args(Directive& d) {
        while (true) {
            if (cur_.kind != Token::Kind::Ident || cur_.text != qreg_name_)
                throw ParseError("expected qubit reference", cur_.line);
            advance();
            if (cur_.kind == Token::Kind::Symbol && cur_.text == "[") {
                advance();
                if (cur_.kind != Token::Kind::Number)
                    throw ParseError("expected qubit index", cur_.line);
                d.qubits.push_back(static_cast<int>(cur_.number));
                advance();
                expect_symbol("]");
            }
            if (cur_.kind == Token::Kind::Symbol && cur_.text == ",") {
                advance();
                continue;
            }
            break;
        }
        expect_symbol(";");
    }

    Lexer lexer_;
    Token cur_;
    GateCircuit circuit_;
    std::string qreg_name_;
    std::string creg_name_;
};

Label label_for_gate(const Gate& gate, const Device& device) {
    if (gate.kind == GateKind::CX) {
        if (!device.has_coupling(gate.qubits[0], gate.qubits[1]))
            throw ValidationError("cx on non-coupled pair (" + std::to_string(gate.qubits[0]) +
                                  "," + std::to_string(gate.qubits[1]) + ")");
        return make_cx_label(device, gate.qubits[0], gate.qubits[1]);
    }
    return make_single_qubit_label(gate.kind, gate.qubits[0]);
}

int event_sort_channel(const PulseEvent& e, int n_qubits) {
    int best = 1 << 30;
    for (Channel c : e.label.channels) best = std::min(best, c.canonical_index(n_qubits));
    return best;
}

void sort_events(std::vector<PulseEvent>& events, int n_qubits) {
    std::sort(events.begin(), events.end(), [&](const PulseEvent& a, const PulseEvent& b) {
        if (a.start != b.start) return a.start < b.start;
        int ca = event_sort_channel(a, n_qubits), cb = event_sort_channel(b, n_qubits);
        if (ca != cb) return ca < cb;
        if (a.label.gate != b.label.gate) return a.label.gate < b.label.gate;
        return a.label.qubits < b.label.qubits;
    });
}

}  // namespace

GateCircuit parse_qasm(const std::string& text) { return QasmParser(text).parse(); }

GateCircuit load_qasm(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_qasm(ss.str());
}

std::string circuit_to_qasm(const GateCircuit& circuit) {
    std::ostringstream out;
    out << "OPENQASM 2.0;\n";
    out << "qreg q[" << circuit.n_qubits << "];\n";
    for (const Gate& g : circuit.gates) {
        if (g.kind == GateKind::CX) {
            out << "cx q[" << g.qubits[0] << "],q[" << g.qubits[1] << "];\n";
        } else if (g.kind == GateKind::RZ) {
            std::ostringstream angle;
            angle.precision(17);
            angle << g.angle;
            out << "rz(" << angle.str() << ") q[" << g.qubits[0] << "];\n";
        } else {
            out << (g.kind == GateKind::I ? "id" : gate_name(g.kind)) << " q[" << g.qubits[0]
                << "];\n";
        }
    }
    return out.str();
}

int label_duration_on(const PulseLibrary& lib, const Label& label, Channel channel) {
    return lib.at(label).duration_on(channel);
}

PulseSchedule schedule_circuit(const GateCircuit& circuit, const PulseLibrary& lib,
                               SchedulePolicy policy) {
    const Device& device = lib.device;
    for (const Gate& g : circuit.gates)
        for (int q : g.qubits)
            if (q < 0 || q >= device.n_qubits)
                throw ValidationError("gate qubit " + std::to_string(q) +
                                      " outside device " + device.name);

    struct Placed {
        Label label;
        int duration;  // max over channels; per-channel equal in this library
    };
    std::vector<Placed> placed;
    placed.reserve(circuit.gates.size());
    for (const Gate& g : circuit.gates) {
        Label label = label_for_gate(g, device);
        int dur = label.is_virtual() ? 0 : lib.at(label).max_duration();
        placed.push_back({std::move(label), dur});
    }

    std::map<Channel, int> free_at;
    std::vector<int> starts(placed.size(), 0);

    if (policy == SchedulePolicy::Asap) {
        for (size_t i = 0; i < placed.size(); ++i) {
            int t = 0;
            for (Channel c : placed[i].label.channels) t = std::max(t, free_at[c]);
            starts[i] = t;
            for (Channel c : placed[i].label.channels) free_at[c] = t + placed[i].duration;
        }
    } else {
        // ALAP = ASAP on the reversed gate list, mirrored about the makespan
        std::vector<int> rev_start(placed.size(), 0);
        int makespan = 0;
        for (size_t k = 0; k < placed.size(); ++k) {
            size_t i = placed.size() - 1 - k;
            int t = 0;
            for (Channel c : placed[i].label.channels) t = std::max(t, free_at[c]);
            rev_start[i] = t;
            for (Channel c : placed[i].label.channels) free_at[c] = t + placed[i].duration;
            makespan = std::max(makespan, t + placed[i].duration);
        }
        for (size_t i = 0; i < placed.size(); ++i)
            starts[i] = makespan - rev_start[i] - placed[i].duration;
    }

    PulseSchedule sched;
    for (size_t i = 0; i < placed.size(); ++i) {
        sched.events.push_back({placed[i].label, starts[i]});
        sched.total_duration = std::max(sched.total_duration, starts[i] + placed[i].duration);
    }
    sort_events(sched.events, device.n_qubits);
    validate_channel_constraint(sched, lib);
    return sched;
}

GateCircuit schedule_to_gates(const PulseSchedule& schedule, int n_qubits) {
    std::vector<PulseEvent> events = schedule.events;
    sort_events(events, n_qubits);
    GateCircuit out;
    out.n_qubits = n_qubits;
    for (const PulseEvent& e : events) {
        if (e.label.is_virtual()) continue;
        out.gates.push_back(Gate{e.label.gate, e.label.qubits, 0.0});
    }
    return out;
}

void validate_channel_constraint(const PulseSchedule& schedule, const PulseLibrary& lib) {
    std::map<Channel, std::vector<std::pair<int, int>>> intervals;
    for (const PulseEvent& e : schedule.events) {
        if (e.label.is_virtual()) continue;
        if (e.start < 0) throw ValidationError("event start must be >= 0");
        const BasisPulse& pulse = lib.at(e.label);
        for (const auto& [chan, wf] : pulse.waveforms)
            intervals[chan].emplace_back(e.start, e.start + static_cast<int>(wf.size()));
    }
    for (auto& [chan, list] : intervals) {
        std::sort(list.begin(), list.end());
        for (size_t i = 1; i < list.size(); ++i) {
            if (list[i].first < list[i - 1].second)
                throw ValidationError(
                    "channel constraint violated on " + chan.to_string() + ": [" +
                    std::to_string(list[i - 1].first) + "," + std::to_string(list[i - 1].second) +
                    ") overlaps [" + std::to_string(list[i].first) + "," +
                    std::to_string(list[i].second) + ")");
        }
    }
}

nlohmann::json schedule_to_json(const PulseSchedule& schedule) {
    nlohmann::json j;
    j["events"] = nlohmann::json::array();
    for (const PulseEvent& e : schedule.events) {
        nlohmann::json je;
        je["gate"] = gate_name(e.label.gate);
        je["qubits"] = e.label.qubits;
        je["start"] = e.start;
        j["events"].push_back(std::move(je));
    }
    j["total_duration"] = schedule.total_duration;
    return j;
}

PulseSchedule schedule_from_json(const nlohmann::json& j, const PulseLibrary& lib) {
    PulseSchedule s;
    try {
        for (const auto& je : j.at("events")) {
            GateKind kind = gate_from_name(je.at("gate").get<std::string>());
            std::vector<int> qubits = je.at("qubits").get<std::vector<int>>();
            Label label = kind == GateKind::CX
                              ? make_cx_label(lib.device, qubits.at(0), qubits.at(1))
                              : make_single_qubit_label(kind, qubits.at(0));
            s.events.push_back({std::move(label), je.at("start").get<int>()});
        }
        s.total_duration = j.at("total_duration").get<int>();
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("bad schedule JSON: ") + e.what());
    }
    sort_events(s.events, lib.device.n_qubits);
    return s;
}

void save_schedule(const PulseSchedule& schedule, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot open " + path + " for writing");
    out << schedule_to_json(schedule).dump(2) << "\n";
}

PulseSchedule load_schedule(const std::string& path, const PulseLibrary& lib) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("malformed JSON in ") + path + ": " + e.what());
    }
    return schedule_from_json(j, lib);
}

}  // namespace qptrace
