// Command-line driver: simulate control-pulse power traces for a circuit and
// reconstruct circuits back from traces.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

#include "qptrace/milp.hpp"
#include "qptrace/perchan.hpp"
#include "qptrace/solver.hpp"
#include "qptrace/verify.hpp"

using namespace qptrace;
using nlohmann::json;

namespace {

void write_manifest(const std::string& out_path, const std::string& command, const json& config) {
    json manifest;
    manifest["command"] = command;
    manifest["config"] = config;
    std::ofstream out(out_path + ".manifest.json");
    out << manifest.dump(2) << "\n";
}

void write_json_file(const json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot open " + path + " for writing");
    out << j.dump(2) << "\n";
}

std::string channel_trace_path(const std::string& prefix, Channel c) {
    return prefix + "_" + c.to_string() + ".bin";
}

std::map<Channel, PowerTrace> load_channel_traces(const std::string& prefix,
                                                  const PulseLibrary& lib) {
    std::map<Channel, PowerTrace> traces;
    for (Channel c : build_channels(lib.device))
        traces[c] = read_trace(channel_trace_path(prefix, c));
    return traces;
}

PulseSchedule resolve_schedule(const std::string& circuit_path, const std::string& schedule_path,
                               const PulseLibrary& lib, SchedulePolicy policy) {
    if (!circuit_path.empty()) return schedule_circuit(load_qasm(circuit_path), lib, policy);
    return load_schedule(schedule_path, lib);
}

SchedulePolicy parse_policy(const std::string& name) {
    if (name == "alap") return SchedulePolicy::Alap;
    if (name == "asap") return SchedulePolicy::Asap;
    throw ValidationError("unknown scheduling policy: " + name);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"power-trace simulation and circuit reconstruction toolkit"};
    app.require_subcommand(1);

    auto* gen_device = app.add_subcommand("gen-device", "emit a device topology JSON");
    std::string gd_kind = "line", gd_name, gd_out;
    int gd_qubits = 5;
    gen_device->add_option("--kind", gd_kind, "line|tshape5|hshape7")->capture_default_str();
    gen_device->add_option("--qubits", gd_qubits, "qubit count")->capture_default_str();
    gen_device->add_option("--name", gd_name, "device name override");
    gen_device->add_option("--out", gd_out, "output path")->required();

    auto* gen_library = app.add_subcommand("gen-library", "synthesize a basis pulse library");
    std::string gl_device, gl_out;
    uint64_t gl_seed = 0;
    SynthProfile gl_profile;
    gen_library->add_option("--device", gl_device, "device JSON path")->required();
    gen_library->add_option("--seed", gl_seed, "synthesis seed")->capture_default_str();
    gen_library->add_option("--sq-duration", gl_profile.sq_duration)->capture_default_str();
    gen_library->add_option("--cx-base", gl_profile.cx_duration_base)->capture_default_str();
    gen_library->add_option("--alignment", gl_profile.alignment)->capture_default_str();
    gen_library->add_option("--out", gl_out, "output path")->required();

    auto* schedule_cmd = app.add_subcommand("schedule", "map a QASM circuit to pulse starts");
    std::string sc_circuit, sc_library, sc_out, sc_policy = "alap";
    schedule_cmd->add_option("--circuit", sc_circuit, "QASM file")->required();
    schedule_cmd->add_option("--library", sc_library, "library JSON")->required();
    schedule_cmd->add_option("--policy", sc_policy, "alap|asap")->capture_default_str();
    schedule_cmd->add_option("--out", sc_out, "schedule JSON output")->required();

    auto* simulate_cmd = app.add_subcommand("simulate", "emit power traces for a circuit");
    std::string sim_circuit, sim_schedule, sim_library, sim_out, sim_policy = "alap";
    bool sim_total = false, sim_channels = false, sim_csv = false;
    double sim_sigma = 0.0;
    uint64_t sim_seed = 0;
    simulate_cmd->add_option("--circuit", sim_circuit, "QASM file");
    simulate_cmd->add_option("--schedule", sim_schedule, "schedule JSON");
    simulate_cmd->add_option("--library", sim_library, "library JSON")->required();
    simulate_cmd->add_flag("--total", sim_total, "write the summed trace");
    simulate_cmd->add_flag("--channels", sim_channels, "write per-channel traces");
    simulate_cmd->add_flag("--csv", sim_csv, "also write CSV next to each binary trace");
    simulate_cmd->add_option("--noise-sigma", sim_sigma, "additive gaussian sigma")
        ->capture_default_str();
    simulate_cmd->add_option("--seed", sim_seed, "noise seed")->capture_default_str();
    simulate_cmd->add_option("--policy", sim_policy, "alap|asap")->capture_default_str();
    simulate_cmd->add_option("--out", sim_out, "trace path (or prefix with --channels)")
        ->required();

    auto* apc = app.add_subcommand("attack-per-channel",
                                   "reconstruct from per-channel traces by profile matching");
    std::string apc_traces, apc_library, apc_out, apc_report;
    DetectOptions apc_opts;
    apc->add_option("--traces", apc_traces, "trace file prefix")->required();
    apc->add_option("--library", apc_library, "library JSON")->required();
    apc->add_option("--tau", apc_opts.tau, "acceptance threshold")->capture_default_str();
    apc->add_option("--tau-cx", apc_opts.tau_cx, "CX priority threshold")->capture_default_str();
    apc->add_option("--bin", apc_opts.bin, "comparison bin width (0 = alignment)")
        ->capture_default_str();
    apc->add_option("--out", apc_out, "recovered schedule JSON")->required();
    apc->add_option("--report", apc_report, "detection report JSON");

    auto* att = app.add_subcommand("attack-total",
                                   "reconstruct from one total trace via MILP optimization");
    std::string att_trace, att_library, att_out, att_lp, att_backend = "bnb", att_cmd;
    AttackModelOptions att_opts;
    BnbBudget att_budget;
    att->add_option("--trace", att_trace, "total trace file")->required();
    att->add_option("--library", att_library, "library JSON")->required();
    att->add_option("--grid", att_opts.grid, "start-time grid (0 = alignment)")
        ->capture_default_str();
    att->add_option("--prune-threshold", att_opts.prune_threshold)->capture_default_str();
    att->add_option("--stride", att_opts.sample_stride)->capture_default_str();
    att->add_flag("--unique-gates", att_opts.unique_gates, "per-gate at-most-one constraints");
    att->add_option("--backend", att_backend, "bnb|exhaustive|external")->capture_default_str();
    att->add_option("--solver-cmd", att_cmd, "external command with {lp} and {sol}")
        ->envname("QP_SOLVER_CMD");
    att->add_option("--time-limit", att_budget.time_limit_s, "seconds")->capture_default_str();
    att->add_option("--emit-lp", att_lp, "also write the LP file here");
    att->add_option("--out", att_out, "recovered schedule JSON")->required();

    auto* emit = app.add_subcommand("emit-lp", "write the MILP in LP format plus meta sidecar");
    std::string el_trace, el_library, el_out;
    AttackModelOptions el_opts;
    emit->add_option("--trace", el_trace, "total trace file")->required();
    emit->add_option("--library", el_library, "library JSON")->required();
    emit->add_option("--grid", el_opts.grid)->capture_default_str();
    emit->add_option("--prune-threshold", el_opts.prune_threshold)->capture_default_str();
    emit->add_option("--stride", el_opts.sample_stride)->capture_default_str();
    emit->add_flag("--unique-gates", el_opts.unique_gates);
    emit->add_option("--out", el_out, "LP output path")->required();

    auto* check = app.add_subcommand("check-solution",
                                     "verify a solution file against an LP model");
    std::string ck_lp, ck_sol;
    double ck_tol = 1e-6;
    check->add_option("--lp", ck_lp, "LP file")->required();
    check->add_option("--solution", ck_sol, "solution file (name value per line)")->required();
    check->add_option("--tol", ck_tol, "violation tolerance")->capture_default_str();

    auto* verify_cmd = app.add_subcommand("verify", "compare a recovered schedule to the truth");
    std::string vf_truth, vf_recovered, vf_library, vf_out;
    verify_cmd->add_option("--truth", vf_truth, "truth schedule JSON")->required();
    verify_cmd->add_option("--recovered", vf_recovered, "recovered schedule JSON")->required();
    verify_cmd->add_option("--library", vf_library, "library JSON")->required();
    verify_cmd->add_option("--out", vf_out, "write the report JSON here");

    auto* bench = app.add_subcommand("bench", "run the attack harness over a QASM suite");
    std::string bn_suite, bn_library, bn_out, bn_attack = "per-channel";
    BenchConfig bn_config;
    bench->add_option("--suite", bn_suite, "directory of .qasm files")->required();
    bench->add_option("--library", bn_library, "library JSON")->required();
    bench->add_option("--attack", bn_attack, "per-channel|total|both")->capture_default_str();
    bench->add_option("--noise-sigma", bn_config.noise_sigma)->capture_default_str();
    bench->add_option("--seed", bn_config.seed)->capture_default_str();
    bench->add_option("--tau", bn_config.detect.tau)->capture_default_str();
    bench->add_option("--tau-cx", bn_config.detect.tau_cx)->capture_default_str();
    bench->add_option("--grid", bn_config.milp.grid)->capture_default_str();
    bench->add_option("--prune-threshold", bn_config.milp.prune_threshold)
        ->capture_default_str();
    bench->add_option("--time-limit", bn_config.budget.time_limit_s)->capture_default_str();
    bench->add_option("--out", bn_out, "CSV output path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;  // usage error
    }

    try {
        if (*gen_device) {
            TopologyKind kind = topology_from_name(gd_kind);
            Device dev = standard_topology(kind, gd_qubits);
            if (!gd_name.empty()) dev.name = gd_name;
            save_device(dev, gd_out);
            write_manifest(gd_out, "gen-device",
                           {{"kind", gd_kind}, {"qubits", gd_qubits}, {"name", dev.name}});
        } else if (*gen_library) {
            Device dev = load_device(gl_device);
            PulseLibrary lib = synth_library(dev, gl_profile, gl_seed);
            save_library(lib, gl_out);
            write_manifest(gl_out, "gen-library",
                           {{"device", gl_device},
                            {"seed", gl_seed},
                            {"sq_duration", gl_profile.sq_duration},
                            {"cx_duration_base", gl_profile.cx_duration_base},
                            {"alignment", gl_profile.alignment}});
        } else if (*schedule_cmd) {
            PulseLibrary lib = load_library(sc_library);
            PulseSchedule sched =
                schedule_circuit(load_qasm(sc_circuit), lib, parse_policy(sc_policy));
            save_schedule(sched, sc_out);
            write_manifest(sc_out, "schedule",
                           {{"circuit", sc_circuit},
                            {"library", sc_library},
                            {"policy", sc_policy}});
        } else if (*simulate_cmd) {
            if (sim_circuit.empty() == sim_schedule.empty())
                throw ValidationError("pass exactly one of --circuit and --schedule");
            if (!sim_total && !sim_channels)
                throw ValidationError("pass --total and/or --channels");
            PulseLibrary lib = load_library(sim_library);
            PulseSchedule sched =
                resolve_schedule(sim_circuit, sim_schedule, lib, parse_policy(sim_policy));
            if (sim_total) {
                PowerTrace total = simulate_total(sched, lib);
                if (sim_sigma > 0)
                    total = add_noise(total, sim_sigma, mix_seed(sim_seed, "total"));
                write_trace(total, sim_out);
                if (sim_csv) write_trace_csv(total, sim_out + ".csv");
            }
            if (sim_channels) {
                auto traces = simulate_per_channel(sched, lib);
                uint64_t k = 0;
                for (auto& [chan, trace] : traces) {
                    if (sim_sigma > 0)
                        trace = add_noise(trace, sim_sigma, mix_seed(sim_seed, "chan", k));
                    ++k;
                    write_trace(trace, channel_trace_path(sim_out, chan));
                    if (sim_csv)
                        write_trace_csv(trace, channel_trace_path(sim_out, chan) + ".csv");
                }
            }
            write_manifest(sim_out, "simulate",
                           {{"circuit", sim_circuit},
                            {"schedule", sim_schedule},
                            {"library", sim_library},
                            {"total", sim_total},
                            {"channels", sim_channels},
                            {"noise_sigma", sim_sigma},
                            {"seed", sim_seed},
                            {"policy", sim_policy}});
        } else if (*apc) {
            PulseLibrary lib = load_library(apc_library);
            auto traces = load_channel_traces(apc_traces, lib);
            PerChannelReport report = attack_per_channel(traces, lib, apc_opts);
            json out = schedule_to_json(report.schedule);
            out["aggregate_distance"] = report.aggregate_distance;
            write_json_file(out, apc_out);
            if (!apc_report.empty())
                write_json_file(detections_to_json(report.detections), apc_report);
            write_manifest(apc_out, "attack-per-channel",
                           {{"traces", apc_traces},
                            {"library", apc_library},
                            {"tau", apc_opts.tau},
                            {"tau_cx", apc_opts.tau_cx},
                            {"bin", apc_opts.bin}});
            std::cout << "recovered " << report.schedule.events.size() << " events, aggregate "
                      << report.aggregate_distance << "\n";
        } else if (*att) {
            PulseLibrary lib = load_library(att_library);
            PowerTrace trace = read_trace(att_trace);
            MilpModel model = build_attack_model(trace, lib, att_opts);
            if (!att_lp.empty()) {
                std::ofstream lp_out(att_lp);
                lp_out << write_lp(model);
                write_json_file(model_meta_to_json(model), att_lp + ".meta.json");
            }
            Solution sol;
            if (att_backend == "bnb")
                sol = solve_bnb(model, att_budget);
            else if (att_backend == "exhaustive")
                sol = solve_exhaustive(model);
            else if (att_backend == "external") {
                if (att_cmd.empty())
                    throw ValidationError("external backend needs --solver-cmd or QP_SOLVER_CMD");
                sol = solve_external(model, att_cmd, att_budget.time_limit_s);
            } else {
                throw ValidationError("unknown backend: " + att_backend);
            }

            CheckReport checked = check_solution(model, sol);
            PulseSchedule recovered = decode_schedule(model, sol);
            json out = schedule_to_json(recovered);
            out["objective"] = sol.objective;
            out["status"] = status_name(sol.status);
            out["violations"] = checked.violations.size();
            ModelStats stats = model_stats(model);
            out["model"] = {{"binaries", stats.binaries},
                            {"continuous", stats.continuous},
                            {"constraints", stats.constraints}};
            write_json_file(out, att_out);
            write_manifest(att_out, "attack-total",
                           {{"trace", att_trace},
                            {"library", att_library},
                            {"grid", att_opts.grid},
                            {"prune_threshold", att_opts.prune_threshold},
                            {"stride", att_opts.sample_stride},
                            {"unique_gates", att_opts.unique_gates},
                            {"backend", att_backend},
                            {"time_limit", att_budget.time_limit_s}});
            std::cout << "status " << status_name(sol.status) << ", objective " << sol.objective
                      << ", events " << recovered.events.size() << "\n";
        } else if (*emit) {
            PulseLibrary lib = load_library(el_library);
            PowerTrace trace = read_trace(el_trace);
            MilpModel model = build_attack_model(trace, lib, el_opts);
            std::ofstream lp_out(el_out);
            if (!lp_out) throw FormatError("cannot open " + el_out + " for writing");
            lp_out << write_lp(model);
            write_json_file(model_meta_to_json(model), el_out + ".meta.json");
            write_manifest(el_out, "emit-lp",
                           {{"trace", el_trace},
                            {"library", el_library},
                            {"grid", el_opts.grid},
                            {"prune_threshold", el_opts.prune_threshold},
                            {"stride", el_opts.sample_stride},
                            {"unique_gates", el_opts.unique_gates}});
            ModelStats stats = model_stats(model);
            std::cout << "wrote " << el_out << " (" << stats.binaries << " binaries, "
                      << stats.constraints << " constraints)\n";
        } else if (*check) {
            std::ifstream in(ck_lp);
            if (!in) throw FormatError("cannot open " + ck_lp);
            std::stringstream ss;
            ss << in.rdbuf();
            MilpModel model = parse_lp(ss.str());
            Solution sol;
            sol.assignment.assign(model.vars.size(), 0.0);
            std::ifstream sin(ck_sol);
            if (!sin) throw FormatError("cannot open " + ck_sol);
            std::string line;
            int lineno = 0;
            while (std::getline(sin, line)) {
                ++lineno;
                size_t start = line.find_first_not_of(" \t\r");
                if (start == std::string::npos || line[start] == '#') continue;
                std::istringstream ls(line);
                std::string name;
                double value;
                if (!(ls >> name >> value))
                    throw ParseError("unparseable solution line", lineno);
                auto v = model.find_var(name);
                if (!v) throw ValidationError("unknown variable '" + name + "'");
                sol.assignment[v->id] = value;
            }
            CheckReport report = check_solution(model, sol, ck_tol);
            std::cout << "objective " << report.objective << "\n";
            for (const CheckViolation& v : report.violations)
                std::cout << "violated " << v.constraint << " by " << v.amount << "\n";
            std::cout << (report.ok() ? "satisfiable" : "unsatisfiable") << " within tol "
                      << ck_tol << "\n";
            return report.ok() ? 0 : 1;
        } else if (*verify_cmd) {
            PulseLibrary lib = load_library(vf_library);
            PulseSchedule truth = load_schedule(vf_truth, lib);
            PulseSchedule recovered = load_schedule(vf_recovered, lib);
            MatchReport report = compare(truth, recovered, lib);
            json j = match_report_to_json(report);
            std::cout << j.dump(2) << "\n";
            if (!vf_out.empty()) {
                write_json_file(j, vf_out);
                write_manifest(vf_out, "verify",
                               {{"truth", vf_truth},
                                {"recovered", vf_recovered},
                                {"library", vf_library}});
            }
        } else if (*bench) {
            PulseLibrary lib = load_library(bn_library);
            if (bn_attack == "per-channel")
                bn_config.attack = AttackKind::PerChannel;
            else if (bn_attack == "total")
                bn_config.attack = AttackKind::Total;
            else if (bn_attack == "both")
                bn_config.attack = AttackKind::Both;
            else
                throw ValidationError("unknown attack kind: " + bn_attack);
            auto rows = run_benchmark(bn_suite, lib, bn_config);
            std::ofstream csv(bn_out);
            if (!csv) throw FormatError("cannot open " + bn_out + " for writing");
            csv << benchmark_csv(rows);
            std::cout << benchmark_table(rows);
            write_manifest(bn_out, "bench",
                           {{"suite", bn_suite},
                            {"library", bn_library},
                            {"attack", bn_attack},
                            {"noise_sigma", bn_config.noise_sigma},
                            {"seed", bn_config.seed}});
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
