#pragma once

#include <string>
#include <vector>

#include "qptrace/milp.hpp"

namespace qptrace {

enum class SolveStatus { Optimal, Feasible, Infeasible, Timeout };

const char* status_name(SolveStatus status);

struct Solution {
    std::vector<double> assignment;  // indexed by variable id
    double objective = 0.0;
    SolveStatus status = SolveStatus::Infeasible;
    int64_t nodes = 0;
    double elapsed_s = 0.0;
};

// Enumerates every binary assignment; continuous variables follow in closed
// form (fit equalities determine the residuals, |.| variables sit at their
// lower envelope). Ties break toward the lexicographically smallest
// assignment in variable order.
Solution solve_exhaustive(const MilpModel& model, int max_binaries = 25);

struct BnbBudget {
    double time_limit_s = 60.0;
    int64_t node_limit = -1;  // <0 = unlimited
};

// Depth-first branch and bound over the attack-model structure: variables
// ordered by start time then descending pulse energy, incumbent from a greedy
// matching pass, lower bound = weighted |residual| over rows whose covering
// variables are all fixed.
Solution solve_bnb(const MilpModel& model, const BnbBudget& budget = {});

// Writes the LP, runs `command_template` with {lp} and {sol} substituted,
// parses "<name> <value>" lines ('#' comments allowed, unlisted variables 0),
// then re-verifies feasibility and recomputes the objective internally.
Solution solve_external(const MilpModel& model, const std::string& command_template,
                        double timeout_s = 0.0);

struct CheckViolation {
    std::string constraint;  // constraint name, "bound <var>" or "integrality <var>"
    double amount = 0.0;
};

struct CheckReport {
    std::vector<CheckViolation> violations;
    double objective = 0.0;
    bool ok() const { return violations.empty(); }
};

CheckReport check_solution(const MilpModel& model, const Solution& solution, double tol = 1e-6);

// Events are the meta entries of binaries set to 1; validates the channel
// constraint from the recorded per-channel durations.
PulseSchedule decode_schedule(const MilpModel& model, const Solution& solution);

}  // namespace qptrace
