#pragma once

#include <string>
#include <vector>

#include "entrolp/lp.hpp"

namespace entrolp {

enum class LPStatus { optimal, infeasible, unbounded };

const char* status_name(LPStatus s);

struct LPSolution {
    LPStatus status = LPStatus::infeasible;
    double objective_value = 0.0;
    std::vector<double> primal;
    // One multiplier per row, for the row written in >= form (<= rows are
    // negated, so their multipliers are reported as nonnegative too).
    std::vector<double> dual;
    std::string iteration_log;
    long iterations = 0;
};

enum class ObjSense { minimize, maximize };

struct SolverOptions {
    bool display = false;
    // Command template with {lp} and {sol} placeholders; empty selects the
    // built-in simplex.
    std::string external_command;
    long max_iterations = 0; // 0 picks a limit from the problem size
    int node_limit = 20000;  // branch and bound

    static SolverOptions from_env();
};

inline constexpr const char* solver_env_var = "ENTROLP_SOLVER_CMD";

LPSolution solve_lp(const LPInstance& inst, ObjSense sense = ObjSense::minimize,
                    const SolverOptions& opts = {});

// All-integer column values attaining the integer optimum of a minimization
// whose columns are bounded below by 0.
LPSolution solve_integer_weights(const LPInstance& inst, const SolverOptions& opts = {});

LPSolution solve_external(const LPInstance& inst, ObjSense sense, const SolverOptions& opts);

// Largest violation of a row or column bound by the given point.
double max_violation(const LPInstance& inst, const std::vector<double>& x);

} // namespace entrolp
