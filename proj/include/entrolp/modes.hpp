#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "entrolp/lp.hpp"
#include "entrolp/problem.hpp"
#include "entrolp/reduction.hpp"
#include "entrolp/solver.hpp"

namespace entrolp {

// Everything a mode needs: the problem, its reduction and the assembled LP.
struct ModeContext {
    const ProblemDescription& pd;
    const ReductionMap& map;
    const LPInstance& inst;
    SolverOptions opts;
    std::ostream& out;
    std::ostream& err;
};

inline constexpr const char* block_separator =
    "******************************************************************";

struct QueryValue {
    std::string label;
    double value = 0.0;
};

struct RegularResult {
    LPSolution solution;
    double optimal_value = 0.0;
    std::vector<QueryValue> queries;
};

RegularResult run_regular(const ModeContext& ctx);

struct HullPoint {
    double x = 0.0;
    double y = 0.0;
};

struct HullResult {
    std::string x_label, y_label;
    std::vector<HullPoint> discovered; // in order of discovery
    std::vector<HullPoint> points;     // ascending x
};

HullResult run_hull(const ModeContext& ctx);

struct ProofLine {
    int row = -1;       // index into the instance rows
    int orientation = 1; // -1 when an equality row is used as <=
    double weight = 0.0;
    std::string text;
};

struct Proof {
    bool found = false;
    double weight_sum = 0.0;
    std::vector<ProofLine> lines;
    bool verified = false;
};

struct ProveResult {
    std::string target;
    Proof lp;
    Proof integer;
    std::string diagnostic;
};

std::vector<ProveResult> run_prove(const ModeContext& ctx);

struct SensitivityRange {
    std::string target;
    double lo = 0.0;
    double hi = 0.0;
};

struct SensitivityResult {
    double optimal_value = 0.0;
    std::vector<SensitivityRange> ranges;
};

SensitivityResult run_sensitivity(const ModeContext& ctx);

struct RandomResult {
    double optimal_value = 0.0;
    std::uint64_t kept = 0;
    std::uint64_t total = 0;
};

RandomResult run_random(const ModeContext& ctx, std::uint64_t seed, double fraction);

// Elemental rows kept for a seed and fraction; other rows are always kept.
// For a fixed seed the kept set grows monotonically with the fraction.
std::vector<char> random_keep_mask(const LPInstance& inst, std::uint64_t seed, double fraction);
LPInstance select_rows(const LPInstance& inst, const std::vector<char>& keep);

// A row written in >= form and rendered with canonical names, e.g.
// "     -H(W1,S24)     H(S13)>=0"; the constant is marked with '*'.
std::string render_row(const LPInstance& inst, const SparseRow& r, int orientation);

std::string objective_label(const ProblemDescription& pd);

} // namespace entrolp
