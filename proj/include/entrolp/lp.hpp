#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "entrolp/problem.hpp"
#include "entrolp/reduction.hpp"

namespace entrolp {

enum class RowKind { elemental, independence, bound, extra };

struct SparseRow {
    std::vector<int> idx; // ascending column indices
    std::vector<double> val;
    Sense sense = Sense::ge;
    double rhs = 0.0;
    RowKind kind = RowKind::elemental;
    std::string origin; // source text for BC rows

    bool operator==(const SparseRow& o) const
    {
        return idx == o.idx && val == o.val && sense == o.sense && rhs == o.rhs;
    }
};

struct AssemblyStats {
    std::uint64_t elemental_generated = 0;
    std::uint64_t elemental_vacuous = 0;
    std::uint64_t elemental_duplicate = 0;
    std::uint64_t elemental_kept = 0;
    std::uint64_t independence_rows = 0;
    std::uint64_t bound_rows = 0;
    std::uint64_t dropped_vacuous_other = 0;
};

struct LPInstance {
    int num_cols = 0;
    int num_entropy_cols = 0; // AL columns follow the entropy columns
    std::vector<SparseRow> rows;
    std::vector<double> objective;
    double objective_constant = 0.0;
    std::vector<double> col_lower; // -infinity marks a free column
    std::vector<std::string> col_names;
    AssemblyStats stats;

    int num_rows() const { return static_cast<int>(rows.size()); }
};

inline constexpr double neg_inf = -std::numeric_limits<double>::infinity();

// n + C(n,2) 2^(n-2)
std::uint64_t elemental_count(int n);

enum class ElementalKind { conditional, mutual };

// Calls f(kind, i, j, A) for H(X_i | X_rest) (j = -1, A = rest) and for
// I(X_i; X_j | X_A) with i < j and A ranging over subsets of the rest.
void gen_elemental(int n, const std::function<void(ElementalKind, int, int, VarSet)>& f);

LinearExpr elemental_expr(int n, ElementalKind kind, int i, int j, VarSet a);

// Maps entropy terms through the reduction; the result is empty when every
// coefficient cancels. The constant is ignored.
void reduce_expr(const LinearExpr& e, const ReductionMap& map, std::vector<int>& idx, std::vector<double>& val);

// Dense coefficient vector over the instance columns.
std::vector<double> dense_row(const LinearExpr& e, const ReductionMap& map, int num_cols);

LPInstance assemble(const ProblemDescription& pd, const ReductionMap& map);

// Dot product of a dense row with a primal vector.
double row_activity(const SparseRow& r, const std::vector<double>& x);

// CPLEX LP format; columns are x0.., rows r0.. in instance order.
std::string write_lp_format(const LPInstance& inst);

std::string constraint_report(const LPInstance& inst);

} // namespace entrolp
