#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "entrolp/problem.hpp"

namespace entrolp {

struct GroupReport {
    bool ok = true;
    std::string message;
    std::vector<int> missing; // a composition that is not among the rows
};

// Closure under composition; an empty row list is the trivial group.
GroupReport check_group(const SymmetryGroup& sym, const std::vector<std::string>& rv_names);

// Throws symmetry_error with the "Bad Symmetry" message when the check fails.
void require_group(const SymmetryGroup& sym, const std::vector<std::string>& rv_names);

VarSet dependency_closure(VarSet s, const std::vector<Dependency>& deps);

// Image of a subset under a permutation, through per-byte lookup tables.
class PermApplier {
public:
    explicit PermApplier(const std::vector<int>& perm);
    VarSet operator()(VarSet s) const
    {
        VarSet out = 0;
        for (std::size_t b = 0; b < tables_.size(); ++b)
            out |= tables_[b][(s >> (8 * b)) & 0xffu];
        return out;
    }

private:
    std::vector<std::vector<VarSet>> tables_;
};

struct ReductionMap {
    int n = 0;
    std::vector<VarSet> canon;         // 2^n entries
    std::vector<std::int32_t> column;  // 2^n entries, -1 for the empty class
    std::vector<VarSet> reps;          // canonical set of each dense column
    std::unordered_map<VarSet, int> index_of;
    std::uint64_t count_before = 0;
    std::uint64_t count_after = 0;     // classes including the empty one

    int num_columns() const { return static_cast<int>(reps.size()); }
};

// Fuses subsets related by dependency closure or by a group element. The
// representative of a class is its smallest closed member (smallest bitmask),
// and the class of the empty set maps to the empty set.
ReductionMap build_reduction_map(const ProblemDescription& pd);

} // namespace entrolp
