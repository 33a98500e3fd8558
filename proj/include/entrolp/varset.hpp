#pragma once

#include <bit>
#include <cstdint>

namespace entrolp {

// Subset of random variables; bit i is the i-th entry of the RV list.
using VarSet = std::uint32_t;

inline constexpr int max_rvs = 30;

constexpr VarSet singleton(int i) { return VarSet{1} << i; }
constexpr bool contains(VarSet s, int i) { return (s >> i) & 1u; }
constexpr bool is_subset(VarSet a, VarSet b) { return (a & ~b) == 0; }
constexpr int set_size(VarSet s) { return std::popcount(s); }
constexpr VarSet full_set(int n) { return n >= 32 ? ~VarSet{0} : (VarSet{1} << n) - 1; }

} // namespace entrolp
