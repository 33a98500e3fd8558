#include "entrolp/reduction.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include <json.hpp>

#include "entrolp/error.hpp"

namespace entrolp {

GroupReport check_group(const SymmetryGroup& sym, const std::vector<std::string>& rv_names)
{
    GroupReport rep;
    const auto& rows = sym.perms;
    if (rows.empty()) {
        rep.message = "Symmetries have been successfully checked.";
        return rep;
    }
    std::set<std::vector<int>> members(rows.begin(), rows.end());
    const std::size_t n = rows.front().size();
    std::vector<int> comp(n);
    for (const auto& a : rows) {
        for (const auto& b : rows) {
            for (std::size_t k = 0; k < n; ++k)
                comp[k] = b[a[k]];
            if (!members.count(comp)) {
                rep.ok = false;
                rep.missing = comp;
                std::vector<std::string> names;
                for (int v : comp)
                    names.push_back(rv_names.at(v));
                rep.message = "Bad Symmetry -- missing permutation " + nlohmann::json(names).dump();
                return rep;
            }
        }
    }
    rep.message = "Symmetries have been successfully checked.";
    return rep;
}

void require_group(const SymmetryGroup& sym, const std::vector<std::string>& rv_names)
{
    GroupReport rep = check_group(sym, rv_names);
    if (!rep.ok)
        throw symmetry_error(rep.message);
}

VarSet dependency_closure(VarSet s, const std::vector<Dependency>& deps)
{
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& d : deps) {
            if (is_subset(d.given, s) && !is_subset(d.dependent, s)) {
                s |= d.dependent;
                changed = true;
            }
        }
    }
    return s;
}

PermApplier::PermApplier(const std::vector<int>& perm)
{
    const std::size_t n = perm.size();
    const std::size_t nbytes = (n + 7) / 8;
    tables_.assign(nbytes, std::vector<VarSet>(256, 0));
    for (std::size_t b = 0; b < nbytes; ++b) {
        for (unsigned v = 0; v < 256; ++v) {
            VarSet out = 0;
            for (unsigned bit = 0; bit < 8; ++bit) {
                std::size_t i = 8 * b + bit;
                if (i < n && ((v >> bit) & 1u))
                    out |= singleton(perm[i]);
            }
            tables_[b][v] = out;
        }
    }
}

namespace {

struct UnionFind {
    std::vector<VarSet> parent;
    explicit UnionFind(std::size_t size) : parent(size) { std::iota(parent.begin(), parent.end(), VarSet{0}); }
    VarSet find(VarSet x)
    {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(VarSet a, VarSet b)
    {
        a = find(a);
        b = find(b);
        if (a == b)
            return;
        // Keep the smaller id as root so the root of the empty class is 0.
        if (a < b)
            parent[b] = a;
        else
            parent[a] = b;
    }
};

} // namespace

ReductionMap build_reduction_map(const ProblemDescription& pd)
{
    const int n = pd.num_rvs();
    if (n > max_rvs)
        throw error("too many random variables for the reduction map");
    const std::size_t size = std::size_t{1} << n;

    std::vector<PermApplier> perms;
    for (const auto& p : pd.sym.perms)
        perms.emplace_back(p);

    UnionFind uf(size);
    std::vector<char> closed(size, 0);
    for (std::size_t s = 0; s < size; ++s) {
        VarSet S = static_cast<VarSet>(s);
        VarSet c = dependency_closure(S, pd.deps);
        closed[s] = c == S;
        if (c != S)
            uf.unite(S, c);
        for (const auto& g : perms) {
            VarSet t = g(S);
            if (t != S)
                uf.unite(S, t);
        }
    }

    ReductionMap m;
    m.n = n;
    m.count_before = size;
    // Smallest closed member of each class, indexed by root.
    std::vector<VarSet> best(size, ~VarSet{0});
    for (std::size_t s = 0; s < size; ++s) {
        if (!closed[s])
            continue;
        VarSet r = uf.find(static_cast<VarSet>(s));
        best[r] = std::min(best[r], static_cast<VarSet>(s));
    }
    VarSet empty_root = uf.find(0);
    m.canon.resize(size);
    for (std::size_t s = 0; s < size; ++s) {
        VarSet r = uf.find(static_cast<VarSet>(s));
        m.canon[s] = r == empty_root ? 0 : best[r];
    }
    for (std::size_t s = 1; s < size; ++s)
        if (m.canon[s] == s)
            m.reps.push_back(static_cast<VarSet>(s));
    m.count_after = m.reps.size() + 1;
    for (std::size_t k = 0; k < m.reps.size(); ++k)
        m.index_of.emplace(m.reps[k], static_cast<int>(k));
    m.column.resize(size);
    for (std::size_t s = 0; s < size; ++s)
        m.column[s] = m.canon[s] == 0 ? -1 : m.index_of.at(m.canon[s]);
    return m;
}

} // namespace entrolp
