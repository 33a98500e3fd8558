#pragma once

// Shared fixtures and independent oracles for the test binaries. Nothing in
// here calls into the reduction, assembly or simplex code it is used to check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <queue>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "entrolp/lp.hpp"
#include "entrolp/parser.hpp"
#include "entrolp/reduction.hpp"

namespace testing {

using entrolp::VarSet;

inline std::string data_path(const std::string& name)
{
    return std::string(ENTROLP_DATA_DIR) + "/" + name;
}

inline std::string read_file(const std::string& path)
{
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Parsed problem plus its reduction and LP, built the way the CLI does.
struct Built {
    entrolp::PdDocument doc;
    entrolp::ReductionMap map;
    entrolp::LPInstance inst;
};

inline Built build(const std::string& text)
{
    Built b;
    b.doc = entrolp::parse_file(text);
    entrolp::require_group(b.doc.pd.sym, b.doc.pd.rv_names);
    b.map = entrolp::build_reduction_map(b.doc.pd);
    b.inst = entrolp::assemble(b.doc.pd, b.map);
    return b;
}

inline Built build_pd(const entrolp::ProblemDescription& pd)
{
    Built b;
    b.doc.pd = pd;
    b.map = entrolp::build_reduction_map(pd);
    b.inst = entrolp::assemble(pd, b.map);
    return b;
}

// ---------------------------------------------------------------------------
// Orbit and closure classes by label propagation over all 2^n subsets.

inline VarSet naive_closure(VarSet s, const std::vector<std::pair<VarSet, VarSet>>& deps)
{
    bool grew = true;
    while (grew) {
        grew = false;
        for (auto [dep, given] : deps)
            if ((given & ~s) == 0 && (dep & ~s) != 0) {
                s |= dep;
                grew = true;
            }
    }
    return s;
}

inline VarSet naive_apply(const std::vector<int>& perm, VarSet s)
{
    VarSet out = 0;
    for (std::size_t i = 0; i < perm.size(); ++i)
        if ((s >> i) & 1u)
            out |= VarSet{1} << perm[i];
    return out;
}

// comp[S] is the smallest subset reachable from S.
inline std::vector<VarSet> brute_classes(int n, const std::vector<std::pair<VarSet, VarSet>>& deps,
                                         const std::vector<std::vector<int>>& perms)
{
    const VarSet total = VarSet{1} << n;
    std::vector<std::vector<VarSet>> adj(total);
    for (VarSet s = 0; s < total; ++s) {
        VarSet c = naive_closure(s, deps);
        adj[s].push_back(c);
        adj[c].push_back(s);
        for (const auto& p : perms) {
            VarSet g = naive_apply(p, s);
            adj[s].push_back(g);
            adj[g].push_back(s);
        }
    }
    std::vector<VarSet> comp(total, ~VarSet{0});
    for (VarSet s = 0; s < total; ++s) {
        if (comp[s] != ~VarSet{0})
            continue;
        std::vector<VarSet> members;
        std::queue<VarSet> q;
        q.push(s);
        comp[s] = s;
        while (!q.empty()) {
            VarSet u = q.front();
            q.pop();
            members.push_back(u);
            for (VarSet v : adj[u])
                if (comp[v] == ~VarSet{0}) {
                    comp[v] = s;
                    q.push(v);
                }
        }
        VarSet lo = *std::min_element(members.begin(), members.end());
        for (VarSet m : members)
            comp[m] = lo;
    }
    return comp;
}

// Closure of a set of permutations under composition.
inline std::vector<std::vector<int>> generate_group(int n, const std::vector<std::vector<int>>& gens)
{
    std::vector<int> id(n);
    std::iota(id.begin(), id.end(), 0);
    std::vector<std::vector<int>> group{id};
    for (std::size_t k = 0; k < group.size(); ++k)
        for (const auto& g : gens) {
            std::vector<int> c(n);
            for (int i = 0; i < n; ++i)
                c[i] = g[group[k][i]];
            if (std::find(group.begin(), group.end(), c) == group.end())
                group.push_back(c);
        }
    return group;
}

// ---------------------------------------------------------------------------
// Vertex enumeration: min c.x + c0 subject to eq rows, ge rows. The caller
// includes x >= 0 among the ge rows so the region has a vertex when nonempty.

struct DenseLP {
    int n = 0;
    std::vector<std::vector<double>> eq_a;
    std::vector<double> eq_b;
    std::vector<std::vector<double>> ge_a;
    std::vector<double> ge_b;
    std::vector<double> c;
    double c0 = 0.0;

    void add_nonneg()
    {
        for (int j = 0; j < n; ++j) {
            std::vector<double> r(n, 0.0);
            r[j] = 1.0;
            ge_a.push_back(r);
            ge_b.push_back(0.0);
        }
    }
};

struct VertexResult {
    bool skipped = false;
    bool feasible = false;
    double value = 0.0;
};

inline double binomial(int n, int k)
{
    if (k < 0 || k > n)
        return 0.0;
    double r = 1.0;
    for (int i = 1; i <= k; ++i)
        r = r * (n - k + i) / i;
    return r;
}

// Solves a square system in place; false when singular.
inline bool solve_square(std::vector<std::vector<double>> a, std::vector<double> b, std::vector<double>& x)
{
    const int d = static_cast<int>(b.size());
    for (int col = 0; col < d; ++col) {
        int piv = col;
        for (int r = col + 1; r < d; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col]))
                piv = r;
        if (std::abs(a[piv][col]) < 1e-10)
            return false;
        std::swap(a[piv], a[col]);
        std::swap(b[piv], b[col]);
        for (int r = 0; r < d; ++r) {
            if (r == col || a[r][col] == 0.0)
                continue;
            double f = a[r][col] / a[col][col];
            for (int k = col; k < d; ++k)
                a[r][k] -= f * a[col][k];
            b[r] -= f * b[col];
        }
    }
    x.resize(d);
    for (int r = 0; r < d; ++r)
        x[r] = b[r] / a[r][r];
    return true;
}

inline VertexResult vertex_min(const DenseLP& lp, double max_subsets = 3e5)
{
    VertexResult res;
    const int n = lp.n;
    // Reduced row echelon form of the equalities.
    std::vector<std::vector<double>> a = lp.eq_a;
    std::vector<double> b = lp.eq_b;
    std::vector<int> pivot_col;
    int row = 0;
    for (int col = 0; col < n && row < static_cast<int>(a.size()); ++col) {
        int piv = row;
        for (int r = row + 1; r < static_cast<int>(a.size()); ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col]))
                piv = r;
        if (std::abs(a[piv][col]) < 1e-10)
            continue;
        std::swap(a[piv], a[row]);
        std::swap(b[piv], b[row]);
        double p = a[row][col];
        for (auto& v : a[row])
            v /= p;
        b[row] /= p;
        for (int r = 0; r < static_cast<int>(a.size()); ++r) {
            if (r == row || a[r][col] == 0.0)
                continue;
            double f = a[r][col];
            for (int k = 0; k < n; ++k)
                a[r][k] -= f * a[row][k];
            b[r] -= f * b[row];
        }
        pivot_col.push_back(col);
        ++row;
    }
    for (int r = row; r < static_cast<int>(a.size()); ++r)
        if (std::abs(b[r]) > 1e-9)
            return res; // inconsistent equalities
    std::vector<int> free_cols;
    for (int j = 0; j < n; ++j)
        if (std::find(pivot_col.begin(), pivot_col.end(), j) == pivot_col.end())
            free_cols.push_back(j);
    const int d = static_cast<int>(free_cols.size());

    // x_p = b_r - sum_f a[r][f] z_f for pivot rows, x_f = z_f.
    auto project = [&](const std::vector<double>& coef, double rhs, std::vector<double>& out, double& out_rhs) {
        out.assign(d, 0.0);
        out_rhs = rhs;
        for (int k = 0; k < d; ++k)
            out[k] = coef[free_cols[k]];
        for (int r = 0; r < row; ++r) {
            double cp = coef[pivot_col[r]];
            if (cp == 0.0)
                continue;
            out_rhs -= cp * b[r];
            for (int k = 0; k < d; ++k)
                out[k] -= cp * a[r][free_cols[k]];
        }
    };
    // Project, then drop empty rows and keep the tightest of parallel rows.
    std::map<std::vector<long long>, std::pair<std::vector<double>, double>> uniq;
    for (std::size_t i = 0; i < lp.ge_a.size(); ++i) {
        std::vector<double> pr;
        double prhs = 0.0;
        project(lp.ge_a[i], lp.ge_b[i], pr, prhs);
        double scale = 0.0;
        for (double v : pr)
            scale = std::max(scale, std::abs(v));
        if (scale < 1e-10) {
            if (prhs > 1e-9)
                return res;
            continue;
        }
        std::vector<long long> key;
        for (auto& v : pr) {
            v /= scale;
            key.push_back(std::llround(v * 1e8));
        }
        prhs /= scale;
        auto [it, fresh] = uniq.try_emplace(key, pr, prhs);
        if (!fresh)
            it->second.second = std::max(it->second.second, prhs);
    }
    const int m = static_cast<int>(uniq.size());
    std::vector<std::vector<double>> g;
    std::vector<double> gb;
    for (auto& [k, v] : uniq) {
        g.push_back(v.first);
        gb.push_back(v.second);
    }
    std::vector<double> cz;
    double c_const = 0.0;
    project(lp.c, 0.0, cz, c_const);
    c_const = lp.c0 - c_const;

    if (binomial(m, d) > max_subsets) {
        res.skipped = true;
        return res;
    }
    auto feasible = [&](const std::vector<double>& z) {
        for (int i = 0; i < m; ++i) {
            double s = 0.0;
            for (int k = 0; k < d; ++k)
                s += g[i][k] * z[k];
            if (s < gb[i] - 1e-8 * (1.0 + std::abs(gb[i])))
                return false;
        }
        return true;
    };
    auto value = [&](const std::vector<double>& z) {
        double s = c_const;
        for (int k = 0; k < d; ++k)
            s += cz[k] * z[k];
        return s;
    };
    if (d == 0) {
        std::vector<double> z;
        if (feasible(z)) {
            res.feasible = true;
            res.value = value(z);
        }
        return res;
    }
    if (m < d)
        return res;
    std::vector<int> pick(d);
    std::iota(pick.begin(), pick.end(), 0);
    std::vector<std::vector<double>> sq(d);
    std::vector<double> sb(d), z;
    while (true) {
        for (int k = 0; k < d; ++k) {
            sq[k] = g[pick[k]];
            sb[k] = gb[pick[k]];
        }
        if (solve_square(sq, sb, z) && feasible(z)) {
            double v = value(z);
            if (!res.feasible || v < res.value)
                res.value = v;
            res.feasible = true;
        }
        int k = d - 1;
        while (k >= 0 && pick[k] == m - d + k)
            --k;
        if (k < 0)
            break;
        ++pick[k];
        for (int t = k + 1; t < d; ++t)
            pick[t] = pick[t - 1] + 1;
    }
    return res;
}

// LPInstance -> DenseLP, with every column bounded below by 0.
inline DenseLP dense_from_instance(const entrolp::LPInstance& inst)
{
    DenseLP lp;
    lp.n = inst.num_cols;
    lp.c = inst.objective;
    lp.c.resize(lp.n, 0.0);
    lp.c0 = inst.objective_constant;
    for (const auto& r : inst.rows) {
        std::vector<double> d(lp.n, 0.0);
        for (std::size_t t = 0; t < r.idx.size(); ++t)
            d[r.idx[t]] = r.val[t];
        if (r.sense == entrolp::Sense::eq) {
            lp.eq_a.push_back(d);
            lp.eq_b.push_back(r.rhs);
        } else if (r.sense == entrolp::Sense::ge) {
            lp.ge_a.push_back(d);
            lp.ge_b.push_back(r.rhs);
        } else {
            for (auto& v : d)
                v = -v;
            lp.ge_a.push_back(d);
            lp.ge_b.push_back(-r.rhs);
        }
    }
    lp.add_nonneg();
    return lp;
}

// ---------------------------------------------------------------------------
// Entropy vectors of explicit joint distributions.

// h[S] = H(X_S) in bits for a pmf over n binary variables indexed by outcome
// bitmask.
inline std::vector<double> entropy_vector(int n, const std::vector<double>& pmf)
{
    const VarSet total = VarSet{1} << n;
    std::vector<double> h(total, 0.0);
    for (VarSet s = 1; s < total; ++s) {
        std::map<VarSet, double> marg;
        for (VarSet o = 0; o < pmf.size(); ++o)
            marg[o & s] += pmf[o];
        double e = 0.0;
        for (auto [k, p] : marg)
            if (p > 0.0)
                e -= p * std::log2(p);
        h[s] = e;
    }
    return h;
}

} // namespace testing
