#include "entrolp/lp.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <unordered_set>

#include "entrolp/error.hpp"

namespace entrolp {

std::uint64_t elemental_count(int n)
{
    if (n < 1)
        return 0;
    std::uint64_t pairs = static_cast<std::uint64_t>(n) * (n - 1) / 2;
    return static_cast<std::uint64_t>(n) + (n >= 2 ? pairs << (n - 2) : 0);
}

void gen_elemental(int n, const std::function<void(ElementalKind, int, int, VarSet)>& f)
{
    if (n < 1 || n > max_rvs)
        throw error("elemental inequalities need 1 <= n <= " + std::to_string(max_rvs));
    const VarSet full = full_set(n);
    for (int i = 0; i < n; ++i)
        f(ElementalKind::conditional, i, -1, full & ~singleton(i));
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const VarSet rest = full & ~singleton(i) & ~singleton(j);
            // Submasks of rest, from rest down to the empty set.
            VarSet a = rest;
            while (true) {
                f(ElementalKind::mutual, i, j, a);
                if (a == 0)
                    break;
                a = (a - 1) & rest;
            }
        }
    }
}

LinearExpr elemental_expr(int n, ElementalKind kind, int i, int j, VarSet a)
{
    if (kind == ElementalKind::conditional)
        return expand_conditional_entropy(singleton(i), a & full_set(n));
    return expand_mutual_information(singleton(i), singleton(j), a);
}

void reduce_expr(const LinearExpr& e, const ReductionMap& map, std::vector<int>& idx, std::vector<double>& val)
{
    std::vector<std::pair<int, double>> acc;
    for (auto [s, c] : e.entropy_terms) {
        int col = map.column.at(s);
        if (col >= 0)
            acc.emplace_back(col, c);
    }
    const int base = map.num_columns();
    for (auto [id, c] : e.al_terms)
        acc.emplace_back(base + id, c);
    std::sort(acc.begin(), acc.end());
    idx.clear();
    val.clear();
    for (std::size_t k = 0; k < acc.size();) {
        int col = acc[k].first;
        double sum = 0.0;
        for (; k < acc.size() && acc[k].first == col; ++k)
            sum += acc[k].second;
        if (std::abs(sum) >= coeff_zero_tol) {
            idx.push_back(col);
            val.push_back(sum);
        }
    }
}

std::vector<double> dense_row(const LinearExpr& e, const ReductionMap& map, int num_cols)
{
    std::vector<int> idx;
    std::vector<double> val;
    reduce_expr(e, map, idx, val);
    std::vector<double> out(num_cols, 0.0);
    for (std::size_t k = 0; k < idx.size(); ++k)
        out.at(idx[k]) = val[k];
    return out;
}

double row_activity(const SparseRow& r, const std::vector<double>& x)
{
    double s = 0.0;
    for (std::size_t k = 0; k < r.idx.size(); ++k)
        s += r.val[k] * x[r.idx[k]];
    return s;
}

namespace {

// Reduced elemental row: at most four entries with small integer coefficients.
struct ElemKey {
    std::array<std::int32_t, 4> col{};
    std::array<std::int8_t, 4> coef{};
    std::uint8_t len = 0;

    bool operator==(const ElemKey& o) const
    {
        if (len != o.len)
            return false;
        for (int k = 0; k < len; ++k)
            if (col[k] != o.col[k] || coef[k] != o.coef[k])
                return false;
        return true;
    }
    bool operator<(const ElemKey& o) const
    {
        for (int k = 0; k < std::min(len, o.len); ++k) {
            if (col[k] != o.col[k])
                return col[k] < o.col[k];
            if (coef[k] != o.coef[k])
                return coef[k] < o.coef[k];
        }
        return len < o.len;
    }
};

struct ElemKeyHash {
    std::size_t operator()(const ElemKey& k) const
    {
        std::size_t h = k.len;
        for (int i = 0; i < k.len; ++i) {
            h = h * 1000003u ^ static_cast<std::size_t>(k.col[i]);
            h = h * 31u ^ static_cast<std::size_t>(static_cast<std::uint8_t>(k.coef[i]));
        }
        return h;
    }
};

ElemKey make_key(const std::array<VarSet, 4>& sets, const std::array<int, 4>& signs, int count,
                 const ReductionMap& map)
{
    std::array<std::pair<std::int32_t, int>, 4> acc{};
    int m = 0;
    for (int k = 0; k < count; ++k) {
        std::int32_t col = map.column[sets[k]];
        if (col < 0)
            continue;
        acc[m++] = {col, signs[k]};
    }
    std::sort(acc.begin(), acc.begin() + m);
    ElemKey key;
    for (int k = 0; k < m;) {
        std::int32_t col = acc[k].first;
        int sum = 0;
        for (; k < m && acc[k].first == col; ++k)
            sum += acc[k].second;
        if (sum != 0) {
            key.col[key.len] = col;
            key.coef[key.len] = static_cast<std::int8_t>(sum);
            ++key.len;
        }
    }
    return key;
}

} // namespace

LPInstance assemble(const ProblemDescription& pd, const ReductionMap& map)
{
    const int n = pd.num_rvs();
    LPInstance inst;
    inst.num_entropy_cols = map.num_columns();
    inst.num_cols = inst.num_entropy_cols + pd.num_als();
    for (VarSet s : map.reps)
        inst.col_names.push_back("H(" + set_name(s, pd.rv_names) + ")");
    for (const auto& a : pd.al_names)
        inst.col_names.push_back(a);
    inst.col_lower.assign(inst.num_cols, 0.0);

    if (n >= 1) {
        std::unordered_set<ElemKey, ElemKeyHash> seen;
        const VarSet full = full_set(n);
        gen_elemental(n, [&](ElementalKind kind, int i, int j, VarSet a) {
            ++inst.stats.elemental_generated;
            ElemKey key;
            if (kind == ElementalKind::conditional) {
                key = make_key({full, full & ~singleton(i), 0, 0}, {1, -1, 0, 0}, 2, map);
            } else {
                VarSet si = singleton(i), sj = singleton(j);
                key = make_key({a | si, a | sj, a | si | sj, a}, {1, 1, -1, -1}, 4, map);
            }
            if (key.len == 0) {
                ++inst.stats.elemental_vacuous;
                return;
            }
            if (!seen.insert(key).second)
                ++inst.stats.elemental_duplicate;
        });
        std::vector<ElemKey> keys(seen.begin(), seen.end());
        std::sort(keys.begin(), keys.end());
        inst.stats.elemental_kept = keys.size();
        inst.rows.reserve(keys.size() + pd.indeps.size() + pd.bc.size());
        for (const auto& k : keys) {
            SparseRow r;
            for (int t = 0; t < k.len; ++t) {
                r.idx.push_back(k.col[t]);
                r.val.push_back(k.coef[t]);
            }
            r.sense = Sense::ge;
            r.kind = RowKind::elemental;
            inst.rows.push_back(std::move(r));
        }
    }

    for (const auto& ind : pd.indeps) {
        SparseRow r;
        reduce_expr(independence_to_expr(ind), map, r.idx, r.val);
        if (r.idx.empty()) {
            ++inst.stats.dropped_vacuous_other;
            continue;
        }
        r.sense = Sense::eq;
        r.kind = RowKind::independence;
        inst.rows.push_back(std::move(r));
        ++inst.stats.independence_rows;
    }

    for (const auto& b : pd.bc) {
        SparseRow r;
        reduce_expr(b.lhs, map, r.idx, r.val);
        r.sense = b.sense;
        r.rhs = b.rhs;
        r.kind = RowKind::bound;
        r.origin = b.source;
        if (r.idx.empty()) {
            bool holds = (b.sense == Sense::ge && 0.0 >= b.rhs) || (b.sense == Sense::le && 0.0 <= b.rhs) ||
                         (b.sense == Sense::eq && b.rhs == 0.0);
            if (holds) {
                ++inst.stats.dropped_vacuous_other;
                continue;
            }
        }
        inst.rows.push_back(std::move(r));
        ++inst.stats.bound_rows;
    }

    inst.objective = dense_row(pd.objective, map, inst.num_cols);
    inst.objective_constant = pd.objective.constant;
    return inst;
}

namespace {

void write_terms(std::ostringstream& out, const std::vector<int>& idx, const std::vector<double>& val)
{
    char buf[64];
    if (idx.empty()) {
        out << " 0 x0";
        return;
    }
    for (std::size_t k = 0; k < idx.size(); ++k) {
        if (k > 0 && k % 8 == 0)
            out << "\n   ";
        std::snprintf(buf, sizeof buf, " %c %.17g x%d", val[k] < 0 ? '-' : '+', std::abs(val[k]), idx[k]);
        out << buf;
    }
}

} // namespace

std::string write_lp_format(const LPInstance& inst)
{
    std::ostringstream out;
    out << "\\ entropy LP: " << inst.num_cols << " columns, " << inst.num_rows() << " rows\n";
    out << "Minimize\n obj:";
    std::vector<int> idx;
    std::vector<double> val;
    for (int j = 0; j < inst.num_cols; ++j)
        if (inst.objective[j] != 0.0) {
            idx.push_back(j);
            val.push_back(inst.objective[j]);
        }
    write_terms(out, idx, val);
    out << "\nSubject To\n";
    char buf[64];
    for (int i = 0; i < inst.num_rows(); ++i) {
        const auto& r = inst.rows[i];
        out << " r" << i << ":";
        write_terms(out, r.idx, r.val);
        std::snprintf(buf, sizeof buf, " %s %.17g\n", sense_symbol(r.sense), r.rhs);
        out << buf;
    }
    out << "Bounds\n";
    for (int j = 0; j < inst.num_cols; ++j) {
        if (std::isinf(inst.col_lower[j]))
            out << " x" << j << " free\n";
        else if (inst.col_lower[j] != 0.0) {
            std::snprintf(buf, sizeof buf, " x%d >= %.17g\n", j, inst.col_lower[j]);
            out << buf;
        }
    }
    out << "End\n";
    return out.str();
}

std::string constraint_report(const LPInstance& inst)
{
    const auto& s = inst.stats;
    std::ostringstream out;
    out << "Total number of constraints given to solver: " << inst.num_rows() << "\n";
    out << "Constraint breakdown: " << s.elemental_kept << " elemental (" << s.elemental_generated
        << " generated, " << s.elemental_vacuous << " vacuous, " << s.elemental_duplicate << " duplicate), "
        << s.independence_rows << " independence, " << s.bound_rows << " constant bounds, " << inst.num_cols
        << " columns with lower bound 0.\n";
    return out.str();
}

} // namespace entrolp
