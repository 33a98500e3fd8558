#include "entrolp/modes.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>

#include "entrolp/error.hpp"
#include "entrolp/parser.hpp"

namespace entrolp {

namespace {

// Keeps printf from showing -0.000000 for solver noise.
double tidy(double x)
{
    return std::abs(x) < 5e-7 ? 0.0 : x;
}

std::string fmt(const char* format, double a)
{
    char buf[128];
    std::snprintf(buf, sizeof buf, format, tidy(a));
    return buf;
}

std::string fmt2(const char* format, const std::string& s, double a)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, format, s.c_str(), tidy(a));
    return buf;
}

SparseRow sparse_from_dense(const std::vector<double>& d, Sense sense, double rhs)
{
    SparseRow r;
    for (int j = 0; j < static_cast<int>(d.size()); ++j)
        if (d[j] != 0.0) {
            r.idx.push_back(j);
            r.val.push_back(d[j]);
        }
    r.sense = sense;
    r.rhs = rhs;
    r.kind = RowKind::extra;
    return r;
}

double dot(const std::vector<double>& a, const std::vector<double>& b)
{
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j)
        s += a[j] * b[j];
    return s;
}

LPSolution solve_with(const ModeContext& ctx, const LPInstance& inst, ObjSense sense = ObjSense::minimize)
{
    LPSolution sol = solve_lp(inst, sense, ctx.opts);
    if (ctx.opts.display && !sol.iteration_log.empty())
        ctx.out << sol.iteration_log;
    return sol;
}

LPSolution require_optimal(const ModeContext& ctx, const LPInstance& inst, const std::string& what,
                           ObjSense sense = ObjSense::minimize)
{
    LPSolution sol = solve_with(ctx, inst, sense);
    if (sol.status != LPStatus::optimal)
        throw solver_error(what + ": the LP is " + status_name(sol.status));
    return sol;
}

LPInstance with_objective(const LPInstance& inst, std::vector<double> c)
{
    LPInstance copy = inst;
    copy.objective = std::move(c);
    copy.objective_constant = 0.0;
    return copy;
}

std::string coeff_token(double c)
{
    if (c == 1.0)
        return " ";
    if (c == -1.0)
        return "-";
    char buf[64];
    if (c == std::round(c))
        std::snprintf(buf, sizeof buf, "%.1f", c);
    else
        std::snprintf(buf, sizeof buf, "%g", c);
    return buf;
}

} // namespace

std::string objective_label(const ProblemDescription& pd)
{
    if (!pd.objective_source.empty())
        return display_expression(pd.objective_source);
    return format_expr(pd.objective, pd.rv_names, pd.al_names);
}

std::string render_row(const LPInstance& inst, const SparseRow& r, int orientation)
{
    double sgn = orientation;
    if (r.sense == Sense::le)
        sgn = -1.0;
    else if (r.sense == Sense::ge)
        sgn = 1.0;
    std::string out;
    for (std::size_t k = 0; k < r.idx.size(); ++k)
        out += "    " + coeff_token(sgn * r.val[k]) + inst.col_names[r.idx[k]];
    if (r.rhs != 0.0) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.1f", -sgn * r.rhs);
        if (-sgn * r.rhs != std::round(-sgn * r.rhs))
            std::snprintf(buf, sizeof buf, "%g", -sgn * r.rhs);
        out += std::string("    ") + buf + "*";
    }
    return out + ">=0";
}

RegularResult run_regular(const ModeContext& ctx)
{
    if (ctx.pd.objective.empty())
        throw mode_error("regular mode needs a nonempty objective (key O)");
    RegularResult res;
    res.solution = require_optimal(ctx, ctx.inst, "regular mode");
    res.optimal_value = res.solution.objective_value;
    for (const auto& q : ctx.pd.qu) {
        std::vector<double> d = dense_row(q.expr, ctx.map, ctx.inst.num_cols);
        res.queries.push_back({display_expression(q.source), dot(d, res.solution.primal) + q.expr.constant});
    }
    auto& out = ctx.out;
    out << block_separator << "\n";
    out << "Optimal value for " << objective_label(ctx.pd) << fmt(" = %.6f.", res.optimal_value) << "\n";
    if (!res.queries.empty()) {
        out << "Queried values:\n";
        for (const auto& q : res.queries)
            out << fmt2("%-26s= %.5f", q.label, q.value) << "\n";
    }
    out << block_separator << "\n";
    return res;
}

HullResult run_hull(const ModeContext& ctx)
{
    const auto& pd = ctx.pd;
    std::vector<Term> terms = parse_terms(pd.objective_source, pd.rv_names, pd.al_names);
    if (terms.size() != 2)
        throw mode_error("hull mode needs an objective with exactly two quantities; introduce additional LP "
                         "variables (AL) for the quantities and bound them with BC rows");
    for (const auto& t : terms) {
        bool atom = t.kind == Term::Kind::al || (t.kind == Term::Kind::entropy && t.given == 0);
        if (!atom)
            throw mode_error("hull mode: \"" + t.text +
                             "\" is not a joint entropy or an additional LP variable; introduce an AL "
                             "variable for it");
        if (t.coeff != 1.0)
            ctx.err << "Warning: hull mode ignores the coefficient of \"" << t.text << "\".\n";
    }
    Term a = terms[0], b = terms[1];
    a.coeff = b.coeff = 1.0;
    const int n = ctx.inst.num_cols;
    const std::vector<double> q1 = dense_row(expand_terms({a}), ctx.map, n);
    const std::vector<double> q2 = dense_row(expand_terms({b}), ctx.map, n);
    if (q1 == q2 || std::all_of(q1.begin(), q1.end(), [](double v) { return v == 0.0; }) ||
        std::all_of(q2.begin(), q2.end(), [](double v) { return v == 0.0; }))
        throw mode_error("hull mode: the two objective quantities coincide or vanish after reduction");

    HullResult res;
    res.x_label = a.text;
    res.y_label = b.text;

    auto point_of = [&](const LPSolution& s) { return HullPoint{dot(q1, s.primal), dot(q2, s.primal)}; };
    auto announce = [&](const HullPoint& p) {
        res.discovered.push_back(p);
        char buf[128];
        std::snprintf(buf, sizeof buf, "New point (%.6f, %.6f).", tidy(p.x), tidy(p.y));
        ctx.out << buf << "\n";
    };
    // Lexicographic minimum: first `first`, then `second` on that face.
    auto endpoint = [&](const std::vector<double>& first, const std::vector<double>& second) {
        LPSolution s1 = require_optimal(ctx, with_objective(ctx.inst, first), "hull mode");
        LPInstance pinned = with_objective(ctx.inst, second);
        double v = s1.objective_value;
        pinned.rows.push_back(sparse_from_dense(first, Sense::le, v + 1e-9 * (1.0 + std::abs(v))));
        LPSolution s2 = solve_with(ctx, pinned);
        if (s2.status == LPStatus::unbounded)
            throw solver_error("hull mode: the tradeoff region is unbounded");
        if (s2.status != LPStatus::optimal)
            return point_of(s1);
        return point_of(s2);
    };

    const HullPoint P = endpoint(q1, q2);
    const HullPoint Q = endpoint(q2, q1);
    announce(P);
    auto same = [](const HullPoint& u, const HullPoint& v) {
        return std::abs(u.x - v.x) <= 1e-9 * (1 + std::abs(u.x)) && std::abs(u.y - v.y) <= 1e-9 * (1 + std::abs(u.y));
    };
    bool capped = false;
    if (!same(P, Q)) {
        announce(Q);
        auto refine = [&](auto&& self, HullPoint L, HullPoint R, int depth) -> void {
            if (depth >= 64) {
                capped = true;
                return;
            }
            const double w1 = L.y - R.y, w2 = R.x - L.x;
            std::vector<double> c(n);
            for (int j = 0; j < n; ++j)
                c[j] = w1 * q1[j] + w2 * q2[j];
            LPSolution s = require_optimal(ctx, with_objective(ctx.inst, c), "hull mode");
            const double seg = w1 * L.x + w2 * L.y;
            const double eps = 1e-7 * (1.0 + std::abs(seg));
            if (s.objective_value >= seg - eps)
                return;
            HullPoint M = point_of(s);
            if (same(M, L) || same(M, R))
                return;
            announce(M);
            self(self, L, M, depth + 1);
            self(self, M, R, depth + 1);
        };
        refine(refine, P, Q, 0);
    }
    if (capped)
        ctx.err << "Warning: hull refinement reached the depth limit of 64; the list may be incomplete.\n";

    res.points = res.discovered;
    std::sort(res.points.begin(), res.points.end(),
              [](const HullPoint& u, const HullPoint& v) { return u.x < v.x || (u.x == v.x && u.y > v.y); });
    ctx.out << "\n\nList of found points on the hull:\n";
    for (const auto& p : res.points) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "(%.6f, %.6f).", tidy(p.x), tidy(p.y));
        ctx.out << buf << "\n";
    }
    ctx.out << "End of list of found points.\n";
    return res;
}

namespace {

struct WeightProblem {
    LPInstance lp;
    std::vector<std::pair<int, int>> source; // (row, orientation) per weight column
};

// Columns are one weight per row in >= form; rows force the weighted sum of
// left-hand sides to equal the target and the weighted right-hand sides to
// reach its bound.
WeightProblem weight_problem(const LPInstance& inst, const std::vector<double>& target, double rhs)
{
    WeightProblem wp;
    for (int i = 0; i < inst.num_rows(); ++i) {
        const auto& r = inst.rows[i];
        if (r.sense == Sense::eq) {
            wp.source.emplace_back(i, 1);
            wp.source.emplace_back(i, -1);
        } else {
            wp.source.emplace_back(i, r.sense == Sense::ge ? 1 : -1);
        }
    }
    const int m = inst.num_cols;
    const int k = static_cast<int>(wp.source.size());
    wp.lp.num_cols = k;
    wp.lp.num_entropy_cols = 0;
    wp.lp.col_lower.assign(k, 0.0);
    wp.lp.objective.assign(k, 1.0);
    for (int c = 0; c < k; ++c)
        wp.lp.col_names.push_back("w" + std::to_string(c));
    std::vector<SparseRow> rows(m + 1);
    for (int j = 0; j < m; ++j) {
        rows[j].sense = Sense::eq;
        rows[j].rhs = target[j];
        rows[j].kind = RowKind::extra;
    }
    rows[m].sense = Sense::ge;
    rows[m].rhs = rhs;
    rows[m].kind = RowKind::extra;
    for (int c = 0; c < k; ++c) {
        const auto& r = inst.rows[wp.source[c].first];
        const double o = wp.source[c].second;
        for (std::size_t t = 0; t < r.idx.size(); ++t) {
            rows[r.idx[t]].idx.push_back(c);
            rows[r.idx[t]].val.push_back(o * r.val[t]);
        }
        if (r.rhs != 0.0) {
            rows[m].idx.push_back(c);
            rows[m].val.push_back(o * r.rhs);
        }
    }
    wp.lp.rows = std::move(rows);
    return wp;
}

// Re-sums the weighted rows and compares with the target.
bool verify_proof(const LPInstance& inst, const WeightProblem& wp, const std::vector<double>& w,
                  const std::vector<double>& target, double rhs, double tol)
{
    std::vector<double> sum(inst.num_cols, 0.0);
    double bsum = 0.0;
    for (std::size_t c = 0; c < w.size(); ++c) {
        if (w[c] == 0.0)
            continue;
        if (w[c] < 0)
            return false;
        const auto& r = inst.rows[wp.source[c].first];
        const double o = wp.source[c].second;
        for (std::size_t t = 0; t < r.idx.size(); ++t)
            sum[r.idx[t]] += w[c] * o * r.val[t];
        bsum += w[c] * o * r.rhs;
    }
    for (int j = 0; j < inst.num_cols; ++j)
        if (std::abs(sum[j] - target[j]) > tol)
            return false;
    return bsum >= rhs - tol;
}

Proof make_proof(const LPInstance& inst, const WeightProblem& wp, const LPSolution& sol,
                 const std::vector<double>& target, double rhs, double tol)
{
    Proof p;
    if (sol.status != LPStatus::optimal)
        return p;
    p.found = true;
    p.weight_sum = sol.objective_value;
    for (std::size_t c = 0; c < sol.primal.size(); ++c) {
        if (sol.primal[c] <= 1e-9)
            continue;
        auto [row, o] = wp.source[c];
        p.lines.push_back({row, o, sol.primal[c], render_row(inst, inst.rows[row], o)});
    }
    std::vector<double> w = sol.primal;
    for (auto& v : w)
        if (v <= 1e-9)
            v = 0.0;
    p.verified = verify_proof(inst, wp, w, target, rhs, tol);
    return p;
}

// "2A+B>=1" -> "2A + B >= 1"
std::string display_relation(const std::string& src)
{
    std::size_t rel = src.find_first_of("<>=");
    if (rel == std::string::npos)
        return display_expression(src);
    std::size_t rel_end = src.find_first_not_of("<>=", rel);
    std::string rhs = rel_end == std::string::npos ? "" : src.substr(rel_end);
    rhs.erase(std::remove_if(rhs.begin(), rhs.end(), [](unsigned char c) { return std::isspace(c); }), rhs.end());
    return display_expression(src.substr(0, rel)) + " " + src.substr(rel, rel_end - rel) + " " + rhs;
}

void print_proof(std::ostream& out, const Proof& p, int index, const std::string& label, bool integer)
{
    out << block_separator << "\n";
    out << (integer ? "MIP dual value " : "LP dual value ") << fmt("%.6f", p.weight_sum) << "\n";
    out << "Proved " << index << "-th inequality" << (integer ? " using integer values: " : ": ") << label
        << ".\n";
    int k = 0;
    for (const auto& l : p.lines) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "%03d-th inequality: weight = %.6f", ++k, l.weight);
        out << buf << " " << l.text << "\n";
    }
    out << block_separator << "\n";
}

} // namespace

std::vector<ProveResult> run_prove(const ModeContext& ctx)
{
    if (ctx.pd.bp.empty())
        throw mode_error("prove mode needs at least one bound to prove (key BP)");
    std::vector<ProveResult> results;
    int index = 0;
    for (const auto& bp : ctx.pd.bp) {
        ++index;
        ProveResult pr;
        pr.target = bp.source;
        const std::string label = display_relation(bp.source);
        if (bp.sense == Sense::eq) {
            pr.diagnostic = "The " + std::to_string(index) +
                            "-th bound is an equality; write it as two inequalities to prove it.";
            ctx.err << pr.diagnostic << "\n";
            results.push_back(std::move(pr));
            continue;
        }
        const double sgn = bp.sense == Sense::le ? -1.0 : 1.0;
        std::vector<double> target = dense_row(bp.lhs, ctx.map, ctx.inst.num_cols);
        for (auto& v : target)
            v *= sgn;
        const double rhs = sgn * bp.rhs;
        WeightProblem wp = weight_problem(ctx.inst, target, rhs);

        LPSolution lp = solve_with(ctx, wp.lp);
        if (lp.status != LPStatus::optimal) {
            pr.diagnostic = "The " + std::to_string(index) + "-th inequality " + label +
                            " cannot be proved from Shannon-type inequalities and the given constraints.";
            ctx.out << block_separator << "\n" << pr.diagnostic << "\n" << block_separator << "\n";
            results.push_back(std::move(pr));
            continue;
        }
        pr.lp = make_proof(ctx.inst, wp, lp, target, rhs, 1e-6);
        print_proof(ctx.out, pr.lp, index, label, false);

        LPSolution ip = solve_integer_weights(wp.lp, ctx.opts);
        pr.integer = make_proof(ctx.inst, wp, ip, target, rhs, 1e-9);
        if (pr.integer.found)
            print_proof(ctx.out, pr.integer, index, label, true);
        else
            ctx.out << block_separator << "\nNo integer weights found for the " << index << "-th inequality.\n"
                    << block_separator << "\n";
        results.push_back(std::move(pr));
    }
    return results;
}

SensitivityResult run_sensitivity(const ModeContext& ctx)
{
    if (ctx.pd.objective.empty())
        throw mode_error("sensitivity mode needs a nonempty objective (key O)");
    if (ctx.pd.se.empty())
        throw mode_error("sensitivity mode needs at least one quantity (key SE)");
    SensitivityResult res;
    LPSolution base = require_optimal(ctx, ctx.inst, "sensitivity mode");
    res.optimal_value = base.objective_value;
    const double v = base.objective_value - ctx.inst.objective_constant;
    LPInstance pinned = ctx.inst;
    pinned.rows.push_back(sparse_from_dense(ctx.inst.objective, Sense::le, v + 1e-7 * (1.0 + std::abs(v))));
    for (const auto& se : ctx.pd.se) {
        std::vector<double> d = dense_row(se.expr, ctx.map, ctx.inst.num_cols);
        LPInstance lp = with_objective(pinned, d);
        SensitivityRange r;
        r.target = display_expression(se.source);
        LPSolution lo = solve_with(ctx, lp, ObjSense::minimize);
        LPSolution hi = solve_with(ctx, lp, ObjSense::maximize);
        if (lo.status == LPStatus::infeasible || hi.status == LPStatus::infeasible)
            throw solver_error("sensitivity mode: the pinned LP is infeasible");
        r.lo = lo.status == LPStatus::optimal ? lo.objective_value + se.expr.constant : -INFINITY;
        r.hi = hi.status == LPStatus::optimal ? hi.objective_value + se.expr.constant : INFINITY;
        res.ranges.push_back(r);
    }
    auto& out = ctx.out;
    out << block_separator << "\n";
    out << "Optimal value for " << objective_label(ctx.pd) << fmt(" = %.6f.", res.optimal_value) << "\n";
    out << "Sensitivity results:\n";
    for (const auto& r : res.ranges) {
        auto num = [](double x) {
            if (std::isinf(x))
                return std::string(x < 0 ? "-inf" : "+inf");
            return fmt("%.5f", x);
        };
        char buf[64];
        std::snprintf(buf, sizeof buf, "%-25s", r.target.c_str());
        out << "Sensitivity " << (r.target.size() > 25 ? r.target : std::string(buf)) << "= [" << num(r.lo)
            << ", " << num(r.hi) << "]\n";
    }
    out << block_separator << "\n";
    return res;
}

std::vector<char> random_keep_mask(const LPInstance& inst, std::uint64_t seed, double fraction)
{
    std::mt19937_64 gen(seed);
    // Keep when u < fraction * 2^64, so one draw per row nests the kept sets.
    const long double scale = 18446744073709551616.0L;
    const bool all = fraction >= 1.0;
    const long double threshold = static_cast<long double>(fraction) * scale;
    std::vector<char> keep(inst.rows.size(), 1);
    for (std::size_t i = 0; i < inst.rows.size(); ++i) {
        if (inst.rows[i].kind != RowKind::elemental)
            continue;
        const std::uint64_t u = gen();
        keep[i] = all || static_cast<long double>(u) < threshold;
    }
    return keep;
}

LPInstance select_rows(const LPInstance& inst, const std::vector<char>& keep)
{
    LPInstance out = inst;
    out.rows.clear();
    for (std::size_t i = 0; i < inst.rows.size(); ++i)
        if (keep[i])
            out.rows.push_back(inst.rows[i]);
    return out;
}

RandomResult run_random(const ModeContext& ctx, std::uint64_t seed, double fraction)
{
    if (!(fraction > 0.0 && fraction <= 1.0))
        throw mode_error("random mode needs a fraction in (0, 1]");
    if (ctx.pd.objective.empty())
        throw mode_error("random mode needs a nonempty objective (key O)");
    std::vector<char> keep = random_keep_mask(ctx.inst, seed, fraction);
    LPInstance sub = select_rows(ctx.inst, keep);
    RandomResult res;
    for (std::size_t i = 0; i < keep.size(); ++i) {
        if (ctx.inst.rows[i].kind != RowKind::elemental)
            continue;
        ++res.total;
        res.kept += keep[i] ? 1 : 0;
    }
    LPSolution sol = solve_with(ctx, sub);
    if (sol.status != LPStatus::optimal)
        throw solver_error(std::string("random mode: the LP is ") + status_name(sol.status));
    res.optimal_value = sol.objective_value;
    auto& out = ctx.out;
    out << block_separator << "\n";
    out << "Random subset: kept " << res.kept << " of " << res.total << " elemental inequalities (seed " << seed
        << ", fraction " << fraction << ").\n";
    out << "Optimal value for " << objective_label(ctx.pd) << fmt(" = %.6f.", res.optimal_value) << "\n";
    if (!ctx.pd.qu.empty()) {
        out << "Queried values:\n";
        for (const auto& q : ctx.pd.qu) {
            std::vector<double> d = dense_row(q.expr, ctx.map, ctx.inst.num_cols);
            out << fmt2("%-26s= %.5f", display_expression(q.source), dot(d, sol.primal) + q.expr.constant) << "\n";
        }
    }
    out << block_separator << "\n";
    return res;
}

} // namespace entrolp
