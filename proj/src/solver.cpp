#include "entrolp/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include <unistd.h>

#include "entrolp/error.hpp"

namespace entrolp {

const char* status_name(LPStatus s)
{
    switch (s) {
    case LPStatus::optimal: return "optimal";
    case LPStatus::infeasible: return "infeasible";
    case LPStatus::unbounded: return "unbounded";
    }
    return "?";
}

SolverOptions SolverOptions::from_env()
{
    SolverOptions o;
    if (const char* cmd = std::getenv(solver_env_var))
        o.external_command = cmd;
    return o;
}

namespace {

constexpr double feas_tol = 1e-9;
constexpr double opt_tol = 1e-9;
constexpr double pivot_tol = 1e-9;
constexpr int refactor_every = 100;
constexpr int degenerate_limit = 50;
constexpr double perturb_size = 1e-6;

using SparseCol = std::vector<std::pair<int, double>>;

// min c'z  s.t.  Az = b, z >= 0, with b >= 0.
struct StdForm {
    int m = 0;
    std::vector<SparseCol> cols;
    std::vector<double> c;
    std::vector<double> b;
    // Column that is +e_i, usable as a starting basic variable, or -1.
    std::vector<int> unit_col;
};

struct StdResult {
    LPStatus status = LPStatus::infeasible;
    std::vector<double> z;
    std::vector<double> pi;
    long iterations = 0;
};

class Simplex {
public:
    Simplex(const StdForm& f, const SolverOptions& opts, std::string* log)
        : f_(f), m_(f.m), n_(static_cast<int>(f.cols.size())), log_(log)
    {
        max_iter_ = opts.max_iterations > 0 ? opts.max_iterations : 200000 + 50L * (m_ + n_);
    }

    StdResult run()
    {
        // Starting basis: unit columns where available, artificials elsewhere.
        cols_ = f_.cols;
        basis_.assign(m_, -1);
        for (int i = 0; i < m_; ++i) {
            if (f_.unit_col[i] >= 0) {
                basis_[i] = f_.unit_col[i];
            } else {
                basis_[i] = static_cast<int>(cols_.size());
                cols_.push_back({{i, 1.0}});
            }
        }
        total_ = static_cast<int>(cols_.size());
        is_basic_.assign(total_, -1);
        for (int i = 0; i < m_; ++i)
            is_basic_[basis_[i]] = i;
        binv_.assign(static_cast<std::size_t>(m_) * m_, 0.0);
        for (int i = 0; i < m_; ++i)
            binv_[idx(i, i)] = 1.0;
        xb_ = f_.b;
        bp_ = f_.b;

        StdResult res;
        if (total_ > n_) {
            std::vector<double> c1(total_, 0.0);
            for (int j = n_; j < total_; ++j)
                c1[j] = 1.0;
            if (phase(c1, 1, true) != LPStatus::optimal)
                throw solver_error("simplex: phase one did not terminate normally");
            double infeas = 0.0, bmax = 1.0;
            for (int i = 0; i < m_; ++i) {
                if (basis_[i] >= n_)
                    infeas += std::max(0.0, xb_[i]);
                bmax = std::max(bmax, std::abs(f_.b[i]));
            }
            if (infeas > 1e-8 * bmax) {
                res.status = LPStatus::infeasible;
                res.iterations = iters_;
                return res;
            }
            drive_out_artificials();
        }
        std::vector<double> c2(total_, 0.0);
        std::copy(f_.c.begin(), f_.c.end(), c2.begin());
        res.status = phase(c2, 2, false);
        res.iterations = iters_;
        if (res.status != LPStatus::optimal)
            return res;
        res.z.assign(n_, 0.0);
        for (int i = 0; i < m_; ++i)
            if (basis_[i] < n_)
                res.z[basis_[i]] = std::max(0.0, xb_[i]);
        res.pi = duals(c2);
        return res;
    }

private:
    const StdForm& f_;
    int m_, n_, total_ = 0;
    std::string* log_;
    long max_iter_;
    long iters_ = 0;
    std::vector<SparseCol> cols_;
    std::vector<int> basis_;
    std::vector<int> is_basic_;
    std::vector<double> binv_;
    std::vector<double> xb_;
    std::vector<double> bp_; // right-hand side in use, possibly perturbed

    std::size_t idx(int i, int k) const { return static_cast<std::size_t>(i) * m_ + k; }

    std::vector<double> duals(const std::vector<double>& c) const
    {
        std::vector<double> y(m_, 0.0);
        for (int i = 0; i < m_; ++i) {
            double cb = c[basis_[i]];
            if (cb == 0.0)
                continue;
            const double* row = &binv_[idx(i, 0)];
            for (int k = 0; k < m_; ++k)
                y[k] += cb * row[k];
        }
        return y;
    }

    std::vector<double> ftran(const SparseCol& col) const
    {
        std::vector<double> a(m_, 0.0);
        for (auto [r, v] : col)
            for (int i = 0; i < m_; ++i)
                a[i] += binv_[idx(i, r)] * v;
        return a;
    }

    void pivot(int r, int q, const std::vector<double>& alpha)
    {
        double* prow = &binv_[idx(r, 0)];
        const double inv = 1.0 / alpha[r];
        for (int k = 0; k < m_; ++k)
            prow[k] *= inv;
        for (int i = 0; i < m_; ++i) {
            if (i == r || alpha[i] == 0.0)
                continue;
            double* row = &binv_[idx(i, 0)];
            const double a = alpha[i];
            for (int k = 0; k < m_; ++k)
                row[k] -= a * prow[k];
        }
        is_basic_[basis_[r]] = -1;
        basis_[r] = q;
        is_basic_[q] = r;
    }

    void refactor()
    {
        // Gauss-Jordan inversion of the basis matrix with partial pivoting.
        std::vector<double> bm(static_cast<std::size_t>(m_) * m_, 0.0);
        for (int i = 0; i < m_; ++i)
            for (auto [r, v] : cols_[basis_[i]])
                bm[idx(r, i)] = v;
        std::vector<double> inv(static_cast<std::size_t>(m_) * m_, 0.0);
        for (int i = 0; i < m_; ++i)
            inv[idx(i, i)] = 1.0;
        for (int col = 0; col < m_; ++col) {
            int p = col;
            for (int i = col + 1; i < m_; ++i)
                if (std::abs(bm[idx(i, col)]) > std::abs(bm[idx(p, col)]))
                    p = i;
            if (std::abs(bm[idx(p, col)]) < 1e-13)
                throw solver_error("simplex: singular basis during refactorization");
            if (p != col) {
                for (int k = 0; k < m_; ++k) {
                    std::swap(bm[idx(p, k)], bm[idx(col, k)]);
                    std::swap(inv[idx(p, k)], inv[idx(col, k)]);
                }
            }
            const double d = 1.0 / bm[idx(col, col)];
            for (int k = 0; k < m_; ++k) {
                bm[idx(col, k)] *= d;
                inv[idx(col, k)] *= d;
            }
            for (int i = 0; i < m_; ++i) {
                if (i == col)
                    continue;
                const double a = bm[idx(i, col)];
                if (a == 0.0)
                    continue;
                for (int k = 0; k < m_; ++k) {
                    bm[idx(i, k)] -= a * bm[idx(col, k)];
                    inv[idx(i, k)] -= a * inv[idx(col, k)];
                }
            }
        }
        binv_ = std::move(inv);
        for (int i = 0; i < m_; ++i) {
            double s = 0.0;
            for (int k = 0; k < m_; ++k)
                s += binv_[idx(i, k)] * bp_[k];
            xb_[i] = s;
        }
    }

    double objective(const std::vector<double>& c) const
    {
        double s = 0.0;
        for (int i = 0; i < m_; ++i)
            s += c[basis_[i]] * xb_[i];
        return s;
    }

    void log_line(int phase, const std::vector<double>& c, bool final_line)
    {
        if (!log_)
            return;
        char buf[128];
        std::snprintf(buf, sizeof buf, "%s phase %d iteration %6ld  objective %.9e\n",
                      final_line ? "end  " : "     ", phase, iters_, objective(c));
        *log_ += buf;
    }

    // Shifts every basic value up by a small amount so that degenerate
    // vertices become nondegenerate; the right-hand side follows.
    void perturb()
    {
        std::mt19937_64 gen(0x5eedu);
        std::uniform_real_distribution<double> u(1.0, 2.0);
        for (int i = 0; i < m_; ++i)
            xb_[i] = std::max(xb_[i], 0.0) + perturb_size * u(gen) * (1.0 + std::abs(xb_[i]));
        bp_.assign(m_, 0.0);
        for (int i = 0; i < m_; ++i)
            for (auto [r, v] : cols_[basis_[i]])
                bp_[r] += v * xb_[i];
    }

    LPStatus phase(const std::vector<double>& c, int phase_no, bool allow_artificial)
    {
        perturb();
        LPStatus st = iterate(c, phase_no, allow_artificial);
        bp_ = f_.b;
        refactor();
        if (st != LPStatus::optimal)
            return st;
        double worst = 0.0;
        for (int i = 0; i < m_; ++i)
            worst = std::min(worst, xb_[i]);
        if (worst < -feas_tol && dual_cleanup(c, allow_artificial) != LPStatus::optimal)
            return LPStatus::infeasible;
        return iterate(c, phase_no, allow_artificial);
    }

    // Dual simplex from a dual feasible basis until the basic values are
    // nonnegative again.
    LPStatus dual_cleanup(const std::vector<double>& c, bool allow_artificial)
    {
        const int limit = allow_artificial ? total_ : n_;
        int since_refactor = 0;
        while (true) {
            if (++iters_ > max_iter_)
                throw solver_error("simplex: iteration limit reached");
            if (since_refactor >= refactor_every) {
                refactor();
                since_refactor = 0;
            }
            int r = -1;
            double worst = -feas_tol;
            for (int i = 0; i < m_; ++i)
                if (xb_[i] < worst) {
                    worst = xb_[i];
                    r = i;
                }
            if (r < 0)
                return LPStatus::optimal;
            std::vector<double> y = duals(c);
            const double* rho = &binv_[idx(r, 0)];
            int q = -1;
            double best_ratio = INFINITY, best_alpha = 0.0;
            for (int j = 0; j < limit; ++j) {
                if (is_basic_[j] >= 0)
                    continue;
                double a = 0.0;
                for (auto [row, v] : cols_[j])
                    a += rho[row] * v;
                if (a >= -pivot_tol)
                    continue;
                double d = c[j];
                for (auto [row, v] : cols_[j])
                    d -= y[row] * v;
                double ratio = std::max(d, 0.0) / -a;
                if (ratio < best_ratio - 1e-12 || (ratio <= best_ratio + 1e-12 && -a > best_alpha)) {
                    best_ratio = ratio;
                    best_alpha = -a;
                    q = j;
                }
            }
            if (q < 0)
                return LPStatus::infeasible;
            std::vector<double> alpha = ftran(cols_[q]);
            const double theta = xb_[r] / alpha[r];
            for (int i = 0; i < m_; ++i)
                if (i != r)
                    xb_[i] -= theta * alpha[i];
            xb_[r] = theta;
            pivot(r, q, alpha);
            ++since_refactor;
        }
    }

    LPStatus iterate(const std::vector<double>& c, int phase, bool allow_artificial)
    {
        int degenerate = 0;
        int since_refactor = 0;
        log_line(phase, c, false);
        while (true) {
            if (++iters_ > max_iter_)
                throw solver_error("simplex: iteration limit reached");
            if (since_refactor >= refactor_every) {
                refactor();
                since_refactor = 0;
            }
            const bool bland = degenerate >= degenerate_limit;
            std::vector<double> y = duals(c);

            int q = -1;
            double best = -opt_tol;
            const int limit = allow_artificial ? total_ : n_;
            for (int j = 0; j < limit; ++j) {
                if (is_basic_[j] >= 0)
                    continue;
                double d = c[j];
                for (auto [r, v] : cols_[j])
                    d -= y[r] * v;
                if (d < best) {
                    q = j;
                    if (bland)
                        break;
                    best = d;
                }
            }
            if (q < 0) {
                log_line(phase, c, true);
                return LPStatus::optimal;
            }

            std::vector<double> alpha = ftran(cols_[q]);
            int r = -1;
            if (bland) {
                double theta = 0.0;
                for (int i = 0; i < m_; ++i) {
                    if (alpha[i] <= pivot_tol)
                        continue;
                    double t = std::max(xb_[i], 0.0) / alpha[i];
                    if (r < 0 || t < theta - 1e-12 || (t <= theta + 1e-12 && basis_[i] < basis_[r])) {
                        r = i;
                        theta = t;
                    }
                }
            } else {
                // Harris ratio test: bound with a small relaxation, then take
                // the largest pivot among the candidates.
                double theta_max = INFINITY;
                for (int i = 0; i < m_; ++i)
                    if (alpha[i] > pivot_tol)
                        theta_max = std::min(theta_max, (std::max(xb_[i], 0.0) + feas_tol) / alpha[i]);
                double big = 0.0;
                for (int i = 0; i < m_; ++i) {
                    if (alpha[i] <= pivot_tol)
                        continue;
                    if (std::max(xb_[i], 0.0) / alpha[i] <= theta_max && alpha[i] > big) {
                        big = alpha[i];
                        r = i;
                    }
                }
            }
            if (r < 0)
                return LPStatus::unbounded;

            const double theta = std::max(xb_[r], 0.0) / alpha[r];
            for (int i = 0; i < m_; ++i)
                if (i != r)
                    xb_[i] -= theta * alpha[i];
            xb_[r] = theta;
            pivot(r, q, alpha);
            ++since_refactor;
            degenerate = theta <= 1e-12 ? degenerate + 1 : 0;
            if (log_ && iters_ % 50 == 0)
                log_line(phase, c, false);
        }
    }

    void drive_out_artificials()
    {
        for (int i = 0; i < m_; ++i) {
            if (basis_[i] < n_)
                continue;
            const double* row = &binv_[idx(i, 0)];
            for (int j = 0; j < n_; ++j) {
                if (is_basic_[j] >= 0)
                    continue;
                double a = 0.0;
                for (auto [r, v] : cols_[j])
                    a += row[r] * v;
                if (std::abs(a) > 1e-7) {
                    std::vector<double> alpha = ftran(cols_[j]);
                    const double theta = xb_[i] / alpha[i];
                    for (int k = 0; k < m_; ++k)
                        if (k != i)
                            xb_[k] -= theta * alpha[k];
                    xb_[i] = theta;
                    pivot(i, j, alpha);
                    break;
                }
            }
        }
        refactor();
    }
};

struct Shifted {
    std::vector<double> lower; // finite lower bound, or 0 for free columns
    std::vector<char> free_col;
};

Shifted shift_of(const LPInstance& inst)
{
    Shifted s;
    s.lower.assign(inst.num_cols, 0.0);
    s.free_col.assign(inst.num_cols, 0);
    for (int j = 0; j < inst.num_cols; ++j) {
        double l = j < static_cast<int>(inst.col_lower.size()) ? inst.col_lower[j] : 0.0;
        if (std::isinf(l) && l < 0)
            s.free_col[j] = 1;
        else
            s.lower[j] = l;
    }
    return s;
}

double shifted_rhs(const SparseRow& r, const Shifted& s)
{
    double b = r.rhs;
    for (std::size_t k = 0; k < r.idx.size(); ++k)
        b -= r.val[k] * s.lower[r.idx[k]];
    return b;
}

LPSolution finish(const LPInstance& inst, const std::vector<double>& c, std::vector<double> x,
                  std::vector<double> dual)
{
    LPSolution sol;
    sol.status = LPStatus::optimal;
    double obj = inst.objective_constant;
    for (int j = 0; j < inst.num_cols; ++j)
        obj += c[j] * x[j];
    sol.objective_value = obj;
    sol.primal = std::move(x);
    sol.dual = std::move(dual);
    return sol;
}

LPSolution solve_primal_route(const LPInstance& inst, const std::vector<double>& c, const SolverOptions& opts,
                              std::string* log)
{
    const Shifted sh = shift_of(inst);
    const int m = inst.num_rows();
    StdForm f;
    f.m = m;
    std::vector<int> pos_col(inst.num_cols), neg_col(inst.num_cols, -1);
    std::vector<double> flip(m, 1.0), b(m);
    for (int i = 0; i < m; ++i) {
        b[i] = shifted_rhs(inst.rows[i], sh);
        if (b[i] < 0)
            flip[i] = -1.0;
        f.b.push_back(std::abs(b[i]));
    }
    std::vector<SparseCol> by_col(inst.num_cols);
    for (int i = 0; i < m; ++i)
        for (std::size_t k = 0; k < inst.rows[i].idx.size(); ++k)
            by_col[inst.rows[i].idx[k]].emplace_back(i, flip[i] * inst.rows[i].val[k]);
    for (int j = 0; j < inst.num_cols; ++j) {
        pos_col[j] = static_cast<int>(f.cols.size());
        f.cols.push_back(by_col[j]);
        f.c.push_back(c[j]);
        if (sh.free_col[j]) {
            neg_col[j] = static_cast<int>(f.cols.size());
            SparseCol neg = by_col[j];
            for (auto& e : neg)
                e.second = -e.second;
            f.cols.push_back(std::move(neg));
            f.c.push_back(-c[j]);
        }
    }
    f.unit_col.assign(m, -1);
    for (int i = 0; i < m; ++i) {
        const Sense s = inst.rows[i].sense;
        if (s == Sense::eq)
            continue;
        double coef = (s == Sense::le ? 1.0 : -1.0) * flip[i];
        if (coef > 0)
            f.unit_col[i] = static_cast<int>(f.cols.size());
        f.cols.push_back({{i, coef}});
        f.c.push_back(0.0);
    }

    Simplex spx(f, opts, log);
    StdResult r = spx.run();
    LPSolution sol;
    sol.iterations = r.iterations;
    if (r.status != LPStatus::optimal) {
        sol.status = r.status;
        return sol;
    }
    std::vector<double> x(inst.num_cols);
    for (int j = 0; j < inst.num_cols; ++j) {
        x[j] = sh.lower[j] + r.z[pos_col[j]];
        if (neg_col[j] >= 0)
            x[j] -= r.z[neg_col[j]];
    }
    std::vector<double> dual(m);
    for (int i = 0; i < m; ++i) {
        double y = flip[i] * r.pi[i];
        dual[i] = inst.rows[i].sense == Sense::le ? -y : y;
    }
    LPSolution out = finish(inst, c, std::move(x), std::move(dual));
    out.iterations = r.iterations;
    return out;
}

// Solves the dual  max b'y  s.t.  A'y <= c (= c for free columns)  with the
// rows of A in >= form, and reads the primal point off its multipliers.
LPSolution solve_dual_route(const LPInstance& inst, const std::vector<double>& c, const SolverOptions& opts,
                            std::string* log, bool probe = false)
{
    const Shifted sh = shift_of(inst);
    const int m = inst.num_rows();
    const int n = inst.num_cols;
    StdForm f;
    f.m = n;
    std::vector<double> flip(n, 1.0);
    for (int j = 0; j < n; ++j) {
        double cj = probe ? 0.0 : c[j];
        if (cj < 0)
            flip[j] = -1.0;
        f.b.push_back(std::abs(cj));
    }
    std::vector<int> ycol(m), ycol_neg(m, -1);
    for (int i = 0; i < m; ++i) {
        const auto& row = inst.rows[i];
        const double sgn = row.sense == Sense::le ? -1.0 : 1.0;
        const double b = sgn * shifted_rhs(row, sh);
        SparseCol col;
        for (std::size_t k = 0; k < row.idx.size(); ++k)
            col.emplace_back(row.idx[k], flip[row.idx[k]] * sgn * row.val[k]);
        ycol[i] = static_cast<int>(f.cols.size());
        f.cols.push_back(col);
        f.c.push_back(-b);
        if (row.sense == Sense::eq) {
            for (auto& e : col)
                e.second = -e.second;
            ycol_neg[i] = static_cast<int>(f.cols.size());
            f.cols.push_back(std::move(col));
            f.c.push_back(b);
        }
    }
    f.unit_col.assign(n, -1);
    for (int j = 0; j < n; ++j) {
        if (sh.free_col[j])
            continue;
        if (flip[j] > 0)
            f.unit_col[j] = static_cast<int>(f.cols.size());
        f.cols.push_back({{j, flip[j]}});
        f.c.push_back(0.0);
    }

    Simplex spx(f, opts, log);
    StdResult r = spx.run();
    LPSolution sol;
    sol.iterations = r.iterations;
    if (probe) {
        sol.status = r.status == LPStatus::unbounded ? LPStatus::infeasible : LPStatus::optimal;
        return sol;
    }
    if (r.status == LPStatus::unbounded) {
        sol.status = LPStatus::infeasible;
        return sol;
    }
    if (r.status == LPStatus::infeasible) {
        LPSolution p = solve_dual_route(inst, c, opts, log, true);
        sol.status = p.status == LPStatus::infeasible ? LPStatus::infeasible : LPStatus::unbounded;
        sol.iterations += p.iterations;
        return sol;
    }
    std::vector<double> x(n);
    for (int j = 0; j < n; ++j)
        x[j] = sh.lower[j] - flip[j] * r.pi[j];
    std::vector<double> dual(m);
    for (int i = 0; i < m; ++i) {
        dual[i] = r.z[ycol[i]];
        if (ycol_neg[i] >= 0)
            dual[i] -= r.z[ycol_neg[i]];
    }
    LPSolution out = finish(inst, c, std::move(x), std::move(dual));
    out.iterations = r.iterations;
    return out;
}

} // namespace

double max_violation(const LPInstance& inst, const std::vector<double>& x)
{
    double worst = 0.0;
    for (const auto& r : inst.rows) {
        double a = row_activity(r, x);
        double v = 0.0;
        if (r.sense == Sense::ge)
            v = r.rhs - a;
        else if (r.sense == Sense::le)
            v = a - r.rhs;
        else
            v = std::abs(a - r.rhs);
        worst = std::max(worst, v);
    }
    for (int j = 0; j < inst.num_cols; ++j)
        if (!std::isinf(inst.col_lower[j]))
            worst = std::max(worst, inst.col_lower[j] - x[j]);
    return worst;
}

LPSolution solve_lp(const LPInstance& inst, ObjSense sense, const SolverOptions& opts)
{
    if (!opts.external_command.empty())
        return solve_external(inst, sense, opts);
    std::vector<double> c = inst.objective;
    c.resize(inst.num_cols, 0.0);
    if (sense == ObjSense::maximize)
        for (auto& v : c)
            v = -v;
    std::string log;
    std::string* logp = opts.display ? &log : nullptr;
    LPSolution sol = inst.num_rows() > inst.num_cols ? solve_dual_route(inst, c, opts, logp)
                                                     : solve_primal_route(inst, c, opts, logp);
    if (sense == ObjSense::maximize && sol.status == LPStatus::optimal)
        sol.objective_value = -sol.objective_value;
    if (opts.display) {
        log += std::string("solver status: ") + status_name(sol.status) + "\n";
        sol.iteration_log = std::move(log);
    }
    return sol;
}

namespace {

// Continued-fraction approximation p/q of x with q <= max_den.
bool rational_approx(double x, long long max_den, long long& p, long long& q)
{
    long long h0 = 0, h1 = 1, k0 = 1, k1 = 0;
    double v = x;
    for (int it = 0; it < 64; ++it) {
        double a = std::floor(v);
        if (std::abs(a) > 1e15)
            return false;
        long long ai = static_cast<long long>(a);
        long long h2 = ai * h1 + h0, k2 = ai * k1 + k0;
        if (k2 > max_den)
            return false;
        h0 = h1, h1 = h2, k0 = k1, k1 = k2;
        if (std::abs(x - static_cast<double>(h1) / k1) < 1e-9) {
            p = h1;
            q = k1;
            return true;
        }
        double frac = v - a;
        if (frac < 1e-15)
            return false;
        v = 1.0 / frac;
    }
    return false;
}

bool all_integral_objective(const LPInstance& inst)
{
    return std::all_of(inst.objective.begin(), inst.objective.end(),
                       [](double c) { return c == std::round(c); });
}

double objective_at(const LPInstance& inst, const std::vector<double>& x)
{
    double s = inst.objective_constant;
    for (int j = 0; j < inst.num_cols; ++j)
        s += inst.objective[j] * x[j];
    return s;
}

} // namespace

LPSolution solve_integer_weights(const LPInstance& inst, const SolverOptions& opts)
{
    LPSolution root = solve_lp(inst, ObjSense::minimize, opts);
    if (root.status != LPStatus::optimal)
        return root;

    // (a) rational reconstruction and scaling by the common denominator.
    {
        long long lcd = 1;
        bool ok = true;
        for (double v : root.primal) {
            long long p = 0, q = 1;
            if (!rational_approx(v, 1000000, p, q)) {
                ok = false;
                break;
            }
            lcd = std::lcm(lcd, q);
            if (lcd > 1000000000LL) {
                ok = false;
                break;
            }
        }
        if (ok) {
            std::vector<double> w(inst.num_cols);
            for (int j = 0; j < inst.num_cols; ++j)
                w[j] = std::round(root.primal[j] * static_cast<double>(lcd));
            double obj = objective_at(inst, w);
            if (max_violation(inst, w) <= 1e-9 && obj <= root.objective_value + 1e-9) {
                LPSolution out = root;
                out.primal = std::move(w);
                out.objective_value = obj;
                return out;
            }
        }
    }

    // (b) depth-first branch and bound on the most fractional column.
    struct Node {
        std::vector<SparseRow> bounds;
    };
    const bool integral_obj = all_integral_objective(inst);
    LPSolution best;
    best.status = LPStatus::infeasible;
    double best_obj = INFINITY;
    std::vector<Node> stack;
    stack.push_back({});
    int nodes = 0;
    bool first = true;
    while (!stack.empty()) {
        if (++nodes > opts.node_limit) {
            if (best.status == LPStatus::optimal)
                break;
            throw solver_error("branch and bound: node limit reached without an integer solution");
        }
        Node node = std::move(stack.back());
        stack.pop_back();
        LPSolution sol;
        if (first) {
            sol = root;
            first = false;
        } else {
            LPInstance sub = inst;
            for (const auto& r : node.bounds)
                sub.rows.push_back(r);
            sol = solve_lp(sub, ObjSense::minimize, opts);
        }
        if (sol.status != LPStatus::optimal)
            continue;
        double bound = integral_obj ? std::ceil(sol.objective_value - 1e-7) : sol.objective_value;
        if (bound >= best_obj - (integral_obj ? 0.5 : 1e-9))
            continue;
        int branch = -1;
        double frac_best = 1e-7;
        for (int j = 0; j < inst.num_cols; ++j) {
            double f = std::abs(sol.primal[j] - std::round(sol.primal[j]));
            if (f > frac_best) {
                frac_best = f;
                branch = j;
            }
        }
        if (branch < 0) {
            std::vector<double> w(inst.num_cols);
            for (int j = 0; j < inst.num_cols; ++j)
                w[j] = std::round(sol.primal[j]);
            if (max_violation(inst, w) > 1e-7)
                continue;
            double obj = objective_at(inst, w);
            if (obj < best_obj) {
                best_obj = obj;
                best = sol;
                best.primal = std::move(w);
                best.objective_value = obj;
            }
            continue;
        }
        const double v = sol.primal[branch];
        SparseRow down{{branch}, {1.0}, Sense::le, std::floor(v), RowKind::extra, {}};
        SparseRow up{{branch}, {1.0}, Sense::ge, std::ceil(v), RowKind::extra, {}};
        Node a{node.bounds}, b{node.bounds};
        a.bounds.push_back(down);
        b.bounds.push_back(up);
        // Explore the side nearer to the LP value first.
        if (v - std::floor(v) < 0.5) {
            stack.push_back(std::move(b));
            stack.push_back(std::move(a));
        } else {
            stack.push_back(std::move(a));
            stack.push_back(std::move(b));
        }
    }
    if (best.status == LPStatus::optimal)
        best.iterations = root.iterations;
    return best;
}

LPSolution solve_external(const LPInstance& inst, ObjSense sense, const SolverOptions& opts)
{
    namespace fs = std::filesystem;
    static int counter = 0;
    const fs::path dir = fs::temp_directory_path();
    const std::string stem = "entrolp_" + std::to_string(::getpid()) + "_" + std::to_string(counter++);
    const fs::path lp = dir / (stem + ".lp");
    const fs::path solp = dir / (stem + ".sol");

    LPInstance copy = inst;
    if (sense == ObjSense::maximize)
        for (auto& v : copy.objective)
            v = -v;
    {
        std::ofstream out(lp);
        if (!out)
            throw solver_error("cannot write " + lp.string());
        out << write_lp_format(copy);
    }
    std::string cmd = opts.external_command;
    auto replace = [&](const std::string& key, const std::string& value) {
        for (std::size_t p = cmd.find(key); p != std::string::npos; p = cmd.find(key, p + value.size()))
            cmd.replace(p, key.size(), value);
    };
    replace("{lp}", lp.string());
    replace("{sol}", solp.string());
    const int rc = std::system(cmd.c_str());
    if (rc != 0) {
        fs::remove(lp);
        throw solver_error("external solver command failed (exit status " + std::to_string(rc) + "): " + cmd);
    }
    std::ifstream in(solp);
    if (!in) {
        fs::remove(lp);
        throw solver_error("external solver wrote no solution file " + solp.string());
    }
    LPSolution sol;
    sol.status = LPStatus::optimal;
    sol.primal.assign(inst.num_cols, 0.0);
    sol.dual.assign(inst.num_rows(), 0.0);
    for (std::string line; std::getline(in, line);) {
        std::string lower = line;
        std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char ch) { return std::tolower(ch); });
        if (lower.find("infeasible") != std::string::npos) {
            sol.status = LPStatus::infeasible;
            continue;
        }
        if (lower.find("unbounded") != std::string::npos) {
            sol.status = LPStatus::unbounded;
            continue;
        }
        std::istringstream ls(line);
        std::string name;
        double value = 0.0;
        if (!(ls >> name >> value) || name.size() < 2)
            continue;
        char* end = nullptr;
        long k = std::strtol(name.c_str() + 1, &end, 10);
        if (*end != '\0')
            continue;
        if (name[0] == 'x' && k >= 0 && k < inst.num_cols)
            sol.primal[k] = value;
        else if (name[0] == 'r' && k >= 0 && k < inst.num_rows())
            sol.dual[k] = value;
    }
    fs::remove(lp);
    fs::remove(solp);
    if (sol.status != LPStatus::optimal) {
        sol.primal.clear();
        sol.dual.clear();
        return sol;
    }
    sol.objective_value = objective_at(inst, sol.primal);
    return sol;
}

} // namespace entrolp
