#include "entrolp/problem.hpp"

#include <algorithm>

#include "entrolp/error.hpp"

namespace entrolp {

const char* sense_symbol(Sense s)
{
    switch (s) {
    case Sense::le: return "<=";
    case Sense::ge: return ">=";
    case Sense::eq: return "=";
    }
    return "?";
}

const char* option_name(Option o)
{
    switch (o) {
    case Option::SER: return "SER";
    case Option::PDC: return "PDC";
    case Option::CS: return "CS";
    case Option::LP_DISP: return "LP_DISP";
    case Option::HELP: return "?";
    }
    return "?";
}

int ProblemDescription::rv_index(const std::string& name) const
{
    auto it = std::find(rv_names.begin(), rv_names.end(), name);
    return it == rv_names.end() ? -1 : static_cast<int>(it - rv_names.begin());
}

int ProblemDescription::al_index(const std::string& name) const
{
    auto it = std::find(al_names.begin(), al_names.end(), name);
    return it == al_names.end() ? -1 : static_cast<int>(it - al_names.begin());
}

namespace {

bool same_bounds(const std::vector<ConstantBound>& a, const std::vector<ConstantBound>& b)
{
    if (a.size() != b.size())
        return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].sense != b[i].sense || a[i].rhs != b[i].rhs || !approx_equal(a[i].lhs, b[i].lhs))
            return false;
    return true;
}

bool same_named(const std::vector<NamedExpr>& a, const std::vector<NamedExpr>& b)
{
    if (a.size() != b.size())
        return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!approx_equal(a[i].expr, b[i].expr))
            return false;
    return true;
}

std::set<Option> persistent(const std::set<Option>& o)
{
    std::set<Option> r = o;
    r.erase(Option::SER);
    r.erase(Option::HELP);
    return r;
}

} // namespace

bool equivalent(const ProblemDescription& a, const ProblemDescription& b)
{
    return a.rv_names == b.rv_names && a.al_names == b.al_names &&
           approx_equal(a.objective, b.objective) && a.deps == b.deps && a.indeps == b.indeps &&
           a.sym == b.sym && same_bounds(a.bc, b.bc) && same_bounds(a.bp, b.bp) &&
           same_named(a.qu, b.qu) && same_named(a.se, b.se) &&
           persistent(a.options) == persistent(b.options);
}

LinearExpr independence_to_expr(const Independence& ind)
{
    if (ind.independent.size() < 2)
        throw parse_error("malformed independence: at least two random variables are required");
    LinearExpr e;
    VarSet all = ind.given;
    for (int v : ind.independent) {
        e.add_entropy(singleton(v) | ind.given, 1.0);
        all |= singleton(v);
    }
    e.add_entropy(all, -1.0);
    e.add_entropy(ind.given, -static_cast<double>(ind.independent.size() - 1));
    return e;
}

std::string set_name(VarSet s, const std::vector<std::string>& rv_names)
{
    std::string out;
    for (std::size_t i = 0; i < rv_names.size(); ++i) {
        if (!contains(s, static_cast<int>(i)))
            continue;
        if (!out.empty())
            out += ',';
        out += rv_names[i];
    }
    return out;
}

} // namespace entrolp
