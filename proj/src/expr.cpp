#include "entrolp/expr.hpp"

#include <cmath>
#include <string>

#include "entrolp/error.hpp"

namespace entrolp {

namespace {

template <class Map, class Key>
void accumulate(Map& m, const Key& key, double coeff)
{
    if (coeff == 0.0)
        return;
    auto [it, inserted] = m.try_emplace(key, coeff);
    if (!inserted) {
        it->second += coeff;
        if (std::abs(it->second) < coeff_zero_tol)
            m.erase(it);
    }
}

} // namespace

void LinearExpr::add_entropy(VarSet s, double coeff)
{
    if (s == 0)
        return;
    accumulate(entropy_terms, s, coeff);
}

void LinearExpr::add_al(int id, double coeff) { accumulate(al_terms, id, coeff); }

LinearExpr& LinearExpr::operator+=(const LinearExpr& other)
{
    for (auto [s, c] : other.entropy_terms)
        add_entropy(s, c);
    for (auto [id, c] : other.al_terms)
        add_al(id, c);
    constant += other.constant;
    return *this;
}

LinearExpr& LinearExpr::operator-=(const LinearExpr& other)
{
    for (auto [s, c] : other.entropy_terms)
        add_entropy(s, -c);
    for (auto [id, c] : other.al_terms)
        add_al(id, -c);
    constant -= other.constant;
    return *this;
}

LinearExpr& LinearExpr::operator*=(double factor)
{
    if (factor == 0.0) {
        *this = LinearExpr{};
        return *this;
    }
    for (auto& kv : entropy_terms)
        kv.second *= factor;
    for (auto& kv : al_terms)
        kv.second *= factor;
    constant *= factor;
    return *this;
}

LinearExpr operator+(LinearExpr a, const LinearExpr& b) { return a += b; }
LinearExpr operator-(LinearExpr a, const LinearExpr& b) { return a -= b; }
LinearExpr operator*(double factor, LinearExpr e) { return e *= factor; }

LinearExpr entropy_term(VarSet s, double coeff)
{
    LinearExpr e;
    e.add_entropy(s, coeff);
    return e;
}

LinearExpr expand_conditional_entropy(VarSet left, VarSet given)
{
    if (left == 0)
        throw parse_error("malformed term: conditional entropy with an empty left-hand list");
    LinearExpr e;
    e.add_entropy(left | given, 1.0);
    e.add_entropy(given, -1.0);
    return e;
}

LinearExpr expand_mutual_information(VarSet a, VarSet b, VarSet given)
{
    if (a == 0 || b == 0)
        throw parse_error("malformed term: mutual information with an empty argument list");
    LinearExpr e;
    e.add_entropy(a | given, 1.0);
    e.add_entropy(b | given, 1.0);
    e.add_entropy(a | b | given, -1.0);
    e.add_entropy(given, -1.0);
    return e;
}

double expr_eval(const LinearExpr& expr, const std::map<VarSet, double>& entropy_values,
                 const std::map<int, double>& al_values)
{
    double v = expr.constant;
    for (auto [s, c] : expr.entropy_terms) {
        auto it = entropy_values.find(s);
        if (it == entropy_values.end())
            throw eval_error("no value for entropy term with mask " + std::to_string(s));
        v += c * it->second;
    }
    for (auto [id, c] : expr.al_terms) {
        auto it = al_values.find(id);
        if (it == al_values.end())
            throw eval_error("no value for additional LP variable #" + std::to_string(id));
        v += c * it->second;
    }
    return v;
}

bool approx_equal(const LinearExpr& a, const LinearExpr& b, double tol)
{
    LinearExpr d = a - b;
    for (auto [s, c] : d.entropy_terms)
        if (std::abs(c) > tol)
            return false;
    for (auto [id, c] : d.al_terms)
        if (std::abs(c) > tol)
            return false;
    return std::abs(d.constant) <= tol;
}

} // namespace entrolp
