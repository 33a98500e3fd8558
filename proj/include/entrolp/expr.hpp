#pragma once

#include <map>

#include "entrolp/varset.hpp"

namespace entrolp {

// Sparse linear combination of joint entropies H(X_S), additional LP
// variables and a constant. Zero coefficients and H(empty) are never stored.
struct LinearExpr {
    std::map<VarSet, double> entropy_terms;
    std::map<int, double> al_terms;
    double constant = 0.0;

    void add_entropy(VarSet s, double coeff);
    void add_al(int id, double coeff);

    LinearExpr& operator+=(const LinearExpr& other);
    LinearExpr& operator-=(const LinearExpr& other);
    LinearExpr& operator*=(double factor);

    bool empty() const { return entropy_terms.empty() && al_terms.empty() && constant == 0.0; }
    bool operator==(const LinearExpr&) const = default;
};

LinearExpr operator+(LinearExpr a, const LinearExpr& b);
LinearExpr operator-(LinearExpr a, const LinearExpr& b);
LinearExpr operator*(double factor, LinearExpr e);

// Coefficients whose magnitude falls below this are treated as cancelled.
inline constexpr double coeff_zero_tol = 1e-12;

LinearExpr entropy_term(VarSet s, double coeff = 1.0);

// H(left|given) = H(left u given) - H(given)
LinearExpr expand_conditional_entropy(VarSet left, VarSet given);

// I(a;b|given) = H(a u g) + H(b u g) - H(a u b u g) - H(g)
LinearExpr expand_mutual_information(VarSet a, VarSet b, VarSet given);

double expr_eval(const LinearExpr& expr, const std::map<VarSet, double>& entropy_values,
                 const std::map<int, double>& al_values);

// Equality up to a per-coefficient tolerance.
bool approx_equal(const LinearExpr& a, const LinearExpr& b, double tol = 1e-9);

} // namespace entrolp
