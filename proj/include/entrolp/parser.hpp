#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "entrolp/problem.hpp"

namespace entrolp {

struct PdDocument {
    ProblemDescription pd;
    // Command lines that followed the PD JSON, in file order.
    std::vector<std::string> trailing_commands;
    std::vector<std::string> warnings;
};

// A command-line modifier JSON. Keys keep their order and their '+' prefix.
struct Modifier {
    nlohmann::ordered_json entries = nlohmann::ordered_json::object();
};

// One term of an expression before expansion.
struct Term {
    enum class Kind { entropy, mutual, al };
    Kind kind = Kind::entropy;
    double coeff = 1.0;
    VarSet a = 0;     // H(a|given) or I(a;b|given)
    VarSet b = 0;
    VarSet given = 0;
    int al_id = -1;
    std::string text; // source spelling without the coefficient
};

using Names = std::vector<std::string>;

PdDocument parse_file(const std::string& text);

std::vector<Term> parse_terms(const std::string& src, const Names& rv_names, const Names& al_names);
LinearExpr expand_terms(const std::vector<Term>& terms);
LinearExpr parse_expression(const std::string& src, const Names& rv_names, const Names& al_names);
ConstantBound parse_inequality(const std::string& src, const Names& rv_names, const Names& al_names);

// Strict JSON: duplicate keys and trailing commas are rejected.
nlohmann::ordered_json parse_json_strict(const std::string& text);

ProblemDescription pd_from_json(const nlohmann::ordered_json& j, std::vector<std::string>* warnings = nullptr);
nlohmann::ordered_json pd_to_json(const ProblemDescription& pd);

Modifier parse_modifier(const std::string& json_text);
ProblemDescription apply_modifier(const ProblemDescription& pd, const Modifier& mod,
                                  std::vector<std::string>* warnings = nullptr);

// "PD\n" followed by the pretty-printed JSON.
std::string serialize(const ProblemDescription& pd);

// Renders an expression from its coefficients, e.g. "2H(X,Y) - H(Z) + A".
std::string format_expr(const LinearExpr& e, const Names& rv_names, const Names& al_names);

// Re-spaces a source expression: "A+B" -> "A + B", "-2I(X;Y)" unchanged.
std::string display_expression(const std::string& src);

// Shortest decimal spelling without an exponent.
std::string format_number(double v);

bool is_identifier(const std::string& s);

std::string usage_text();

} // namespace entrolp
