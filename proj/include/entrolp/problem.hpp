#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "entrolp/expr.hpp"
#include "entrolp/varset.hpp"

namespace entrolp {

enum class Sense { le, ge, eq };

const char* sense_symbol(Sense s);

// H(dependent | given) = 0
struct Dependency {
    VarSet dependent = 0;
    VarSet given = 0;
    bool operator==(const Dependency&) const = default;
};

struct Independence {
    std::vector<int> independent;
    VarSet given = 0;
    bool operator==(const Independence&) const = default;
};

// perms[r][i] is the RV index that the i-th RV is sent to by row r.
struct SymmetryGroup {
    std::vector<std::vector<int>> perms;
    bool operator==(const SymmetryGroup&) const = default;
};

struct ConstantBound {
    LinearExpr lhs;
    Sense sense = Sense::ge;
    double rhs = 0.0;
    std::string source;
};

struct NamedExpr {
    std::string source;
    LinearExpr expr;
};

enum class Option { SER, PDC, CS, LP_DISP, HELP };

const char* option_name(Option o);

// Target of a SER command: absent path means standard output.
struct SerTarget {
    bool append = false;
    std::string path;
};

struct ProblemDescription {
    std::vector<std::string> rv_names;
    std::vector<std::string> al_names;
    LinearExpr objective;
    std::string objective_source;
    std::vector<Dependency> deps;
    std::vector<Independence> indeps;
    SymmetryGroup sym;
    std::vector<ConstantBound> bc;
    std::vector<ConstantBound> bp;
    std::vector<NamedExpr> qu;
    std::vector<NamedExpr> se;
    std::set<Option> options;
    std::optional<SerTarget> ser_target;

    int num_rvs() const { return static_cast<int>(rv_names.size()); }
    int num_als() const { return static_cast<int>(al_names.size()); }
    int rv_index(const std::string& name) const;
    int al_index(const std::string& name) const;
    bool has(Option o) const { return options.count(o) != 0; }
};

// Semantic comparison: expressions, relations and options, ignoring source
// spelling and the one-shot SER/HELP commands.
bool equivalent(const ProblemDescription& a, const ProblemDescription& b);

// Sum_i H(V_i u G) - H(V u G) - (k-1) H(G); the relation is this expr = 0.
LinearExpr independence_to_expr(const Independence& ind);

std::string set_name(VarSet s, const std::vector<std::string>& rv_names);

} // namespace entrolp
