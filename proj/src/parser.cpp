#include "entrolp/parser.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include "entrolp/error.hpp"

namespace entrolp {

using ojson = nlohmann::ordered_json;

namespace {

const std::vector<std::string> pd_keys = {"RV", "AL", "O",  "D",  "I",   "S",
                                          "BC", "BP", "QU", "SE", "CMD", "OPT"};
const std::vector<std::string> replace_keys = {"RV", "AL", "O", "D", "I", "S", "BC", "BP"};
const std::vector<std::string> append_keys = {"+RV", "+AL", "+D", "+I", "+S",
                                              "+BC", "+BP", "+CMD", "+OPT"};

bool one_of(const std::string& s, const std::vector<std::string>& v)
{
    return std::find(v.begin(), v.end(), s) != v.end();
}

std::string trim(const std::string& s)
{
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b])))
        ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1])))
        --e;
    return s.substr(b, e - b);
}

std::string strip_spaces(const std::string& s)
{
    std::string out;
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c)))
            out += c;
    return out;
}

int find_name(const Names& names, const std::string& n)
{
    auto it = std::find(names.begin(), names.end(), n);
    return it == names.end() ? -1 : static_cast<int>(it - names.begin());
}

// Nesting depth change of a JSON fragment, ignoring brackets inside strings.
int bracket_balance(const std::string& s, bool& in_string)
{
    int depth = 0;
    bool escape = false;
    for (char c : s) {
        if (in_string) {
            if (escape)
                escape = false;
            else if (c == '\\')
                escape = true;
            else if (c == '"')
                in_string = false;
            continue;
        }
        if (c == '"')
            in_string = true;
        else if (c == '{' || c == '[')
            ++depth;
        else if (c == '}' || c == ']')
            --depth;
    }
    return depth;
}

// ---------------------------------------------------------------- expressions

struct ExprScanner {
    const std::string& s;
    const Names& rv;
    const Names& al;
    const std::string& src;
    std::size_t pos = 0;

    [[noreturn]] void fail(const std::string& what) const
    {
        throw parse_error("in expression \"" + src + "\": " + what);
    }

    bool at_end() const { return pos >= s.size(); }

    bool parse_number(double& out)
    {
        std::size_t start = pos;
        bool digits = false;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
            ++pos;
            digits = true;
        }
        if (pos < s.size() && s[pos] == '.') {
            ++pos;
            while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
                ++pos;
                digits = true;
            }
        }
        if (pos == start)
            return false;
        if (!digits)
            fail("malformed number");
        out = std::stod(s.substr(start, pos - start));
        return true;
    }

    VarSet parse_rv_list(const std::string& list)
    {
        VarSet out = 0;
        std::size_t b = 0;
        while (true) {
            std::size_t e = list.find(',', b);
            std::string name = list.substr(b, e == std::string::npos ? std::string::npos : e - b);
            if (name.empty())
                fail("empty random-variable name in a list");
            int idx = find_name(rv, name);
            if (idx < 0) {
                if (find_name(al, name) >= 0)
                    fail("'" + name + "' is an additional LP variable, not a random variable");
                fail("unknown random variable '" + name + "'");
            }
            out |= singleton(idx);
            if (e == std::string::npos)
                break;
            b = e + 1;
        }
        return out;
    }

    std::string take_parenthesized()
    {
        // pos is just after '('
        std::size_t close = s.find(')', pos);
        if (close == std::string::npos)
            fail("missing ')'");
        std::string inner = s.substr(pos, close - pos);
        if (inner.find('(') != std::string::npos)
            fail("nested parentheses are not allowed");
        pos = close + 1;
        return inner;
    }

    Term parse_atom()
    {
        Term t;
        std::size_t start = pos;
        if (s.compare(pos, 2, "H(") == 0) {
            pos += 2;
            std::string inner = take_parenthesized();
            if (inner.find(';') != std::string::npos)
                fail("';' is not allowed inside H(...)");
            std::size_t bar = inner.find('|');
            if (bar != std::string::npos && inner.find('|', bar + 1) != std::string::npos)
                fail("more than one '|' inside H(...)");
            t.kind = Term::Kind::entropy;
            t.a = parse_rv_list(inner.substr(0, bar));
            if (bar != std::string::npos)
                t.given = parse_rv_list(inner.substr(bar + 1));
        } else if (s.compare(pos, 2, "I(") == 0) {
            pos += 2;
            std::string inner = take_parenthesized();
            std::size_t bar = inner.find('|');
            if (bar != std::string::npos && inner.find('|', bar + 1) != std::string::npos)
                fail("more than one '|' inside I(...)");
            std::string main = inner.substr(0, bar);
            std::size_t semi = main.find(';');
            if (semi == std::string::npos || main.find(';', semi + 1) != std::string::npos)
                fail("I(...) needs exactly two ';'-separated lists");
            t.kind = Term::Kind::mutual;
            t.a = parse_rv_list(main.substr(0, semi));
            t.b = parse_rv_list(main.substr(semi + 1));
            if (bar != std::string::npos)
                t.given = parse_rv_list(inner.substr(bar + 1));
        } else if (pos < s.size() && std::isalpha(static_cast<unsigned char>(s[pos]))) {
            while (pos < s.size() && std::isalnum(static_cast<unsigned char>(s[pos])))
                ++pos;
            std::string name = s.substr(start, pos - start);
            int idx = find_name(al, name);
            if (idx < 0) {
                if (find_name(rv, name) >= 0)
                    fail("'" + name + "' is a random variable; use H(" + name + ")");
                fail("unknown additional LP variable '" + name + "'");
            }
            t.kind = Term::Kind::al;
            t.al_id = idx;
        } else if (pos < s.size()) {
            fail(std::string("unexpected character '") + s[pos] + "'");
        } else {
            fail("a constant term is not allowed; expected H(...), I(...) or a variable");
        }
        t.text = s.substr(start, pos - start);
        return t;
    }
};

LinearExpr expand_term(const Term& t)
{
    LinearExpr e;
    switch (t.kind) {
    case Term::Kind::entropy: e = expand_conditional_entropy(t.a, t.given); break;
    case Term::Kind::mutual: e = expand_mutual_information(t.a, t.b, t.given); break;
    case Term::Kind::al: e.add_al(t.al_id, 1.0); break;
    }
    return t.coeff * e;
}

bool is_plain_number(const std::string& s)
{
    std::size_t i = 0;
    if (i < s.size() && (s[i] == '+' || s[i] == '-'))
        ++i;
    bool digits = false, dot = false;
    for (; i < s.size(); ++i) {
        if (std::isdigit(static_cast<unsigned char>(s[i])))
            digits = true;
        else if (s[i] == '.' && !dot)
            dot = true;
        else
            return false;
    }
    return digits;
}

// ---------------------------------------------------------------- JSON -> PD

[[noreturn]] void key_fail(const std::string& key, const std::string& what)
{
    throw parse_error("key \"" + key + "\": " + what);
}

const ojson& require_array(const ojson& v, const std::string& key)
{
    if (!v.is_array())
        key_fail(key, "value must be a JSON array");
    return v;
}

std::vector<std::string> string_array(const ojson& v, const std::string& key)
{
    std::vector<std::string> out;
    for (const auto& e : require_array(v, key)) {
        if (!e.is_string())
            key_fail(key, "array elements must be strings");
        out.push_back(e.get<std::string>());
    }
    return out;
}

void check_identifier(const std::string& name, const std::string& key)
{
    if (name.find('|') != std::string::npos)
        key_fail(key, "character '|' is not allowed in \"" + name + "\"");
    if (!is_identifier(name))
        key_fail(key, "\"" + name + "\" is not an alphanumeric name starting with a letter");
}

VarSet rv_array(const ojson& v, const ProblemDescription& pd, const std::string& key,
                std::vector<int>* order = nullptr)
{
    VarSet s = 0;
    for (const auto& name : string_array(v, key)) {
        check_identifier(name, key);
        int idx = pd.rv_index(name);
        if (idx < 0)
            key_fail(key, "unknown random variable \"" + name + "\"");
        if (order)
            order->push_back(idx);
        s |= singleton(idx);
    }
    return s;
}

void check_object_keys(const ojson& obj, const std::string& key, const std::string& k1,
                       const std::string& k2)
{
    if (!obj.is_object())
        key_fail(key, "entries must be JSON objects");
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (it.key() != k1 && it.key() != k2)
            key_fail(key, "unexpected field \"" + it.key() + "\"");
    if (!obj.contains(k1) || !obj.contains(k2))
        key_fail(key, "each entry needs \"" + k1 + "\" and \"" + k2 + "\"");
}

std::string objective_string(const ojson& v)
{
    if (v.is_string())
        return v.get<std::string>();
    if (v.is_array() && v.size() == 1 && v[0].is_string())
        return v[0].get<std::string>();
    if (v.is_array() && v.empty())
        return "";
    key_fail("O", "value must be a string");
}

void add_option(ProblemDescription& pd, const std::string& raw, const std::string& key)
{
    std::istringstream in(raw);
    std::vector<std::string> tok;
    for (std::string t; in >> t;)
        tok.push_back(t);
    if (tok.empty())
        key_fail(key, "empty command");
    const std::string& c = tok[0];
    if (c == "SER") {
        if (tok.size() == 1) {
            pd.ser_target = SerTarget{};
        } else if (tok.size() == 3 && (tok[1] == "-a" || tok[1] == "-t")) {
            pd.ser_target = SerTarget{tok[1] == "-a", tok[2]};
        } else {
            key_fail(key, "SER takes no arguments or \"-a file\" / \"-t file\"");
        }
        pd.options.insert(Option::SER);
        return;
    }
    if (tok.size() != 1)
        key_fail(key, "command \"" + c + "\" takes no arguments");
    if (c == "PDC")
        pd.options.insert(Option::PDC);
    else if (c == "CS")
        pd.options.insert(Option::CS);
    else if (c == "LP_DISP")
        pd.options.insert(Option::LP_DISP);
    else if (c == "?")
        pd.options.insert(Option::HELP);
    else
        key_fail(key, "unknown command \"" + c + "\"");
}

std::vector<ConstantBound> bound_array(const ojson& v, const ProblemDescription& pd,
                                       const std::string& key, std::vector<std::string>* warnings)
{
    std::vector<ConstantBound> out;
    for (const auto& s : string_array(v, key)) {
        out.push_back(parse_inequality(s, pd.rv_names, pd.al_names));
        if (out.back().lhs.empty() && warnings)
            warnings->push_back("Warning: " + key + " row \"" + s + "\" has no terms after expansion.");
    }
    return out;
}

std::vector<NamedExpr> expr_array(const ojson& v, const ProblemDescription& pd, const std::string& key,
                                  std::vector<std::string>* warnings)
{
    std::vector<NamedExpr> out;
    for (const auto& s : string_array(v, key)) {
        out.push_back({s, parse_expression(s, pd.rv_names, pd.al_names)});
        if (out.back().expr.empty() && warnings)
            warnings->push_back("Warning: " + key + " expression \"" + s + "\" cancels to zero.");
    }
    return out;
}

std::vector<std::string> names_of(VarSet s, const ProblemDescription& pd)
{
    std::vector<std::string> out;
    for (int i = 0; i < pd.num_rvs(); ++i)
        if (contains(s, i))
            out.push_back(pd.rv_names[i]);
    return out;
}

std::string bound_source(const ConstantBound& b, const ProblemDescription& pd)
{
    if (!b.source.empty())
        return b.source;
    return format_expr(b.lhs, pd.rv_names, pd.al_names) + " " + sense_symbol(b.sense) + " " +
           format_number(b.rhs);
}

void term_to_stream(std::string& out, double c, const std::string& name, bool first)
{
    if (first) {
        if (c < 0)
            out += "-";
    } else {
        out += c < 0 ? " - " : " + ";
    }
    double a = std::abs(c);
    if (a != 1.0)
        out += format_number(a);
    out += name;
}

} // namespace

// ---------------------------------------------------------------- public API

bool is_identifier(const std::string& s)
{
    if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0])))
        return false;
    return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)); });
}

std::string format_number(double v)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed);
    return std::string(buf, res.ptr);
}

std::vector<Term> parse_terms(const std::string& src, const Names& rv_names, const Names& al_names)
{
    std::string s = strip_spaces(src);
    ExprScanner sc{s, rv_names, al_names, src};
    std::vector<Term> terms;
    bool first = true;
    while (!sc.at_end()) {
        double sign = 1.0;
        if (s[sc.pos] == '+' || s[sc.pos] == '-') {
            sign = s[sc.pos] == '-' ? -1.0 : 1.0;
            ++sc.pos;
        } else if (!first) {
            sc.fail(std::string("expected '+' or '-' before '") + s[sc.pos] + "'");
        }
        first = false;
        double coeff = 1.0;
        sc.parse_number(coeff);
        Term t = sc.parse_atom();
        t.coeff = sign * coeff;
        terms.push_back(std::move(t));
    }
    return terms;
}

LinearExpr expand_terms(const std::vector<Term>& terms)
{
    LinearExpr e;
    for (const auto& t : terms)
        e += expand_term(t);
    return e;
}

LinearExpr parse_expression(const std::string& src, const Names& rv_names, const Names& al_names)
{
    return expand_terms(parse_terms(src, rv_names, al_names));
}

ConstantBound parse_inequality(const std::string& src, const Names& rv_names, const Names& al_names)
{
    std::string s = strip_spaces(src);
    std::size_t rel_pos = std::string::npos, rel_len = 0;
    Sense sense = Sense::ge;
    int count = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        char c = s[i];
        if (c == '<' || c == '>') {
            if (i + 1 >= s.size() || s[i + 1] != '=')
                throw parse_error("in \"" + src + "\": strict relations are not supported; use <= or >=");
            ++count;
            rel_pos = i;
            rel_len = 2;
            sense = c == '<' ? Sense::le : Sense::ge;
            ++i;
        } else if (c == '=') {
            ++count;
            rel_pos = i;
            rel_len = 1;
            sense = Sense::eq;
            if (i + 1 < s.size() && s[i + 1] == '=')
                ++i, rel_len = 2;
        }
    }
    if (count == 0)
        throw parse_error("in \"" + src + "\": missing relation symbol (<=, >= or =)");
    if (count > 1)
        throw parse_error("in \"" + src + "\": more than one relation symbol");
    std::string rhs = s.substr(rel_pos + rel_len);
    if (!is_plain_number(rhs))
        throw parse_error("in \"" + src + "\": the right-hand side must be a number");
    ConstantBound b;
    b.lhs = parse_expression(s.substr(0, rel_pos), rv_names, al_names);
    b.sense = sense;
    b.rhs = std::stod(rhs);
    b.source = src;
    return b;
}

ojson parse_json_strict(const std::string& text)
{
    std::vector<std::set<std::string>> seen;
    std::string duplicate;
    auto cb = [&](int, ojson::parse_event_t ev, ojson& parsed) {
        switch (ev) {
        case ojson::parse_event_t::object_start: seen.emplace_back(); break;
        case ojson::parse_event_t::object_end:
            if (!seen.empty())
                seen.pop_back();
            break;
        case ojson::parse_event_t::key: {
            auto k = parsed.get<std::string>();
            if (!seen.empty() && !seen.back().insert(k).second && duplicate.empty())
                duplicate = k;
            break;
        }
        default: break;
        }
        return true;
    };
    ojson j;
    try {
        j = ojson::parse(text, cb);
    } catch (const ojson::parse_error& e) {
        throw parse_error(std::string("invalid JSON: ") + e.what());
    }
    if (!duplicate.empty())
        throw parse_error("invalid JSON: duplicate key \"" + duplicate + "\"");
    return j;
}

ProblemDescription pd_from_json(const ojson& j, std::vector<std::string>* warnings)
{
    if (!j.is_object())
        throw parse_error("the PD JSON must be an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!one_of(it.key(), pd_keys))
            throw parse_error("unknown key \"" + it.key() + "\" in the PD JSON");

    ProblemDescription pd;
    auto warn = [&](const std::string& w) {
        if (warnings)
            warnings->push_back("Warning: " + w);
    };

    for (const char* key : {"RV", "AL"}) {
        if (!j.contains(key))
            continue;
        auto& target = std::string(key) == "RV" ? pd.rv_names : pd.al_names;
        for (const auto& name : string_array(j.at(key), key)) {
            check_identifier(name, key);
            if (find_name(target, name) >= 0)
                key_fail(key, "duplicate name \"" + name + "\"");
            target.push_back(name);
        }
    }
    if (pd.num_rvs() > max_rvs)
        key_fail("RV", "at most " + std::to_string(max_rvs) + " random variables are supported");
    for (const auto& a : pd.al_names)
        if (pd.rv_index(a) >= 0)
            key_fail("AL", "\"" + a + "\" is already a random variable");

    if (j.contains("O")) {
        pd.objective_source = objective_string(j.at("O"));
        pd.objective = parse_expression(pd.objective_source, pd.rv_names, pd.al_names);
        if (pd.objective.empty() && !trim(pd.objective_source).empty())
            warn("objective \"" + pd.objective_source + "\" cancels to zero.");
    }
    if (j.contains("D")) {
        for (const auto& d : require_array(j.at("D"), "D")) {
            check_object_keys(d, "D", "dependent", "given");
            Dependency dep;
            dep.dependent = rv_array(d.at("dependent"), pd, "D");
            dep.given = rv_array(d.at("given"), pd, "D");
            if (dep.dependent == 0)
                key_fail("D", "\"dependent\" must list at least one random variable");
            if (dep.dependent & dep.given) {
                warn("dependency lists a variable on both sides; the overlap is dropped.");
                dep.dependent &= ~dep.given;
                if (dep.dependent == 0)
                    continue;
            }
            pd.deps.push_back(dep);
        }
    }
    if (j.contains("I")) {
        for (const auto& d : require_array(j.at("I"), "I")) {
            check_object_keys(d, "I", "independent", "given");
            Independence ind;
            rv_array(d.at("independent"), pd, "I", &ind.independent);
            ind.given = rv_array(d.at("given"), pd, "I");
            if (ind.independent.size() < 2)
                key_fail("I", "\"independent\" must list at least two random variables");
            std::set<int> distinct(ind.independent.begin(), ind.independent.end());
            bool overlap = std::any_of(ind.independent.begin(), ind.independent.end(),
                                       [&](int v) { return contains(ind.given, v); });
            if (distinct.size() != ind.independent.size() || overlap ||
                independence_to_expr(ind).empty())
                warn("degenerate independence relation (repeated or conditioned variable).");
            pd.indeps.push_back(std::move(ind));
        }
    }
    if (j.contains("S")) {
        int r = 0;
        for (const auto& row : require_array(j.at("S"), "S")) {
            ++r;
            auto names = string_array(row, "S");
            std::string where = "symmetry row " + std::to_string(r);
            if (static_cast<int>(names.size()) != pd.num_rvs())
                key_fail("S", where + " has " + std::to_string(names.size()) + " entries but there are " +
                                  std::to_string(pd.num_rvs()) + " random variables");
            std::vector<int> perm;
            VarSet seen = 0;
            for (const auto& n : names) {
                int idx = pd.rv_index(n);
                if (idx < 0)
                    key_fail("S", where + " names unknown random variable \"" + n + "\"");
                if (contains(seen, idx))
                    key_fail("S", where + " lists \"" + n + "\" twice");
                seen |= singleton(idx);
                perm.push_back(idx);
            }
            pd.sym.perms.push_back(std::move(perm));
        }
    }
    if (j.contains("BC"))
        pd.bc = bound_array(j.at("BC"), pd, "BC", warnings);
    if (j.contains("BP"))
        pd.bp = bound_array(j.at("BP"), pd, "BP", warnings);
    if (j.contains("QU"))
        pd.qu = expr_array(j.at("QU"), pd, "QU", warnings);
    if (j.contains("SE"))
        pd.se = expr_array(j.at("SE"), pd, "SE", warnings);
    for (const char* key : {"CMD", "OPT"})
        if (j.contains(key))
            for (const auto& c : string_array(j.at(key), key))
                add_option(pd, c, key);
    return pd;
}

ojson pd_to_json(const ProblemDescription& pd)
{
    ojson j = ojson::object();
    j["RV"] = pd.rv_names;
    j["AL"] = pd.al_names;
    j["O"] = pd.objective_source.empty() && !pd.objective.empty()
                 ? format_expr(pd.objective, pd.rv_names, pd.al_names)
                 : pd.objective_source;
    j["D"] = ojson::array();
    for (const auto& d : pd.deps)
        j["D"].push_back({{"dependent", names_of(d.dependent, pd)}, {"given", names_of(d.given, pd)}});
    j["I"] = ojson::array();
    for (const auto& ind : pd.indeps) {
        std::vector<std::string> v;
        for (int i : ind.independent)
            v.push_back(pd.rv_names[i]);
        j["I"].push_back({{"independent", v}, {"given", names_of(ind.given, pd)}});
    }
    j["S"] = ojson::array();
    for (const auto& p : pd.sym.perms) {
        std::vector<std::string> v;
        for (int i : p)
            v.push_back(pd.rv_names[i]);
        j["S"].push_back(v);
    }
    j["BC"] = ojson::array();
    for (const auto& b : pd.bc)
        j["BC"].push_back(bound_source(b, pd));
    j["BP"] = ojson::array();
    for (const auto& b : pd.bp)
        j["BP"].push_back(bound_source(b, pd));
    for (const char* key : {"QU", "SE"}) {
        const auto& list = std::string(key) == "QU" ? pd.qu : pd.se;
        j[key] = ojson::array();
        for (const auto& q : list)
            j[key].push_back(q.source.empty() ? format_expr(q.expr, pd.rv_names, pd.al_names) : q.source);
    }
    j["OPT"] = ojson::array();
    for (Option o : pd.options)
        if (o != Option::SER && o != Option::HELP)
            j["OPT"].push_back(option_name(o));
    return j;
}

std::string serialize(const ProblemDescription& pd) { return "PD\n" + pd_to_json(pd).dump(2) + "\n"; }

Modifier parse_modifier(const std::string& json_text)
{
    ojson j = parse_json_strict(json_text);
    if (!j.is_object())
        throw parse_error("command-line modifier must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& k = it.key();
        if (k == "+O" || k == "CMD" || k == "OPT")
            throw parse_error("command-line modifier key \"" + k + "\" is not allowed");
        if (!one_of(k, replace_keys) && !one_of(k, append_keys))
            throw parse_error("unknown command-line modifier key \"" + k + "\"");
        if (k == "O") {
            objective_string(it.value());
            continue;
        }
        if (!it.value().is_array())
            throw parse_error("command-line modifier key \"" + k + "\": value must be a JSON array");
        if (k == "+CMD" || k == "+OPT") {
            for (const auto& c : it.value()) {
                std::string first = c.is_string() ? trim(c.get<std::string>()) : "";
                first = first.substr(0, first.find(' '));
                if (first != "SER" && first != "PDC" && first != "CS")
                    throw parse_error("command-line modifier key \"" + k +
                                      "\" accepts only SER, PDC and CS");
            }
        }
    }
    return Modifier{j};
}

ProblemDescription apply_modifier(const ProblemDescription& pd, const Modifier& mod,
                                  std::vector<std::string>* warnings)
{
    ojson j = pd_to_json(pd);
    for (auto it = mod.entries.begin(); it != mod.entries.end(); ++it) {
        const std::string& k = it.key();
        if (k[0] != '+') {
            j[k] = k == "O" ? ojson(objective_string(it.value())) : it.value();
            continue;
        }
        std::string base = k.substr(1);
        if (base == "CMD")
            base = "OPT";
        if (!j.contains(base))
            j[base] = ojson::array();
        for (const auto& v : it.value())
            j[base].push_back(v);
    }
    ProblemDescription out = pd_from_json(j, warnings);
    for (Option o : {Option::SER, Option::HELP})
        if (pd.has(o))
            out.options.insert(o);
    if (!out.ser_target)
        out.ser_target = pd.ser_target;
    return out;
}

std::string format_expr(const LinearExpr& e, const Names& rv_names, const Names& al_names)
{
    std::string out;
    bool first = true;
    for (auto [s, c] : e.entropy_terms) {
        term_to_stream(out, c, "H(" + set_name(s, rv_names) + ")", first);
        first = false;
    }
    for (auto [id, c] : e.al_terms) {
        term_to_stream(out, c, al_names.at(id), first);
        first = false;
    }
    if (e.constant != 0.0)
        throw parse_error("format_expr: constant terms cannot be written in the PD grammar");
    return out;
}

std::string display_expression(const std::string& src)
{
    std::string s = strip_spaces(src);
    std::string out;
    int depth = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        char c = s[i];
        if (c == '(')
            ++depth;
        else if (c == ')')
            --depth;
        if ((c == '+' || c == '-') && depth == 0 && i > 0) {
            out += ' ';
            out += c;
            out += ' ';
        } else {
            out += c;
        }
    }
    return out;
}

PdDocument parse_file(const std::string& text)
{
    std::vector<std::string> lines;
    {
        std::istringstream in(text);
        for (std::string l; std::getline(in, l);) {
            if (!l.empty() && l.back() == '\r')
                l.pop_back();
            lines.push_back(l);
        }
    }

    PdDocument doc;
    std::size_t i = 0;

    // Reads a JSON value that either sits entirely on `rest` or starts on the
    // next non-blank line and spans until its brackets balance.
    auto read_json = [&](const std::string& rest, const std::string& what) {
        if (!rest.empty()) {
            bool in_str = false;
            if (bracket_balance(rest, in_str) != 0 || in_str)
                throw parse_error(what + ": a JSON that begins on the same line as " + what +
                                  " must end on that line");
            return parse_json_strict(rest);
        }
        while (i < lines.size() && trim(lines[i]).empty())
            ++i;
        if (i >= lines.size())
            throw parse_error(what + ": missing JSON after " + what);
        std::string buf;
        bool in_str = false;
        int depth = 0;
        do {
            std::string t = trim(lines[i]);
            if (!t.empty() && t[0] == '#' && !in_str)
                throw parse_error("line " + std::to_string(i + 1) + ": comments are not allowed inside a JSON");
            depth += bracket_balance(lines[i], in_str);
            buf += lines[i];
            buf += '\n';
            ++i;
        } while (depth > 0 && i < lines.size());
        if (depth != 0)
            throw parse_error(what + ": unterminated JSON");
        return parse_json_strict(buf);
    };

    auto split_token = [](const std::string& t) {
        std::size_t e = 0;
        while (e < t.size() && !std::isspace(static_cast<unsigned char>(t[e])) && t[e] != '{' && t[e] != '[' &&
               t[e] != '"')
            ++e;
        return std::make_pair(t.substr(0, e), trim(t.substr(e)));
    };

    // Locate the PD marker.
    ojson j;
    bool found = false;
    while (i < lines.size()) {
        std::string t = trim(lines[i]);
        ++i;
        if (t.empty() || t[0] == '#')
            continue;
        auto [tok, rest] = split_token(t);
        if (tok != "PD")
            throw parse_error("line " + std::to_string(i) + ": \"" + tok +
                              "\" appears before the PD JSON; commands must follow the PD JSON");
        j = read_json(rest, "PD");
        found = true;
        break;
    }
    if (!found)
        throw parse_error("missing PD marker");
    if (!j.is_object())
        throw parse_error("the PD JSON must be an object");

    std::vector<std::string> commands;
    while (i < lines.size()) {
        std::string t = trim(lines[i]);
        std::size_t line_no = ++i;
        if (t.empty() || t[0] == '#')
            continue;
        auto [tok, rest] = split_token(t);
        if (tok == "PD")
            throw parse_error("line " + std::to_string(line_no) + ": a second PD block is not supported");
        if (tok == "DESER" || tok == "Q" || tok == "DESTROY")
            throw parse_error("line " + std::to_string(line_no) + ": the interactive command \"" + tok +
                              "\" is not supported");
        doc.trailing_commands.push_back(t);
        if (tok == "CMD" || tok == "OPT") {
            ojson v = read_json(rest, tok);
            if (!v.is_array())
                throw parse_error("line " + std::to_string(line_no) + ": " + tok + " needs a JSON array");
            for (const auto& c : v)
                j["OPT"].push_back(c);
        } else if (one_of(tok, pd_keys)) {
            ojson v = read_json(rest, tok);
            doc.warnings.push_back("Warning: the key command \"" + tok +
                                   "\" outside the PD JSON is experimental.");
            if (tok == "O") {
                j["O"] = v;
            } else {
                if (!v.is_array())
                    throw parse_error("line " + std::to_string(line_no) + ": " + tok + " needs a JSON array");
                for (const auto& e : v)
                    j[tok].push_back(e);
            }
        } else if (tok == "SER" || tok == "PDC" || tok == "CS" || tok == "LP_DISP" || tok == "?") {
            commands.push_back(t);
        } else {
            throw parse_error("line " + std::to_string(line_no) + ": unknown command \"" + tok + "\"");
        }
    }

    doc.pd = pd_from_json(j, &doc.warnings);
    for (const auto& c : commands)
        add_option(doc.pd, c, "command");
    return doc;
}

std::string usage_text()
{
    return "Usage: entrolp pdfile [regular|hull|random|prove|sensitivity] [modifier-json ...]\n"
           "               [--seed N] [--fraction F]\n"
           "\n"
           "The PD file holds the characters PD followed by a JSON object with the keys\n"
           "RV, AL, O, D, I, S, BC, BP, QU, SE, CMD and OPT. Lines starting with # are\n"
           "comments. The JSON may sit on the PD line or start on the next line.\n"
           "\n"
           "Commands after the PD JSON:\n"
           "SER [-a|-t file]   - Print the problem description (append or truncate file).\n"
           "PDC                - Print the problem description after initial processing.\n"
           "CS                 - Report the symmetry group check.\n"
           "LP_DISP            - Print intermediate output in LP optimization.\n"
           "CMD json_array     - Add options; OPT is a synonym.\n"
           "?                  - Print this text.\n"
           "\n"
           "Modifiers are JSON objects with keys RV, AL, O, D, I, S, BC, BP (replace) or\n"
           "+RV, +AL, +D, +I, +S, +BC, +BP, +CMD, +OPT (append), applied left to right.\n"
           "\n"
           "Modes:\n"
           "regular            - Minimize the objective and print the queried values (default).\n"
           "hull               - Trace the tradeoff between the two objective quantities.\n"
           "random             - Minimize using a random subset of the Shannon-type inequalities.\n"
           "prove              - Prove each BP inequality as a weighted sum of LP rows.\n"
           "sensitivity        - Range of each SE quantity over the optimal face.\n";
}

} // namespace entrolp
