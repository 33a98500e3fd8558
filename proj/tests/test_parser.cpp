#include <doctest.h>

#include "entrolp/error.hpp"
#include "entrolp/parser.hpp"
#include "support.hpp"

using namespace entrolp;

namespace {

const Names rvs{"X", "YQ123", "Z"};
const Names als{"A", "B"};

PdDocument parse(const std::string& json) { return parse_file("PD\n" + json + "\n"); }

} // namespace

TEST_CASE("the twelve-variable regenerating code file")
{
    PdDocument doc = parse_file(testing::read_file(testing::data_path("rg433.pd")));
    const auto& pd = doc.pd;
    CHECK(pd.num_rvs() == 12);
    CHECK(pd.num_als() == 2);
    CHECK(pd.deps.size() == 4);
    CHECK(pd.bc.size() == 3);
    CHECK(pd.bp.size() == 1);
    CHECK(pd.se.size() == 3);
    CHECK(pd.qu.size() == 4);
    CHECK(pd.sym.perms.size() == 24);
    CHECK(pd.options == std::set<Option>{Option::PDC, Option::CS});
    CHECK(pd.bc[0].sense == Sense::le);
    CHECK(pd.bc[2].rhs == 1.0);
}

TEST_CASE("minimal document")
{
    PdDocument doc = parse("{\"RV\":[\"Z\"]}");
    CHECK(doc.pd.rv_names == Names{"Z"});
    CHECK(doc.pd.al_names.empty());
    CHECK(doc.pd.objective.empty());
    CHECK(doc.pd.deps.empty());
    CHECK(doc.pd.sym.perms.empty());
    CHECK(doc.trailing_commands.empty());
}

TEST_CASE("file layout errors")
{
    CHECK_THROWS_WITH_AS(parse("{\"RV\":\"X\"}"), doctest::Contains("value must be a JSON array"), parse_error);
    CHECK_THROWS_AS(parse_file("{\"RV\":[\"X\"]}"), parse_error);                 // no marker
    CHECK_THROWS_AS(parse_file("PD {\"RV\":[\"X\"],\n\"AL\":[]}"), parse_error);  // split after PD
    CHECK_THROWS_AS(parse_file("PD\n{\"RV\":[\"X\"],\n# no\n\"AL\":[]}"), parse_error);
    CHECK_THROWS_AS(parse_file("CS\nPD\n{\"RV\":[\"X\"]}"), parse_error);
    CHECK_THROWS_AS(parse_file("PD\n{\"RV\":[\"X\"]}\nPD\n{\"RV\":[\"Y\"]}"), parse_error);
    CHECK_THROWS_AS(parse_file("PD\n{\"RV\":[\"X\"]}\nDESER"), parse_error);
    CHECK_THROWS_AS(parse("{\"RV\":[\"X\"],\"FOO\":[]}"), parse_error);
    CHECK_THROWS_AS(parse("{\"RV\":[\"X\"],\"RV\":[\"Y\"]}"), parse_error);
    CHECK_THROWS_AS(parse("{\"RV\":[\"X\",],}"), parse_error);
    CHECK_THROWS_AS(parse("{\"RV\":[\"1X\"]}"), parse_error);
    CHECK_THROWS_AS(parse("{\"RV\":[\"X\",\"X\"]}"), parse_error);
    CHECK_THROWS_AS(parse("{\"RV\":[\"X\"],\"AL\":[\"X\"]}"), parse_error);
    CHECK_THROWS_AS(parse("{\"RV\":[\"X\",\"Y\"],\"S\":[[\"X\",\"X\"]]}"), parse_error);
    CHECK_THROWS_AS(parse("{\"RV\":[\"X\",\"Y\"],\"S\":[[\"X\"]]}"), parse_error);
}

TEST_CASE("JSON on the marker line and trailing commands")
{
    PdDocument doc = parse_file("# c\nPD {\"RV\":[\"X\",\"Y\"],\"O\":\"H(X)\"}\n# c\nCS\nCMD [\"LP_DISP\"]\n");
    CHECK(doc.pd.num_rvs() == 2);
    CHECK(doc.pd.has(Option::CS));
    CHECK(doc.pd.has(Option::LP_DISP));
    CHECK(doc.trailing_commands.size() == 2);
}

TEST_CASE("expressions")
{
    LinearExpr e = parse_expression("A + 5B + H(X) - 2H(X,YQ123|Z)", rvs, als);
    CHECK(e.al_terms == std::map<int, double>{{0, 1.0}, {1, 5.0}});
    CHECK(e.entropy_terms == std::map<VarSet, double>{{1, 1.0}, {7, -2.0}, {4, 2.0}});

    // spacing is ignored
    CHECK(parse_expression("A+5B+H(X)-2H(X,YQ123|Z)", rvs, als) == e);

    const Names s{"S12", "S21", "S31", "S32"};
    LinearExpr se = parse_expression("2I(S12;S21|S32)+H(S21|S31)+A", s, als);
    LinearExpr want;
    want.add_entropy(1 | 8, 2);
    want.add_entropy(2 | 8, 2);
    want.add_entropy(1 | 2 | 8, -2);
    want.add_entropy(8, -2);
    want.add_entropy(2 | 4, 1);
    want.add_entropy(4, -1);
    want.add_al(0, 1);
    CHECK(se == want);

    LinearExpr neg = parse_expression("-2I(S12;S21|S32)", s, als);
    LinearExpr mi = expand_mutual_information(1, 2, 8);
    mi *= -2.0;
    CHECK(neg == mi);

    CHECK(parse_expression("0.5H(X)", rvs, als).entropy_terms.at(1) == 0.5);
}

TEST_CASE("expression errors")
{
    CHECK_THROWS_AS(parse_expression("H(Q)", rvs, als), parse_error);
    CHECK_THROWS_AS(parse_expression("H(A)", rvs, als), parse_error);
    CHECK_THROWS_AS(parse_expression("X", rvs, als), parse_error);
    CHECK_THROWS_AS(parse_expression("I(X;Z;YQ123)", rvs, als), parse_error);
    CHECK_THROWS_AS(parse_expression("I(X)", rvs, als), parse_error);
    CHECK_THROWS_AS(parse_expression("H(X) + 3", rvs, als), parse_error);
    CHECK_THROWS_AS(parse_expression("2*H(X)", rvs, als), parse_error);
    CHECK_THROWS_AS(parse_expression("H()", rvs, als), parse_error);
    CHECK_THROWS_AS(parse_expression("1e3H(X)", rvs, als), parse_error);
}

TEST_CASE("inequalities")
{
    const Names s{"S12", "S13", "S14"};
    ConstantBound b = parse_inequality("H(S12,S13,S14) - A <= 0", s, als);
    CHECK(b.sense == Sense::le);
    CHECK(b.rhs == 0.0);
    CHECK(b.lhs.entropy_terms == std::map<VarSet, double>{{7, 1.0}});
    CHECK(b.lhs.al_terms == std::map<int, double>{{0, -1.0}});

    ConstantBound p = parse_inequality("4A + 6B >= 3", s, als);
    CHECK(p.sense == Sense::ge);
    CHECK(p.rhs == 3.0);
    CHECK(p.lhs.al_terms == std::map<int, double>{{0, 4.0}, {1, 6.0}});

    CHECK(parse_inequality("H(X) = 0", rvs, als).sense == Sense::eq);
    CHECK(parse_inequality("H(X) >= -1.5", rvs, als).rhs == -1.5);
    CHECK_THROWS_WITH_AS(parse_inequality("H(X) >= Y", rvs, als), doctest::Contains("must be a number"),
                         parse_error);
    CHECK_THROWS_AS(parse_inequality("H(X)", rvs, als), parse_error);
    CHECK_THROWS_AS(parse_inequality("0 <= H(X) <= 1", rvs, als), parse_error);
    CHECK_THROWS_AS(parse_inequality("H(X) > 1", rvs, als), parse_error);
}

TEST_CASE("dependencies and independence")
{
    PdDocument doc = parse("{\"RV\":[\"X\",\"Y\",\"Z\",\"W\"],"
                           "\"D\":[{\"dependent\":[\"Z\"],\"given\":[\"X\",\"Y\"]}],"
                           "\"I\":[{\"independent\":[\"X\",\"Y\",\"W\"],\"given\":[\"Z\"]}]}");
    REQUIRE(doc.pd.deps.size() == 1);
    CHECK(doc.pd.deps[0].dependent == 4);
    CHECK(doc.pd.deps[0].given == 3);
    REQUIRE(doc.pd.indeps.size() == 1);
    CHECK(doc.pd.indeps[0].independent == std::vector<int>{0, 1, 3});
    CHECK(doc.pd.indeps[0].given == 4);

    CHECK_THROWS_AS(parse("{\"RV\":[\"X\"],\"D\":[{\"dependent\":[],\"given\":[\"X\"]}]}"), parse_error);
    CHECK_THROWS_AS(parse("{\"RV\":[\"X\",\"Y\"],\"I\":[{\"independent\":[\"X\"]}]}"), parse_error);

    PdDocument overlap = parse("{\"RV\":[\"X\",\"Y\"],\"D\":[{\"dependent\":[\"X\",\"Y\"],\"given\":[\"X\"]}]}");
    CHECK(overlap.pd.deps.at(0).dependent == 2);
    CHECK_FALSE(overlap.warnings.empty());
}

TEST_CASE("modifiers")
{
    const std::string base = "{\"RV\":[\"A1\",\"B1\",\"C1\"],"
                             "\"D\":[{\"dependent\":[\"C1\"],\"given\":[\"A1\"]}],"
                             "\"BC\":[\"H(A1) <= 1\"]}";
    ProblemDescription pd = parse(base).pd;

    ProblemDescription appended = apply_modifier(pd, parse_modifier("{\"+BC\":[\"H(A1) = 0\",\"H(B1) = 0\"]}"));
    CHECK(appended.bc.size() == 3);

    ProblemDescription replaced =
        apply_modifier(pd, parse_modifier("{\"D\":[{\"dependent\":[\"A1\",\"B1\"],\"given\":[\"C1\"]}]}"));
    REQUIRE(replaced.deps.size() == 1);
    CHECK(replaced.deps[0].dependent == 3);
    CHECK(replaced.deps[0].given == 4);

    CHECK(apply_modifier(pd, parse_modifier("{\"+CMD\":[\"PDC\"]}")).has(Option::PDC));
    CHECK(apply_modifier(pd, parse_modifier("{\"+RV\":[\"D1\"]}")).num_rvs() == 4);

    CHECK_THROWS_AS(parse_modifier("{\"+O\":\"H(A1)\"}"), parse_error);
    CHECK_THROWS_AS(parse_modifier("{\"CMD\":[\"CS\"]}"), parse_error);
    CHECK_THROWS_AS(parse_modifier("{\"OPT\":[\"CS\"]}"), parse_error);
    CHECK_THROWS_AS(parse_modifier("{\"+CMD\":[\"LP_DISP\"]}"), parse_error);
    CHECK_THROWS_AS(parse_modifier("[1]"), parse_error);
    CHECK_THROWS_AS(parse_modifier("{\"BC\":"), parse_error);
    CHECK_THROWS_AS(apply_modifier(pd, parse_modifier("{\"+RV\":[\"A1\"]}")), parse_error);
}

TEST_CASE("replace modifiers are idempotent and order matters")
{
    ProblemDescription pd = parse("{\"RV\":[\"X\",\"Y\"],\"BC\":[\"H(X) <= 1\"]}").pd;
    Modifier rep = parse_modifier("{\"BC\":[\"H(Y) <= 2\"]}");
    Modifier app = parse_modifier("{\"+BC\":[\"H(X,Y) >= 1\"]}");

    ProblemDescription once = apply_modifier(pd, rep);
    CHECK(equivalent(apply_modifier(once, rep), once));

    ProblemDescription ra = apply_modifier(apply_modifier(pd, rep), app);
    ProblemDescription ar = apply_modifier(apply_modifier(pd, app), rep);
    CHECK(ra.bc.size() == 2);
    CHECK(ar.bc.size() == 1);
    CHECK_FALSE(equivalent(ra, ar));
}

TEST_CASE("serialization round trip")
{
    PdDocument doc = parse_file(testing::read_file(testing::data_path("rg433.pd")));
    std::string text = serialize(doc.pd);
    CHECK(text.rfind("PD\n", 0) == 0);
    PdDocument again = parse_file(text);
    CHECK(equivalent(again.pd, doc.pd));
    CHECK(serialize(again.pd) == text);

    CHECK(serialize(parse("{\"RV\":[\"Z\"]}").pd).find("\"RV\": [\n    \"Z\"\n  ]") != std::string::npos);

    ProblemDescription mod = apply_modifier(doc.pd, parse_modifier("{\"+BC\":[\"H(S12) >= 0.1\",\"B <= 7\"]}"));
    std::string s = serialize(mod);
    CHECK(s.find("H(S12) >= 0.1") != std::string::npos);
    CHECK(s.find("B <= 7") != std::string::npos);
    ProblemDescription direct = doc.pd;
    direct.bc.push_back(parse_inequality("H(S12) >= 0.1", direct.rv_names, direct.al_names));
    direct.bc.push_back(parse_inequality("B <= 7", direct.rv_names, direct.al_names));
    CHECK(equivalent(parse_file(s).pd, direct));
}

TEST_CASE("SER targets and help")
{
    PdDocument doc = parse_file("PD\n{\"RV\":[\"X\"]}\nSER -t out.pd\n?\n");
    REQUIRE(doc.pd.ser_target.has_value());
    CHECK(doc.pd.ser_target->path == "out.pd");
    CHECK_FALSE(doc.pd.ser_target->append);
    CHECK(doc.pd.has(Option::HELP));
}

TEST_CASE("display helpers")
{
    CHECK(display_expression("A+B") == "A + B");
    CHECK(display_expression("-2I(S12;S21|S32)") == "-2I(S12;S21|S32)");
    CHECK(display_expression("2H(S12|S13)") == "2H(S12|S13)");
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(3) == "3");
    CHECK(format_number(-1.25) == "-1.25");
    CHECK(is_identifier("S12"));
    CHECK_FALSE(is_identifier("1S"));
    CHECK_FALSE(is_identifier("S_1"));
    LinearExpr e = parse_expression("2H(X,YQ123) - H(Z) + A", rvs, als);
    CHECK(parse_expression(format_expr(e, rvs, als), rvs, als) == e);
}
