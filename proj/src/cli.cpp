#include "entrolp/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "entrolp/error.hpp"
#include "entrolp/lp.hpp"
#include "entrolp/modes.hpp"
#include "entrolp/parser.hpp"
#include "entrolp/reduction.hpp"
#include "entrolp/solver.hpp"

namespace entrolp {

namespace {

const std::vector<std::string> mode_names = {"regular", "hull", "random", "prove", "sensitivity"};

struct Invocation {
    std::string pd_path;
    std::string mode = "regular";
    std::vector<std::string> modifiers;
    std::uint64_t seed = 0;
    double fraction = 0.5;
};

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw parse_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_serialization(const ProblemDescription& pd, std::ostream& out)
{
    const std::string text = serialize(pd);
    if (!pd.ser_target || pd.ser_target->path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(pd.ser_target->path, pd.ser_target->append ? std::ios::app : std::ios::trunc);
    if (!f)
        throw parse_error("SER: cannot open " + pd.ser_target->path);
    f << text;
}

int run(const Invocation& inv, std::ostream& out, std::ostream& err)
{
    PdDocument doc = parse_file(read_file(inv.pd_path));
    ProblemDescription pd = doc.pd;
    std::vector<std::string> warnings = doc.warnings;
    for (const auto& m : inv.modifiers)
        pd = apply_modifier(pd, parse_modifier(m), &warnings);
    for (const auto& w : warnings)
        err << w << "\n";

    if (pd.has(Option::HELP)) {
        out << usage_text();
        return exit_ok;
    }
    if (pd.has(Option::SER))
        write_serialization(pd, out);
    if (pd.has(Option::PDC)) {
        err << "Warning: the classic PD format is not supported; printing the current serialization.\n";
        out << serialize(pd);
    }

    // The group is always validated: the reduction is only sound for a group.
    GroupReport rep = check_group(pd.sym, pd.rv_names);
    if (!rep.ok)
        throw symmetry_error(rep.message);
    if (pd.has(Option::CS))
        out << rep.message << "\n";

    ReductionMap map = build_reduction_map(pd);
    out << "Total number of elements before reduction: " << map.count_before << "\n";
    out << "Total number of elements after reduction: " << map.count_after << "\n";
    LPInstance inst = assemble(pd, map);
    out << constraint_report(inst);

    SolverOptions opts = SolverOptions::from_env();
    opts.display = pd.has(Option::LP_DISP);
    ModeContext ctx{pd, map, inst, opts, out, err};
    if (inv.mode == "regular")
        run_regular(ctx);
    else if (inv.mode == "hull")
        run_hull(ctx);
    else if (inv.mode == "prove")
        run_prove(ctx);
    else if (inv.mode == "sensitivity")
        run_sensitivity(ctx);
    else if (inv.mode == "random")
        run_random(ctx, inv.seed, inv.fraction);
    return exit_ok;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    if (args.empty()) {
        err << usage_text();
        return exit_usage;
    }

    Invocation inv;
    std::vector<std::string> positional;
    CLI::App app{"entropy LP bounds, hulls, proofs and sensitivity ranges", "entrolp"};
    app.set_help_flag();
    app.add_option("--seed", inv.seed, "random mode seed");
    app.add_option("--fraction", inv.fraction, "random mode fraction of kept inequalities")
        ->check(CLI::Range(0.0, 1.0));
    app.add_option("args", positional)->required();
    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << usage_text();
        return exit_usage;
    }

    inv.pd_path = positional.front();
    std::size_t next = 1;
    if (next < positional.size() && !positional[next].empty() && positional[next][0] != '{') {
        if (std::find(mode_names.begin(), mode_names.end(), positional[next]) == mode_names.end()) {
            err << "error: unknown mode \"" << positional[next] << "\"\n" << usage_text();
            return exit_usage;
        }
        inv.mode = positional[next++];
    }
    for (; next < positional.size(); ++next)
        inv.modifiers.push_back(positional[next]);
    if (inv.mode == "random" && !(inv.fraction > 0.0))
        return err << "error: --fraction must be in (0, 1]\n", exit_usage;

    try {
        return run(inv, out, err);
    } catch (const symmetry_error& e) {
        err << e.what() << "\n";
        return exit_symmetry;
    } catch (const solver_error& e) {
        err << "Solver failure: " << e.what() << "\n";
        return exit_solver;
    } catch (const parse_error& e) {
        err << "Parse error: " << e.what() << "\n";
        return exit_parse;
    } catch (const mode_error& e) {
        err << "Error: " << e.what() << "\n";
        return exit_parse;
    } catch (const nlohmann::json::exception& e) {
        err << "Parse error: " << e.what() << "\n";
        return exit_parse;
    } catch (const error& e) {
        err << "Error: " << e.what() << "\n";
        return exit_parse;
    }
}

} // namespace entrolp
