#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "checkers.hpp"
#include "determinize.hpp"
#include "hardness.hpp"
#include "io.hpp"
#include "ltl.hpp"
#include "oracle.hpp"

namespace bpmc {

namespace detail {

struct CliCtx {
    std::ostream& out;
    std::ostream& err;

    std::string bp_path, aut_path, ltl_str, alphabet_csv, targets_csv;
    std::string circuit_path, atm_path, word_csv, variant = "nba0", out_path;
    std::uint64_t seed = 1;
    int depth = 12;
    int samples = 10000;
    int budget = -1;  // -1 picks the per-subcommand default
    int jobs = 1;
    int iters = 100000;
    bool assume_unambiguous = false;
    bool fail_on_no = false;
    bool json = false;
    int exit_code = 0;

    int budget_or(int dflt) const { return budget > 0 ? budget : dflt; }
};

inline BranchingProcess load_bp(const std::string& path) {
    BranchingProcess bp = parse_bp(read_file(path));
    std::vector<Violation> v = validate_bp(bp);
    if (!v.empty()) throw Error(v[0].code, v[0].detail + " (in " + path + ")");
    return bp;
}

inline std::vector<bool> parse_targets(const BranchingProcess& bp, const std::string& csv) {
    std::vector<std::string> names = split_csv(csv);
    if (names.empty()) throw Error("BadArgument", "--targets must name at least one type");
    std::vector<bool> mask(bp.n_types(), false);
    for (const std::string& n : names) {
        int t = bp.find_type(n);
        if (t < 0) throw Error("UnknownType", "target " + n);
        mask[t] = true;
    }
    return mask;
}

inline void emit_verdict(CliCtx& c, const std::string& problem, const Verdict& v, double ms) {
    if (c.json) {
        nlohmann::ordered_json j;
        j["version"] = 1;
        j["problem"] = problem;
        j["answer"] = v.answer ? "YES" : "NO";
        if (!v.witness.empty()) j["witness"] = v.witness;
        j["route"] = v.route;
        j["timings"] = {{"total_ms", ms}};
        c.out << j.dump(2) << "\n";
    } else {
        c.out << "answer: " << (v.answer ? "YES" : "NO") << "\n";
        c.out << "route: " << v.route << "\n";
        if (!v.witness.empty()) c.out << "witness: " << v.witness << "\n";
    }
    if (c.fail_on_no && !v.answer) c.exit_code = 1;
}

inline void do_check(CliCtx& c, const std::string& problem) {
    auto t0 = std::chrono::steady_clock::now();
    BranchingProcess bp = load_bp(c.bp_path);
    Verdict v;
    if (problem == "finite1") {
        v = check_finite_one(bp);
    } else if (problem == "reach1") {
        v = check_reach_one(bp, parse_targets(bp, c.targets_csv));
    } else if (problem == "dpa1") {
        v = check_dpa_one(bp, parse_dpa(read_file(c.aut_path)), c.jobs);
    } else if (problem == "nba1") {
        v = check_nba_one(bp, parse_nba(read_file(c.aut_path)), c.jobs, c.budget_or(50000));
    } else if (problem == "couba1") {
        v = check_couba_one(bp, parse_nba(read_file(c.aut_path)), c.assume_unambiguous, c.jobs);
    } else if (problem == "conba1") {
        v = check_conba_one_exact(bp, parse_nba(read_file(c.aut_path)), c.jobs,
                                  c.budget_or(1 << 20));
    } else {
        v = check_ltl_one(bp, c.ltl_str, c.jobs);
    }
    double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                    .count();
    emit_verdict(c, problem, v, ms);
}

inline void do_translate_ltl2uba(CliCtx& c) {
    LtlPool pool(split_csv(c.alphabet_csv));
    int f = parse_ltl(pool, c.ltl_str);
    Nba a = ltl_to_uba(pool, f, c.budget_or(1 << 18));
    std::string text = print_nba(a);
    if (c.out_path.empty()) c.out << text;
    else {
        write_file(c.out_path, text);
        c.out << "wrote " << c.out_path << "\n";
    }
}

inline void do_translate_nba2dpa(CliCtx& c) {
    Dpa d = determinize_to_dpa(parse_nba(read_file(c.aut_path)), c.budget_or(50000));
    std::string text = print_dpa(d);
    if (c.out_path.empty()) c.out << text;
    else {
        write_file(c.out_path, text);
        c.out << "wrote " << c.out_path << "\n";
    }
}

inline void do_simulate(CliCtx& c) {
    BranchingProcess bp = load_bp(c.bp_path);
    std::vector<bool> targets = parse_targets(bp, c.targets_csv);
    std::vector<double> curve = estimate_reach_curve(bp, targets, c.depth, c.samples, c.seed);
    std::string csv = "depth,rate\n";
    char buf[64];
    for (std::size_t d = 0; d < curve.size(); ++d) {
        std::snprintf(buf, sizeof buf, "%zu,%.6f\n", d, curve[d]);
        csv += buf;
    }
    if (c.out_path.empty()) c.out << csv;
    else {
        write_file(c.out_path, csv);
        c.out << "wrote " << c.out_path << "\n";
    }
}

inline void do_prob(CliCtx& c) {
    BranchingProcess bp = load_bp(c.bp_path);
    std::vector<bool> targets = parse_targets(bp, c.targets_csv);
    std::string csv = "iter,type,value\n";
    char buf[128];
    KleeneTrace trace = [&](int iter, const std::vector<double>& q) {
        for (int t = 0; t < bp.n_types(); ++t) {
            std::snprintf(buf, sizeof buf, "%d,%s,%.12g\n", iter, bp.type_name(t).c_str(), q[t]);
            csv += buf;
        }
    };
    kleene_reach_prob(bp, targets, c.iters, 1e-12, trace);
    if (c.out_path.empty()) c.out << csv;
    else {
        write_file(c.out_path, csv);
        c.out << "wrote " << c.out_path << "\n";
    }
}

inline void do_gen_circuit(CliCtx& c) {
    MonotoneCircuit cc = parse_circuit(read_file(c.circuit_path));
    CircuitInstance inst = gen_circuit_instance(cc);
    write_file(c.out_path + ".bp", print_bp(inst.bp));
    write_file(c.out_path + ".dpa", print_dpa(inst.dpa));
    c.out << "wrote " << c.out_path << ".bp and " << c.out_path << ".dpa\n";
}

inline void do_gen_atm(CliCtx& c) {
    AtmSpec m = parse_atm(read_file(c.atm_path));
    std::vector<int> word;
    for (const std::string& n : split_csv(c.word_csv)) {
        int l = m.find_letter(n);
        if (l < 0) throw Error("UnknownLetter", "word letter " + n);
        word.push_back(l);
    }
    AtmInstance inst =
        gen_atm_instance(m, word, c.variant == "nba0" ? AtmVariant::Nba0 : AtmVariant::Conba0);
    write_file(c.out_path + ".bp", print_bp(inst.bp));
    write_file(c.out_path + ".nba", print_nba(inst.nba));
    c.out << "wrote " << c.out_path << ".bp and " << c.out_path << ".nba\n";
}

}  // namespace detail

// In-process entry point; `args` excludes the program name. Exit status: 0
// analysis completed (the verdict lives in the report), 1 verdict NO under
// --fail-on-no, 2 usage or input errors, 3 budget exceeded.
inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    detail::CliCtx c{out, err};
    CLI::App app{"qualitative model checker for branching processes", "bpmc"};
    app.require_subcommand(1);

    auto add_common = [&c](CLI::App* sub) {
        sub->add_flag("--json", c.json, "emit a machine-readable report");
        sub->add_flag("--fail-on-no", c.fail_on_no, "exit 1 when the verdict is NO");
        sub->add_option("--jobs", c.jobs, "worker threads")->check(CLI::PositiveNumber);
    };

    CLI::App* check =
        app.add_subcommand("check", "decide P(every branch satisfies the specification) = 1");
    check->require_subcommand(1);
    struct ProblemDef {
        const char* name;
        const char* desc;
        bool aut, ltl, targets;
    };
    const ProblemDef problems[] = {
        {"finite1", "almost-sure finiteness", false, false, false},
        {"reach1", "almost-sure branch reachability of target types", false, false, true},
        {"dpa1", "deterministic parity specification", true, false, false},
        {"nba1", "nondeterministic Buchi specification (via determinization)", true, false,
         false},
        {"couba1", "complemented unambiguous Buchi specification", true, false, false},
        {"conba1", "complemented Buchi specification (subset route)", true, false, false},
        {"ltl1", "LTL specification over the type alphabet", false, true, false},
    };
    for (const ProblemDef& p : problems) {
        CLI::App* sub = check->add_subcommand(p.name, p.desc);
        sub->add_option("--bp", c.bp_path, "branching process file")->required();
        if (p.aut) sub->add_option("--aut", c.aut_path, "automaton file")->required();
        if (p.ltl) sub->add_option("--ltl", c.ltl_str, "LTL formula")->required();
        if (p.targets) sub->add_option("--targets", c.targets_csv, "target types (CSV)")->required();
        if (std::string(p.name) == "couba1")
            sub->add_flag("--assume-unambiguous", c.assume_unambiguous,
                          "skip the unambiguity check");
        if (std::string(p.name) == "nba1" || std::string(p.name) == "conba1")
            sub->add_option("--budget", c.budget, "construction size budget");
        add_common(sub);
        std::string name = p.name;
        sub->callback([&c, name] { detail::do_check(c, name); });
    }

    CLI::App* tr = app.add_subcommand("translate", "convert specifications between formats");
    tr->require_subcommand(1);
    {
        CLI::App* sub = tr->add_subcommand("ltl2uba", "LTL to unambiguous Buchi");
        sub->add_option("--ltl", c.ltl_str, "LTL formula")->required();
        sub->add_option("--alphabet", c.alphabet_csv, "letters (CSV)")->required();
        sub->add_option("-o,--out", c.out_path, "output file (stdout if omitted)");
        sub->add_option("--budget", c.budget, "tableau state budget");
        sub->callback([&c] { detail::do_translate_ltl2uba(c); });
    }
    {
        CLI::App* sub = tr->add_subcommand("nba2dpa", "Buchi to deterministic parity");
        sub->add_option("--aut", c.aut_path, "automaton file")->required();
        sub->add_option("-o,--out", c.out_path, "output file (stdout if omitted)");
        sub->add_option("--budget", c.budget, "determinization state budget");
        sub->callback([&c] { detail::do_translate_nba2dpa(c); });
    }

    {
        CLI::App* sub = app.add_subcommand("simulate", "sample tree prefixes, report hit rates");
        sub->add_option("--bp", c.bp_path, "branching process file")->required();
        sub->add_option("--targets", c.targets_csv, "target types (CSV)")->required();
        sub->add_option("--depth", c.depth, "prefix depth")->check(CLI::PositiveNumber);
        sub->add_option("--samples", c.samples, "sample count")->check(CLI::PositiveNumber);
        sub->add_option("--seed", c.seed, "random seed");
        sub->add_option("-o,--out", c.out_path, "CSV output file (stdout if omitted)");
        sub->callback([&c] { detail::do_simulate(c); });
    }
    {
        CLI::App* sub = app.add_subcommand("prob", "iterate the reachability fixpoint");
        sub->add_option("--bp", c.bp_path, "branching process file")->required();
        sub->add_option("--targets", c.targets_csv, "target types (CSV)")->required();
        sub->add_option("--iters", c.iters, "iteration cap")->check(CLI::PositiveNumber);
        sub->add_option("-o,--out", c.out_path, "CSV output file (stdout if omitted)");
        sub->callback([&c] { detail::do_prob(c); });
    }

    CLI::App* gen = app.add_subcommand("gen", "generate structured problem instances");
    gen->require_subcommand(1);
    {
        CLI::App* sub = gen->add_subcommand("circuit", "monotone circuit to BP + parity spec");
        sub->add_option("--circuit", c.circuit_path, "circuit file")->required();
        sub->add_option("-o,--out", c.out_path, "output basename")->required();
        sub->callback([&c] { detail::do_gen_circuit(c); });
    }
    {
        CLI::App* sub = gen->add_subcommand("atm", "alternating machine to BP + Buchi monitor");
        sub->add_option("--atm", c.atm_path, "machine file")->required();
        sub->add_option("--word", c.word_csv, "input word letters (CSV)")->required();
        sub->add_option("--variant", c.variant, "construction variant")
            ->check(CLI::IsMember({"nba0", "conba0"}));
        sub->add_option("-o,--out", c.out_path, "output basename")->required();
        sub->callback([&c] { detail::do_gen_atm(c); });
    }

    try {
        std::reverse(args.begin(), args.end());
        app.parse(std::move(args));
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 2;
    } catch (const BudgetExceeded& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    return c.exit_code;
}

inline int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run_cli(std::move(args), out, err);
}

}  // namespace bpmc
