// tefkit: temporal fair division toolkit CLI.
// JSON results go to stdout, human summaries to stderr.
// Exit codes: 0 success/holds/found, 1 property fails/nothing found,
// 2 input error, 3 budget or resource limit.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "tefkit/errors.hpp"
#include "tefkit/fairness.hpp"
#include "tefkit/gadgets.hpp"
#include "tefkit/instance.hpp"
#include "tefkit/search.hpp"
#include "tefkit/solvers.hpp"

namespace {

using nlohmann::json;
using namespace tefkit;

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw InputError("malformed JSON in '" + path + "': " + e.what());
    }
}

// Instance inputs accept a file path or "corpus:NAME" (see corpus_names()).
Instance load_instance(const std::string& spec) {
    if (spec.rfind("corpus:", 0) == 0) {
        return corpus_instance(spec.substr(7)).instance;
    }
    return instance_from_json(load_json(spec));
}

void write_output(const std::optional<std::string>& path, const json& j) {
    const std::string text = dump_canonical(j);
    if (path) {
        std::ofstream out(*path);
        if (!out) throw InputError("cannot write '" + *path + "'");
        out << text;
    } else {
        std::cout << text;
    }
}

std::uint64_t default_budget() {
    if (const char* env = std::getenv("TEFKIT_BUDGET")) {
        return std::strtoull(env, nullptr, 10);
    }
    return kDefaultNodeBudget;
}

int cmd_solve(const std::string& algo, const std::string& in,
              const std::optional<std::string>& out, const std::optional<std::string>& trace_out,
              std::uint64_t budget) {
    const Instance original = load_instance(in);
    const bool flatten = !original.rounds_all_single_item() && algo != "two-rounds" && algo != "auto";
    const std::optional<FlattenResult> flat =
        flatten ? std::optional<FlattenResult>(flatten_single_item(original)) : std::nullopt;
    const Instance& work = flat ? flat->instance : original;

    std::optional<Allocation> alloc;
    std::optional<SolverTrace> trace;
    std::string tag = algo;
    if (algo == "auto") {
        AutoResult result = solve_auto(original, budget);
        tag = result.tag;
        if (!result.allocation) {
            std::cerr << "no TEF1 allocation exists (exhaustive search, "
                      << result.search_nodes << " nodes)\n";
            write_output(std::nullopt, json{{"outcome", "none"}, {"nodes", result.search_nodes}});
            return 1;
        }
        alloc = std::move(result.allocation);
    } else if (algo == "two-agent-goods") {
        auto [a, t] = solve_two_agent_goods(work);
        alloc = std::move(a);
        trace = std::move(t);
    } else if (algo == "two-agent-chores") {
        auto [a, t] = solve_two_agent_chores(work);
        alloc = std::move(a);
        trace = std::move(t);
    } else if (algo == "two-types") {
        const ClassReport report = detect_class(work);
        if (!report.two_types) throw ClassError("instance does not have two item types");
        alloc = solve_two_types(work, report.type_of);
    } else if (algo == "gen-binary") {
        alloc = solve_generalized_binary(work);
    } else if (algo == "unimodal") {
        alloc = solve_unimodal(work);
    } else if (algo == "two-rounds") {
        alloc = solve_two_rounds(original);
    } else if (algo == "mixed") {
        alloc = solve_mixed_two_agent(work);
    } else {
        throw InputError("unknown algorithm '" + algo + "'");
    }

    write_output(out, allocation_to_json(*alloc));
    if (trace_out) {
        write_output(trace_out, trace ? solver_trace_to_json(*trace)
                                      : json{{"choices", alloc->assignment},
                                             {"swaps", json::array()},
                                             {"resets", json::array()}});
    }
    std::cerr << "solved with " << tag << "\n";
    return 0;
}

int cmd_check(const std::string& property, const std::string& p_text, const std::string& in,
              const std::string& alloc_path, std::uint64_t po_limit) {
    const Instance instance = load_instance(in);
    const Allocation alloc = allocation_from_json(load_json(alloc_path));

    if (property == "pmean") {
        PMeanExponent p = PMeanExponent::value(Rational(1));
        if (p_text == "neg-inf") {
            p = PMeanExponent::neg_infinity();
        } else if (p_text == "0") {
            p = PMeanExponent::zero_limit();
        } else {
            p = PMeanExponent::value(parse_rational(p_text));
        }
        const WelfareValue welfare = p_mean_welfare(instance, alloc, p);
        std::cout << welfare.to_string() << "\n";
        return 0;
    }
    if (property == "po") {
        const bool holds = is_pareto_optimal(instance, alloc, po_limit);
        write_output(std::nullopt, json{{"holds", holds}});
        std::cerr << (holds ? "Pareto-optimal\n" : "Pareto-dominated\n");
        return holds ? 0 : 1;
    }

    FairnessReport report;
    if (property == "tef1") {
        report = check_temporal(instance, alloc, Relation::EF1);
    } else if (property == "tefx") {
        report = check_temporal(instance, alloc, Relation::EFX);
    } else if (property == "ef1" || property == "efx" || property == "ef") {
        report = check_pairwise(instance, prefix_bundles(instance, alloc, instance.n_rounds()),
                                relation_from_string(property));
    } else {
        throw InputError("unknown property '" + property + "'");
    }
    write_output(std::nullopt, fairness_report_to_json(report));
    if (report.holds) {
        std::cerr << property << " holds\n";
    } else {
        std::cerr << property << " fails at round " << report.witness->round << ": agent "
                  << report.witness->envious << " envies agent " << report.witness->envied
                  << "\n";
    }
    return report.holds ? 0 : 1;
}

int cmd_search(const std::string& target, const std::string& mode, const std::string& in,
               const std::optional<std::string>& from_partial,
               const std::optional<std::string>& out, std::uint64_t budget, bool symmetry,
               std::uint64_t po_limit) {
    const Instance instance = load_instance(in);
    SearchQuery query;
    query.target = search_target_from_string(target);
    query.mode = search_mode_from_string(mode);
    query.node_budget = budget;
    query.symmetry_breaking = symmetry;
    query.pareto_cap = po_limit;
    query.report_progress = true;

    SearchResult result;
    if (from_partial) {
        result = search_from_partial(instance, partial_allocation_from_json(load_json(*from_partial)),
                                     query);
    } else {
        result = search(instance, query);
    }
    write_output(out, search_result_to_json(result));
    std::cerr << to_string(result.outcome) << " (count " << result.count << ", "
              << result.nodes_explored << " nodes, " << result.wall_time_ms << " ms)\n";
    switch (result.outcome) {
        case SearchOutcome::Found: return 0;
        case SearchOutcome::None: return 1;
        case SearchOutcome::BudgetExceeded: return 3;
    }
    return 2;
}

int cmd_gadget(const std::string& reduction, const std::string& in,
               const std::optional<std::string>& epsilon, const std::optional<std::string>& out,
               const std::optional<std::string>& partial_out) {
    GadgetParams params;
    if (epsilon) params.epsilon = parse_rational(*epsilon);
    const json src = load_json(in);

    if (reduction == "1in3sat-goods") {
        write_output(out, instance_to_json(gadget_1in3sat_goods_tef1(formula_from_json(src))));
        return 0;
    }
    if (reduction == "partition-chores") {
        PartitionGadget gadget = gadget_partition_chores_tef1(multiset_from_json(src), params);
        write_output(out, instance_to_json(gadget.instance));
        if (partial_out) write_output(partial_out, partial_allocation_to_json(gadget.prefix));
        return 0;
    }
    if (reduction == "1in3sat-po-goods" || reduction == "1in3sat-po-chores") {
        const MannaKind kind =
            reduction == "1in3sat-po-goods" ? MannaKind::Goods : MannaKind::Chores;
        write_output(out,
                     instance_to_json(gadget_1in3sat_tef1_po(formula_from_json(src), kind, params)));
        return 0;
    }
    if (reduction == "multiway-goods" || reduction == "multiway-chores") {
        const MannaKind kind =
            reduction == "multiway-goods" ? MannaKind::Goods : MannaKind::Chores;
        write_output(out, instance_to_json(gadget_multiway_repeated(multiset_from_json(src), kind)));
        return 0;
    }
    throw InputError("unknown reduction '" + reduction + "'");
}

MannaKind kind_from_flag(const std::string& text) {
    if (text == "g" || text == "goods") return MannaKind::Goods;
    if (text == "c" || text == "chores") return MannaKind::Chores;
    if (text == "m" || text == "mixed") return MannaKind::Mixed;
    throw InputError("unknown kind '" + text + "' (expected g|c|m)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"tefkit: informed online fair division (TEF1) toolkit"};
    app.require_subcommand(1);

    // solve
    std::string solve_algo = "auto", solve_in;
    std::optional<std::string> solve_out, solve_trace;
    auto* solve = app.add_subcommand("solve", "compute a TEF1 allocation");
    solve->add_option("--algo", solve_algo,
                      "auto|two-agent-goods|two-agent-chores|two-types|gen-binary|unimodal|"
                      "two-rounds|mixed");
    solve->add_option("--in", solve_in, "instance JSON (or corpus:NAME)")->required();
    solve->add_option("--out", solve_out, "allocation JSON output (default stdout)");
    solve->add_option("--trace", solve_trace, "solver trace JSON output");

    // check
    std::string check_property, check_p = "1", check_in, check_alloc;
    std::uint64_t po_limit = kDefaultParetoCap;
    auto* check = app.add_subcommand("check", "verify fairness/efficiency properties");
    check->add_option("--property", check_property, "tef1|tefx|ef1|efx|ef|po|pmean")->required();
    check->add_option("--p", check_p, "p-mean exponent: rational, 0 (Nash limit), or neg-inf");
    check->add_option("--in", check_in, "instance JSON (or corpus:NAME)")->required();
    check->add_option("--alloc", check_alloc, "allocation JSON")->required();
    check->add_option("--po-limit", po_limit, "candidate cap for the PO brute force");

    // search
    std::string search_target = "tef1", search_mode = "first", search_in;
    std::optional<std::string> search_partial, search_out;
    std::uint64_t search_budget = default_budget();
    std::uint64_t search_po_limit = kDefaultParetoCap;
    bool search_symmetry = false;
    auto* search_cmd = app.add_subcommand("search", "exhaustive pruned backtracking search");
    search_cmd->add_option("--target", search_target, "tef1|tefx|tef1po|repetitive");
    search_cmd->add_option("--mode", search_mode, "first|all|count");
    search_cmd->add_option("--in", search_in, "instance JSON (or corpus:NAME)")->required();
    search_cmd->add_option("--from-partial", search_partial, "partial allocation JSON to resume from");
    search_cmd->add_option("--out", search_out, "result JSON output (default stdout)");
    search_cmd->add_option("--budget", search_budget, "node budget (default TEFKIT_BUDGET or 1e9)");
    search_cmd->add_flag("--symmetry-breaking", search_symmetry,
                         "pin the first item to agent 0 on identical-valuation instances");
    search_cmd->add_option("--po-limit", search_po_limit, "Pareto enumeration cap (tef1po)");

    // gadget
    std::string gadget_reduction, gadget_in;
    std::optional<std::string> gadget_epsilon, gadget_out, gadget_partial_out;
    auto* gadget = app.add_subcommand("gadget", "construct hardness-reduction instances");
    gadget->add_option("--reduction", gadget_reduction,
                       "1in3sat-goods|partition-chores|1in3sat-po-goods|1in3sat-po-chores|"
                       "multiway-goods|multiway-chores")
        ->required();
    gadget->add_option("--in", gadget_in, "source formula/multiset JSON")->required();
    gadget->add_option("--epsilon", gadget_epsilon, "gadget epsilon (rational)");
    gadget->add_option("--out", gadget_out, "instance JSON output (default stdout)");
    gadget->add_option("--partial-out", gadget_partial_out,
                       "partial allocation output (partition-chores)");

    // gen
    int gen_agents = 2, gen_rounds = 1, gen_per_round = 1;
    long long gen_max_value = 9;
    std::uint64_t gen_seed = 0;
    std::string gen_kind = "g";
    std::optional<std::string> gen_out;
    auto* gen = app.add_subcommand("gen", "generate a seeded random instance");
    gen->add_option("--agents", gen_agents)->required();
    gen->add_option("--rounds", gen_rounds)->required();
    gen->add_option("--per-round", gen_per_round)->required();
    gen->add_option("--kind", gen_kind, "g|c|m")->required();
    gen->add_option("--seed", gen_seed)->required();
    gen->add_option("--max-value", gen_max_value, "value grid bound (default 9)");
    gen->add_option("--out", gen_out, "instance JSON output (default stdout)");

    // detect
    std::string detect_in;
    auto* detect = app.add_subcommand("detect", "report preference-class flags");
    detect->add_option("--in", detect_in, "instance JSON (or corpus:NAME)")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) {
            return cmd_solve(solve_algo, solve_in, solve_out, solve_trace, default_budget());
        }
        if (check->parsed()) {
            return cmd_check(check_property, check_p, check_in, check_alloc, po_limit);
        }
        if (search_cmd->parsed()) {
            return cmd_search(search_target, search_mode, search_in, search_partial, search_out,
                              search_budget, search_symmetry, search_po_limit);
        }
        if (gadget->parsed()) {
            return cmd_gadget(gadget_reduction, gadget_in, gadget_epsilon, gadget_out,
                              gadget_partial_out);
        }
        if (gen->parsed()) {
            write_output(gen_out, instance_to_json(gen_random(gen_agents, gen_rounds, gen_per_round,
                                                              kind_from_flag(gen_kind),
                                                              gen_max_value, gen_seed)));
            return 0;
        }
        if (detect->parsed()) {
            write_output(std::nullopt, class_report_to_json(detect_class(load_instance(detect_in))));
            return 0;
        }
    } catch (const BudgetError& e) {
        std::cerr << "budget error: " << e.what() << "\n";
        return 3;
    } catch (const InternalError& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
