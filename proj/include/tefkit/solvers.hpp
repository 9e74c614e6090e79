#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "tefkit/instance.hpp"
#include "tefkit/search.hpp"

namespace tefkit {

/// Detected preference-class flags; each is recomputable from the instance.
struct ClassReport {
    bool two_agents = false;
    bool two_rounds = false;
    bool rounds_single_item = false;
    bool identical_valuations = false;

    bool two_types = false;
    std::vector<int> type_of;  // per item, 0/1 in first-seen order (two_types)

    bool generalized_binary = false;
    std::vector<Rational> item_price;  // p_j per item; 0 for all-zero items

    bool single_peaked = false;
    std::vector<int> peak_item;  // per agent (single_peaked)
    bool single_dipped = false;
    std::vector<int> dip_item;  // per agent (single_dipped)
};

ClassReport detect_class(const Instance& instance);
nlohmann::json class_report_to_json(const ClassReport& report);

/// Replayable record of a two-agent run: choices[t] is the agent the round-t
/// item was handed to before any swap; swap/reset rounds are 1-based.
struct SolverTrace {
    std::vector<int> choices;
    std::vector<int> swap_rounds;
    std::vector<int> reset_rounds;
};

nlohmann::json solver_trace_to_json(const SolverTrace& trace);

/// Re-executes a trace (choices, window swaps, resets); reproduces the
/// allocation the solver returned.
Allocation replay_trace(const Instance& instance, const SolverTrace& trace);

/// Two-agent chores solver: each chore goes to the agent that does not envy
/// the other within the window since the last envy-free point; mutual window
/// envy swaps the window bundles, and the window resets once it is EF.
std::pair<Allocation, SolverTrace> solve_two_agent_chores(const Instance& instance);

/// Two-agent goods solver, the mirror of the chores rule (each good goes to
/// an agent the other does not envy within the window). The cited original
/// is not restated in the source material, so the output is always
/// re-verified; a failure is an InternalError.
std::pair<Allocation, SolverTrace> solve_two_agent_goods(const Instance& instance);

/// Two item types: type-one items round-robin 1..n, type-two items reverse
/// round-robin n..1. type_of gives the per-item class (0/1).
Allocation solve_two_types(const Instance& instance, const std::vector<int>& type_of);

/// Generalized binary valuations (v_i(o_j) in {0, p_j}). Goods go to the
/// positive-valuing agent with the least bundle value; chores go to a
/// zero-valuing agent when one exists, else to the agent with the greatest
/// bundle value. Ties break to the lowest index. Output is also
/// Pareto-optimal.
Allocation solve_generalized_binary(const Instance& instance);

/// Single-peaked goods / single-dipped chores: balanced cyclic assignment
/// (argmin bundle size, lexicographic ties). The reverse directions are
/// unsupported (open in the source material).
Allocation solve_unimodal(const Instance& instance);

/// T = 2 solver: round one by round-robin picking with sequence (1..n)*,
/// round two with the reverse sequence. Chores rounds are padded with
/// zero-valued dummy chores up to a multiple of n (at least n) so every agent
/// picks equally often; dummies are stripped from the returned allocation.
Allocation solve_two_rounds(const Instance& instance);

/// Two-agent mixed manna: items one agent strictly likes and the other
/// strictly dislikes go to the fan; the rest run through the goods solver on
/// absolute values, after which the two agents swap their chore sub-bundles.
Allocation solve_mixed_two_agent(const Instance& instance);

struct AutoResult {
    std::optional<Allocation> allocation;  // empty: exhaustive search found no solution
    std::string tag;
    std::uint64_t search_nodes = 0;  // filled when the search fallback ran
};

/// Dispatch priority: generalized binary, two types, unimodal (valid
/// direction), two agents (kind-specific), T=2, then exhaustive search.
/// Multi-item rounds are flattened before class detection (except for the
/// T=2 solver, which needs the round structure natively). The returned
/// allocation is re-verified against the temporal checker.
AutoResult solve_auto(const Instance& instance,
                      std::uint64_t search_budget = kDefaultNodeBudget);

}  // namespace tefkit
