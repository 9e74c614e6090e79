#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "tefkit/fairness.hpp"
#include "tefkit/instance.hpp"

namespace tefkit {

enum class SearchTarget { TEF1, TEFX, TEF1andPO, RepetitiveTEF1 };
enum class SearchMode { First, All, Count };
enum class SearchOutcome { Found, None, BudgetExceeded };

std::string to_string(SearchTarget target);
SearchTarget search_target_from_string(const std::string& text);
std::string to_string(SearchMode mode);
SearchMode search_mode_from_string(const std::string& text);
std::string to_string(SearchOutcome outcome);

inline constexpr std::uint64_t kDefaultNodeBudget = 1'000'000'000;

struct SearchQuery {
    SearchTarget target = SearchTarget::TEF1;
    SearchMode mode = SearchMode::First;
    std::optional<PartialAllocation> start;  // must be temporally fair up to its round
    std::uint64_t node_budget = kDefaultNodeBudget;
    bool symmetry_breaking = false;
    std::uint64_t pareto_cap = kDefaultParetoCap;  // TEF1andPO only
    bool report_progress = false;                  // stderr heartbeat on long runs
};

struct SearchResult {
    SearchOutcome outcome = SearchOutcome::None;
    // First: at most one entry; All: every solution in canonical (DFS/lex)
    // order; Count: empty, see `count`.
    std::vector<Allocation> allocations;
    std::uint64_t count = 0;
    std::uint64_t nodes_explored = 0;
    double wall_time_ms = 0.0;
};

nlohmann::json search_result_to_json(const SearchResult& result);

/// Depth-first search over rounds, assigning each item to each agent in index
/// order, pruning every branch whose prefix fails the target relation at a
/// round boundary (sound: temporal fairness constrains exactly the round
/// prefixes). `None` is only reported after full exhaustion within budget.
/// TEF1andPO filters complete TEF1 allocations through the exhaustive PO
/// test; RepetitiveTEF1 enumerates round-1 allocations, replicates them
/// across all rounds by item position, and checks every boundary.
SearchResult search(const Instance& instance, const SearchQuery& query);

/// Continue the backtracking from a fixed prefix covering O^t for some round
/// t. The prefix itself is re-verified against the target relation; a prefix
/// that is not temporally fair up to its round is a precondition error.
SearchResult search_from_partial(const Instance& instance, const PartialAllocation& partial,
                                 SearchQuery query);

/// Replica of the hardness appendix's gadget-verification program over the
/// fixed 21-good, 3-agent tail: enumerates all allocations that are EF1 after
/// every single good. With `envy_flag`, the EF1 test for the ordered pair
/// (envy_from, envy_to) carries one unit of envy from the (unmodelled) prefix
/// rounds: the removal-adjusted value of the envied bundle is increased by 1
/// and the check also applies while that bundle is empty. Agents are 0-based
/// (0..2).
SearchResult appendix_tail_search(bool envy_flag, int envy_from = 0, int envy_to = 1);

}  // namespace tefkit
