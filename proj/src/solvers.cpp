#include "tefkit/solvers.hpp"

#include <algorithm>
#include <nlohmann/json.hpp>

#include "tefkit/errors.hpp"
#include "tefkit/fairness.hpp"

namespace tefkit {

using nlohmann::json;

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw ClassError(msg);
}

void require_single_item_rounds(const Instance& instance, const char* solver) {
    require(instance.rounds_all_single_item(),
            std::string(solver) + " expects one item per round; flatten the instance first");
}

std::optional<int> weakly_unimodal_peak(const std::vector<Rational>& v) {
    if (v.empty()) return std::nullopt;
    std::size_t k = 0;
    while (k + 1 < v.size() && v[k] <= v[k + 1]) ++k;
    for (std::size_t j = k; j + 1 < v.size(); ++j) {
        if (v[j] < v[j + 1]) return std::nullopt;
    }
    return static_cast<int>(k);
}

std::optional<int> weakly_unimodal_dip(const std::vector<Rational>& v) {
    if (v.empty()) return std::nullopt;
    std::size_t k = 0;
    while (k + 1 < v.size() && v[k] >= v[k + 1]) ++k;
    for (std::size_t j = k; j + 1 < v.size(); ++j) {
        if (v[j] > v[j + 1]) return std::nullopt;
    }
    return static_cast<int>(k);
}

}  // namespace

ClassReport detect_class(const Instance& instance) {
    const int n = instance.n_agents();
    const int m = instance.n_items();
    ClassReport report;
    report.two_agents = n == 2;
    report.two_rounds = instance.n_rounds() == 2;
    report.rounds_single_item = instance.rounds_all_single_item();

    report.identical_valuations = true;
    for (int i = 1; i < n && report.identical_valuations; ++i) {
        report.identical_valuations = instance.agent_values(i) == instance.agent_values(0);
    }

    // Two types: at most two distinct per-item value vectors, classes in
    // first-seen order.
    std::vector<std::vector<Rational>> classes;
    report.two_types = true;
    for (int o = 0; o < m && report.two_types; ++o) {
        std::vector<Rational> column;
        column.reserve(n);
        for (int i = 0; i < n; ++i) column.push_back(instance.value(i, o));
        auto it = std::find(classes.begin(), classes.end(), column);
        if (it == classes.end()) {
            if (classes.size() == 2) {
                report.two_types = false;
                break;
            }
            classes.push_back(std::move(column));
            report.type_of.push_back(static_cast<int>(classes.size()) - 1);
        } else {
            report.type_of.push_back(static_cast<int>(it - classes.begin()));
        }
    }
    if (!report.two_types) report.type_of.clear();

    report.generalized_binary = true;
    for (int o = 0; o < m && report.generalized_binary; ++o) {
        Rational price(0);
        bool seen = false;
        for (int i = 0; i < n; ++i) {
            const Rational& v = instance.value(i, o);
            if (v == 0) continue;
            if (!seen) {
                price = v;
                seen = true;
            } else if (v != price) {
                report.generalized_binary = false;
                break;
            }
        }
        if (report.generalized_binary) report.item_price.push_back(price);
    }
    if (!report.generalized_binary) report.item_price.clear();

    if (report.rounds_single_item && m > 0) {
        report.single_peaked = true;
        report.single_dipped = true;
        for (int i = 0; i < n; ++i) {
            const auto peak = weakly_unimodal_peak(instance.agent_values(i));
            const auto dip = weakly_unimodal_dip(instance.agent_values(i));
            if (peak) {
                report.peak_item.push_back(*peak);
            } else {
                report.single_peaked = false;
            }
            if (dip) {
                report.dip_item.push_back(*dip);
            } else {
                report.single_dipped = false;
            }
        }
        if (!report.single_peaked) report.peak_item.clear();
        if (!report.single_dipped) report.dip_item.clear();
    }
    return report;
}

json class_report_to_json(const ClassReport& report) {
    json j;
    j["two_agents"] = report.two_agents;
    j["two_rounds"] = report.two_rounds;
    j["rounds_single_item"] = report.rounds_single_item;
    j["identical_valuations"] = report.identical_valuations;
    j["two_types"] = report.two_types;
    j["generalized_binary"] = report.generalized_binary;
    j["single_peaked"] = report.single_peaked;
    j["single_dipped"] = report.single_dipped;
    if (report.two_types) j["type_of"] = report.type_of;
    if (report.generalized_binary) {
        json prices = json::array();
        for (const Rational& p : report.item_price) prices.push_back(format_rational(p));
        j["item_price"] = std::move(prices);
    }
    if (report.single_peaked) j["peak_item"] = report.peak_item;
    if (report.single_dipped) j["dip_item"] = report.dip_item;
    return j;
}

json solver_trace_to_json(const SolverTrace& trace) {
    return json{{"choices", trace.choices},
                {"swaps", trace.swap_rounds},
                {"resets", trace.reset_rounds}};
}

// ---- two-agent window machinery ----

namespace {

struct WindowState {
    const Instance& inst;
    std::vector<int> assignment;
    std::vector<std::vector<int>> window_items{2};  // since the last reset
    Rational wv[2][2];                              // wv[viewer][owner]

    explicit WindowState(const Instance& instance)
        : inst(instance), assignment(instance.n_items(), -1) {}

    void give(int item, int owner) {
        assignment[item] = owner;
        window_items[owner].push_back(item);
        for (int i = 0; i < 2; ++i) wv[i][owner] += inst.value(i, item);
    }

    bool mutual_window_envy() const {
        return wv[0][0] < wv[0][1] && wv[1][1] < wv[1][0];
    }

    bool window_ef() const {
        return wv[0][0] >= wv[0][1] && wv[1][1] >= wv[1][0];
    }

    void swap_windows() {
        for (int item : window_items[0]) assignment[item] = 1;
        for (int item : window_items[1]) assignment[item] = 0;
        std::swap(window_items[0], window_items[1]);
        std::swap(wv[0][0], wv[0][1]);
        std::swap(wv[1][0], wv[1][1]);
    }

    void reset() {
        window_items[0].clear();
        window_items[1].clear();
        for (int i = 0; i < 2; ++i) {
            wv[i][0] = 0;
            wv[i][1] = 0;
        }
    }
};

std::pair<Allocation, SolverTrace> run_two_agent(const Instance& instance, bool goods_rule) {
    WindowState state(instance);
    SolverTrace trace;
    for (int t = 0; t < instance.n_items(); ++t) {
        // Chores go to an agent that does not envy in the window (its new
        // envy is then removable by dropping the chore it just received);
        // goods go to an agent that is not envied (the opponent's new envy is
        // removable by dropping the good). The no-mutual-envy invariant keeps
        // both rules well-defined, and ties hand the item to agent 0.
        const bool to_agent0 = goods_rule ? state.wv[1][1] >= state.wv[1][0]
                                          : state.wv[0][0] >= state.wv[0][1];
        const int receiver = to_agent0 ? 0 : 1;
        state.give(t, receiver);
        trace.choices.push_back(receiver);
        if (state.mutual_window_envy()) {
            state.swap_windows();
            trace.swap_rounds.push_back(t + 1);
        }
        if (state.window_ef()) {
            state.reset();
            trace.reset_rounds.push_back(t + 1);
        }
    }
    return {Allocation{std::move(state.assignment)}, std::move(trace)};
}

}  // namespace

Allocation replay_trace(const Instance& instance, const SolverTrace& trace) {
    if (trace.choices.size() != static_cast<std::size_t>(instance.n_items())) {
        throw InputError("trace has " + std::to_string(trace.choices.size()) +
                         " choices, instance has " + std::to_string(instance.n_items()) +
                         " items");
    }
    WindowState state(instance);
    auto swap_it = trace.swap_rounds.begin();
    auto reset_it = trace.reset_rounds.begin();
    for (int t = 0; t < instance.n_items(); ++t) {
        state.give(t, trace.choices[t]);
        if (swap_it != trace.swap_rounds.end() && *swap_it == t + 1) {
            state.swap_windows();
            ++swap_it;
        }
        if (reset_it != trace.reset_rounds.end() && *reset_it == t + 1) {
            state.reset();
            ++reset_it;
        }
    }
    return Allocation{std::move(state.assignment)};
}

std::pair<Allocation, SolverTrace> solve_two_agent_chores(const Instance& instance) {
    require(instance.n_agents() == 2, "two-agent chores solver needs exactly two agents");
    require(instance.kind() == MannaKind::Chores, "two-agent chores solver needs a chores instance");
    require_single_item_rounds(instance, "two-agent chores solver");
    auto result = run_two_agent(instance, /*goods_rule=*/false);
    if (!check_temporal(instance, result.first, Relation::EF1).holds) {
        throw InternalError("two-agent chores solver produced a non-TEF1 allocation");
    }
    return result;
}

std::pair<Allocation, SolverTrace> solve_two_agent_goods(const Instance& instance) {
    require(instance.n_agents() == 2, "two-agent goods solver needs exactly two agents");
    require(instance.kind() == MannaKind::Goods, "two-agent goods solver needs a goods instance");
    require_single_item_rounds(instance, "two-agent goods solver");
    auto result = run_two_agent(instance, /*goods_rule=*/true);
    if (!check_temporal(instance, result.first, Relation::EF1).holds) {
        throw InternalError("two-agent goods solver produced a non-TEF1 allocation");
    }
    return result;
}

Allocation solve_two_types(const Instance& instance, const std::vector<int>& type_of) {
    require(instance.kind() != MannaKind::Mixed, "two-types solver covers goods or chores");
    require_single_item_rounds(instance, "two-types solver");
    const int n = instance.n_agents();
    const int m = instance.n_items();
    if (type_of.size() != static_cast<std::size_t>(m)) {
        throw ClassError("type partition covers " + std::to_string(type_of.size()) +
                         " items, instance has " + std::to_string(m));
    }
    // Each agent must value all items of a class equally.
    for (int r = 0; r < 2; ++r) {
        int first = -1;
        for (int o = 0; o < m; ++o) {
            if (type_of[o] != r) {
                if (type_of[o] != 0 && type_of[o] != 1) {
                    throw ClassError("type partition entries must be 0 or 1");
                }
                continue;
            }
            if (first < 0) {
                first = o;
                continue;
            }
            for (int i = 0; i < n; ++i) {
                if (instance.value(i, o) != instance.value(i, first)) {
                    throw ClassError("items " + std::to_string(first) + " and " +
                                     std::to_string(o) +
                                     " share a type but agent " + std::to_string(i) +
                                     " values them differently");
                }
            }
        }
    }

    Allocation alloc;
    alloc.assignment.assign(m, -1);
    int alpha = 0;       // next receiver of a type-one item, ascending
    int beta = n - 1;    // next receiver of a type-two item, descending
    for (int o = 0; o < m; ++o) {
        if (alpha == n) {
            alpha = 0;
        } else if (beta == -1) {
            beta = n - 1;
        }
        if (type_of[o] == 0) {
            alloc.assignment[o] = alpha++;
        } else {
            alloc.assignment[o] = beta--;
        }
    }
    return alloc;
}

Allocation solve_generalized_binary(const Instance& instance) {
    require(instance.kind() != MannaKind::Mixed,
            "generalized-binary solver covers goods or chores");
    require_single_item_rounds(instance, "generalized-binary solver");
    const ClassReport report = detect_class(instance);
    require(report.generalized_binary,
            "instance does not have generalized binary valuations");

    const int n = instance.n_agents();
    const int m = instance.n_items();
    std::vector<Rational> utility(n);
    Allocation alloc;
    alloc.assignment.assign(m, -1);
    const bool goods = instance.kind() == MannaKind::Goods;

    for (int o = 0; o < m; ++o) {
        int receiver = 0;
        if (goods) {
            receiver = -1;
            for (int i = 0; i < n; ++i) {
                if (instance.value(i, o) <= 0) continue;
                if (receiver < 0 || utility[i] < utility[receiver]) receiver = i;
            }
            if (receiver < 0) receiver = 0;  // nobody values it
        } else {
            receiver = -1;
            for (int i = 0; i < n; ++i) {
                if (instance.value(i, o) == 0) {
                    receiver = i;
                    break;
                }
            }
            if (receiver < 0) {
                receiver = 0;
                for (int i = 1; i < n; ++i) {
                    if (utility[i] > utility[receiver]) receiver = i;
                }
            }
        }
        alloc.assignment[o] = receiver;
        utility[receiver] += instance.value(receiver, o);
    }
    return alloc;
}

Allocation solve_unimodal(const Instance& instance) {
    require_single_item_rounds(instance, "unimodal solver");
    const ClassReport report = detect_class(instance);
    if (instance.kind() == MannaKind::Goods) {
        require(report.single_peaked,
                "goods need a single-peaked profile (single-dipped goods are unsupported)");
    } else if (instance.kind() == MannaKind::Chores) {
        require(report.single_dipped,
                "chores need a single-dipped profile (single-peaked chores are unsupported)");
    } else {
        throw ClassError("unimodal solver covers goods or chores");
    }

    const int n = instance.n_agents();
    Allocation alloc;
    alloc.assignment.assign(instance.n_items(), -1);
    std::vector<int> bundle_size(n, 0);
    for (int o = 0; o < instance.n_items(); ++o) {
        int receiver = 0;
        for (int i = 1; i < n; ++i) {
            if (bundle_size[i] < bundle_size[receiver]) receiver = i;
        }
        alloc.assignment[o] = receiver;
        ++bundle_size[receiver];
    }
    return alloc;
}

namespace {

// One picking pass over a round. `order[k]` is the k-th picker; the sequence
// cycles until real items and dummies are gone. Value ties prefer the lowest
// item id; dummies (zero value, ids past the real ones) lose ties to real
// zero-valued items.
void round_robin_pick(const Instance& instance, const std::vector<int>& items, int dummies,
                      const std::vector<int>& order, std::vector<int>& assignment) {
    std::vector<bool> taken(items.size(), false);
    int dummies_left = dummies;
    std::size_t remaining = items.size() + static_cast<std::size_t>(dummies);
    std::size_t turn = 0;
    while (remaining > 0) {
        const int agent = order[turn % order.size()];
        ++turn;
        int best = -1;
        for (std::size_t k = 0; k < items.size(); ++k) {
            if (taken[k]) continue;
            if (best < 0 || instance.value(agent, items[k]) >
                                instance.value(agent, items[best])) {
                best = static_cast<int>(k);
            }
        }
        const bool dummy_wins =
            dummies_left > 0 &&
            (best < 0 || instance.value(agent, items[best]) < 0);
        if (dummy_wins) {
            --dummies_left;
        } else if (best >= 0) {
            taken[best] = true;
            assignment[items[best]] = agent;
        }
        --remaining;
    }
}

}  // namespace

Allocation solve_two_rounds(const Instance& instance) {
    require(instance.n_rounds() == 2, "T=2 solver needs exactly two rounds");
    require(instance.kind() != MannaKind::Mixed, "T=2 solver covers goods or chores");
    const int n = instance.n_agents();

    Allocation alloc;
    alloc.assignment.assign(instance.n_items(), -1);
    std::vector<int> forward(n), reverse(n);
    for (int i = 0; i < n; ++i) {
        forward[i] = i;
        reverse[i] = n - 1 - i;
    }
    for (int r = 0; r < 2; ++r) {
        const auto& items = instance.round_items(r);
        int dummies = 0;
        if (instance.kind() == MannaKind::Chores) {
            // Every agent must pick equally often for the picking-order
            // envy bound to hold, so pad to a multiple of n (at least n).
            const int size = static_cast<int>(items.size());
            int padded = std::max(n, ((size + n - 1) / n) * n);
            dummies = padded - size;
        }
        round_robin_pick(instance, items, dummies, r == 0 ? forward : reverse, alloc.assignment);
    }
    return alloc;
}

Allocation solve_mixed_two_agent(const Instance& instance) {
    require(instance.n_agents() == 2, "mixed-manna solver needs exactly two agents");
    require_single_item_rounds(instance, "mixed-manna solver");
    const int m = instance.n_items();

    Allocation alloc;
    alloc.assignment.assign(m, -1);

    // Items with strictly opposite signs go to their fan; the remainder
    // sign-agrees and runs through the goods rule on absolute values.
    std::vector<int> remaining;
    for (int o = 0; o < m; ++o) {
        const Rational& v0 = instance.value(0, o);
        const Rational& v1 = instance.value(1, o);
        if (v0 > 0 && v1 < 0) {
            alloc.assignment[o] = 0;
        } else if (v1 > 0 && v0 < 0) {
            alloc.assignment[o] = 1;
        } else {
            remaining.push_back(o);
        }
    }

    std::vector<std::vector<int>> sub_rounds(remaining.size());
    for (std::size_t k = 0; k < remaining.size(); ++k) sub_rounds[k] = {static_cast<int>(k)};
    std::vector<std::vector<Rational>> sub_values(2);
    for (int i = 0; i < 2; ++i) {
        for (int o : remaining) sub_values[i].push_back(abs(instance.value(i, o)));
    }
    const Instance sub(2, std::move(sub_rounds), std::move(sub_values), MannaKind::Goods);
    const Allocation sub_alloc = solve_two_agent_goods(sub).first;

    for (std::size_t k = 0; k < remaining.size(); ++k) {
        const int o = remaining[k];
        const bool chore = instance.value(0, o) < 0 || instance.value(1, o) < 0;
        const int owner = sub_alloc.assignment[k];
        alloc.assignment[o] = chore ? 1 - owner : owner;
    }
    return alloc;
}

AutoResult solve_auto(const Instance& instance, std::uint64_t search_budget) {
    const bool flat_needed = !instance.rounds_all_single_item();
    const std::optional<FlattenResult> flat =
        flat_needed ? std::optional<FlattenResult>(flatten_single_item(instance)) : std::nullopt;
    const Instance& work = flat ? flat->instance : instance;
    const ClassReport report = detect_class(work);
    const MannaKind kind = instance.kind();
    const bool goods_or_chores = kind != MannaKind::Mixed;

    AutoResult result;
    if (report.generalized_binary && goods_or_chores) {
        result.allocation = solve_generalized_binary(work);
        result.tag = kind == MannaKind::Goods ? "gen-binary-goods" : "gen-binary-chores";
    } else if (report.two_types && goods_or_chores) {
        result.allocation = solve_two_types(work, report.type_of);
        result.tag = "two-types";
    } else if (report.single_peaked && kind == MannaKind::Goods) {
        result.allocation = solve_unimodal(work);
        result.tag = "single-peaked-goods";
    } else if (report.single_dipped && kind == MannaKind::Chores) {
        result.allocation = solve_unimodal(work);
        result.tag = "single-dipped-chores";
    } else if (report.two_agents) {
        if (kind == MannaKind::Goods) {
            result.allocation = solve_two_agent_goods(work).first;
            result.tag = "two-agent-goods";
        } else if (kind == MannaKind::Chores) {
            result.allocation = solve_two_agent_chores(work).first;
            result.tag = "two-agent-chores";
        } else {
            result.allocation = solve_mixed_two_agent(work);
            result.tag = "mixed-two-agent";
        }
    } else if (instance.n_rounds() == 2 && goods_or_chores) {
        result.allocation = solve_two_rounds(instance);
        result.tag = "two-rounds";
    } else {
        SearchQuery query;
        query.target = SearchTarget::TEF1;
        query.mode = SearchMode::First;
        query.node_budget = search_budget;
        const SearchResult found = search(instance, query);
        result.tag = "search";
        result.search_nodes = found.nodes_explored;
        if (found.outcome == SearchOutcome::BudgetExceeded) {
            throw BudgetError("exhaustive TEF1 search exceeded the node budget of " +
                              std::to_string(search_budget) + " (" +
                              std::to_string(found.nodes_explored) + " nodes)");
        }
        if (found.outcome == SearchOutcome::Found) result.allocation = found.allocations.front();
    }

    if (result.allocation &&
        !check_temporal(instance, *result.allocation, Relation::EF1).holds) {
        throw InternalError("solver '" + result.tag + "' produced a non-TEF1 allocation");
    }
    return result;
}

}  // namespace tefkit
