#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "tefkit/rational.hpp"

namespace tefkit {

enum class MannaKind { Goods, Chores, Mixed };

std::string to_string(MannaKind kind);
MannaKind manna_kind_from_string(const std::string& text);

/// An informed online fair division instance: agents, rounds of item ids, and
/// an agent x item matrix of exact rational values. Item ids are 0-based and
/// contiguous, labelled in non-decreasing round order, so every round is a
/// consecutive id block. Immutable after construction.
class Instance {
public:
    Instance(int n_agents, std::vector<std::vector<int>> rounds,
             std::vector<std::vector<Rational>> values, MannaKind kind);

    int n_agents() const { return n_agents_; }
    int n_items() const { return static_cast<int>(round_of_.size()); }
    int n_rounds() const { return static_cast<int>(rounds_.size()); }
    MannaKind kind() const { return kind_; }

    const std::vector<std::vector<int>>& rounds() const { return rounds_; }
    const std::vector<int>& round_items(int round_index) const { return rounds_.at(round_index); }

    const Rational& value(int agent, int item) const;
    const std::vector<Rational>& agent_values(int agent) const { return values_.at(agent); }

    // 0-based round containing the item.
    int round_of(int item) const;
    // Number of items in rounds 1..t (t is a 1-based round; t=0 gives 0).
    int prefix_item_count(int t) const;

    bool rounds_all_single_item() const;

    // Free-form provenance (gadget reductions record their source here).
    // Ignored by every algorithm; preserved by JSON round-trips.
    const std::optional<std::string>& metadata() const { return metadata_; }
    void set_metadata(std::string meta_json) { metadata_ = std::move(meta_json); }

    bool operator==(const Instance& other) const;

private:
    int n_agents_;
    std::vector<std::vector<int>> rounds_;
    std::vector<std::vector<Rational>> values_;  // agent-major
    MannaKind kind_;
    std::vector<int> round_of_;
    std::vector<int> prefix_counts_;  // prefix_counts_[t] = |O^t|, index 0..T
    std::optional<std::string> metadata_;
};

/// Total allocation: assignment[item] = receiving agent.
struct Allocation {
    std::vector<int> assignment;

    bool operator==(const Allocation& other) const = default;
};

/// Allocation of a prefix of rounds; -1 marks unassigned items.
struct PartialAllocation {
    std::vector<int> assignment;
};

/// Cumulative bundles A_i^t = A_i as above cap O^t after round t (1-based).
struct PrefixBundles {
    int round = 0;
    std::vector<std::vector<int>> bundles;  // per agent, ascending item ids
};

Rational bundle_value(const Instance& instance, int agent, std::span<const int> items);

PrefixBundles prefix_bundles(const Instance& instance, const Allocation& alloc, int t);

struct FlattenResult {
    Instance instance;  // m rounds of one item each, values and ids unchanged
    // boundary[k] = flattened round t' (1-based) with O^{k+1} = O-tilde^{t'},
    // i.e. the prefix item count of original rounds 1..k+1.
    std::vector<int> boundary;
};

/// The multi-item -> single-item transform: fairness verdicts at the mapped
/// boundaries coincide with verdicts on the original instance, and any
/// allocation transfers back unchanged (item ids are preserved).
FlattenResult flatten_single_item(const Instance& instance);

void validate_allocation(const Instance& instance, const Allocation& alloc);

// ---- JSON (canonical: sorted keys, reduced rationals, 2-space indent) ----

nlohmann::json instance_to_json(const Instance& instance);
Instance instance_from_json(const nlohmann::json& j);
std::string instance_to_string(const Instance& instance);
Instance instance_from_string(const std::string& text);

nlohmann::json allocation_to_json(const Allocation& alloc);
Allocation allocation_from_json(const nlohmann::json& j);
nlohmann::json partial_allocation_to_json(const PartialAllocation& partial);
PartialAllocation partial_allocation_from_json(const nlohmann::json& j);

std::string dump_canonical(const nlohmann::json& j);

}  // namespace tefkit
