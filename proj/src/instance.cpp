#include "tefkit/instance.hpp"

#include <algorithm>
#include <nlohmann/json.hpp>

#include "tefkit/errors.hpp"

namespace tefkit {

using nlohmann::json;

std::string to_string(MannaKind kind) {
    switch (kind) {
        case MannaKind::Goods: return "goods";
        case MannaKind::Chores: return "chores";
        case MannaKind::Mixed: return "mixed";
    }
    throw InternalError("unreachable manna kind");
}

MannaKind manna_kind_from_string(const std::string& text) {
    if (text == "goods") return MannaKind::Goods;
    if (text == "chores") return MannaKind::Chores;
    if (text == "mixed") return MannaKind::Mixed;
    throw InputError("unknown manna kind '" + text + "' (expected goods|chores|mixed)");
}

Instance::Instance(int n_agents, std::vector<std::vector<int>> rounds,
                   std::vector<std::vector<Rational>> values, MannaKind kind)
    : n_agents_(n_agents), rounds_(std::move(rounds)), values_(std::move(values)), kind_(kind) {
    if (n_agents_ <= 0) throw InputError("instance needs a positive number of agents");

    // Ids must be 0-based, contiguous, and non-decreasing across rounds, so
    // each round is the next consecutive block.
    int next_id = 0;
    prefix_counts_.push_back(0);
    for (std::size_t r = 0; r < rounds_.size(); ++r) {
        for (int id : rounds_[r]) {
            if (id != next_id) {
                throw InputError("round " + std::to_string(r + 1) +
                                 " breaks the non-decreasing id labelling: expected item " +
                                 std::to_string(next_id) + ", got " + std::to_string(id));
            }
            round_of_.push_back(static_cast<int>(r));
            ++next_id;
        }
        prefix_counts_.push_back(next_id);
    }

    const int m = next_id;
    if (values_.size() != static_cast<std::size_t>(n_agents_)) {
        throw InputError("values matrix has " + std::to_string(values_.size()) +
                         " rows, expected one per agent (" + std::to_string(n_agents_) + ")");
    }
    for (const auto& row : values_) {
        if (row.size() != static_cast<std::size_t>(m)) {
            throw InputError("values row has " + std::to_string(row.size()) +
                             " entries, expected one per item (" + std::to_string(m) + ")");
        }
    }

    // Kind constraints are validated eagerly.
    for (int i = 0; i < n_agents_; ++i) {
        for (int o = 0; o < m; ++o) {
            const Rational& v = values_[i][o];
            if (kind_ == MannaKind::Goods && v < 0) {
                throw InputError("goods instance has negative value v[" + std::to_string(i) +
                                 "][" + std::to_string(o) + "] = " + format_rational(v));
            }
            if (kind_ == MannaKind::Chores && v > 0) {
                throw InputError("chores instance has positive value v[" + std::to_string(i) +
                                 "][" + std::to_string(o) + "] = " + format_rational(v));
            }
        }
    }
}

const Rational& Instance::value(int agent, int item) const {
    if (agent < 0 || agent >= n_agents_) {
        throw InputError("agent index " + std::to_string(agent) + " out of range");
    }
    if (item < 0 || item >= n_items()) {
        throw InputError("unknown item id " + std::to_string(item));
    }
    return values_[agent][item];
}

int Instance::round_of(int item) const {
    if (item < 0 || item >= n_items()) {
        throw InputError("unknown item id " + std::to_string(item));
    }
    return round_of_[item];
}

int Instance::prefix_item_count(int t) const {
    if (t < 0 || t > n_rounds()) {
        throw InputError("round " + std::to_string(t) + " out of range [0, " +
                         std::to_string(n_rounds()) + "]");
    }
    return prefix_counts_[t];
}

bool Instance::rounds_all_single_item() const {
    return std::all_of(rounds_.begin(), rounds_.end(),
                       [](const auto& r) { return r.size() == 1; });
}

bool Instance::operator==(const Instance& other) const {
    return n_agents_ == other.n_agents_ && rounds_ == other.rounds_ &&
           values_ == other.values_ && kind_ == other.kind_ && metadata_ == other.metadata_;
}

Rational bundle_value(const Instance& instance, int agent, std::span<const int> items) {
    if (agent < 0 || agent >= instance.n_agents()) {
        throw InputError("agent index " + std::to_string(agent) + " out of range");
    }
    Rational sum = 0;
    for (int id : items) sum += instance.value(agent, id);
    return sum;
}

PrefixBundles prefix_bundles(const Instance& instance, const Allocation& alloc, int t) {
    if (t < 1 || t > instance.n_rounds()) {
        throw InputError("round " + std::to_string(t) + " out of range [1, " +
                         std::to_string(instance.n_rounds()) + "]");
    }
    validate_allocation(instance, alloc);
    PrefixBundles result;
    result.round = t;
    result.bundles.resize(instance.n_agents());
    const int upto = instance.prefix_item_count(t);
    for (int o = 0; o < upto; ++o) {
        result.bundles[alloc.assignment[o]].push_back(o);
    }
    return result;
}

FlattenResult flatten_single_item(const Instance& instance) {
    const int m = instance.n_items();
    std::vector<std::vector<int>> rounds(m);
    for (int o = 0; o < m; ++o) rounds[o] = {o};
    std::vector<std::vector<Rational>> values;
    values.reserve(instance.n_agents());
    for (int i = 0; i < instance.n_agents(); ++i) values.push_back(instance.agent_values(i));
    Instance flat(instance.n_agents(), std::move(rounds), std::move(values), instance.kind());

    std::vector<int> boundary;
    boundary.reserve(instance.n_rounds());
    for (int t = 1; t <= instance.n_rounds(); ++t) {
        boundary.push_back(instance.prefix_item_count(t));
    }
    return FlattenResult{std::move(flat), std::move(boundary)};
}

void validate_allocation(const Instance& instance, const Allocation& alloc) {
    if (alloc.assignment.size() != static_cast<std::size_t>(instance.n_items())) {
        throw InputError("allocation covers " + std::to_string(alloc.assignment.size()) +
                         " items, instance has " + std::to_string(instance.n_items()));
    }
    for (std::size_t o = 0; o < alloc.assignment.size(); ++o) {
        const int a = alloc.assignment[o];
        if (a < 0 || a >= instance.n_agents()) {
            throw InputError("item " + std::to_string(o) + " assigned to invalid agent " +
                             std::to_string(a));
        }
    }
}

// ---- JSON ----

std::string dump_canonical(const json& j) {
    return j.dump(2) + "\n";
}

json instance_to_json(const Instance& instance) {
    json j;
    j["agents"] = instance.n_agents();
    j["kind"] = to_string(instance.kind());
    j["rounds"] = instance.rounds();
    json values = json::array();
    for (int i = 0; i < instance.n_agents(); ++i) {
        json row = json::array();
        for (const Rational& v : instance.agent_values(i)) row.push_back(format_rational(v));
        values.push_back(std::move(row));
    }
    j["values"] = std::move(values);
    if (instance.metadata()) j["meta"] = json::parse(*instance.metadata());
    return j;
}

namespace {

Rational rational_from_json(const json& v) {
    if (v.is_string()) return parse_rational(v.get<std::string>());
    if (v.is_number_integer()) return Rational(static_cast<long>(v.get<std::int64_t>()));
    throw InputError("values must be strings like \"11/10\" or integers; got " + v.dump());
}

}  // namespace

Instance instance_from_json(const json& j) {
    if (!j.is_object()) throw InputError("instance JSON must be an object");
    for (const char* key : {"agents", "kind", "rounds", "values"}) {
        if (!j.contains(key)) throw InputError(std::string("instance JSON missing '") + key + "'");
    }
    const int n = j.at("agents").get<int>();
    const MannaKind kind = manna_kind_from_string(j.at("kind").get<std::string>());
    auto rounds = j.at("rounds").get<std::vector<std::vector<int>>>();
    std::vector<std::vector<Rational>> values;
    for (const auto& row : j.at("values")) {
        std::vector<Rational> parsed;
        for (const auto& v : row) parsed.push_back(rational_from_json(v));
        values.push_back(std::move(parsed));
    }
    Instance instance(n, std::move(rounds), std::move(values), kind);
    if (j.contains("meta")) instance.set_metadata(j.at("meta").dump());
    return instance;
}

std::string instance_to_string(const Instance& instance) {
    return dump_canonical(instance_to_json(instance));
}

Instance instance_from_string(const std::string& text) {
    return instance_from_json(json::parse(text));
}

json allocation_to_json(const Allocation& alloc) {
    return json{{"assignment", alloc.assignment}};
}

Allocation allocation_from_json(const json& j) {
    if (!j.is_object() || !j.contains("assignment")) {
        throw InputError("allocation JSON must be {\"assignment\": [...]}");
    }
    Allocation alloc;
    for (const auto& v : j.at("assignment")) {
        if (v.is_null()) {
            throw InputError("allocation has unassigned items; use a partial allocation input");
        }
        alloc.assignment.push_back(v.get<int>());
    }
    return alloc;
}

json partial_allocation_to_json(const PartialAllocation& partial) {
    json arr = json::array();
    for (int a : partial.assignment) {
        if (a < 0) {
            arr.push_back(nullptr);
        } else {
            arr.push_back(a);
        }
    }
    return json{{"assignment", std::move(arr)}};
}

PartialAllocation partial_allocation_from_json(const json& j) {
    if (!j.is_object() || !j.contains("assignment")) {
        throw InputError("partial allocation JSON must be {\"assignment\": [...]}");
    }
    PartialAllocation partial;
    for (const auto& v : j.at("assignment")) {
        partial.assignment.push_back(v.is_null() ? -1 : v.get<int>());
    }
    return partial;
}

}  // namespace tefkit
