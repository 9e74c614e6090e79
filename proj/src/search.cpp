#include "tefkit/search.hpp"

#include <chrono>
#include <map>
#include <cstdio>
#include <limits>
#include <nlohmann/json.hpp>

#include "tefkit/errors.hpp"
#include "tefkit/gadgets.hpp"

namespace tefkit {

using nlohmann::json;

std::string to_string(SearchTarget target) {
    switch (target) {
        case SearchTarget::TEF1: return "tef1";
        case SearchTarget::TEFX: return "tefx";
        case SearchTarget::TEF1andPO: return "tef1po";
        case SearchTarget::RepetitiveTEF1: return "repetitive";
    }
    throw InternalError("unreachable search target");
}

SearchTarget search_target_from_string(const std::string& text) {
    if (text == "tef1") return SearchTarget::TEF1;
    if (text == "tefx") return SearchTarget::TEFX;
    if (text == "tef1po") return SearchTarget::TEF1andPO;
    if (text == "repetitive") return SearchTarget::RepetitiveTEF1;
    throw InputError("unknown search target '" + text + "' (expected tef1|tefx|tef1po|repetitive)");
}

std::string to_string(SearchMode mode) {
    switch (mode) {
        case SearchMode::First: return "first";
        case SearchMode::All: return "all";
        case SearchMode::Count: return "count";
    }
    throw InternalError("unreachable search mode");
}

SearchMode search_mode_from_string(const std::string& text) {
    if (text == "first") return SearchMode::First;
    if (text == "all") return SearchMode::All;
    if (text == "count") return SearchMode::Count;
    throw InputError("unknown search mode '" + text + "' (expected first|all|count)");
}

std::string to_string(SearchOutcome outcome) {
    switch (outcome) {
        case SearchOutcome::Found: return "found";
        case SearchOutcome::None: return "none";
        case SearchOutcome::BudgetExceeded: return "budget-exceeded";
    }
    throw InternalError("unreachable search outcome");
}

json search_result_to_json(const SearchResult& result) {
    json allocations = json::array();
    for (const Allocation& a : result.allocations) allocations.push_back(a.assignment);
    return json{{"outcome", to_string(result.outcome)},
                {"count", result.count},
                {"nodes", result.nodes_explored},
                {"wall_time_ms", result.wall_time_ms},
                {"allocations", std::move(allocations)}};
}

namespace {

// EF1 offset carried into the tail program's check for one ordered pair.
struct OffsetSpec {
    int from = 0;
    int to = 0;
    Rational amount;
};

struct ScaledValues {
    std::vector<Integer> values;  // viewer-major, n*m
    Integer offset;               // OffsetSpec::amount in scaled units
    bool fits_int64 = false;
};

ScaledValues scale_values(const Instance& instance, const Rational& offset_amount) {
    const int n = instance.n_agents();
    const int m = instance.n_items();
    Integer lcm(1);
    for (int i = 0; i < n; ++i) {
        for (int o = 0; o < m; ++o) {
            mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(),
                    instance.value(i, o).get_den().get_mpz_t());
        }
    }
    mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), offset_amount.get_den().get_mpz_t());

    ScaledValues out;
    out.values.resize(static_cast<std::size_t>(n) * m);
    Integer maxabs(0);
    for (int i = 0; i < n; ++i) {
        for (int o = 0; o < m; ++o) {
            const Rational& v = instance.value(i, o);
            Integer scaled = v.get_num() * (lcm / v.get_den());
            if (mpz_cmpabs(scaled.get_mpz_t(), maxabs.get_mpz_t()) > 0) maxabs = abs(scaled);
            out.values[static_cast<std::size_t>(i) * m + o] = std::move(scaled);
        }
    }
    out.offset = offset_amount.get_num() * (lcm / offset_amount.get_den());
    if (mpz_cmpabs(out.offset.get_mpz_t(), maxabs.get_mpz_t()) > 0) maxabs = abs(out.offset);

    // All sums stay below (m+2)*maxabs; keep a wide margin below 2^62.
    Integer bound = (maxabs + 1) * (m + 2);
    out.fits_int64 = mpz_sizeinbase(bound.get_mpz_t(), 2) <= 62;
    return out;
}

template <class Int>
Int to_kernel_int(const Integer& z);

template <>
std::int64_t to_kernel_int<std::int64_t>(const Integer& z) {
    return static_cast<std::int64_t>(z.get_si());
}

template <>
Integer to_kernel_int<Integer>(const Integer& z) {
    return z;
}

template <class Int>
bool int_vector_dominates(const std::vector<Int>& a, const std::vector<Int>& b) {
    bool strict = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] < b[i]) return false;
        if (a[i] > b[i]) strict = true;
    }
    return strict;
}

template <class Int>
class Engine {
public:
    Engine(const Instance& instance, const ScaledValues& scaled, const SearchQuery& query,
           Relation relation, const std::optional<OffsetSpec>& offset, bool pin_first_item,
           int start_items)
        : inst_(instance),
          n_(instance.n_agents()),
          m_(instance.n_items()),
          kind_(instance.kind()),
          relation_(relation),
          target_(query.target),
          mode_(query.mode),
          budget_(query.node_budget),
          progress_(query.report_progress),
          pin_first_item_(pin_first_item),
          start_items_(start_items),
          sums_(n_ * n_),
          maxv_(n_ * n_),
          minv_(n_ * n_),
          cnt_(n_, 0),
          prev_max_(static_cast<std::size_t>(m_) * n_),
          prev_min_(static_cast<std::size_t>(m_) * n_),
          assignment_(m_, -1),
          round_end_(m_, 0),
          diag_(n_) {
        values_.reserve(scaled.values.size());
        for (const Integer& z : scaled.values) values_.push_back(to_kernel_int<Int>(z));
        if (offset) {
            has_offset_ = true;
            offset_from_ = offset->from;
            offset_to_ = offset->to;
            offset_value_ = to_kernel_int<Int>(scaled.offset);
        }
        for (int t = 1; t <= inst_.n_rounds(); ++t) {
            round_end_[inst_.prefix_item_count(t) - 1] = 1;
        }
        if (target_ == SearchTarget::RepetitiveTEF1) {
            effective_m_ = inst_.n_rounds() == 0 ? 0 : static_cast<int>(inst_.rounds()[0].size());
        } else {
            effective_m_ = m_;
        }
        if (target_ == SearchTarget::TEF1andPO) build_frontier(query.pareto_cap);
    }

    // Pushes the fixed prefix, verifying the target relation at every
    // completed boundary.
    void apply_start(const PartialAllocation& partial) {
        for (int o = 0; o < start_items_; ++o) {
            push(o, partial.assignment[o]);
            if (round_end_[o] && !boundary_ok()) {
                throw InputError("partial allocation is not temporally fair up to round " +
                                 std::to_string(inst_.round_of(o) + 1) +
                                 "; search_from_partial requires a fair prefix");
            }
        }
    }

    void run() { dfs(start_items_); }

    std::vector<Allocation> found;
    std::uint64_t count = 0;
    std::uint64_t nodes = 0;
    bool exceeded = false;

private:
    void push(int item, int owner) {
        Int* pm = &prev_max_[static_cast<std::size_t>(depth_) * n_];
        Int* pn = &prev_min_[static_cast<std::size_t>(depth_) * n_];
        const bool fresh = cnt_[owner] == 0;
        for (int i = 0; i < n_; ++i) {
            const Int& v = values_[static_cast<std::size_t>(i) * m_ + item];
            Int& mx = maxv_[i * n_ + owner];
            Int& mn = minv_[i * n_ + owner];
            pm[i] = mx;
            pn[i] = mn;
            if (fresh) {
                mx = v;
                mn = v;
            } else {
                if (v > mx) mx = v;
                if (v < mn) mn = v;
            }
            sums_[i * n_ + owner] += v;
        }
        ++cnt_[owner];
        assignment_[item] = owner;
        ++depth_;
    }

    void pop(int item, int owner) {
        --depth_;
        const Int* pm = &prev_max_[static_cast<std::size_t>(depth_) * n_];
        const Int* pn = &prev_min_[static_cast<std::size_t>(depth_) * n_];
        for (int i = 0; i < n_; ++i) {
            sums_[i * n_ + owner] -= values_[static_cast<std::size_t>(i) * m_ + item];
            maxv_[i * n_ + owner] = pm[i];
            minv_[i * n_ + owner] = pn[i];
        }
        --cnt_[owner];
        assignment_[item] = -1;
    }

    bool pair_ok(int i, int j) const {
        const Int& own = sums_[i * n_ + i];
        const Int& other = sums_[i * n_ + j];
        if (has_offset_ && i == offset_from_ && j == offset_to_) {
            // Carried unit envy: no vacuity shortcut, removal still allowed.
            Int rhs = other;
            if (cnt_[j] > 0) rhs -= maxv_[i * n_ + j];
            rhs += offset_value_;
            return own >= rhs;
        }
        if (relation_ == Relation::EF) return own >= other;
        const bool efx = relation_ == Relation::EFX;
        switch (kind_) {
            case MannaKind::Goods:
                if (cnt_[j] == 0) return true;
                return own >= other - (efx ? minv_[i * n_ + j] : maxv_[i * n_ + j]);
            case MannaKind::Chores:
                if (cnt_[i] == 0) return true;
                return own - (efx ? maxv_[i * n_ + i] : minv_[i * n_ + i]) >= other;
            case MannaKind::Mixed:
                if (cnt_[i] == 0 && cnt_[j] == 0) return own >= other;
                if (!efx) {
                    if (cnt_[i] > 0 && own - minv_[i * n_ + i] >= other) return true;
                    if (cnt_[j] > 0 && own >= other - maxv_[i * n_ + j]) return true;
                    return false;
                }
                if (cnt_[i] > 0 && !(own - maxv_[i * n_ + i] >= other)) return false;
                if (cnt_[j] > 0 && !(own >= other - minv_[i * n_ + j])) return false;
                return true;
        }
        throw InternalError("unreachable manna kind");
    }

    bool boundary_ok() const {
        for (int i = 0; i < n_; ++i) {
            for (int j = 0; j < n_; ++j) {
                if (i != j && !pair_ok(i, j)) return false;
            }
        }
        return true;
    }

    bool consume_node() {
        if (nodes >= budget_) {
            exceeded = true;
            done_ = true;
            return false;
        }
        ++nodes;
        if (progress_ && (nodes & ((1ULL << 26) - 1)) == 0) {
            std::fprintf(stderr, "search: %llu nodes explored\n",
                         static_cast<unsigned long long>(nodes));
        }
        return true;
    }

    void dfs(int item) {
        if (item == effective_m_) {
            handle_leaf();
            return;
        }
        const bool at_round_end = round_end_[item] != 0;
        const int hi = (pin_first_item_ && item == start_items_) ? 1 : n_;
        for (int a = 0; a < hi; ++a) {
            if (done_ || !consume_node()) return;
            push(item, a);
            if (!at_round_end || boundary_ok()) dfs(item + 1);
            pop(item, a);
        }
    }

    void handle_leaf() {
        if (target_ == SearchTarget::RepetitiveTEF1) {
            handle_repetitive_leaf();
            return;
        }
        if (target_ == SearchTarget::TEF1andPO && !leaf_is_pareto_optimal()) return;
        record();
    }

    void handle_repetitive_leaf() {
        const auto& rounds = inst_.rounds();
        const int total_rounds = inst_.n_rounds();
        int extended = 0;
        bool ok = true;
        for (int t = 1; t < total_rounds && ok; ++t) {
            const auto& base = rounds[0];
            const auto& cur = rounds[t];
            for (std::size_t pos = 0; pos < cur.size(); ++pos) {
                push(cur[pos], assignment_[base[pos]]);
            }
            ++extended;
            ok = boundary_ok();
        }
        if (ok) record();
        for (int t = extended; t >= 1; --t) {
            const auto& cur = rounds[t];
            for (int pos = static_cast<int>(cur.size()) - 1; pos >= 0; --pos) {
                pop(cur[pos], assignment_[cur[pos]]);
            }
        }
    }

    void record() {
        switch (mode_) {
            case SearchMode::First:
                found.push_back(Allocation{assignment_});
                done_ = true;
                break;
            case SearchMode::All:
                found.push_back(Allocation{assignment_});
                break;
            case SearchMode::Count:
                ++count;
                break;
        }
    }

    void build_frontier(std::uint64_t cap) {
        Integer total;
        mpz_ui_pow_ui(total.get_mpz_t(), static_cast<unsigned long>(n_),
                      static_cast<unsigned long>(m_));
        if (total > Integer(static_cast<unsigned long>(cap))) {
            throw BudgetError("TEF1+PO search needs the n^m = " + total.get_str() +
                              " Pareto enumeration, above the cap of " + std::to_string(cap) +
                              "; raise it with --po-limit to override");
        }
        std::vector<Int> u(n_, Int(0));
        if (n_ == 2) {
            // Staircase sweep: record the best u1 per u0, then keep the
            // points whose u1 strictly exceeds everything to their right.
            std::map<Int, Int> best;
            frontier_enumerate_pairs(0, u, best);
            bool have_peak = false;
            Int peak{};
            for (auto it = best.rbegin(); it != best.rend(); ++it) {
                if (!have_peak || it->second > peak) {
                    frontier_.push_back({it->first, it->second});
                    peak = it->second;
                    have_peak = true;
                }
            }
            return;
        }
        frontier_enumerate(0, u);
    }

    void frontier_enumerate_pairs(int item, std::vector<Int>& u, std::map<Int, Int>& best) {
        if (item == m_) {
            auto [it, inserted] = best.try_emplace(u[0], u[1]);
            if (!inserted && u[1] > it->second) it->second = u[1];
            return;
        }
        for (int a = 0; a < 2; ++a) {
            u[a] += values_[static_cast<std::size_t>(a) * m_ + item];
            frontier_enumerate_pairs(item + 1, u, best);
            u[a] -= values_[static_cast<std::size_t>(a) * m_ + item];
        }
    }

    void frontier_enumerate(int item, std::vector<Int>& u) {
        if (item == m_) {
            for (const auto& f : frontier_) {
                if (f == u || int_vector_dominates(f, u)) return;
            }
            std::erase_if(frontier_, [&](const std::vector<Int>& f) {
                return int_vector_dominates(u, f);
            });
            frontier_.push_back(u);
            return;
        }
        for (int a = 0; a < n_; ++a) {
            u[a] += values_[static_cast<std::size_t>(a) * m_ + item];
            frontier_enumerate(item + 1, u);
            u[a] -= values_[static_cast<std::size_t>(a) * m_ + item];
        }
    }

    bool leaf_is_pareto_optimal() {
        for (int i = 0; i < n_; ++i) diag_[i] = sums_[i * n_ + i];
        for (const auto& f : frontier_) {
            if (int_vector_dominates(f, diag_)) return false;
        }
        return true;
    }

    const Instance& inst_;
    int n_;
    int m_;
    MannaKind kind_;
    Relation relation_;
    SearchTarget target_;
    SearchMode mode_;
    std::uint64_t budget_;
    bool progress_;
    bool pin_first_item_;
    int start_items_;
    int effective_m_ = 0;

    std::vector<Int> values_;
    std::vector<Int> sums_;
    std::vector<Int> maxv_;
    std::vector<Int> minv_;
    std::vector<int> cnt_;
    std::vector<Int> prev_max_;
    std::vector<Int> prev_min_;
    std::vector<int> assignment_;
    std::vector<std::uint8_t> round_end_;
    std::vector<Int> diag_;
    std::vector<std::vector<Int>> frontier_;

    bool has_offset_ = false;
    int offset_from_ = 0;
    int offset_to_ = 0;
    Int offset_value_{};
    int depth_ = 0;
    bool done_ = false;
};

Relation relation_for_target(SearchTarget target) {
    return target == SearchTarget::TEFX ? Relation::EFX : Relation::EF1;
}

// Number of leading assigned items; they must exactly cover O^t for some t.
int resolve_start_items(const Instance& instance, const PartialAllocation& partial) {
    if (partial.assignment.size() != static_cast<std::size_t>(instance.n_items())) {
        throw InputError("partial allocation covers " + std::to_string(partial.assignment.size()) +
                         " items, instance has " + std::to_string(instance.n_items()));
    }
    int k = 0;
    while (k < instance.n_items() && partial.assignment[k] >= 0) {
        if (partial.assignment[k] >= instance.n_agents()) {
            throw InputError("partial allocation assigns item " + std::to_string(k) +
                             " to invalid agent " + std::to_string(partial.assignment[k]));
        }
        ++k;
    }
    for (int o = k; o < instance.n_items(); ++o) {
        if (partial.assignment[o] >= 0) {
            throw InputError("partial allocation has a gap before item " + std::to_string(o) +
                             "; only a prefix of rounds may be fixed");
        }
    }
    for (int t = 0; t <= instance.n_rounds(); ++t) {
        if (instance.prefix_item_count(t) == k) return k;
    }
    throw InputError("partial allocation fixes " + std::to_string(k) +
                     " items, which is not a round boundary");
}

bool identical_valuations(const Instance& instance) {
    for (int i = 1; i < instance.n_agents(); ++i) {
        if (instance.agent_values(i) != instance.agent_values(0)) return false;
    }
    return true;
}

SearchResult run_search(const Instance& instance, const SearchQuery& query,
                        const std::optional<OffsetSpec>& offset) {
    const auto t_start = std::chrono::steady_clock::now();

    int start_items = 0;
    if (query.start) {
        if (query.target == SearchTarget::RepetitiveTEF1) {
            throw InputError("repetitive search does not support a partial start");
        }
        start_items = resolve_start_items(instance, *query.start);
    }
    if (query.target == SearchTarget::RepetitiveTEF1) {
        for (const auto& round : instance.rounds()) {
            if (instance.n_rounds() > 0 && round.size() != instance.rounds()[0].size()) {
                throw InputError("repetitive search requires identically sized rounds");
            }
        }
    }

    const bool pin = query.symmetry_breaking && start_items == 0 && identical_valuations(instance);
    const Relation relation = relation_for_target(query.target);
    const ScaledValues scaled =
        scale_values(instance, offset ? offset->amount : Rational(0));

    SearchResult result;
    auto drive = [&](auto&& engine) {
        if (query.start) engine.apply_start(*query.start);
        engine.run();
        result.allocations = std::move(engine.found);
        result.count = query.mode == SearchMode::Count ? engine.count
                                                       : result.allocations.size();
        result.nodes_explored = engine.nodes;
        const bool any = query.mode == SearchMode::Count ? engine.count > 0
                                                         : !result.allocations.empty();
        if (engine.exceeded) {
            result.outcome = SearchOutcome::BudgetExceeded;
        } else {
            result.outcome = any ? SearchOutcome::Found : SearchOutcome::None;
        }
    };

    if (scaled.fits_int64) {
        drive(Engine<std::int64_t>(instance, scaled, query, relation, offset, pin, start_items));
    } else {
        drive(Engine<Integer>(instance, scaled, query, relation, offset, pin, start_items));
    }

    // First mode: finding a solution ends the walk early by design, so a
    // budget stop only matters when nothing was found.
    if (query.mode == SearchMode::First && !result.allocations.empty()) {
        result.outcome = SearchOutcome::Found;
    }

    result.wall_time_ms = std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - t_start)
                              .count();
    return result;
}

}  // namespace

SearchResult search(const Instance& instance, const SearchQuery& query) {
    return run_search(instance, query, std::nullopt);
}

SearchResult search_from_partial(const Instance& instance, const PartialAllocation& partial,
                                 SearchQuery query) {
    query.start = partial;
    return run_search(instance, query, std::nullopt);
}

SearchResult appendix_tail_search(bool envy_flag, int envy_from, int envy_to) {
    if (envy_from < 0 || envy_from > 2 || envy_to < 0 || envy_to > 2) {
        throw InputError("tail search agents are indexed 0..2");
    }
    if (envy_flag && envy_from == envy_to) {
        throw InputError("tail search envy pair must be two distinct agents");
    }
    const Instance tail = appendix_tail_instance();
    SearchQuery query;
    query.target = SearchTarget::TEF1;
    query.mode = SearchMode::All;
    std::optional<OffsetSpec> offset;
    if (envy_flag) offset = OffsetSpec{envy_from, envy_to, Rational(1)};
    return run_search(tail, query, offset);
}

}  // namespace tefkit
