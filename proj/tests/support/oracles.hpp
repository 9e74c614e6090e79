#pragma once

// Independent brute-force oracles for the test suites. Everything here works
// straight from the definitions (explicit removal loops, full enumeration)
// and deliberately shares no code with the library's checkers or search.

#include <array>
#include <optional>
#include <vector>

#include "tefkit/gadgets.hpp"
#include "tefkit/instance.hpp"

namespace tefkit::testing {

inline Rational naive_bundle_value(const Instance& inst, int agent, const std::vector<int>& items) {
    Rational sum(0);
    for (int o : items) sum += inst.value(agent, o);
    return sum;
}

// EF1 by trying every single-item removal listed in the definition. All
// values through agent i's eyes.
inline bool naive_pair_ef1(const Instance& inst, int i, int j, const std::vector<int>& bundle_i,
                           const std::vector<int>& bundle_j) {
    const Rational own = naive_bundle_value(inst, i, bundle_i);
    const Rational other = naive_bundle_value(inst, i, bundle_j);
    if (own >= other) return true;
    switch (inst.kind()) {
        case MannaKind::Goods:
            for (int g : bundle_j) {
                if (own >= other - inst.value(i, g)) return true;
            }
            return false;
        case MannaKind::Chores:
            for (int c : bundle_i) {
                if (own - inst.value(i, c) >= other) return true;
            }
            return false;
        case MannaKind::Mixed:
            for (int o : bundle_i) {
                if (own - inst.value(i, o) >= other) return true;
            }
            for (int o : bundle_j) {
                if (own >= other - inst.value(i, o)) return true;
            }
            return false;
    }
    return false;
}

inline bool naive_pair_efx(const Instance& inst, int i, int j, const std::vector<int>& bundle_i,
                           const std::vector<int>& bundle_j) {
    const Rational own = naive_bundle_value(inst, i, bundle_i);
    const Rational other = naive_bundle_value(inst, i, bundle_j);
    switch (inst.kind()) {
        case MannaKind::Goods:
            if (bundle_j.empty()) return true;
            for (int g : bundle_j) {
                if (!(own >= other - inst.value(i, g))) return false;
            }
            return true;
        case MannaKind::Chores:
            if (bundle_i.empty()) return true;
            for (int c : bundle_i) {
                if (!(own - inst.value(i, c) >= other)) return false;
            }
            return true;
        case MannaKind::Mixed:
            if (bundle_i.empty() && bundle_j.empty()) return own >= other;
            for (int o : bundle_i) {
                if (!(own - inst.value(i, o) >= other)) return false;
            }
            for (int o : bundle_j) {
                if (!(own >= other - inst.value(i, o))) return false;
            }
            return true;
    }
    return false;
}

inline std::vector<std::vector<int>> bundles_at(const Instance& inst,
                                                const std::vector<int>& assignment, int upto) {
    std::vector<std::vector<int>> bundles(inst.n_agents());
    for (int o = 0; o < upto; ++o) bundles[assignment[o]].push_back(o);
    return bundles;
}

inline bool naive_tef1(const Instance& inst, const std::vector<int>& assignment) {
    for (int t = 1; t <= inst.n_rounds(); ++t) {
        const auto bundles = bundles_at(inst, assignment, inst.prefix_item_count(t));
        for (int i = 0; i < inst.n_agents(); ++i) {
            for (int j = 0; j < inst.n_agents(); ++j) {
                if (i != j && !naive_pair_ef1(inst, i, j, bundles[i], bundles[j])) return false;
            }
        }
    }
    return true;
}

inline bool naive_tefx(const Instance& inst, const std::vector<int>& assignment) {
    for (int t = 1; t <= inst.n_rounds(); ++t) {
        const auto bundles = bundles_at(inst, assignment, inst.prefix_item_count(t));
        for (int i = 0; i < inst.n_agents(); ++i) {
            for (int j = 0; j < inst.n_agents(); ++j) {
                if (i != j && !naive_pair_efx(inst, i, j, bundles[i], bundles[j])) return false;
            }
        }
    }
    return true;
}

// All n^m assignments; only usable at desk scale.
template <class Visit>
void for_each_allocation(int n_agents, int n_items, Visit&& visit) {
    std::vector<int> assignment(n_items, 0);
    for (;;) {
        visit(const_cast<const std::vector<int>&>(assignment));
        int k = n_items - 1;
        while (k >= 0 && assignment[k] == n_agents - 1) assignment[k--] = 0;
        if (k < 0) return;
        ++assignment[k];
    }
}

inline std::vector<std::vector<int>> all_tef1_allocations(const Instance& inst) {
    std::vector<std::vector<int>> found;
    for_each_allocation(inst.n_agents(), inst.n_items(), [&](const std::vector<int>& a) {
        if (naive_tef1(inst, a)) found.push_back(a);
    });
    return found;
}

inline bool naive_pareto_optimal(const Instance& inst, const std::vector<int>& assignment) {
    std::vector<Rational> target(inst.n_agents());
    for (int o = 0; o < inst.n_items(); ++o) {
        target[assignment[o]] += inst.value(assignment[o], o);
    }
    bool dominated = false;
    for_each_allocation(inst.n_agents(), inst.n_items(), [&](const std::vector<int>& a) {
        if (dominated) return;
        std::vector<Rational> u(inst.n_agents());
        for (int o = 0; o < inst.n_items(); ++o) u[a[o]] += inst.value(a[o], o);
        bool weak = true, strict = false;
        for (int i = 0; i < inst.n_agents(); ++i) {
            if (u[i] < target[i]) weak = false;
            if (u[i] > target[i]) strict = true;
        }
        if (weak && strict) dominated = true;
    });
    return !dominated;
}

// Exactly one true literal occurrence per clause, over all 2^n assignments.
inline bool one_in_three_satisfiable(const CnfFormula& formula) {
    const int n = formula.n_vars;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        bool ok = true;
        for (const auto& clause : formula.clauses) {
            int true_count = 0;
            for (int lit : clause) {
                const int var = lit < 0 ? -lit : lit;
                const bool value = (mask >> (var - 1)) & 1u;
                if (lit > 0 ? value : !value) ++true_count;
            }
            if (true_count != 1) {
                ok = false;
                break;
            }
        }
        if (ok) return true;
    }
    return false;
}

// Classical Partition: can S split into two parts of equal sum?
inline bool partition_yes(const std::vector<long long>& values) {
    long long total = 0;
    for (long long v : values) total += v;
    if (total % 2 != 0) return false;
    const int m = static_cast<int>(values.size());
    for (unsigned mask = 0; mask < (1u << m); ++mask) {
        long long sum = 0;
        for (int k = 0; k < m; ++k) {
            if ((mask >> k) & 1u) sum += values[k];
        }
        if (2 * sum == total) return true;
    }
    return false;
}

namespace detail {
inline bool multiway_rec(const std::vector<long long>& values, std::size_t k,
                         std::vector<long long>& sums, long long target) {
    if (k == values.size()) {
        for (long long s : sums) {
            if (s != target) return false;
        }
        return true;
    }
    for (std::size_t b = 0; b < sums.size(); ++b) {
        if (sums[b] + values[k] > target) continue;
        sums[b] += values[k];
        const bool ok = multiway_rec(values, k + 1, sums, target);
        sums[b] -= values[k];
        if (ok) return true;
    }
    return false;
}
}  // namespace detail

// Multiway number partitioning into kappa equal-sum subsets.
inline bool multiway_yes(const std::vector<long long>& values, int kappa) {
    long long total = 0;
    for (long long v : values) total += v;
    if (total % kappa != 0) return false;
    std::vector<long long> sums(kappa, 0);
    return detail::multiway_rec(values, 0, sums, total / kappa);
}

}  // namespace tefkit::testing
