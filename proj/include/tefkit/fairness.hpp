#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "tefkit/instance.hpp"

namespace tefkit {

enum class Relation { EF, EF1, EFX };

std::string to_string(Relation relation);
Relation relation_from_string(const std::string& text);

struct Witness {
    int round = 0;  // 1-based, earliest failing boundary
    int envious = 0;
    int envied = 0;

    bool operator==(const Witness&) const = default;
};

struct FairnessReport {
    bool holds = true;
    std::optional<Witness> witness;
};

nlohmann::json fairness_report_to_json(const FairnessReport& report);

/// Pairwise envy test over one cumulative allocation. The EF1/EFX removal
/// side follows the instance kind: goods drop from the envied bundle, chores
/// from the envious agent's own bundle, mixed manna from either (Appendix D
/// union form, the dropped item leaves whichever side holds it). Empty
/// candidate sets reduce to the plain EF comparison.
FairnessReport check_pairwise(const Instance& instance, const PrefixBundles& bundles,
                              Relation relation);

/// Temporal variant: the relation must hold at every round boundary t' <= T.
/// The witness is the earliest violation in (round, envious, envied) order.
FairnessReport check_temporal(const Instance& instance, const Allocation& alloc,
                              Relation relation);

/// Same check restricted to the given 1-based boundaries of a flattened
/// instance; with boundaries from flatten_single_item this reproduces the
/// original instance's temporal verdict exactly.
FairnessReport check_temporal_at_boundaries(const Instance& instance, const Allocation& alloc,
                                            Relation relation, std::span<const int> boundaries);

bool pareto_dominates(const Instance& instance, const Allocation& a, const Allocation& b);

inline constexpr std::uint64_t kDefaultParetoCap = 10'000'000;

/// Exhaustive PO test over all n^m allocations. Refuses when n^m exceeds the
/// cap; pass a larger `limit` (CLI: --po-limit) to override.
bool is_pareto_optimal(const Instance& instance, const Allocation& alloc,
                       std::uint64_t limit = kDefaultParetoCap);

/// The set of non-dominated utility vectors over all n^m allocations, for
/// repeated PO queries against one instance. An allocation is PO iff no
/// frontier vector dominates its utility vector.
class ParetoFrontier {
public:
    ParetoFrontier(const Instance& instance, std::uint64_t limit = kDefaultParetoCap);

    bool is_pareto_optimal(const Allocation& alloc) const;
    std::size_t size() const { return frontier_.size(); }

private:
    const Instance& instance_;
    std::vector<std::vector<Rational>> frontier_;
};

// ---- p-mean welfare ----

struct PMeanExponent {
    enum class Kind { Value, ZeroLimit, NegInfinity };
    Kind kind = Kind::Value;
    Rational p;  // meaningful for Kind::Value only; requires p <= 1

    static PMeanExponent value(Rational p) { return {Kind::Value, std::move(p)}; }
    static PMeanExponent zero_limit() { return {Kind::ZeroLimit, Rational(0)}; }
    static PMeanExponent neg_infinity() { return {Kind::NegInfinity, Rational(0)}; }
};

struct WelfareValue {
    bool exact = false;
    Rational exact_value;  // valid when exact
    std::string decimal;   // 30 significant digits (MPFR, 256-bit, round-to-nearest)

    std::string to_string() const { return exact ? format_rational(exact_value) : decimal; }
};

/// ((1/n) sum v_i(A_i)^p)^(1/p). p = 1 is the arithmetic mean, the zero limit
/// the geometric (Nash) mean, p -> -inf the minimum utility. Exact rational
/// result whenever the closed form is rational (p in {1,-1}, egalitarian min,
/// integer p with an exact |p|-th root); otherwise a 256-bit MPFR evaluation.
/// Nonpositive utilities with p <= 0 are a DomainError; p > 1 an InputError.
WelfareValue p_mean_welfare(const Instance& instance, const Allocation& alloc,
                            const PMeanExponent& p);

}  // namespace tefkit
