#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "tefkit/instance.hpp"
#include "tefkit/search.hpp"

namespace tefkit {

/// 3-CNF for the 1-in-3-SAT reductions. Literals are signed 1-based variable
/// indices; a clause is satisfied "1-in-3" when exactly one of its three
/// literal occurrences is true.
struct CnfFormula {
    int n_vars = 0;
    std::vector<std::array<int, 3>> clauses;
};

nlohmann::json formula_to_json(const CnfFormula& formula);
CnfFormula formula_from_json(const nlohmann::json& j);

struct IntegerMultiset {
    std::vector<long long> values;
    std::optional<int> kappa;  // multiway partitions only
};

nlohmann::json multiset_to_json(const IntegerMultiset& s);
IntegerMultiset multiset_from_json(const nlohmann::json& j);

struct GadgetParams {
    std::optional<Rational> epsilon;  // gadget-specific default when absent
};

/// Goods TEF1-existence hardness instance: 3 agents, the 2n+2 powers-of-five
/// goods s, t_1, f_1, ..., t_n, f_n, r, then the fixed 21-good tail.
Instance gadget_1in3sat_goods_tef1(const CnfFormula& formula);

/// Chores partial-allocation hardness instance: 4 agents, chores b_1..b_4
/// then c_1..c_m carrying the shifted multiset rescaled to sum exactly -2,
/// plus the TEF1 prefix that hands b_i to agent i. Requires epsilon > 0
/// (default 1).
struct PartitionGadget {
    Instance instance;
    PartialAllocation prefix;
};
PartitionGadget gadget_partition_chores_tef1(const IntegerMultiset& s,
                                             const GadgetParams& params = {});

/// TEF1+PO hardness instance for two agents: t_1, f_1, ..., t_n, f_n, r then
/// the four epsilon-perturbed items o_1..o_4. Requires 0 < epsilon < 1/3
/// (default 1/4); chores is the negated variant.
Instance gadget_1in3sat_tef1_po(const CnfFormula& formula, MannaKind kind,
                                const GadgetParams& params = {});

/// Repetitive-allocation hardness instance: kappa+1 agents, two identical
/// rounds of m+1 items (multiset values plus one item worth twice the target
/// subset sum). Emitted even when the multiset sum is not divisible by kappa
/// (a legitimate no-instance, flagged in the metadata).
Instance gadget_multiway_repeated(const IntegerMultiset& s, MannaKind kind);

/// The 21-good, 3-agent tail used by both the goods hardness gadget and the
/// appendix verification program.
Instance appendix_tail_instance();

struct ExpectedVerdict {
    SearchTarget target;
    bool found = false;
};

struct CorpusEntry {
    Instance instance;
    std::vector<ExpectedVerdict> expected;
};

/// Named instances from the source material with their expected search
/// verdicts: appendixA_goods_23, prop33_goods, prop33_chores, prop42_goods,
/// prop42_chores (optionally "prop42_chores:<n>").
CorpusEntry corpus_instance(const std::string& name);

std::vector<std::string> corpus_names();

/// Deterministic uniform integers on top of mt19937_64. The engine is pinned
/// by the standard; the bounded draw is rejection-sampled by hand because
/// std::uniform_int_distribution is not, so streams are identical everywhere.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    std::uint64_t bounded(std::uint64_t bound);   // uniform in [0, bound)
    long long range(long long lo, long long hi);  // uniform in [lo, hi]

private:
    std::mt19937_64 engine_;
};

/// Seeded pseudorandom instance on an integer value grid, sign-constrained by
/// kind: goods in [0, max_abs_value], chores in [-max_abs_value, 0], mixed in
/// [-max_abs_value, max_abs_value].
Instance gen_random(int n_agents, int n_rounds, int items_per_round, MannaKind kind,
                    long long max_abs_value, std::uint64_t seed);

}  // namespace tefkit
