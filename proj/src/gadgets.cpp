#include "tefkit/gadgets.hpp"

#include <algorithm>
#include <nlohmann/json.hpp>

#include "tefkit/errors.hpp"

namespace tefkit {

using nlohmann::json;

json formula_to_json(const CnfFormula& formula) {
    json clauses = json::array();
    for (const auto& c : formula.clauses) clauses.push_back(c);
    return json{{"vars", formula.n_vars}, {"clauses", std::move(clauses)}};
}

CnfFormula formula_from_json(const json& j) {
    if (!j.is_object() || !j.contains("vars") || !j.contains("clauses")) {
        throw InputError("formula JSON must be {\"vars\": n, \"clauses\": [[l,l,l],...]}");
    }
    CnfFormula formula;
    formula.n_vars = j.at("vars").get<int>();
    for (const auto& c : j.at("clauses")) {
        if (!c.is_array() || c.size() != 3) {
            throw InputError("every clause needs exactly three literals");
        }
        formula.clauses.push_back({c[0].get<int>(), c[1].get<int>(), c[2].get<int>()});
    }
    return formula;
}

namespace {

void validate_formula(const CnfFormula& formula) {
    if (formula.n_vars < 1) throw InputError("formula needs at least one variable");
    for (const auto& clause : formula.clauses) {
        for (int lit : clause) {
            const int var = lit < 0 ? -lit : lit;
            if (lit == 0 || var > formula.n_vars) {
                throw InputError("literal " + std::to_string(lit) + " out of range for " +
                                 std::to_string(formula.n_vars) + " variables");
            }
        }
    }
}

std::vector<std::vector<int>> single_item_rounds(int m) {
    std::vector<std::vector<int>> rounds(m);
    for (int o = 0; o < m; ++o) rounds[o] = {o};
    return rounds;
}

// Occurrence counts keep the powers-of-five bookkeeping exact even when a
// clause repeats a literal: each clause always contributes three occurrences.
int occurrences(const std::array<int, 3>& clause, int literal) {
    return static_cast<int>(std::count(clause.begin(), clause.end(), literal));
}

// v(t_i) / v(f_i) / v(r) over the variable and clause goods shared by the
// goods TEF1 gadget and both TEF1+PO gadgets. 1-based variable index i.
Rational variable_good_value(const CnfFormula& f, int i, bool positive) {
    const int mc = static_cast<int>(f.clauses.size());
    Rational v = pow5(static_cast<unsigned long>(mc + f.n_vars - i));
    for (int j = 1; j <= mc; ++j) {
        const int lit = positive ? i : -i;
        const int k = occurrences(f.clauses[j - 1], lit);
        if (k > 0) v += k * pow5(static_cast<unsigned long>(mc - j));
    }
    return v;
}

Rational clause_power_sum(int mc) {
    Rational v(0);
    for (int j = 1; j <= mc; ++j) v += pow5(static_cast<unsigned long>(j - 1));
    return v;
}

Rational variable_power_sum(int mc, int n_vars) {
    Rational v(0);
    for (int i = 1; i <= n_vars; ++i) v += pow5(static_cast<unsigned long>(mc + i - 1));
    return v;
}

constexpr int kTailGoods = 21;
constexpr long kTailValues[3][kTailGoods] = {
    {90, 80, 70, 100, 100, 100, 15, 10000, 11000, 12000, 20000, 20000, 20000, 20000, 20000,
     20000, 20000, 20000, 20000, 19010, 18005},
    {90, 70, 80, 100, 100, 100, 95, 10000, 11000, 12000, 20000, 20000, 20000, 20000, 20000,
     20000, 20000, 12000, 12000, 19085, 14106},
    {80, 90, 70, 100, 100, 100, 25, 10000, 11000, 12000, 20000, 20000, 18500, 20000, 20000,
     20000, 20000, 20000, 20000, 19010, 19496}};

}  // namespace

Instance appendix_tail_instance() {
    std::vector<std::vector<Rational>> values(3);
    for (int i = 0; i < 3; ++i) {
        for (int o = 0; o < kTailGoods; ++o) values[i].push_back(Rational(kTailValues[i][o]));
    }
    Instance instance(3, single_item_rounds(kTailGoods), std::move(values), MannaKind::Goods);
    instance.set_metadata(json{{"corpus", "appendix_tail_21"}}.dump());
    return instance;
}

Instance gadget_1in3sat_goods_tef1(const CnfFormula& formula) {
    validate_formula(formula);
    const int n = formula.n_vars;
    const int mc = static_cast<int>(formula.clauses.size());
    const int m = 2 * n + 2 + kTailGoods;

    // Identical row over s, t_1, f_1, ..., t_n, f_n, r.
    std::vector<Rational> shared;
    shared.push_back(variable_power_sum(mc, n) + 2 * clause_power_sum(mc));  // s
    for (int i = 1; i <= n; ++i) {
        shared.push_back(variable_good_value(formula, i, true));
        shared.push_back(variable_good_value(formula, i, false));
    }
    shared.push_back(clause_power_sum(mc));  // r

    std::vector<std::vector<Rational>> values(3);
    for (int a = 0; a < 3; ++a) {
        values[a] = shared;
        for (int o = 0; o < kTailGoods; ++o) values[a].push_back(Rational(kTailValues[a][o]));
    }

    Instance instance(3, single_item_rounds(m), std::move(values), MannaKind::Goods);
    instance.set_metadata(json{{"reduction", "1in3sat-goods"},
                               {"formula", formula_to_json(formula)}}
                              .dump());
    return instance;
}

json multiset_to_json(const IntegerMultiset& s) {
    json j{{"values", s.values}};
    if (s.kappa) j["kappa"] = *s.kappa;
    return j;
}

IntegerMultiset multiset_from_json(const json& j) {
    if (!j.is_object() || !j.contains("values")) {
        throw InputError("multiset JSON must be {\"values\": [...], \"kappa\": k?}");
    }
    IntegerMultiset s;
    s.values = j.at("values").get<std::vector<long long>>();
    if (j.contains("kappa") && !j.at("kappa").is_null()) s.kappa = j.at("kappa").get<int>();
    return s;
}

PartitionGadget gadget_partition_chores_tef1(const IntegerMultiset& s,
                                             const GadgetParams& params) {
    if (s.values.empty()) throw InputError("partition gadget needs a nonempty multiset");
    for (long long v : s.values) {
        if (v <= 0) throw InputError("partition gadget needs positive integers");
    }
    const Rational epsilon = params.epsilon.value_or(Rational(1));
    if (epsilon <= 0) throw InputError("partition gadget requires epsilon > 0");

    const int m = static_cast<int>(s.values.size());
    const long long max_value = *std::max_element(s.values.begin(), s.values.end());
    const Rational shift = Rational(static_cast<long>(max_value)) + epsilon;

    // s'_j = s_j - K < 0, then rescaled so they sum to exactly -2.
    std::vector<Rational> shifted;
    Rational total(0);
    for (long long v : s.values) {
        Rational sj = Rational(static_cast<long>(v)) - shift;
        total += sj;
        shifted.push_back(std::move(sj));
    }
    const Rational factor = Rational(-2) / total;
    for (Rational& sj : shifted) sj *= factor;

    const Rational zero(0), minus_one(-1);
    std::vector<std::vector<Rational>> values(4);
    for (int a = 0; a < 4; ++a) values[a].reserve(4 + m);
    values[0] = {minus_one, zero, zero, zero};
    values[1] = {minus_one, minus_one, minus_one, minus_one};
    values[2] = {minus_one, minus_one, minus_one, minus_one};
    values[3] = {zero, zero, zero, minus_one};
    for (int j = 0; j < m; ++j) {
        values[0].push_back(minus_one);
        values[1].push_back(shifted[j]);
        values[2].push_back(shifted[j]);
        values[3].push_back(minus_one);
    }

    Instance instance(4, single_item_rounds(4 + m), std::move(values), MannaKind::Chores);
    instance.set_metadata(json{{"reduction", "partition-chores"},
                               {"multiset", s.values},
                               {"epsilon", format_rational(epsilon)}}
                              .dump());

    PartialAllocation prefix;
    prefix.assignment.assign(4 + m, -1);
    for (int i = 0; i < 4; ++i) prefix.assignment[i] = i;
    return PartitionGadget{std::move(instance), std::move(prefix)};
}

Instance gadget_1in3sat_tef1_po(const CnfFormula& formula, MannaKind kind,
                                const GadgetParams& params) {
    validate_formula(formula);
    if (kind == MannaKind::Mixed) {
        throw InputError("the TEF1+PO gadget is defined for goods or chores");
    }
    const Rational epsilon = params.epsilon.value_or(make_rational(1, 4));
    if (epsilon <= 0 || epsilon >= make_rational(1, 3)) {
        throw InputError("the TEF1+PO gadget requires 0 < epsilon < 1/3, got " +
                         format_rational(epsilon));
    }

    const int n = formula.n_vars;
    const int mc = static_cast<int>(formula.clauses.size());
    const int sign = kind == MannaKind::Goods ? 1 : -1;

    std::vector<Rational> shared;  // t_1, f_1, ..., t_n, f_n, r
    for (int i = 1; i <= n; ++i) {
        shared.push_back(sign * variable_good_value(formula, i, true));
        shared.push_back(sign * variable_good_value(formula, i, false));
    }
    shared.push_back(sign * clause_power_sum(mc));

    const Rational big = sign * pow5(static_cast<unsigned long>(mc + n));
    const Rational near = big - sign * epsilon;  // one epsilon closer to zero
    std::vector<std::vector<Rational>> values(2);
    values[0] = shared;
    values[1] = shared;
    for (const Rational& v : {big, near, near, big}) values[0].push_back(v);
    for (const Rational& v : {near, big, big, near}) values[1].push_back(v);

    Instance instance(2, single_item_rounds(2 * n + 1 + 4), std::move(values), kind);
    instance.set_metadata(json{{"reduction", kind == MannaKind::Goods ? "1in3sat-po-goods"
                                                                      : "1in3sat-po-chores"},
                               {"formula", formula_to_json(formula)},
                               {"epsilon", format_rational(epsilon)}}
                              .dump());
    return instance;
}

Instance gadget_multiway_repeated(const IntegerMultiset& s, MannaKind kind) {
    if (!s.kappa || *s.kappa < 1) throw InputError("multiway gadget needs kappa >= 1");
    if (s.values.empty()) throw InputError("multiway gadget needs a nonempty multiset");
    if (kind == MannaKind::Mixed) {
        throw InputError("the multiway gadget is defined for goods or chores");
    }
    for (long long v : s.values) {
        if (v < 0) throw InputError("multiway gadget needs non-negative integers");
    }

    const int kappa = *s.kappa;
    const int m = static_cast<int>(s.values.size());

    std::vector<Rational> round_values;
    long long total = 0;
    if (kind == MannaKind::Goods) {
        for (long long v : s.values) {
            round_values.push_back(Rational(static_cast<long>(v)));
            total += v;
        }
        round_values.push_back(Rational(2) * Rational(static_cast<long>(total)) / kappa);  // 2W
    } else {
        const long long max_value = *std::max_element(s.values.begin(), s.values.end());
        Rational shifted_total(0);
        for (long long v : s.values) {
            Rational sj(static_cast<long>(v - max_value));
            shifted_total += sj;
            round_values.push_back(std::move(sj));
            total += v;
        }
        round_values.push_back(Rational(2) * shifted_total / kappa);  // 2W'
    }

    // Two identical rounds; round-2 ids continue the labelling.
    std::vector<std::vector<int>> rounds(2);
    for (int o = 0; o <= m; ++o) rounds[0].push_back(o);
    for (int o = m + 1; o <= 2 * m + 1; ++o) rounds[1].push_back(o);

    std::vector<std::vector<Rational>> values(kappa + 1);
    for (int a = 0; a <= kappa; ++a) {
        values[a] = round_values;
        values[a].insert(values[a].end(), round_values.begin(), round_values.end());
    }

    Instance instance(kappa + 1, std::move(rounds), std::move(values), kind);
    instance.set_metadata(json{{"reduction", kind == MannaKind::Goods ? "multiway-goods"
                                                                      : "multiway-chores"},
                               {"multiset", s.values},
                               {"kappa", kappa},
                               {"divisible", total % kappa == 0}}
                              .dump());
    return instance;
}

// ---- corpus ----

namespace {

Instance make_identical(int n_agents, std::vector<Rational> row, MannaKind kind) {
    const int m = static_cast<int>(row.size());
    std::vector<std::vector<Rational>> values(n_agents, row);
    return Instance(n_agents, single_item_rounds(m), std::move(values), kind);
}

Instance appendix_a_instance() {
    auto q = [](const char* text) { return parse_rational(text); };
    std::vector<std::vector<Rational>> values(3);
    // Goods g1..g7 separate the agents; the rest is the large common scale.
    values[0] = {q("0.9"), q("0.8"), q("0.7"), q("1"), q("1"), q("1"), q("0.15")};
    values[1] = {q("0.9"), q("0.7"), q("0.8"), q("1"), q("1"), q("1"), q("0.95")};
    values[2] = {q("0.8"), q("0.9"), q("0.7"), q("1"), q("1"), q("1"), q("0.25")};
    const long late[3][16] = {
        {100, 110, 120, 200, 200, 200, 200, 200, 200, 200, 200, 200, 200, 200, 200, 200},
        {100, 110, 120, 200, 200, 200, 200, 200, 200, 200, 120, 120, 200, 120, 120, 200},
        {100, 110, 120, 200, 200, 185, 200, 200, 200, 200, 200, 200, 200, 200, 200, 200}};
    for (int a = 0; a < 3; ++a) {
        for (long v : late[a]) values[a].push_back(Rational(v));
    }
    Instance instance(3, single_item_rounds(23), std::move(values), MannaKind::Goods);
    instance.set_metadata(json{{"corpus", "appendixA_goods_23"}}.dump());
    return instance;
}

Instance prop42_chores_instance(int n_agents) {
    if (n_agents < 2) throw InputError("prop42_chores needs at least two agents");
    const int m = 2 * n_agents;
    const Rational light = parse_rational("-1.1");
    const Rational heavy(-2);
    std::vector<std::vector<Rational>> values(n_agents, std::vector<Rational>(m, heavy));
    for (int o = 0; o < n_agents; ++o) values[0][o] = light;
    for (int o = n_agents; o < m; ++o) values[1][o] = light;
    Instance instance(n_agents, single_item_rounds(m), std::move(values), MannaKind::Chores);
    instance.set_metadata(json{{"corpus", "prop42_chores"}, {"agents", n_agents}}.dump());
    return instance;
}

}  // namespace

std::vector<std::string> corpus_names() {
    return {"appendixA_goods_23", "prop33_goods", "prop33_chores", "prop42_goods",
            "prop42_chores"};
}

CorpusEntry corpus_instance(const std::string& name) {
    std::string base = name;
    std::optional<int> arg;
    if (const auto colon = name.find(':'); colon != std::string::npos) {
        base = name.substr(0, colon);
        arg = std::stoi(name.substr(colon + 1));
    }

    if (base == "appendixA_goods_23") {
        return CorpusEntry{appendix_a_instance(), {{SearchTarget::TEF1, false}}};
    }
    if (base == "prop33_goods" || base == "prop33_chores") {
        const bool goods = base == "prop33_goods";
        const int sign = goods ? 1 : -1;
        Instance instance = make_identical(
            2, {Rational(sign), Rational(sign), Rational(2 * sign)},
            goods ? MannaKind::Goods : MannaKind::Chores);
        instance.set_metadata(json{{"corpus", base}}.dump());
        return CorpusEntry{std::move(instance),
                           {{SearchTarget::TEFX, false}, {SearchTarget::TEF1, true}}};
    }
    if (base == "prop42_goods") {
        const Rational light = parse_rational("1.1");
        const Rational heavy(2);
        std::vector<std::vector<Rational>> values(2);
        values[0] = {light, light, heavy, heavy};
        values[1] = {heavy, heavy, light, light};
        Instance instance(2, single_item_rounds(4), std::move(values), MannaKind::Goods);
        instance.set_metadata(json{{"corpus", base}}.dump());
        return CorpusEntry{std::move(instance),
                           {{SearchTarget::TEF1, true}, {SearchTarget::TEF1andPO, false}}};
    }
    if (base == "prop42_chores") {
        return CorpusEntry{prop42_chores_instance(arg.value_or(2)),
                           {{SearchTarget::TEF1, true}, {SearchTarget::TEF1andPO, false}}};
    }
    throw InputError("unknown corpus instance '" + name + "'");
}

// ---- random instances ----

std::uint64_t SeededRng::bounded(std::uint64_t bound) {
    if (bound == 0) throw InputError("bounded(0) is ill-defined");
    const std::uint64_t threshold = (0 - bound) % bound;  // 2^64 mod bound
    for (;;) {
        const std::uint64_t r = next();
        if (r >= threshold) return r % bound;
    }
}

long long SeededRng::range(long long lo, long long hi) {
    if (lo > hi) throw InputError("empty range");
    const std::uint64_t width = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<long long>(bounded(width));
}

Instance gen_random(int n_agents, int n_rounds, int items_per_round, MannaKind kind,
                    long long max_abs_value, std::uint64_t seed) {
    if (n_agents < 1 || n_rounds < 1 || items_per_round < 1 || max_abs_value < 1) {
        throw InputError("gen_random parameters must be positive");
    }
    SeededRng rng(seed);
    const int m = n_rounds * items_per_round;
    std::vector<std::vector<int>> rounds(n_rounds);
    int id = 0;
    for (auto& round : rounds) {
        for (int k = 0; k < items_per_round; ++k) round.push_back(id++);
    }
    long long lo = 0, hi = max_abs_value;
    if (kind == MannaKind::Chores) {
        lo = -max_abs_value;
        hi = 0;
    } else if (kind == MannaKind::Mixed) {
        lo = -max_abs_value;
    }
    std::vector<std::vector<Rational>> values(n_agents);
    for (int a = 0; a < n_agents; ++a) {
        values[a].reserve(m);
        for (int o = 0; o < m; ++o) {
            values[a].push_back(Rational(static_cast<long>(rng.range(lo, hi))));
        }
    }
    return Instance(n_agents, std::move(rounds), std::move(values), kind);
}

}  // namespace tefkit
