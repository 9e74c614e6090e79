#include "doctest.h"
#include "support/generators.hpp"
#include "support/oracles.hpp"
#include "tefkit/fairness.hpp"
#include "tefkit/gadgets.hpp"
#include "tefkit/search.hpp"

using namespace tefkit;
using namespace tefkit::testing;

namespace {

PrefixBundles full_bundles(const Instance& inst, const Allocation& alloc) {
    return prefix_bundles(inst, alloc, inst.n_rounds());
}

}  // namespace

TEST_CASE("EF1 vs EFX on the identical (1,1,2) goods instance") {
    const Instance inst = corpus_instance("prop33_goods").instance;
    const Allocation alloc{{0, 1, 0}};  // agent 0 holds {g1, g3}
    const PrefixBundles b = full_bundles(inst, alloc);
    CHECK(check_pairwise(inst, b, Relation::EF1).holds);
    // dropping g1 still leaves value 2 against agent 1's 1
    const FairnessReport efx = check_pairwise(inst, b, Relation::EFX);
    CHECK_FALSE(efx.holds);
    CHECK(efx.witness->envious == 1);
    CHECK(efx.witness->envied == 0);
}

TEST_CASE("empty bundles are vacuously fair") {
    std::vector<Rational> row = {Rational(0), Rational(0)};
    const Instance inst(3, single_rounds(2), {row, row, row}, MannaKind::Goods);
    const Allocation alloc{{0, 0}};
    const PrefixBundles b = full_bundles(inst, alloc);
    for (Relation rel : {Relation::EF, Relation::EF1, Relation::EFX}) {
        CHECK(check_pairwise(inst, b, rel).holds);
    }
}

TEST_CASE("prop42 split allocation is envy-free outright") {
    const Instance inst = corpus_instance("prop42_goods").instance;
    const Allocation alloc{{0, 1, 0, 1}};  // ({g1,g3},{g2,g4}), both sides 31/10
    CHECK(check_pairwise(inst, full_bundles(inst, alloc), Relation::EF).holds);
}

TEST_CASE("chores pairwise removal comes from the envious bundle") {
    std::vector<Rational> row = {Rational(-1), Rational(-1), Rational(-2)};
    const Instance inst(2, single_rounds(3), {row, row}, MannaKind::Chores);
    // agent 0 holds {c1, c3}: dropping c3 removes the envy
    const Allocation alloc{{0, 1, 0}};
    CHECK(check_pairwise(inst, full_bundles(inst, alloc), Relation::EF1).holds);
    CHECK_FALSE(check_pairwise(inst, full_bundles(inst, alloc), Relation::EFX).holds);
}

TEST_CASE("check_temporal equals pairwise on one-round instances") {
    SeededRng rng(5);
    for (int trial = 0; trial < 40; ++trial) {
        Instance inst = gen_random(2 + trial % 3, 1, 5, MannaKind::Mixed, 6, trial);
        Allocation alloc;
        for (int o = 0; o < inst.n_items(); ++o) {
            alloc.assignment.push_back(static_cast<int>(rng.bounded(inst.n_agents())));
        }
        for (Relation rel : {Relation::EF, Relation::EF1, Relation::EFX}) {
            CHECK(check_temporal(inst, alloc, rel).holds ==
                  check_pairwise(inst, full_bundles(inst, alloc), rel).holds);
        }
    }
}

TEST_CASE("temporal witness is the earliest violation") {
    // greedy utilitarian allocation of the 23-good counterexample fails TEF1
    const Instance inst = corpus_instance("appendixA_goods_23").instance;
    Allocation greedy;
    for (int o = 0; o < inst.n_items(); ++o) {
        int best = 0;
        for (int i = 1; i < 3; ++i) {
            if (inst.value(i, o) > inst.value(best, o)) best = i;
        }
        greedy.assignment.push_back(best);
    }
    const FairnessReport report = check_temporal(inst, greedy, Relation::EF1);
    CHECK_FALSE(report.holds);
    CHECK(report.witness->round <= 23);
    // re-check reproduces the violation at the witness round
    const PrefixBundles at = prefix_bundles(inst, greedy, report.witness->round);
    CHECK_FALSE(check_pairwise(inst, at, Relation::EF1).holds);
    // and every earlier boundary passes
    for (int t = 1; t < report.witness->round; ++t) {
        CHECK(check_pairwise(inst, prefix_bundles(inst, greedy, t), Relation::EF1).holds);
    }
}

TEST_CASE("EF implies EFX implies EF1") {
    SeededRng rng(11);
    for (int trial = 0; trial < 150; ++trial) {
        const int n = 2 + static_cast<int>(rng.bounded(3));
        const MannaKind kind =
            trial % 3 == 0 ? MannaKind::Goods : (trial % 3 ==  1 ? MannaKind::Chores : MannaKind::Mixed);
        Instance inst = gen_random(n, 1 + static_cast<int>(rng.bounded(6)), 1, kind, 5, trial * 3 + 1);
        Allocation alloc;
        for (int o = 0; o < inst.n_items(); ++o) {
            alloc.assignment.push_back(static_cast<int>(rng.bounded(n)));
        }
        const PrefixBundles b = full_bundles(inst, alloc);
        const bool ef = check_pairwise(inst, b, Relation::EF).holds;
        const bool efx = check_pairwise(inst, b, Relation::EFX).holds;
        const bool ef1 = check_pairwise(inst, b, Relation::EF1).holds;
        if (ef) CHECK(efx);
        if (efx) CHECK(ef1);
        // agreement with the definition-level oracle
        CHECK(ef1 == ([&] {
                  for (int i = 0; i < n; ++i)
                      for (int j = 0; j < n; ++j)
                          if (i != j && !naive_pair_ef1(inst, i, j, b.bundles[i], b.bundles[j]))
                              return false;
                  return true;
              }()));
    }
}

TEST_CASE("goods EF1 ignores a universally zero-valued item in the envied bundle") {
    SeededRng rng(21);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 2;
        const int m = 3 + static_cast<int>(rng.bounded(4));
        Instance base = gen_random(n, m, 1, MannaKind::Goods, 6, trial + 50);
        // append one item both agents value at zero
        std::vector<std::vector<Rational>> values;
        for (int i = 0; i < n; ++i) {
            values.push_back(base.agent_values(i));
            values[i].push_back(Rational(0));
        }
        const Instance ext(n, single_rounds(m + 1), values, MannaKind::Goods);
        Allocation alloc;
        for (int o = 0; o < m; ++o) alloc.assignment.push_back(static_cast<int>(rng.bounded(n)));
        Allocation alloc_ext = alloc;
        alloc_ext.assignment.push_back(1);  // envied side gets the dud
        const bool before =
            check_pairwise(base, full_bundles(base, alloc), Relation::EF1).holds;
        const bool after =
            check_pairwise(ext, full_bundles(ext, alloc_ext), Relation::EF1).holds;
        CHECK(before == after);
    }
}

TEST_CASE("pareto_dominates basics") {
    const Instance inst = corpus_instance("prop42_goods").instance;
    const Allocation tef1_style{{0, 1, 0, 1}};
    const Allocation swapped{{1, 1, 0, 0}};  // agent 0 takes {g3,g4}, agent 1 {g1,g2}
    CHECK_FALSE(pareto_dominates(inst, tef1_style, tef1_style));
    CHECK(pareto_dominates(inst, swapped, tef1_style));  // 4 > 31/10 for both
    CHECK_FALSE(pareto_dominates(inst, tef1_style, swapped));

    // swapping equal-valued bundles under identical valuations changes nothing
    const Instance ident = corpus_instance("prop33_goods").instance;
    CHECK_FALSE(pareto_dominates(ident, Allocation{{0, 1, 0}}, Allocation{{1, 0, 0}}));
}

TEST_CASE("pareto_dominates is irreflexive and antisymmetric") {
    SeededRng rng(31);
    for (int trial = 0; trial < 60; ++trial) {
        const int n = 2 + static_cast<int>(rng.bounded(2));
        Instance inst = gen_random(n, 4, 1, MannaKind::Mixed, 5, trial + 7);
        Allocation a, b;
        for (int o = 0; o < 4; ++o) {
            a.assignment.push_back(static_cast<int>(rng.bounded(n)));
            b.assignment.push_back(static_cast<int>(rng.bounded(n)));
        }
        CHECK_FALSE(pareto_dominates(inst, a, a));
        if (pareto_dominates(inst, a, b)) CHECK_FALSE(pareto_dominates(inst, b, a));
    }
}

TEST_CASE("is_pareto_optimal") {
    SUBCASE("unique highest valuer") {
        std::vector<std::vector<Rational>> values = {{Rational(3)}, {Rational(1)}};
        const Instance inst(2, single_rounds(1), values, MannaKind::Goods);
        CHECK(is_pareto_optimal(inst, Allocation{{0}}));
        CHECK_FALSE(is_pareto_optimal(inst, Allocation{{1}}));
    }
    SUBCASE("every TEF1 allocation of prop42 is dominated") {
        const Instance inst = corpus_instance("prop42_goods").instance;
        SearchQuery q;
        q.target = SearchTarget::TEF1;
        q.mode = SearchMode::All;
        const SearchResult all = search(inst, q);
        CHECK(all.outcome == SearchOutcome::Found);
        for (const Allocation& a : all.allocations) {
            CHECK_FALSE(is_pareto_optimal(inst, a));
            CHECK(is_pareto_optimal(inst, a, kDefaultParetoCap) == naive_pareto_optimal(inst, a.assignment));
        }
    }
    SUBCASE("cap refusal names the override flag") {
        Instance big = gen_random(4, 20, 1, MannaKind::Goods, 3, 1);
        try {
            is_pareto_optimal(big, Allocation{std::vector<int>(20, 0)}, 1000);
            FAIL("expected BudgetError");
        } catch (const BudgetError& e) {
            CHECK(std::string(e.what()).find("--po-limit") != std::string::npos);
        }
    }
}

TEST_CASE("ParetoFrontier agrees with the direct scan") {
    SeededRng rng(41);
    for (int trial = 0; trial < 25; ++trial) {
        const int n = 2 + static_cast<int>(rng.bounded(2));
        Instance inst = gen_random(n, 5, 1, MannaKind::Goods, 4, trial + 11);
        const ParetoFrontier frontier(inst);
        for_each_allocation(n, 5, [&](const std::vector<int>& a) {
            const Allocation alloc{a};
            CHECK(frontier.is_pareto_optimal(alloc) == is_pareto_optimal(inst, alloc));
        });
    }
}

TEST_CASE("p-mean welfare") {
    // utilities (2,4): one good each
    std::vector<std::vector<Rational>> v1 = {{Rational(2), Rational(0)},
                                             {Rational(0), Rational(4)}};
    const Instance i24(2, single_rounds(2), v1, MannaKind::Goods);
    const Allocation alloc{{0, 1}};
    SUBCASE("p=1 is the arithmetic mean, exactly") {
        const WelfareValue w = p_mean_welfare(i24, alloc, PMeanExponent::value(Rational(1)));
        CHECK(w.exact);
        CHECK(w.exact_value == Rational(3));
        CHECK(w.to_string() == "3");
    }
    SUBCASE("zero limit is the geometric mean") {
        std::vector<std::vector<Rational>> v2 = {{Rational(2), Rational(0)},
                                                 {Rational(0), Rational(8)}};
        const Instance i28(2, single_rounds(2), v2, MannaKind::Goods);
        const WelfareValue w = p_mean_welfare(i28, alloc, PMeanExponent::zero_limit());
        CHECK(w.exact);  // sqrt(16) = 4
        CHECK(w.exact_value == Rational(4));
        const WelfareValue inexact = p_mean_welfare(i24, alloc, PMeanExponent::zero_limit());
        CHECK_FALSE(inexact.exact);  // sqrt(8)
        CHECK(inexact.decimal.substr(0, 7) == "2.82842");
    }
    SUBCASE("negative infinity is the minimum utility") {
        const WelfareValue w = p_mean_welfare(i24, alloc, PMeanExponent::neg_infinity());
        CHECK(w.exact);
        CHECK(w.exact_value == Rational(2));
    }
    SUBCASE("p=-1 harmonic mean stays rational") {
        const WelfareValue w = p_mean_welfare(i24, alloc, PMeanExponent::value(Rational(-1)));
        CHECK(w.exact);
        CHECK(w.exact_value == parse_rational("8/3"));
    }
    SUBCASE("n times the p=1 mean is the utilitarian sum") {
        SeededRng rng(3);
        for (int trial = 0; trial < 20; ++trial) {
            const int n = 2 + static_cast<int>(rng.bounded(3));
            Instance inst = gen_random(n, 6, 1, MannaKind::Goods, 9, trial);
            Allocation a;
            Rational total(0);
            for (int o = 0; o < 6; ++o) {
                const int owner = static_cast<int>(rng.bounded(n));
                a.assignment.push_back(owner);
                total += inst.value(owner, o);
            }
            const WelfareValue w = p_mean_welfare(inst, a, PMeanExponent::value(Rational(1)));
            CHECK(w.exact_value * n == total);
        }
    }
    SUBCASE("domain errors") {
        std::vector<std::vector<Rational>> vz = {{Rational(0), Rational(0)},
                                                 {Rational(0), Rational(4)}};
        const Instance iz(2, single_rounds(2), vz, MannaKind::Goods);
        CHECK_THROWS_AS(p_mean_welfare(iz, alloc, PMeanExponent::zero_limit()), DomainError);
        CHECK_THROWS_AS(p_mean_welfare(iz, alloc, PMeanExponent::neg_infinity()), DomainError);
        CHECK_THROWS_AS(p_mean_welfare(iz, alloc, PMeanExponent::value(Rational(-2))), DomainError);
        CHECK_THROWS_AS(p_mean_welfare(i24, alloc, PMeanExponent::value(Rational(2))), InputError);
    }
    SUBCASE("non-integer p uses the high-precision path") {
        const WelfareValue w = p_mean_welfare(i24, alloc, PMeanExponent::value(parse_rational("1/2")));
        CHECK_FALSE(w.exact);
        // ((sqrt(2)+sqrt(4))/2)^2 = (sqrt(2)+2)^2/4 = 2.91421...
        CHECK(w.decimal.substr(0, 7) == "2.91421");
    }
}
