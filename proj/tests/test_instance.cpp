#include <nlohmann/json.hpp>

#include "doctest.h"
#include "support/generators.hpp"
#include "support/oracles.hpp"
#include "tefkit/fairness.hpp"
#include "tefkit/gadgets.hpp"
#include "tefkit/instance.hpp"
#include "tefkit/search.hpp"

using namespace tefkit;
using namespace tefkit::testing;

namespace {

Instance identical_goods_112() {
    std::vector<Rational> row = {Rational(1), Rational(1), Rational(2)};
    return Instance(2, single_rounds(3), {row, row}, MannaKind::Goods);
}

Instance prop42_goods() {
    return corpus_instance("prop42_goods").instance;
}

}  // namespace

TEST_CASE("bundle_value sums exactly") {
    const Instance inst = identical_goods_112();
    const std::vector<int> g12 = {0, 1};
    CHECK(bundle_value(inst, 1, g12) == Rational(2));
    CHECK(bundle_value(inst, 0, std::vector<int>{}) == Rational(0));
    const std::vector<int> g13 = {0, 2};
    CHECK(bundle_value(prop42_goods(), 0, g13) == parse_rational("31/10"));
    CHECK_THROWS_AS(bundle_value(inst, 0, std::vector<int>{7}), InputError);
    CHECK_THROWS_AS(bundle_value(inst, 5, g12), InputError);
}

TEST_CASE("instance validation") {
    std::vector<Rational> row = {Rational(1)};
    CHECK_THROWS_AS(Instance(0, {{0}}, {}, MannaKind::Goods), InputError);
    // ids must be consecutive across rounds
    CHECK_THROWS_AS(Instance(1, {{1}}, {row}, MannaKind::Goods), InputError);
    CHECK_THROWS_AS(Instance(1, {{0}, {2}}, {{Rational(1), Rational(1)}}, MannaKind::Goods),
                    InputError);
    // kind constraints are eager
    CHECK_THROWS_AS(Instance(1, {{0}}, {{Rational(-1)}}, MannaKind::Goods), InputError);
    CHECK_THROWS_AS(Instance(1, {{0}}, {{Rational(1)}}, MannaKind::Chores), InputError);
    CHECK_NOTHROW(Instance(1, {{0}}, {{Rational(-1)}}, MannaKind::Mixed));
    // matrix shape
    CHECK_THROWS_AS(Instance(2, {{0}}, {row}, MannaKind::Goods), InputError);
}

TEST_CASE("prefix_bundles") {
    const Instance inst = identical_goods_112();
    Allocation alloc{{0, 1, 0}};

    const PrefixBundles full = prefix_bundles(inst, alloc, 3);
    CHECK(full.bundles[0] == std::vector<int>{0, 2});
    CHECK(full.bundles[1] == std::vector<int>{1});

    const PrefixBundles first = prefix_bundles(inst, alloc, 1);
    CHECK(first.bundles[0] == std::vector<int>{0});
    CHECK(first.bundles[1].empty());

    CHECK_THROWS_AS(prefix_bundles(inst, alloc, 0), InputError);
    CHECK_THROWS_AS(prefix_bundles(inst, alloc, 4), InputError);

    // multi-item first round
    std::vector<Rational> row = {Rational(1), Rational(1), Rational(1)};
    const Instance multi(2, {{0, 1}, {2}}, {row, row}, MannaKind::Goods);
    const PrefixBundles t1 = prefix_bundles(multi, alloc, 1);
    CHECK(t1.bundles[0].size() + t1.bundles[1].size() == 2);
}

TEST_CASE("partition property at every prefix") {
    SeededRng rng(9);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 2 + static_cast<int>(rng.bounded(3));
        const int rounds = 1 + static_cast<int>(rng.bounded(4));
        const int per = 1 + static_cast<int>(rng.bounded(3));
        Instance inst = gen_random(n, rounds, per, MannaKind::Mixed, 5, trial + 100);
        Allocation alloc;
        for (int o = 0; o < inst.n_items(); ++o) {
            alloc.assignment.push_back(static_cast<int>(rng.bounded(n)));
        }
        for (int t = 1; t <= inst.n_rounds(); ++t) {
            const PrefixBundles pb = prefix_bundles(inst, alloc, t);
            std::size_t total = 0;
            for (const auto& b : pb.bundles) total += b.size();
            CHECK(total == static_cast<std::size_t>(inst.prefix_item_count(t)));
        }
    }
}

TEST_CASE("flatten_single_item") {
    SUBCASE("already single-item") {
        const Instance inst = identical_goods_112();
        const FlattenResult flat = flatten_single_item(inst);
        CHECK(flat.instance == inst);
        CHECK(flat.boundary == std::vector<int>{1, 2, 3});
    }
    SUBCASE("two rounds collapse to three") {
        std::vector<Rational> row = {Rational(1), Rational(2), Rational(3)};
        const Instance inst(2, {{0, 1}, {2}}, {row, row}, MannaKind::Goods);
        const FlattenResult flat = flatten_single_item(inst);
        CHECK(flat.instance.n_rounds() == 3);
        CHECK(flat.instance.rounds_all_single_item());
        CHECK(flat.boundary == std::vector<int>{2, 3});
        CHECK(flat.instance.value(1, 2) == Rational(3));
    }
    SUBCASE("verdict equality on random instances") {
        SeededRng rng(77);
        for (int trial = 0; trial < 60; ++trial) {
            const int n = 2 + static_cast<int>(rng.bounded(2));
            Instance inst = gen_random(n, 1 + trial % 4, 1 + static_cast<int>(rng.bounded(3)),
                                       trial % 2 ? MannaKind::Goods : MannaKind::Chores, 6,
                                       trial + 1);
            Allocation alloc;
            for (int o = 0; o < inst.n_items(); ++o) {
                alloc.assignment.push_back(static_cast<int>(rng.bounded(n)));
            }
            const FlattenResult flat = flatten_single_item(inst);
            const FairnessReport direct = check_temporal(inst, alloc, Relation::EF1);
            const FairnessReport mapped = check_temporal_at_boundaries(
                flat.instance, alloc, Relation::EF1, flat.boundary);
            CHECK(direct.holds == mapped.holds);
        }
    }
}

TEST_CASE("instance JSON round-trips byte-stably") {
    Instance inst = gen_random(3, 2, 2, MannaKind::Mixed, 7, 123);
    inst.set_metadata(nlohmann::json{{"note", "x"}}.dump());
    const std::string text = instance_to_string(inst);
    const Instance back = instance_from_string(text);
    CHECK(back == inst);
    CHECK(instance_to_string(back) == text);

    // rationals load from strings or integers, never floats
    CHECK_THROWS_AS(instance_from_string(R"({"agents":1,"kind":"goods","rounds":[[0]],"values":[[0.5]]})"),
                    InputError);
    const Instance i2 =
        instance_from_string(R"({"agents":1,"kind":"goods","rounds":[[0]],"values":[[3]]})");
    CHECK(i2.value(0, 0) == Rational(3));
}

TEST_CASE("allocation JSON") {
    Allocation alloc{{0, 1, 0}};
    CHECK(allocation_from_json(allocation_to_json(alloc)) == alloc);
    PartialAllocation partial{{0, 1, -1}};
    const auto j = partial_allocation_to_json(partial);
    CHECK(j.at("assignment")[2].is_null());
    CHECK(partial_allocation_from_json(j).assignment == partial.assignment);
    CHECK_THROWS_AS(allocation_from_json(j), InputError);
}
