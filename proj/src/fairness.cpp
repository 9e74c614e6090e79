#include "tefkit/fairness.hpp"

#include <mpfr.h>

#include <algorithm>
#include <nlohmann/json.hpp>

#include "tefkit/errors.hpp"

namespace tefkit {

using nlohmann::json;

std::string to_string(Relation relation) {
    switch (relation) {
        case Relation::EF: return "ef";
        case Relation::EF1: return "ef1";
        case Relation::EFX: return "efx";
    }
    throw InternalError("unreachable relation");
}

Relation relation_from_string(const std::string& text) {
    if (text == "ef") return Relation::EF;
    if (text == "ef1") return Relation::EF1;
    if (text == "efx") return Relation::EFX;
    throw InputError("unknown relation '" + text + "' (expected ef|ef1|efx)");
}

json fairness_report_to_json(const FairnessReport& report) {
    json j;
    j["holds"] = report.holds;
    if (report.witness) {
        j["witness"] = {{"round", report.witness->round},
                        {"envious", report.witness->envious},
                        {"envied", report.witness->envied}};
    } else {
        j["witness"] = nullptr;
    }
    return j;
}

namespace {

// Per-(viewer, owner) aggregates of one cumulative allocation. max/min are
// only meaningful where count[owner] > 0.
struct EnvyTable {
    int n = 0;
    std::vector<Rational> sum;  // n*n, viewer-major
    std::vector<Rational> max;
    std::vector<Rational> min;
    std::vector<int> count;

    explicit EnvyTable(int n_agents) : n(n_agents), sum(n * n), max(n * n), min(n * n), count(n, 0) {}

    Rational& at(std::vector<Rational>& m, int viewer, int owner) { return m[viewer * n + owner]; }
    const Rational& get(const std::vector<Rational>& m, int viewer, int owner) const {
        return m[viewer * n + owner];
    }

    void add_item(const Instance& instance, int owner, int item) {
        for (int i = 0; i < n; ++i) {
            const Rational& v = instance.value(i, item);
            at(sum, i, owner) += v;
            if (count[owner] == 0) {
                at(max, i, owner) = v;
                at(min, i, owner) = v;
            } else {
                if (v > get(max, i, owner)) at(max, i, owner) = v;
                if (v < get(min, i, owner)) at(min, i, owner) = v;
            }
        }
        ++count[owner];
    }

    // True iff agent i accepts the relation against agent j under `kind`.
    bool pair_holds(MannaKind kind, Relation relation, int i, int j) const {
        const Rational& own = get(sum, i, i);
        const Rational& other = get(sum, i, j);
        if (relation == Relation::EF) return own >= other;

        const bool own_nonempty = count[i] > 0;
        const bool other_nonempty = count[j] > 0;
        switch (kind) {
            case MannaKind::Goods:
                // Drop one good from the envied bundle; vacuous when empty.
                if (!other_nonempty) return true;
                if (relation == Relation::EF1) return own >= other - get(max, i, j);
                return own >= other - get(min, i, j);
            case MannaKind::Chores:
                // Drop one chore from the envious agent's own bundle.
                if (!own_nonempty) return true;
                if (relation == Relation::EF1) return own - get(min, i, i) >= other;
                return own - get(max, i, i) >= other;
            case MannaKind::Mixed:
                // One item from either side (Appendix D union form).
                if (!own_nonempty && !other_nonempty) return own >= other;
                if (relation == Relation::EF1) {
                    if (own_nonempty && own - get(min, i, i) >= other) return true;
                    if (other_nonempty && own >= other - get(max, i, j)) return true;
                    return false;
                }
                if (own_nonempty && own - get(max, i, i) < other) return false;
                if (other_nonempty && own < other - get(min, i, j)) return false;
                return true;
        }
        throw InternalError("unreachable manna kind");
    }

    // Earliest failing ordered pair in (envious, envied) order, if any.
    std::optional<std::pair<int, int>> first_violation(MannaKind kind, Relation relation) const {
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                if (!pair_holds(kind, relation, i, j)) return std::make_pair(i, j);
            }
        }
        return std::nullopt;
    }
};

}  // namespace

FairnessReport check_pairwise(const Instance& instance, const PrefixBundles& bundles,
                              Relation relation) {
    if (bundles.bundles.size() != static_cast<std::size_t>(instance.n_agents())) {
        throw InputError("bundle count does not match agent count");
    }
    EnvyTable table(instance.n_agents());
    for (int owner = 0; owner < instance.n_agents(); ++owner) {
        for (int item : bundles.bundles[owner]) table.add_item(instance, owner, item);
    }
    if (auto pair = table.first_violation(instance.kind(), relation)) {
        return {false, Witness{bundles.round, pair->first, pair->second}};
    }
    return {true, std::nullopt};
}

FairnessReport check_temporal(const Instance& instance, const Allocation& alloc,
                              Relation relation) {
    validate_allocation(instance, alloc);
    EnvyTable table(instance.n_agents());
    int next_item = 0;
    for (int t = 1; t <= instance.n_rounds(); ++t) {
        const int upto = instance.prefix_item_count(t);
        for (; next_item < upto; ++next_item) {
            table.add_item(instance, alloc.assignment[next_item], next_item);
        }
        if (auto pair = table.first_violation(instance.kind(), relation)) {
            return {false, Witness{t, pair->first, pair->second}};
        }
    }
    return {true, std::nullopt};
}

FairnessReport check_temporal_at_boundaries(const Instance& instance, const Allocation& alloc,
                                            Relation relation, std::span<const int> boundaries) {
    validate_allocation(instance, alloc);
    EnvyTable table(instance.n_agents());
    int next_item = 0;
    for (int t : boundaries) {
        const int upto = instance.prefix_item_count(t);
        for (; next_item < upto; ++next_item) {
            table.add_item(instance, alloc.assignment[next_item], next_item);
        }
        if (auto pair = table.first_violation(instance.kind(), relation)) {
            return {false, Witness{t, pair->first, pair->second}};
        }
    }
    return {true, std::nullopt};
}

namespace {

std::vector<Rational> utilities_of(const Instance& instance, const Allocation& alloc) {
    std::vector<Rational> u(instance.n_agents());
    for (int o = 0; o < instance.n_items(); ++o) {
        u[alloc.assignment[o]] += instance.value(alloc.assignment[o], o);
    }
    return u;
}

bool vector_dominates(const std::vector<Rational>& a, const std::vector<Rational>& b) {
    bool strict = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] < b[i]) return false;
        if (a[i] > b[i]) strict = true;
    }
    return strict;
}

void ensure_enumeration_within(const Instance& instance, std::uint64_t limit) {
    Integer total;
    mpz_ui_pow_ui(total.get_mpz_t(), static_cast<unsigned long>(instance.n_agents()),
                  static_cast<unsigned long>(instance.n_items()));
    if (total > Integer(static_cast<unsigned long>(limit))) {
        throw BudgetError("PO brute force needs n^m = " + total.get_str() +
                          " candidate allocations, above the cap of " + std::to_string(limit) +
                          "; raise it with --po-limit to override");
    }
}

// Depth-first enumeration of all n^m utility vectors with O(1) updates per
// step; visit() is called once per complete allocation.
template <class Visit>
void enumerate_utilities_rec(const Instance& instance, int item, std::vector<Rational>& u,
                             Visit& visit) {
    if (item == instance.n_items()) {
        visit(u);
        return;
    }
    for (int a = 0; a < instance.n_agents(); ++a) {
        u[a] += instance.value(a, item);
        enumerate_utilities_rec(instance, item + 1, u, visit);
        u[a] -= instance.value(a, item);
    }
}

}  // namespace

bool pareto_dominates(const Instance& instance, const Allocation& a, const Allocation& b) {
    validate_allocation(instance, a);
    validate_allocation(instance, b);
    return vector_dominates(utilities_of(instance, a), utilities_of(instance, b));
}

namespace {

bool find_dominator(const Instance& instance, int item, std::vector<Rational>& u,
                    const std::vector<Rational>& target) {
    if (item == instance.n_items()) return vector_dominates(u, target);
    for (int a = 0; a < instance.n_agents(); ++a) {
        u[a] += instance.value(a, item);
        const bool found = find_dominator(instance, item + 1, u, target);
        u[a] -= instance.value(a, item);
        if (found) return true;
    }
    return false;
}

}  // namespace

bool is_pareto_optimal(const Instance& instance, const Allocation& alloc, std::uint64_t limit) {
    validate_allocation(instance, alloc);
    ensure_enumeration_within(instance, limit);
    const std::vector<Rational> target = utilities_of(instance, alloc);
    std::vector<Rational> u(instance.n_agents());
    return !find_dominator(instance, 0, u, target);
}

ParetoFrontier::ParetoFrontier(const Instance& instance, std::uint64_t limit)
    : instance_(instance) {
    ensure_enumeration_within(instance, limit);
    std::vector<Rational> u(instance.n_agents());
    auto visit = [&](const std::vector<Rational>& cand) {
        for (const auto& f : frontier_) {
            if (f == cand || vector_dominates(f, cand)) return;
        }
        std::erase_if(frontier_, [&](const std::vector<Rational>& f) {
            return vector_dominates(cand, f);
        });
        frontier_.push_back(cand);
    };
    enumerate_utilities_rec(instance_, 0, u, visit);
}

bool ParetoFrontier::is_pareto_optimal(const Allocation& alloc) const {
    const std::vector<Rational> u = utilities_of(instance_, alloc);
    return std::none_of(frontier_.begin(), frontier_.end(),
                        [&](const auto& f) { return vector_dominates(f, u); });
}

// ---- p-mean welfare ----

namespace {

constexpr mpfr_prec_t kWelfarePrecision = 256;

std::optional<Rational> exact_root(const Rational& q, unsigned long k) {
    // q > 0 reduced; the k-th root is rational iff num and den are perfect
    // k-th powers.
    Integer rn, rd;
    if (mpz_root(rn.get_mpz_t(), q.get_num().get_mpz_t(), k) == 0) return std::nullopt;
    if (mpz_root(rd.get_mpz_t(), q.get_den().get_mpz_t(), k) == 0) return std::nullopt;
    Rational r(rn, rd);
    r.canonicalize();
    return r;
}

std::string mpfr_decimal(mpfr_t x) {
    char buf[128];
    mpfr_snprintf(buf, sizeof(buf), "%.30Rg", x);
    return std::string(buf);
}

WelfareValue exact_welfare(Rational value) {
    mpfr_t x;
    mpfr_init2(x, kWelfarePrecision);
    mpfr_set_q(x, value.get_mpq_t(), MPFR_RNDN);
    WelfareValue result{true, std::move(value), mpfr_decimal(x)};
    mpfr_clear(x);
    return result;
}

WelfareValue approx_welfare(mpfr_t x) {
    return WelfareValue{false, Rational(0), mpfr_decimal(x)};
}

Rational rational_int_pow(const Rational& base, long exponent) {
    // exponent != 0; base > 0 when exponent < 0.
    Rational result;
    const unsigned long k = static_cast<unsigned long>(exponent < 0 ? -exponent : exponent);
    Integer num, den;
    mpz_pow_ui(num.get_mpz_t(), base.get_num().get_mpz_t(), k);
    mpz_pow_ui(den.get_mpz_t(), base.get_den().get_mpz_t(), k);
    if (exponent < 0) std::swap(num, den);
    result = Rational(num, den);
    result.canonicalize();
    return result;
}

}  // namespace

WelfareValue p_mean_welfare(const Instance& instance, const Allocation& alloc,
                            const PMeanExponent& p) {
    validate_allocation(instance, alloc);
    const std::vector<Rational> u = utilities_of(instance, alloc);
    const int n = instance.n_agents();

    PMeanExponent::Kind kind = p.kind;
    if (kind == PMeanExponent::Kind::Value) {
        if (p.p > 1) throw InputError("p-mean welfare requires p <= 1, got " + format_rational(p.p));
        if (p.p == 0) kind = PMeanExponent::Kind::ZeroLimit;
    }

    const bool nonpositive_p = kind != PMeanExponent::Kind::Value || p.p <= 0;
    if (nonpositive_p) {
        for (const Rational& ui : u) {
            if (ui <= 0) {
                throw DomainError("the p-mean welfare is ill-defined: utility " +
                                  format_rational(ui) + " is not positive while p <= 0");
            }
        }
    }

    if (kind == PMeanExponent::Kind::NegInfinity) {
        return exact_welfare(*std::min_element(u.begin(), u.end()));
    }

    if (kind == PMeanExponent::Kind::ZeroLimit) {
        // Geometric mean (prod u_i)^(1/n).
        Rational prod(1);
        for (const Rational& ui : u) prod *= ui;
        if (auto root = exact_root(prod, static_cast<unsigned long>(n))) {
            return exact_welfare(*root);
        }
        mpfr_t x;
        mpfr_init2(x, kWelfarePrecision);
        mpfr_set_q(x, prod.get_mpq_t(), MPFR_RNDN);
        mpfr_rootn_ui(x, x, static_cast<unsigned long>(n), MPFR_RNDN);
        WelfareValue result = approx_welfare(x);
        mpfr_clear(x);
        return result;
    }

    if (p.p == 1) {
        Rational mean;
        for (const Rational& ui : u) mean += ui;
        mean /= n;
        return exact_welfare(mean);
    }

    if (p.p.get_den() == 1) {
        // Integer p < 1: the inner mean is exact; take the |p|-th root.
        const long pe = static_cast<long>(p.p.get_num().get_si());
        Rational mean;
        for (const Rational& ui : u) mean += rational_int_pow(ui, pe);
        mean /= n;
        const unsigned long k = static_cast<unsigned long>(-pe);
        if (pe == -1) return exact_welfare(Rational(1) / mean);
        if (auto root = exact_root(mean, k)) {
            return exact_welfare(Rational(1) / *root);
        }
        mpfr_t x;
        mpfr_init2(x, kWelfarePrecision);
        mpfr_set_q(x, mean.get_mpq_t(), MPFR_RNDN);
        mpfr_rootn_ui(x, x, k, MPFR_RNDN);
        mpfr_ui_div(x, 1, x, MPFR_RNDN);
        WelfareValue result = approx_welfare(x);
        mpfr_clear(x);
        return result;
    }

    // Non-integer p: full high-precision evaluation.
    for (const Rational& ui : u) {
        if (ui < 0) {
            throw DomainError("negative utility " + format_rational(ui) +
                              " with non-integer exponent is ill-defined");
        }
    }
    mpfr_t sum, term, pe, x;
    mpfr_inits2(kWelfarePrecision, sum, term, pe, x, static_cast<mpfr_ptr>(nullptr));
    mpfr_set_q(pe, p.p.get_mpq_t(), MPFR_RNDN);
    mpfr_set_ui(sum, 0, MPFR_RNDN);
    for (const Rational& ui : u) {
        mpfr_set_q(term, ui.get_mpq_t(), MPFR_RNDN);
        mpfr_pow(term, term, pe, MPFR_RNDN);
        mpfr_add(sum, sum, term, MPFR_RNDN);
    }
    mpfr_div_ui(sum, sum, static_cast<unsigned long>(n), MPFR_RNDN);
    mpfr_ui_div(x, 1, pe, MPFR_RNDN);
    mpfr_pow(sum, sum, x, MPFR_RNDN);
    WelfareValue result = approx_welfare(sum);
    mpfr_clears(sum, term, pe, x, static_cast<mpfr_ptr>(nullptr));
    return result;
}

}  // namespace tefkit
