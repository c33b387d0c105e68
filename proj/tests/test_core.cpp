#include "sds/core.hpp"

#include <doctest.h>

#include <map>
#include <random>

using namespace sds;

namespace {

Rational q(long p, long d = 1) { return make_rational(p, d); }

PreferenceRelation pref(std::initializer_list<Alternative> order) { return PreferenceRelation(std::vector(order)); }

// a=0, b=1, c=2
Profile ex1_r1() { return Profile(3, {pref({0, 1, 2}), pref({1, 2, 0}), pref({2, 0, 1})}); }
Profile ex1_r2() { return Profile(3, {pref({1, 0, 2}), pref({1, 2, 0}), pref({2, 0, 1})}); }

template <class F>
void for_each_profile(int m, int n, F&& f) {
    const auto& all = PreferenceRelation::all(m);
    std::vector<std::size_t> idx(n, 0);
    while (true) {
        std::vector<PreferenceRelation> prefs;
        for (auto i : idx) prefs.push_back(all[i]);
        f(Profile(m, prefs));
        int v = n - 1;
        while (v >= 0 && ++idx[v] == all.size()) idx[v--] = 0;
        if (v < 0) return;
    }
}

}  // namespace

TEST_CASE("rank is one-based") {
    CHECK(rank(pref({0, 1, 2}), 0) == 1);
    CHECK(rank(pref({0, 1, 2}), 2) == 3);
    CHECK(rank(pref({1, 2, 0}), 2) == 2);
    CHECK_THROWS_AS(rank(pref({0, 1, 2}), 3), DomainError);
}

TEST_CASE("rank is a bijection onto 1..m") {
    for (int m = 1; m <= 5; ++m) {
        for (const auto& p : PreferenceRelation::all(m)) {
            std::vector<int> seen(m + 1, 0);
            for (Alternative x = 0; x < m; ++x) ++seen[p.rank(x)];
            for (int r = 1; r <= m; ++r) CHECK(seen[r] == 1);
        }
    }
}

TEST_CASE("preference index round trips") {
    for (int m = 1; m <= 5; ++m) {
        const auto& all = PreferenceRelation::all(m);
        for (std::size_t i = 0; i < all.size(); ++i) CHECK(all[i].index() == i);
    }
}

TEST_CASE("invalid preference relations") {
    CHECK_THROWS_AS(pref({0, 0, 1}), DomainError);
    CHECK_THROWS_AS(pref({0, 3, 1}), DomainError);
    CHECK_THROWS_AS(Profile(3, {}), DomainError);
    CHECK_THROWS_AS(Profile(3, {pref({0, 1})}), DomainError);
}

TEST_CASE("majority margins") {
    CHECK(majority_margin(ex1_r1(), 0, 1) == 1);
    CHECK(majority_margin(ex1_r1(), 1, 0) == -1);
    Profile inverse(3, {pref({0, 1, 2}), pref({2, 1, 0})});
    for (Alternative x = 0; x < 3; ++x) {
        for (Alternative y = 0; y < 3; ++y) {
            if (x != y) CHECK(majority_margin(inverse, x, y) == 0);
        }
    }
    CHECK_THROWS_AS(majority_margin(ex1_r1(), 1, 1), DomainError);
}

TEST_CASE("margin antisymmetry and Condorcet uniqueness, exhaustive m<=4, n<=4") {
    for (int m = 2; m <= 4; ++m) {
        for (int n = 1; n <= (m == 4 ? 3 : 4); ++n) {
            for_each_profile(m, n, [&](const Profile& r) {
                int winners = 0;
                for (Alternative x = 0; x < m; ++x) {
                    bool wins = true;
                    for (Alternative y = 0; y < m; ++y) {
                        if (x == y) continue;
                        REQUIRE(majority_margin(r, x, y) == -majority_margin(r, y, x));
                        if (majority_margin(r, x, y) <= 0) wins = false;
                    }
                    winners += wins;
                }
                REQUIRE(winners <= 1);
                REQUIRE(condorcet_winner(r).has_value() == (winners == 1));
            });
        }
    }
}

TEST_CASE("Condorcet winners") {
    CHECK(condorcet_winner(ex1_r2()) == 1);
    CHECK_FALSE(condorcet_winner(ex1_r1()).has_value());
    CHECK(condorcet_winner(Profile(3, {pref({0, 1, 2}), pref({0, 1, 2})})) == 0);
}

TEST_CASE("Pareto optimal sets") {
    Profile unanimous(3, {pref({0, 1, 2}), pref({0, 1, 2}), pref({0, 1, 2})});
    CHECK(pareto_optimal_set(unanimous) == std::set<Alternative>{0});
    CHECK(pareto_optimal_set(ex1_r1()) == std::set<Alternative>{0, 1, 2});
    CHECK(pareto_optimal_set(Profile(3, {pref({0, 1, 2})})) == std::set<Alternative>{0});
}

TEST_CASE("voter and alternative permutations") {
    Profile r = ex1_r1();
    CHECK(permute_voters(r, {0, 1, 2}) == r);
    CHECK(permute_voters(permute_voters(r, {1, 2, 0}), {2, 0, 1}) == r);
    Profile two(2, {pref({0, 1}), pref({1, 0})});
    CHECK(permute_voters(two, {1, 0}) == Profile(2, {pref({1, 0}), pref({0, 1})}));
    CHECK_THROWS_AS(permute_voters(r, {0, 0, 1}), DomainError);

    CHECK(permute_alternatives(r, {0, 1, 2}) == r);
    Profile single(3, {pref({0, 1, 2})});
    CHECK(permute_alternatives(single, {1, 0, 2}) == Profile(3, {pref({1, 0, 2})}));
    CHECK(permute_alternatives(permute_alternatives(r, {1, 0, 2}), {1, 0, 2}) == r);
    CHECK_THROWS_AS(permute_alternatives(r, {0, 1, 1}), DomainError);
}

TEST_CASE("rank matrices") {
    Profile unanimous(3, {pref({0, 1, 2}), pref({0, 1, 2}), pref({0, 1, 2})});
    auto rm = rank_matrix(unanimous);
    CHECK(rm.rows == std::vector<std::vector<int>>{{1, 1, 1}, {2, 2, 2}, {3, 3, 3}});
    auto cyc = rank_matrix(ex1_r1());
    for (const auto& row : cyc.rows) CHECK(row == std::vector<int>{1, 2, 3});
}

TEST_CASE("rank matrix is invariant under voter permutations, exhaustive m=3 n=3") {
    std::vector<std::vector<int>> perms{{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    for_each_profile(3, 3, [&](const Profile& r) {
        for (const auto& pi : perms) REQUIRE(rank_matrix(permute_voters(r, pi)) == rank_matrix(r));
    });
}

TEST_CASE("lottery invariants") {
    CHECK_THROWS_AS(Lottery({q(1, 2), q(1, 3)}), DomainError);
    CHECK_THROWS_AS(Lottery({q(3, 2), q(-1, 2)}), DomainError);
    CHECK_NOTHROW(Lottery({q(1, 2), q(1, 2)}));
    CHECK(Lottery::uniform(3) == Lottery({q(1, 3), q(1, 3), q(1, 3)}));
    CHECK(mix(Lottery::point(2, 0), Lottery::point(2, 1), q(1, 4)) == Lottery({q(1, 4), q(3, 4)}));
}

TEST_CASE("expected utilities on the three-voter cycle") {
    auto uniform = Lottery::uniform(3);
    CHECK(expected_utility(uniform, UtilityVector({3, 1, 0}), pref({0, 1, 2})) == q(4, 3));
    CHECK(expected_utility(uniform, UtilityVector({3, 2, 0}), pref({0, 1, 2})) == q(5, 3));
    UtilityVector u({q(7), q(2), q(-1)});
    CHECK(expected_utility(Lottery::point(3, 2), u, pref({2, 0, 1})) == 7);
    CHECK_THROWS_AS(expected_utility(Lottery::uniform(2), u, pref({0, 1, 2})), DomainError);
}

TEST_CASE("utility vectors must be strictly decreasing") {
    CHECK_THROWS_AS(UtilityVector({1, 1, 0}), DomainError);
    CHECK_THROWS_AS(UtilityVector({0, 1, 2}), DomainError);
    CHECK(UtilityVector::closure_point({1, 1, 0}).values() == std::vector<Rational>{1, 1, 0});
    CHECK_THROWS_AS(UtilityVector::closure_point({1, 1, 1}), DomainError);
}

TEST_CASE("affine invariance of lottery comparisons") {
    std::mt19937 rng(11);
    std::uniform_int_distribution<int> d(1, 9);
    std::uniform_int_distribution<int> s(-9, 9);
    for (int trial = 0; trial < 200; ++trial) {
        int m = 3 + trial % 3;
        std::vector<Rational> vals(m);
        Rational acc = s(rng);
        for (int r = m - 1; r >= 0; --r) {
            acc += q(d(rng), d(rng));
            vals[r] = acc;
        }
        UtilityVector u(vals);
        Rational a = q(d(rng), d(rng));
        Rational b = q(s(rng), d(rng));
        std::vector<Rational> scaled;
        for (auto& v : vals) scaled.push_back(a * v + b);
        UtilityVector u2(scaled);
        auto rand_lottery = [&] {
            std::vector<Rational> w(m);
            Rational total;
            for (auto& x : w) {
                x = d(rng);
                total += x;
            }
            for (auto& x : w) x /= total;
            return Lottery(w);
        };
        auto p = rand_lottery();
        auto l = rand_lottery();
        const auto& pr = PreferenceRelation::all(m)[trial % PreferenceRelation::all(m).size()];
        Rational d1 = expected_utility(p, u, pr) - expected_utility(l, u, pr);
        Rational d2 = expected_utility(p, u2, pr) - expected_utility(l, u2, pr);
        CHECK(sgn(d1) == sgn(d2));
    }
}

TEST_CASE("utility set presets") {
    auto sd = UtilitySet::sd(3);
    CHECK(sd.kind() == UtilitySet::Kind::polytope);
    CHECK(sd.interior_point().strict());
    auto v = UtilitySet::rdk(3, 1).vertices();
    // u(1)=1, u(3)=0, 1-u2 >= u2  =>  u2 in [0, 1/2]
    CHECK(v.size() == 2);
    CHECK(v[0].values() == std::vector<Rational>{1, 0, 0});
    CHECK(v[1].values() == std::vector<Rational>{1, q(1, 2), 0});
    auto eq = UtilitySet::equidistant(3).vertices();
    REQUIRE(eq.size() == 1);
    CHECK(eq[0].values() == std::vector<Rational>{1, q(1, 2), 0});
    CHECK(UtilitySet::omni(5).contains(UtilityVector({9, 3, 2, 1, 0})));
    CHECK_FALSE(UtilitySet::omni(5).contains(UtilityVector({q(89, 10), 3, 2, 1, 0})));
    CHECK(UtilitySet::eps_indiff(3, q(1, 4)).contains(UtilityVector({q(9, 8), 1, 0})));
    CHECK_FALSE(UtilitySet::eps_indiff(3, q(1, 4)).contains(UtilityVector({q(5, 4), 1, 0})));
    // empty strict interior
    std::vector<Rational> c{1, -1, 0};
    CHECK_THROWS_AS(UtilitySet::polytope(3, {RankConstraint{c, UtilityRelation::eq}}), DomainError);
    // not translation invariant
    CHECK_THROWS_AS(UtilitySet::polytope(3, {RankConstraint{{1, 0, 0}, UtilityRelation::ge}}), DomainError);
}

TEST_CASE("profile text format") {
    auto doc = parse_profile("# comment\nalternatives: a b c\n1: a > b > c\n2: b > c > a\n");
    CHECK(doc.names == std::vector<std::string>{"a", "b", "c"});
    REQUIRE(doc.profile.voters() == 3);
    CHECK(doc.profile[1] == pref({1, 2, 0}));
    CHECK(doc.profile[2] == pref({1, 2, 0}));
    auto text = format_profile(doc.profile, doc.names);
    CHECK(parse_profile(text).profile == doc.profile);
    CHECK_THROWS_AS(parse_profile("alternatives: a b\n1: a > c\n"), DomainError);
    CHECK_THROWS_AS(parse_profile("1: a > b\n"), DomainError);
    CHECK_THROWS_AS(parse_profile("alternatives: a b\n0: a > b\n"), DomainError);
}
