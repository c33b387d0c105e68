#include "sds/manip.hpp"

#include "support.hpp"

#include <doctest.h>

using namespace sds;
using namespace sds::test;

namespace {

UtilityVector uv(std::initializer_list<Rational> v) { return UtilityVector(std::vector<Rational>(v)); }

// x = a (second), y = b (voter 0's favourite), z = c
Deviation thm1_gadget() {
    return Deviation{prof({"bac", "abc", "cab"}), 0, pr("acb")};
}

}  // namespace

TEST_CASE("gain on the three-voter cycle") {
    auto f = rules::cond();
    Deviation dev{prof({"abc", "bca", "cab"}), 0, pr("bac")};
    CHECK(gain(f, dev, uv({3, 2, 0})) == q(1, 3));
    CHECK(gain(f, dev, uv({3, 1, 0})) == q(-1, 3));
    CHECK(gain(f, dev, uv({2, 1, 0})) == 0);
    Deviation same{prof({"abc", "abc", "abc"}), 0, pr("acb")};
    CHECK(gain(rules::rd(), same, uv({5, 1, 0})) == 0);
}

TEST_CASE("best manipulating utility over polytopes") {
    auto f = rules::rd_k(1);
    CHECK_FALSE(best_manipulation_utility(f, thm1_gadget(), UtilitySet::rdk(3, 1)).has_value());
    // u(1) - u(2) <= 9/10 (u(2) - u(3))
    auto loose = UtilitySet::polytope(3, {RankConstraint{{1, q(-19, 10), q(9, 10)}, UtilityRelation::le}});
    auto w = best_manipulation_utility(f, thm1_gadget(), loose);
    REQUIRE(w.has_value());
    CHECK(w->gain > 0);
    CHECK(w->utility.strict());
    CHECK(replay(f, *w, &loose));
    Deviation flat{prof({"abc", "abc", "abc"}), 0, pr("acb")};
    CHECK_FALSE(best_manipulation_utility(rules::rd(), flat, UtilitySet::sd(3)).has_value());
    CHECK_THROWS_AS(best_manipulation_utility(f, thm1_gadget(), UtilitySet::finite({uv({2, 1, 0})})), DomainError);
}

TEST_CASE("vertex sets are perturbed into strict members") {
    auto f = rules::rd_k(1);
    auto set = UtilitySet::sd(3).as_vertex_list();
    auto w = best_manipulation_utility(f, thm1_gadget(), set);
    REQUIRE(w.has_value());
    CHECK(w->utility.strict());
    CHECK(replay(f, *w, &set));
}

TEST_CASE("U-strategyproofness sweeps") {
    auto r = check_u_sp(rules::rd(), UtilitySet::sd(3), 3, 3);
    CHECK(r.pass());
    CHECK(check_u_sp(rules::rd(), UtilitySet::sd(3), 3, 3, {.reduction = SweepReduction::full}).pass());
    CHECK(check_u_sp(rules::cond(), UtilitySet::equidistant(3), 3, 3).pass());
    auto c = rules::cond();
    auto u4 = UtilitySet::finite({uv({5, 2, 1, 0})});
    auto bad = check_u_sp(c, u4, 4, 3);
    REQUIRE_FALSE(bad.pass());
    CHECK(replay(c, *bad.witness, &u4));
}

TEST_CASE("u^Pi-strategyproofness of rd_k at the boundary") {
    auto f = rules::rd_k(1);
    CHECK(check_u_pi_sp(f, uv({2, 1, 0}), 3, 3).pass());
    auto r = check_u_pi_sp(f, uv({q(19, 10), 1, 0}), 3, 3);
    REQUIRE_FALSE(r.pass());
    CHECK(r.witness->gain == q(1, 30));
    CHECK(replay(f, *r.witness));
    CHECK(check_u_pi_sp(rules::omni_star(), uv({9, 3, 2, 1, 0}), 5, 5).pass());
    CHECK_FALSE(check_u_pi_sp(rules::omni_star(), uv({q(89, 10), 3, 2, 1, 0}), 5, 5).pass());
}

TEST_CASE("reduced sweeps agree with full sweeps") {
    std::vector<SDS> rules_under_test{rules::rd(), rules::rd_k(1), rules::omni_star(), rules::cond(),
                                      rules::uniform()};
    std::vector<UtilityVector> us{uv({2, 1, 0}), uv({q(19, 10), 1, 0}), uv({3, 1, 0}), uv({q(3, 2), 1, 0})};
    for (int n : {3, 4}) {
        for (const auto& f : rules_under_test) {
            if (!f.in_domain(3, n)) continue;
            for (const auto& u : us) {
                bool full = check_u_pi_sp(f, u, 3, n, {.reduction = SweepReduction::full}).pass();
                for (auto r : {SweepReduction::anonymous, SweepReduction::symmetric, SweepReduction::tops}) {
                    if (r > strongest_reduction(f.symmetries())) continue;
                    auto rep = check_u_pi_sp(f, u, 3, n, {.reduction = r});
                    CHECK(rep.reduction == r);
                    CHECK(rep.pass() == full);
                    if (!rep.pass()) CHECK(replay(f, *rep.witness));
                }
            }
        }
    }
    CHECK_THROWS_AS(check_u_pi_sp(rules::cond(), us[0], 3, 3, {.reduction = SweepReduction::tops}), DomainError);
}

TEST_CASE("parallel sweeps return the sequential witness") {
    auto f = rules::rd_k(1);
    auto seq = check_u_pi_sp(f, uv({q(19, 10), 1, 0}), 3, 5, {.reduction = SweepReduction::full});
    auto par = check_u_pi_sp(f, uv({q(19, 10), 1, 0}), 3, 5, {.reduction = SweepReduction::full, .jobs = 4});
    REQUIRE_FALSE(seq.pass());
    REQUIRE_FALSE(par.pass());
    CHECK(seq.witness->deviation.profile == par.witness->deviation.profile);
    CHECK(seq.witness->deviation.misreport == par.witness->deviation.misreport);
    CHECK(check_u_pi_sp(rules::rd(), uv({3, 1, 0}), 3, 4, {.reduction = SweepReduction::full, .jobs = 3}).pass());
}

TEST_CASE("declared symmetries that do not hold are detected") {
    SDS liar("liar", [](const Profile& r) { return Lottery::point(r.alternatives(), r[0].top()); },
             [](int, int) { return std::nullopt; }, Symmetries{true, true, true, true});
    CHECK_THROWS_AS(check_u_pi_sp(liar, uv({2, 1, 0}), 3, 3), DomainError);
}

TEST_CASE("mixtures preserve U-strategyproofness") {
    auto set = UtilitySet::rdk(3, 1);
    for (Rational lambda : {q(0), q(1, 3), q(1, 2), q(2, 3), q(1)}) {
        CHECK(check_u_sp(rules::mix(rules::rd(), rules::rd_k(1), lambda), set, 3, 3).pass());
    }
}

TEST_CASE("symmetric closure of a single utility vector") {
    auto u = uv({2, 1, 0});
    CHECK(check_u_sp(rules::cond(), UtilitySet::finite({u}), 3, 3).pass() ==
          check_u_pi_sp(rules::cond(), u, 3, 3).pass());
    auto w = uv({3, 1, 0});
    CHECK(check_u_sp(rules::cond(), UtilitySet::finite({w}), 3, 3).pass() ==
          check_u_pi_sp(rules::cond(), w, 3, 3).pass());
}

TEST_CASE("strategyproofness is closed under convex combinations of utilities") {
    auto f = rules::rd_k(1);
    auto a = uv({2, 1, 0});
    auto b = uv({3, 1, 0});
    REQUIRE(check_u_pi_sp(f, a, 3, 3).pass());
    REQUIRE(check_u_pi_sp(f, b, 3, 3).pass());
    CHECK(check_u_pi_sp(f, uv({q(5, 2), 1, 0}), 3, 3).pass());
    CHECK(check_u_sp(f, UtilitySet::vertex_list({a, b}), 3, 3).pass());
}

TEST_CASE("group strategyproofness") {
    CHECK(check_group_sp(rules::rd(), UtilitySet::sd(3), 3, 3).pass());
    CHECK(check_group_sp(rules::cond(), UtilitySet::equidistant(3), 3, 4).pass());
    auto f = rules::rd_k(1);
    auto u = UtilitySet::finite({uv({q(19, 10), 1, 0})});
    auto single = check_u_sp(f, u, 3, 3);
    auto group = check_group_sp(f, u, 3, 3);
    CHECK(single.pass() == group.pass());
    REQUIRE_FALSE(group.pass());
    CHECK(replay(f, *group.witness, &u));
    auto full = check_group_sp(rules::cond(), UtilitySet::equidistant(3), 3, 3, {.reduction = SweepReduction::full});
    CHECK(full.pass());
    SPOptions tight;
    tight.coalition_budget = 2;
    CHECK_THROWS_AS(check_group_sp(rules::rd(), UtilitySet::sd(3), 3, 3, tight), Refusal);
}

TEST_CASE("strategyproofness boundaries") {
    std::vector<Rational> tail{3, 2, 1, 0};
    CHECK(sp_boundary(rules::rd_k(1), tail, 5, 5).value == 6);
    CHECK(sp_boundary(rules::rd_k(2), tail, 5, 7).value == 9);
    CHECK(sp_boundary(rules::omni_star(), tail, 5, 5).value == 9);
    CHECK(sp_boundary(rules::rd(), tail, 5, 5).value == 3);
    CHECK(sp_boundary(rules::omni_star(), {1, 0}, 3, 5).value == 2);
    CHECK_THROWS_AS(sp_boundary(rules::rd(), {1, 2}, 3, 3), DomainError);
    // A rule that rewards ranking one's favourite last cannot have a boundary.
    SDS perverse("perverse", [](const Profile& r) { return Lottery::point(r.alternatives(), r[0].bottom()); },
                 [](int, int) { return std::nullopt; }, Symmetries{false, true, false, false});
    CHECK_THROWS_AS(sp_boundary(perverse, {1, 0}, 3, 2), DomainError);
}
