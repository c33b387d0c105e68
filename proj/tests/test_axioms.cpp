#include "sds/axioms.hpp"

#include "support.hpp"

#include <doctest.h>

using namespace sds;
using namespace sds::test;

namespace {

void require_replays(const SDS& f, const AxiomReport& r) {
    REQUIRE_FALSE(r.pass());
    CHECK(replay(f, *r.counterexample));
}

}  // namespace

TEST_CASE("anonymity") {
    auto r = check_anonymity(rules::rd(), 3, 3);
    CHECK(r.pass());
    CHECK(r.profiles_visited == 216);
    CHECK(check_anonymity(rules::cond(), 3, 3).pass());
    auto dict = rules::dictatorship(0);
    require_replays(dict, check_anonymity(dict, 3, 2));
}

TEST_CASE("neutrality") {
    CHECK(check_neutrality(rules::rd(), 3, 3).pass());
    CHECK(check_neutrality(rules::omni_star(), 3, 4).pass());
    auto c = rules::constant(0);
    require_replays(c, check_neutrality(c, 3, 2));
}

TEST_CASE("rank-basedness") {
    CHECK(check_rank_basedness(rules::rd(), 3, 3).pass());
    CHECK(check_rank_basedness(rules::rd_k(1), 3, 3).pass());
    auto c = rules::cond();
    auto r = check_rank_basedness(c, 3, 5);
    require_replays(c, r);
    const auto& v = *r.counterexample;
    CHECK(rank_matrix(v.profiles[0]) == rank_matrix(v.profiles[1]));
    CHECK(condorcet_winner(v.profiles[0]) != condorcet_winner(v.profiles[1]));
}

TEST_CASE("unanimity") {
    CHECK(check_k_unanimity(rules::rd_k(1), 1, 3, 5).pass());
    auto f = rules::rd();
    require_replays(f, check_k_unanimity(f, 1, 3, 3));
    CHECK(check_k_unanimity(rules::omni_star(), 2, 3, 5).pass());
    CHECK_THROWS_AS(check_k_unanimity(rules::rd(), 2, 3, 4), DomainError);
}

TEST_CASE("(k, alpha)-unanimity") {
    for (int k = 0; k <= 3; ++k) CHECK(check_k_alpha_unanimity(rules::rd(), k, q(4 - k, 4), 3, 4).pass());
    auto f = rules::rd();
    require_replays(f, check_k_alpha_unanimity(f, 1, q(2, 3) + q(1, 100), 3, 3));
    CHECK(check_k_alpha_unanimity(rules::dictatorship(1), 2, 0, 3, 3).pass());
    CHECK_THROWS_AS(check_k_alpha_unanimity(rules::rd(), 1, q(3, 2), 3, 3), DomainError);
}

TEST_CASE("Condorcet-consistency") {
    CHECK(check_condorcet_consistency(rules::cond(), 3, 3).pass());
    auto f = rules::rd();
    require_replays(f, check_condorcet_consistency(f, 3, 3));
    CHECK(check_condorcet_consistency(rules::f3(), 3, 4).pass());
}

TEST_CASE("ex post efficiency") {
    CHECK(check_ex_post_efficiency(rules::rd(), 3, 3).pass());
    auto u = rules::uniform();
    require_replays(u, check_ex_post_efficiency(u, 3, 2));
    // Uniform fallback on a cycle is efficient; ties at even n are not.
    CHECK(check_ex_post_efficiency(rules::cond(), 3, 3).pass());
    auto c = rules::cond();
    require_replays(c, check_ex_post_efficiency(c, 3, 4));
}

TEST_CASE("declared symmetries hold for the shipped rules") {
    std::vector<SDS> all{rules::rd(), rules::rd_k(1), rules::omni_star(), rules::cond(), rules::uniform()};
    for (const auto& f : all) {
        const auto& s = f.symmetries();
        if (s.anonymous) CHECK(check_anonymity(f, 3, 3).pass());
        if (s.neutral) CHECK(check_neutrality(f, 3, 3).pass());
        if (s.rank_based) CHECK(check_rank_basedness(f, 3, 3).pass());
        if (s.tops_only) CHECK(check_tops_only(f, 3, 3).pass());
    }
    for (const auto& f : {rules::f2(), rules::f3()}) {
        CHECK(check_anonymity(f, 3, 4).pass());
        CHECK(check_neutrality(f, 3, 4).pass());
    }
    auto f1 = rules::f1();
    SweepOptions small;
    for_each_profile(4, 5, [&](const Profile& r) {
        if (small.profiles && small.profiles->size() >= 3000) return false;
        if (!small.profiles) small.profiles.emplace();
        small.profiles->push_back(r);
        return true;
    });
    CHECK(check_anonymity(f1, 4, 5, small).pass());
    CHECK(check_tops_only(rules::cond(), 3, 3).pass() == false);
}

TEST_CASE("unanimity implications") {
    std::vector<SDS> all{rules::rd(), rules::omni_star(), rules::cond(), rules::uniform()};
    for (int n : {3, 4, 5}) {
        for (const auto& f : all) {
            for (int k = 0; 2 * k < n; ++k) {
                if (check_k_unanimity(f, k, 3, n).pass()) CHECK(check_k_alpha_unanimity(f, k, 1, 3, n).pass());
            }
        }
        for (int k = 1; 2 * k <= n - 1; ++k) {
            auto f = rules::rd_k(k);
            CHECK(check_k_unanimity(f, k, 3, n).pass());
            CHECK(check_k_alpha_unanimity(f, k, 1, 3, n).pass());
        }
    }
    // Condorcet-consistency implies k-unanimity for every k < n/2.
    for (int n : {3, 4, 5}) {
        for (int k = 0; 2 * k < n; ++k) CHECK(check_k_unanimity(rules::cond(), k, 3, n).pass());
    }
    for (int k = 0; k < 2; ++k) CHECK(check_k_unanimity(rules::f3(), k, 3, 4).pass());
}

TEST_CASE("sweep cap refuses instead of sampling") {
    SweepOptions opts;
    opts.cap = 100;
    CHECK_THROWS_AS(check_anonymity(rules::rd(), 3, 3, opts), Refusal);
    CHECK_THROWS_AS(check_anonymity(rules::rd(), 5, 7), Refusal);
}

TEST_CASE("explicit profile lists") {
    SweepOptions opts;
    opts.profiles = std::vector<Profile>{prof({"abc", "abc", "bca"})};
    auto r = check_k_unanimity(rules::rd(), 1, 3, 3, opts);
    CHECK(r.profiles_visited == 1);
    CHECK_FALSE(r.pass());
    CHECK_THROWS_AS(check_anonymity(rules::f2(), 3, 3), DomainError);
}
