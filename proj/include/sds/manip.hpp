#pragma once

#include "sds/axioms.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sds {

struct Deviation {
    Profile profile;
    int voter = 0;
    PreferenceRelation misreport;

    Profile deviated() const { return profile.with_voter(voter, misreport); }
};

struct ManipulationWitness {
    Deviation deviation;
    UtilityVector utility;
    Rational gain;
    Lottery truthful;
    Lottery manipulated;
};

// Voters in `coalition` share one true preference and report `misreports`.
struct GroupManipulationWitness {
    Profile profile;
    std::vector<int> coalition;
    std::vector<PreferenceRelation> misreports;
    UtilityVector utility;
    Rational gain;
    Lottery truthful;
    Lottery manipulated;

    Profile deviated() const;
};

// How the profile space is traversed; each level needs the symmetries of the previous one.
//   full:      every profile, every voter
//   anonymous: multisets of preferences, one voter per distinct preference
//   symmetric: additionally neutral; the deviator holds the identity order
//   tops:      additionally tops-only; the others are represented by their favourites
enum class SweepReduction { full, anonymous, symmetric, tops };

std::string to_string(SweepReduction r);
SweepReduction parse_sweep_reduction(std::string_view text);
// Strongest reduction licensed by the rule's declared symmetries.
SweepReduction strongest_reduction(const Symmetries& s);

struct SPOptions {
    std::uint64_t cap = kDefaultSweepCap;
    // Restricts the sweep to these truthful profiles (always traversed in full).
    std::optional<std::vector<Profile>> profiles;
    // Defaults to strongest_reduction of the rule.
    std::optional<SweepReduction> reduction;
    unsigned jobs = 1;
    // Budget of misreport combinations per coalition in check_group_sp.
    std::uint64_t coalition_budget = 1'000'000;
};

struct SPReport {
    SweepReduction reduction = SweepReduction::full;
    std::uint64_t profiles_visited = 0;
    std::uint64_t deviations = 0;
    std::uint64_t lp_calls = 0;
    std::optional<ManipulationWitness> witness;

    bool pass() const { return !witness.has_value(); }
};

struct GroupSPReport {
    SweepReduction reduction = SweepReduction::full;
    std::uint64_t profiles_visited = 0;
    std::uint64_t deviations = 0;
    std::uint64_t lp_calls = 0;
    std::optional<GroupManipulationWitness> witness;

    bool pass() const { return !witness.has_value(); }
};

// Expected-utility change of the deviator, measured through the true preference.
Rational gain(const SDS& f, const Deviation& dev, const UtilityVector& u);

// Maximises the gain over the closure of a polytope or vertex-list set and,
// when the maximum is positive, returns a strictly decreasing member of U
// that still gains.
std::optional<ManipulationWitness> best_manipulation_utility(const SDS& f, const Deviation& dev, const UtilitySet& u);

SPReport check_u_sp(const SDS& f, const UtilitySet& u, int m, int n, const SPOptions& opts = {});
SPReport check_u_pi_sp(const SDS& f, const UtilityVector& u, int m, int n, const SPOptions& opts = {});
GroupSPReport check_group_sp(const SDS& f, const UtilitySet& u, int m, int n, const SPOptions& opts = {});

// Least u(1) > u(2) for which f is u^Pi-strategyproof with utilities
// (u(1), tail...); u(2) itself when every u(1) > u(2) works.
struct BoundaryResult {
    Rational value;
    SweepReduction reduction = SweepReduction::full;
    std::uint64_t deviations = 0;
    // Deviations whose gain decreases in u(1) and that fix the boundary.
    std::optional<Deviation> binding;
};

BoundaryResult sp_boundary(const SDS& f, const std::vector<Rational>& tail, int m, int n, const SPOptions& opts = {});

bool replay(const SDS& f, const ManipulationWitness& w, const UtilitySet* u = nullptr);
bool replay(const SDS& f, const GroupManipulationWitness& w, const UtilitySet* u = nullptr);

}  // namespace sds
