#pragma once

#include "sds/lp.hpp"
#include "sds/manip.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sds {

// A deviation of one voter from some member of `source` into class `target`.
struct DeviationEdge {
    std::size_t source = 0;
    std::size_t target = 0;
    PreferenceRelation truth;
    // First (member, voter, misreport) realising the edge.
    Profile example;
    int voter = 0;
    PreferenceRelation misreport;
};

class ProfileClassIndex {
public:
    int m = 0;
    int n = 0;
    SymmetryMode mode = SymmetryMode::full;
    std::vector<Profile> representatives;
    // Profiles of each class up to voter order (a single entry outside rank-based mode).
    std::vector<std::vector<Profile>> members;
    // Number of profiles in each class; they sum to (m!)^n.
    std::vector<std::uint64_t> sizes;
    // Deduplicated on (source, truth, target); self-loops are dropped.
    std::vector<DeviationEdge> edges;

    std::size_t classes() const { return representatives.size(); }
    std::optional<std::size_t> find(const Profile& profile) const;

private:
    friend ProfileClassIndex enumerate_profiles(int, int, SymmetryMode, std::uint64_t);
    std::map<std::vector<int>, std::size_t> lookup_;
};

ProfileClassIndex enumerate_profiles(int m, int n, SymmetryMode mode, std::uint64_t cap = kDefaultSweepCap);

struct AxiomSpec {
    enum class Kind { k_unanimity, k_alpha_unanimity, condorcet, ex_post };
    Kind kind = Kind::k_unanimity;
    int k = 0;
    Rational alpha;

    static AxiomSpec k_unanimity(int k) { return {Kind::k_unanimity, k, Rational(1)}; }
    static AxiomSpec k_alpha_unanimity(int k, Rational alpha) { return {Kind::k_alpha_unanimity, k, std::move(alpha)}; }
    static AxiomSpec condorcet() { return {Kind::condorcet, 0, Rational(0)}; }
    static AxiomSpec ex_post() { return {Kind::ex_post, 0, Rational(0)}; }
};

std::string to_string(const AxiomSpec& axiom);

struct SynthesisProblem {
    int m = 0;
    int n = 0;
    SymmetryMode mode = SymmetryMode::anonymous;
    std::vector<AxiomSpec> axioms;
    // Finite or vertex-list; strategyproofness rows are generated per listed
    // vector. Without a set the program has no strategyproofness rows.
    std::optional<UtilitySet> utilities;
};

struct SynthesisOutcome {
    bool feasible = false;
    std::optional<RuleTable> table;
    std::optional<lp::FarkasCertificate> certificate;
    // The LP that was solved, with one provenance label per constraint row.
    std::shared_ptr<const lp::LinearProgram> program;
    std::vector<std::string> provenance;
    std::size_t classes = 0;
    std::size_t edges = 0;
    lp::SolveStats stats;
    // Set when the feasible table was replayed through the checkers.
    bool replayed = false;
};

// Builds the LP: one variable per class and alternative (index class * m + x).
struct SynthesisProgram {
    lp::LinearProgram program;
    std::vector<std::string> provenance;
};

SynthesisProgram build_program(const SynthesisProblem& problem, const ProfileClassIndex& index);

// Throws Refusal beyond `cap` classes. Feasible tables at m <= 3, n <= 4 are
// replayed through the axiom and manipulation checkers before returning.
SynthesisOutcome synthesize(const SynthesisProblem& problem, std::uint64_t cap = kDefaultSweepCap);

struct ProbabilityBounds {
    Rational min;
    Rational max;
};

ProbabilityBounds bound_probability(const SynthesisProblem& problem, std::size_t cls, Alternative x);

// Bounds for every class and alternative, sharing one feasibility phase.
struct BoundTable {
    ProfileClassIndex index;
    std::vector<std::vector<ProbabilityBounds>> bounds;  // [class][alternative]
    std::size_t lp_calls = 0;
};

BoundTable bound_all(const SynthesisProblem& problem, unsigned jobs = 1);

// --- impossibility certificates ------------------------------------------------

enum class GadgetCase { one, two };

struct CondorcetGadget {
    GadgetCase which = GadgetCase::one;
    // R^1 .. R^4; entries 1..3 change voter 0..2 of R^1 respectively.
    std::vector<Profile> profiles;
    // Condorcet winners of R^2, R^3, R^4.
    std::vector<Alternative> winners;
};

CondorcetGadget condorcet_gadget(int m, GadgetCase which);

struct CondorcetCertificate {
    CondorcetGadget gadget;
    SynthesisOutcome outcome;
};

// Picks the case from u unless `forced` is given.
CondorcetCertificate certify_condorcet_impossibility(int m, const UtilityVector& u,
                                                     std::optional<GadgetCase> forced = std::nullopt);

SynthesisOutcome certify_expost_impossibility(int m, int n, int k, const Rational& epsilon, const UtilityVector& u,
                                              std::uint64_t cap = kDefaultSweepCap);

SynthesisOutcome certify_rank_based_impossibility(int m, int n, int k, const UtilityVector& u,
                                                  std::uint64_t cap = kDefaultSweepCap);

// sum_{i = max(3, m-k+1)}^{m} (u(2) - u(i))
Rational rank_based_bound(const std::vector<Rational>& u, int k);

}  // namespace sds
