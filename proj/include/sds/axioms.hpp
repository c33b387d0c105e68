#pragma once

#include "sds/rules.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sds {

inline constexpr std::uint64_t kDefaultSweepCap = 10'000'000;

struct SweepOptions {
    std::uint64_t cap = kDefaultSweepCap;
    // Replaces the full (m!)^n sweep when set.
    std::optional<std::vector<Profile>> profiles;
};

enum class Comparison { equal, at_least };

// f(profiles.back(), observed_alternative) must relate to `required` by
// `comparison` but does not. `lotteries[i]` is f(profiles[i]).
struct AxiomViolation {
    std::vector<Profile> profiles;
    std::vector<Lottery> lotteries;
    Alternative observed_alternative = 0;
    Rational observed;
    Rational required;
    Comparison comparison = Comparison::equal;
    std::string witness;
};

struct AxiomReport {
    std::string axiom;
    std::string rule;
    int m = 0;
    int n = 0;
    std::uint64_t profiles_visited = 0;
    std::optional<AxiomViolation> counterexample;

    bool pass() const { return !counterexample.has_value(); }
};

AxiomReport check_anonymity(const SDS& f, int m, int n, const SweepOptions& opts = {});
AxiomReport check_neutrality(const SDS& f, int m, int n, const SweepOptions& opts = {});
AxiomReport check_rank_basedness(const SDS& f, int m, int n, const SweepOptions& opts = {});
AxiomReport check_tops_only(const SDS& f, int m, int n, const SweepOptions& opts = {});
AxiomReport check_k_unanimity(const SDS& f, int k, int m, int n, const SweepOptions& opts = {});
AxiomReport check_k_alpha_unanimity(const SDS& f, int k, const Rational& alpha, int m, int n,
                                    const SweepOptions& opts = {});
AxiomReport check_condorcet_consistency(const SDS& f, int m, int n, const SweepOptions& opts = {});
AxiomReport check_ex_post_efficiency(const SDS& f, int m, int n, const SweepOptions& opts = {});

// Re-evaluates f on the stored profiles; true iff the stored lotteries are
// reproduced and the stated violation holds.
bool replay(const SDS& f, const AxiomViolation& violation);

// Throws Refusal when the sweep would exceed the cap.
void require_sweep_size(int m, int n, const SweepOptions& opts);

}  // namespace sds
