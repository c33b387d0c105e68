#pragma once

#include "sds/rational.hpp"

#include <array>
#include <compare>
#include <functional>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace sds {

// Alternatives are the integers 0..m-1.
using Alternative = int;

inline constexpr int kMaxAlternatives = 8;

// A strict total order over m alternatives, stored best first.
class PreferenceRelation {
public:
    PreferenceRelation() = default;
    explicit PreferenceRelation(const std::vector<Alternative>& order);

    static PreferenceRelation identity(int m);
    // Best `top`, the rest in increasing index order.
    static PreferenceRelation canonical_with_top(int m, Alternative top);
    // All m! relations in lexicographic order of their best-first sequence.
    static const std::vector<PreferenceRelation>& all(int m);
    static PreferenceRelation from_index(int m, std::size_t index);

    int size() const { return m_; }
    Alternative at(int position) const { return order_[position]; }
    Alternative top() const { return order_[0]; }
    Alternative bottom() const { return order_[m_ - 1]; }
    // 1-based: the favourite alternative has rank 1.
    int rank(Alternative x) const;
    bool prefers(Alternative x, Alternative y) const { return rank_[x] < rank_[y]; }
    std::vector<Alternative> order() const;
    // Position of this relation in all(m).
    std::size_t index() const;

    std::string to_string(const std::vector<std::string>* names = nullptr) const;

    friend bool operator==(const PreferenceRelation& a, const PreferenceRelation& b) {
        return a.m_ == b.m_ && a.order_ == b.order_;
    }
    friend std::strong_ordering operator<=>(const PreferenceRelation& a, const PreferenceRelation& b) {
        if (auto c = a.m_ <=> b.m_; c != 0) return c;
        return a.order_ <=> b.order_;
    }

private:
    int m_ = 0;
    std::array<std::uint8_t, kMaxAlternatives> order_{};
    std::array<std::uint8_t, kMaxAlternatives> rank_{};  // 1-based
};

class Profile {
public:
    Profile(int m, std::vector<PreferenceRelation> prefs);

    int alternatives() const { return m_; }
    int voters() const { return static_cast<int>(prefs_.size()); }
    const PreferenceRelation& operator[](int voter) const { return prefs_[voter]; }
    const std::vector<PreferenceRelation>& preferences() const { return prefs_; }

    Profile with_voter(int voter, const PreferenceRelation& pref) const;
    // Number of voters ranking each alternative first.
    std::vector<int> top_counts() const;
    // Alternatives ranked first by at least one voter, ascending.
    std::vector<Alternative> top_set() const;
    // Preference indices of all voters, in voter order.
    std::vector<std::size_t> preference_indices() const;

    friend bool operator==(const Profile& a, const Profile& b) = default;
    friend auto operator<=>(const Profile& a, const Profile& b) = default;

private:
    int m_;
    std::vector<PreferenceRelation> prefs_;
};

// Exact probability distribution over the m alternatives.
class Lottery {
public:
    explicit Lottery(std::vector<Rational> probs);

    static Lottery point(int m, Alternative x);
    static Lottery uniform(int m);
    static Lottery uniform_over(int m, const std::vector<Alternative>& support);

    int size() const { return static_cast<int>(probs_.size()); }
    const Rational& operator[](Alternative x) const { return probs_[x]; }
    const std::vector<Rational>& probabilities() const { return probs_; }
    std::vector<Alternative> support() const;

    std::string to_string() const;

    friend bool operator==(const Lottery& a, const Lottery& b) { return a.probs_ == b.probs_; }

private:
    std::vector<Rational> probs_;
};

// lambda * p + (1 - lambda) * q
Lottery mix(const Lottery& p, const Lottery& q, const Rational& lambda);

// Row x holds the sorted ranks of alternative x over all voters.
struct RankMatrix {
    std::vector<std::vector<int>> rows;

    friend bool operator==(const RankMatrix&, const RankMatrix&) = default;
    friend auto operator<=>(const RankMatrix&, const RankMatrix&) = default;
};

// Utilities indexed by rank: value(1) is the utility of a voter's favourite.
// Vectors built through the public constructor are strictly decreasing;
// closure points (vertices of closed utility polytopes) only need to be
// non-increasing with value(1) > value(m).
class UtilityVector {
public:
    explicit UtilityVector(std::vector<Rational> values);
    static UtilityVector closure_point(std::vector<Rational> values);

    int size() const { return static_cast<int>(values_.size()); }
    const Rational& operator()(int rank) const { return values_[rank - 1]; }
    const std::vector<Rational>& values() const { return values_; }
    bool strict() const;

    std::string to_string() const;

    friend bool operator==(const UtilityVector&, const UtilityVector&) = default;
    friend auto operator<=>(const UtilityVector& a, const UtilityVector& b) {
        return a.values_ <=> b.values_;
    }

private:
    UtilityVector() = default;
    std::vector<Rational> values_;
};

enum class UtilityRelation { le, eq, ge };

// sum_r coeffs[r-1] * u(r)  (rel)  0 ; only homogeneous, translation-free
// constraints are allowed so the u(1)=1, u(m)=0 normalisation is lossless.
struct RankConstraint {
    std::vector<Rational> coeffs;
    UtilityRelation rel = UtilityRelation::ge;
};

enum class UtilityPreset { sd, rdk, omni, equidistant, eps_indiff };

struct PresetTag {
    UtilityPreset preset;
    int k = 0;           // RDK
    Rational epsilon;    // EPS_INDIFF
};

std::string preset_name(const PresetTag& tag);

class UtilitySet {
public:
    enum class Kind { finite, polytope, vertices };

    static UtilitySet finite(std::vector<UtilityVector> vectors);
    static UtilitySet vertex_list(std::vector<UtilityVector> vertices);
    // Throws DomainError when the closed region has no strictly decreasing point.
    static UtilitySet polytope(int m, std::vector<RankConstraint> constraints,
                               std::optional<PresetTag> tag = std::nullopt);

    static UtilitySet sd(int m);
    static UtilitySet rdk(int m, int k);
    static UtilitySet omni(int m);
    static UtilitySet equidistant(int m);
    static UtilitySet eps_indiff(int m, const Rational& epsilon);

    Kind kind() const { return kind_; }
    int alternatives() const { return m_; }
    const std::optional<PresetTag>& preset() const { return preset_; }
    // Finite and vertex-list members.
    const std::vector<UtilityVector>& vectors() const { return vectors_; }
    const std::vector<RankConstraint>& constraints() const { return constraints_; }
    // A strictly decreasing member of the (normalised) set.
    const UtilityVector& interior_point() const { return interior_; }

    bool contains(const UtilityVector& u) const;
    // Vertices of the normalised closed polytope (u(1)=1, u(m)=0);
    // finite and vertex-list sets return their members.
    std::vector<UtilityVector> vertices() const;
    UtilitySet as_vertex_list() const;

private:
    UtilitySet(Kind kind, int m, UtilityVector interior)
        : kind_(kind), m_(m), interior_(std::move(interior)) {}

    Kind kind_;
    int m_;
    std::vector<UtilityVector> vectors_;
    std::vector<RankConstraint> constraints_;
    std::optional<PresetTag> preset_;
    UtilityVector interior_;
};

// --- profile algebra -------------------------------------------------------

int rank(const PreferenceRelation& pref, Alternative x);
int majority_margin(const Profile& profile, Alternative x, Alternative y);
std::optional<Alternative> condorcet_winner(const Profile& profile);
std::set<Alternative> pareto_optimal_set(const Profile& profile);
// Voter i's preference moves to position perm[i].
Profile permute_voters(const Profile& profile, const std::vector<int>& perm);
// Alternative x is renamed to perm[x].
Profile permute_alternatives(const Profile& profile, const std::vector<Alternative>& perm);
PreferenceRelation permute_alternatives(const PreferenceRelation& pref,
                                        const std::vector<Alternative>& perm);
RankMatrix rank_matrix(const Profile& profile);
Rational expected_utility(const Lottery& p, const UtilityVector& u, const PreferenceRelation& pref);

// --- profile text format ---------------------------------------------------

struct ProfileDocument {
    std::vector<std::string> names;
    Profile profile;
};

// `alternatives: a b c` followed by `<count>: a > b > c` lines; '#' starts a comment line.
ProfileDocument parse_profile(std::string_view text);
std::string format_profile(const Profile& profile, const std::vector<std::string>& names);
std::vector<std::string> default_names(int m);
PreferenceRelation parse_preference(std::string_view text, const std::vector<std::string>& names);

}  // namespace sds

namespace sds {

// (m!)^n, saturating at UINT64_MAX.
std::uint64_t profile_count(int m, int n);

// Visits all (m!)^n profiles in lexicographic order of the voters'
// preference indices; stops early when `visit` returns false.
void for_each_profile(int m, int n, const std::function<bool(const Profile&)>& visit);

// Multisets of n preference indices in non-decreasing order, lexicographic.
void for_each_multiset(int kinds, int n, const std::function<bool(const std::vector<int>&)>& visit);

}  // namespace sds
