#pragma once

#include "sds/core.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace sds {

// Metadata claims. The axioms module verifies them; sweeps only exploit a
// claim after it has been declared here.
struct Symmetries {
    bool anonymous = false;
    bool neutral = false;
    bool rank_based = false;
    // Output depends only on the voters' favourite alternatives.
    bool tops_only = false;
};

Symmetries intersect(const Symmetries& a, const Symmetries& b);

class SocialDecisionScheme {
public:
    using Evaluator = std::function<Lottery(const Profile&)>;
    // Empty when (m, n) is admissible, otherwise the reason it is not.
    using DomainCheck = std::function<std::optional<std::string>(int m, int n)>;

    SocialDecisionScheme(std::string name, Evaluator evaluate, DomainCheck domain, Symmetries symmetries,
                         std::optional<int> fixed_voters = std::nullopt);

    const std::string& name() const { return name_; }
    const Symmetries& symmetries() const { return symmetries_; }
    // Set for rules defined for a single electorate size.
    std::optional<int> fixed_voters() const { return fixed_voters_; }

    std::optional<std::string> domain_error(int m, int n) const { return domain_(m, n); }
    bool in_domain(int m, int n) const { return !domain_(m, n).has_value(); }
    // Throws DomainError outside the domain.
    void require_domain(int m, int n) const;

    Lottery operator()(const Profile& profile) const;
    // Skips the domain check; callers must have called require_domain.
    Lottery evaluate_unchecked(const Profile& profile) const { return evaluate_(profile); }

private:
    std::string name_;
    Evaluator evaluate_;
    DomainCheck domain_;
    Symmetries symmetries_;
    std::optional<int> fixed_voters_;
};

using SDS = SocialDecisionScheme;

// Plain lottery-valued forms of the rules.
Lottery rd(const Profile& profile);
Lottery rd_k(const Profile& profile, int k);
Lottery omni_star(const Profile& profile);
Lottery cond(const Profile& profile);
Lottery f1(const Profile& profile);
Lottery f2(const Profile& profile);
Lottery f3(const Profile& profile);

namespace rules {

SDS rd();
SDS rd_k(int k);
SDS omni_star();
SDS cond();
SDS f1();
SDS f2();
SDS f3();
SDS uniform();
SDS dictatorship(int voter);
SDS constant(Alternative x);
// lambda * f + (1 - lambda) * g
SDS mix(const SDS& f, const SDS& g, const Rational& lambda);
// Average of `base` over all size-`base_voters` voter subsets of an n'-voter profile.
SDS subset_lift(const SDS& base, int base_voters, int voters);

}  // namespace rules

// --- tabulated rules -----------------------------------------------------------

enum class SymmetryMode { full, anonymous, rank_based };

std::string to_string(SymmetryMode mode);
SymmetryMode parse_symmetry_mode(std::string_view text);

// Canonical key of the class containing `profile`: preference indices for
// full mode, sorted indices for anonymous mode, the flattened rank matrix for
// rank-based mode.
std::vector<int> class_key(const Profile& profile, SymmetryMode mode);

struct RuleTable {
    int m = 0;
    int n = 0;
    SymmetryMode mode = SymmetryMode::anonymous;
    std::vector<Profile> representatives;
    std::vector<Lottery> lotteries;
};

SDS table_rule(std::shared_ptr<const RuleTable> table, std::string name = "table");

std::string table_to_json(const RuleTable& table, int indent = 2);
RuleTable table_from_json(std::string_view text);

// --- rule specifications -------------------------------------------------------

// rd, rd_k:k=2, omni_star, cond, f1, f2, f3, uniform, dictator:voter=0,
// constant:x=0, mix:f=(rd),g=(cond),lambda=1/2, lift:base=f1,n=7[,from=5],
// table:<path>
SDS parse_rule(std::string_view spec);
std::vector<std::string> rule_names();

}  // namespace sds
