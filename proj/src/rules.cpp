#include "sds/rules.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>

namespace sds {

Symmetries intersect(const Symmetries& a, const Symmetries& b) {
    return Symmetries{a.anonymous && b.anonymous, a.neutral && b.neutral, a.rank_based && b.rank_based,
                      a.tops_only && b.tops_only};
}

SocialDecisionScheme::SocialDecisionScheme(std::string name, Evaluator evaluate, DomainCheck domain,
                                           Symmetries symmetries, std::optional<int> fixed_voters)
    : name_(std::move(name)),
      evaluate_(std::move(evaluate)),
      domain_(std::move(domain)),
      symmetries_(symmetries),
      fixed_voters_(fixed_voters) {}

void SocialDecisionScheme::require_domain(int m, int n) const {
    if (auto err = domain_(m, n)) throw DomainError(name_ + ": " + *err);
}

Lottery SocialDecisionScheme::operator()(const Profile& profile) const {
    require_domain(profile.alternatives(), profile.voters());
    return evaluate_(profile);
}

// --- rules ---------------------------------------------------------------------

namespace {

std::optional<std::string> any_size(int, int) { return std::nullopt; }

std::optional<std::string> rd_k_domain(int k, int n) {
    if (k < 1 || 2 * k > n - 1) {
        return "k=" + std::to_string(k) + " outside 1..floor((n-1)/2) for n=" + std::to_string(n);
    }
    return std::nullopt;
}

std::optional<Alternative> strict_majority_top(const std::vector<int>& tops, int n) {
    for (Alternative x = 0; x < static_cast<int>(tops.size()); ++x) {
        if (2 * tops[x] > n) return x;
    }
    return std::nullopt;
}

}  // namespace

Lottery rd(const Profile& profile) {
    const int m = profile.alternatives();
    const long n = profile.voters();
    auto tops = profile.top_counts();
    std::vector<Rational> probs(m);
    for (Alternative x = 0; x < m; ++x) probs[x] = Rational(tops[x], n);
    return Lottery(std::move(probs));
}

Lottery rd_k(const Profile& profile, int k) {
    const int n = profile.voters();
    if (auto err = rd_k_domain(k, n)) throw DomainError("rd_k: " + *err);
    auto tops = profile.top_counts();
    for (Alternative x = 0; x < profile.alternatives(); ++x) {
        if (tops[x] >= n - k) return Lottery::point(profile.alternatives(), x);
    }
    return rd(profile);
}

Lottery omni_star(const Profile& profile) {
    if (auto x = strict_majority_top(profile.top_counts(), profile.voters())) {
        return Lottery::point(profile.alternatives(), *x);
    }
    return Lottery::uniform_over(profile.alternatives(), profile.top_set());
}

Lottery cond(const Profile& profile) {
    if (auto w = condorcet_winner(profile)) return Lottery::point(profile.alternatives(), *w);
    return Lottery::uniform(profile.alternatives());
}

Lottery f1(const Profile& profile) {
    if (profile.voters() != 5 || profile.alternatives() < 4) throw DomainError("f1 needs n = 5 and m >= 4");
    if (profile.top_set().size() >= 4) return rd(profile);
    return omni_star(profile);
}

Lottery f2(const Profile& profile) {
    if (profile.alternatives() != 3 || profile.voters() != 4) throw DomainError("f2 needs m = 3 and n = 4");
    auto tops = profile.top_counts();
    std::vector<Rational> probs(3);
    for (Alternative x = 0; x < 3; ++x) {
        if (tops[x] >= 3) return Lottery::point(3, x);
    }
    std::vector<Alternative> doubles;
    for (Alternative x = 0; x < 3; ++x) {
        if (tops[x] == 2) doubles.push_back(x);
    }
    if (doubles.size() == 2) return Lottery::uniform_over(3, doubles);
    if (doubles.size() != 1) throw std::logic_error("f2: top distribution outside the case analysis");
    const Alternative x = doubles.front();
    std::vector<const PreferenceRelation*> others;
    for (const auto& p : profile.preferences()) {
        if (p.top() != x) others.push_back(&p);
    }
    const int second = static_cast<int>(std::count_if(others.begin(), others.end(),
                                                      [&](const auto* p) { return p->rank(x) == 2; }));
    if (second == 2) return Lottery::point(3, x);
    if (second == 0) {
        probs[x] = Rational(1, 2);
        for (Alternative y = 0; y < 3; ++y) {
            if (y != x) probs[y] = Rational(1, 4);
        }
        return Lottery(std::move(probs));
    }
    // The voter placing x second tops y; the other voter ranks y above x too.
    const auto* keeps_x = others[0]->rank(x) == 2 ? others[0] : others[1];
    const Alternative y = keeps_x->top();
    const Alternative z = 3 - x - y;
    probs[x] = Rational(4, 7);
    probs[y] = Rational(2, 7);
    probs[z] = Rational(1, 7);
    return Lottery(std::move(probs));
}

Lottery f3(const Profile& profile) {
    const int n = profile.voters();
    if (profile.alternatives() != 3 || n % 2 != 0) throw DomainError("f3 needs m = 3 and an even n");
    auto tops = profile.top_counts();
    std::vector<Alternative> halves;
    for (Alternative x = 0; x < 3; ++x) {
        if (2 * tops[x] == n) halves.push_back(x);
    }
    if (halves.size() == 2) return Lottery::uniform_over(3, halves);
    return cond(profile);
}

namespace rules {

namespace {

constexpr Symmetries kTopsSymmetric{true, true, true, true};

}  // namespace

SDS rd() {
    return SDS("rd", [](const Profile& r) { return sds::rd(r); }, any_size, kTopsSymmetric);
}

SDS rd_k(int k) {
    return SDS(
        "rd_k:k=" + std::to_string(k), [k](const Profile& r) { return sds::rd_k(r, k); },
        [k](int, int n) { return rd_k_domain(k, n); }, kTopsSymmetric);
}

SDS omni_star() {
    return SDS("omni_star", [](const Profile& r) { return sds::omni_star(r); }, any_size, kTopsSymmetric);
}

SDS cond() {
    return SDS("cond", [](const Profile& r) { return sds::cond(r); }, any_size, Symmetries{true, true, false, false});
}

SDS f1() {
    return SDS(
        "f1", [](const Profile& r) { return sds::f1(r); },
        [](int m, int n) -> std::optional<std::string> {
            if (n != 5 || m < 4) return "f1 is defined for n = 5 and m >= 4";
            return std::nullopt;
        },
        kTopsSymmetric, 5);
}

namespace {

// The case split of f2 must cover every profile at m = 3, n = 4 exactly once.
void assert_f2_cases() {
    static std::once_flag once;
    std::call_once(once, [] {
        const auto& all = PreferenceRelation::all(3);
        for (const auto& a : all) {
            for (const auto& b : all) {
                for (const auto& c : all) {
                    for (const auto& d : all) sds::f2(Profile(3, {a, b, c, d}));
                }
            }
        }
    });
}

}  // namespace

SDS f2() {
    assert_f2_cases();
    return SDS(
        "f2", [](const Profile& r) { return sds::f2(r); },
        [](int m, int n) -> std::optional<std::string> {
            if (m != 3 || n != 4) return "f2 is defined for m = 3 and n = 4";
            return std::nullopt;
        },
        Symmetries{true, true, false, false}, 4);
}

SDS f3() {
    return SDS(
        "f3", [](const Profile& r) { return sds::f3(r); },
        [](int m, int n) -> std::optional<std::string> {
            if (m != 3 || n % 2 != 0) return "f3 is defined for m = 3 and even n";
            return std::nullopt;
        },
        Symmetries{true, true, false, false});
}

SDS uniform() {
    return SDS(
        "uniform", [](const Profile& r) { return Lottery::uniform(r.alternatives()); }, any_size, kTopsSymmetric);
}

SDS dictatorship(int voter) {
    if (voter < 0) throw DomainError("dictator index must be non-negative");
    return SDS(
        "dictator:voter=" + std::to_string(voter),
        [voter](const Profile& r) { return Lottery::point(r.alternatives(), r[voter].top()); },
        [voter](int, int n) -> std::optional<std::string> {
            if (voter >= n) return "dictator " + std::to_string(voter) + " is not among " + std::to_string(n) + " voters";
            return std::nullopt;
        },
        Symmetries{false, true, false, false});
}

SDS constant(Alternative x) {
    if (x < 0) throw DomainError("alternative out of range");
    return SDS(
        "constant:x=" + std::to_string(x), [x](const Profile& r) { return Lottery::point(r.alternatives(), x); },
        [x](int m, int) -> std::optional<std::string> {
            if (x >= m) return "alternative " + std::to_string(x) + " out of range";
            return std::nullopt;
        },
        Symmetries{true, false, true, true});
}

SDS mix(const SDS& f, const SDS& g, const Rational& lambda) {
    if (lambda < 0 || lambda > 1) throw DomainError("mixing weight outside [0, 1]");
    std::optional<int> fixed;
    if (f.fixed_voters() && g.fixed_voters() && *f.fixed_voters() == *g.fixed_voters()) fixed = f.fixed_voters();
    else if (f.fixed_voters() && !g.fixed_voters()) fixed = f.fixed_voters();
    else if (g.fixed_voters() && !f.fixed_voters()) fixed = g.fixed_voters();
    return SDS(
        "mix:f=(" + f.name() + "),g=(" + g.name() + "),lambda=" + to_string(lambda),
        [f, g, lambda](const Profile& r) {
            return sds::mix(f.evaluate_unchecked(r), g.evaluate_unchecked(r), lambda);
        },
        [f, g](int m, int n) -> std::optional<std::string> {
            if (auto e = f.domain_error(m, n)) return e;
            return g.domain_error(m, n);
        },
        intersect(f.symmetries(), g.symmetries()), fixed);
}

namespace {

// Rejects a base rule that is not anonymous at (m, n) when the check is small
// enough to run exhaustively over adjacent transpositions.
void verify_lift_anonymity(const SDS& base, int m, int n) {
    std::size_t total = 1;
    const auto& all = PreferenceRelation::all(m);
    for (int i = 0; i < n; ++i) {
        total *= all.size();
        if (total > 100000) return;
    }
    std::vector<std::size_t> idx(n, 0);
    for (std::size_t c = 0; c < total; ++c) {
        std::vector<PreferenceRelation> prefs;
        for (auto i : idx) prefs.push_back(all[i]);
        Profile r(m, prefs);
        Lottery value = base.evaluate_unchecked(r);
        for (int v = 0; v + 1 < n; ++v) {
            if (prefs[v] == prefs[v + 1]) continue;
            auto swapped = prefs;
            std::swap(swapped[v], swapped[v + 1]);
            if (!(base.evaluate_unchecked(Profile(m, swapped)) == value)) {
                throw DomainError("subset_lift: base rule " + base.name() + " is not anonymous at m=" +
                                  std::to_string(m) + ", n=" + std::to_string(n));
            }
        }
        int v = n - 1;
        while (v >= 0 && ++idx[v] == all.size()) idx[v--] = 0;
    }
}

}  // namespace

SDS subset_lift(const SDS& base, int base_voters, int voters) {
    if (voters <= base_voters) throw DomainError("subset_lift needs more voters than the base rule");
    if (base_voters < 1) throw DomainError("subset_lift needs a positive base electorate");
    if (!base.symmetries().anonymous) throw DomainError("subset_lift needs an anonymous base rule");
    // Order-preserving subsets of {0..voters-1} of size base_voters.
    std::vector<std::vector<int>> subsets;
    std::vector<bool> pick(voters, false);
    std::fill(pick.begin(), pick.begin() + base_voters, true);
    do {
        std::vector<int> s;
        for (int i = 0; i < voters; ++i) {
            if (pick[i]) s.push_back(i);
        }
        subsets.push_back(std::move(s));
    } while (std::prev_permutation(pick.begin(), pick.end()));

    auto verified = std::make_shared<std::set<int>>();
    auto guard = std::make_shared<std::mutex>();
    Symmetries sym = base.symmetries();
    sym.rank_based = false;
    return SDS(
        "lift:base=(" + base.name() + "),from=" + std::to_string(base_voters) + ",n=" + std::to_string(voters),
        [base, base_voters, subsets, verified, guard](const Profile& r) {
            const int m = r.alternatives();
            {
                std::lock_guard lock(*guard);
                if (!verified->count(m)) {
                    verify_lift_anonymity(base, m, base_voters);
                    verified->insert(m);
                }
            }
            std::vector<Rational> acc(m);
            for (const auto& s : subsets) {
                std::vector<PreferenceRelation> prefs;
                prefs.reserve(s.size());
                for (int i : s) prefs.push_back(r[i]);
                Lottery p = base.evaluate_unchecked(Profile(m, std::move(prefs)));
                for (Alternative x = 0; x < m; ++x) acc[x] += p[x];
            }
            const long count = static_cast<long>(subsets.size());
            for (auto& a : acc) a /= count;
            return Lottery(std::move(acc));
        },
        [base, base_voters, voters](int m, int n) -> std::optional<std::string> {
            if (n != voters) return "lifted rule is defined for n = " + std::to_string(voters);
            return base.domain_error(m, base_voters);
        },
        sym, voters);
}

}  // namespace rules

// --- tables ------------------------------------------------------------------------

std::string to_string(SymmetryMode mode) {
    switch (mode) {
        case SymmetryMode::full: return "full";
        case SymmetryMode::anonymous: return "anonymous";
        case SymmetryMode::rank_based: return "rank_based";
    }
    return "?";
}

SymmetryMode parse_symmetry_mode(std::string_view text) {
    if (text == "full") return SymmetryMode::full;
    if (text == "anonymous") return SymmetryMode::anonymous;
    if (text == "rank_based") return SymmetryMode::rank_based;
    throw DomainError("unknown symmetry mode '" + std::string(text) + "' (full, anonymous, rank_based)");
}

std::vector<int> class_key(const Profile& profile, SymmetryMode mode) {
    std::vector<int> key;
    if (mode == SymmetryMode::rank_based) {
        for (const auto& row : rank_matrix(profile).rows) key.insert(key.end(), row.begin(), row.end());
        return key;
    }
    for (auto i : profile.preference_indices()) key.push_back(static_cast<int>(i));
    if (mode == SymmetryMode::anonymous) std::sort(key.begin(), key.end());
    return key;
}

SDS table_rule(std::shared_ptr<const RuleTable> table, std::string name) {
    if (table->representatives.size() != table->lotteries.size()) {
        throw DomainError("rule table has mismatched class and lottery counts");
    }
    auto index = std::make_shared<std::map<std::vector<int>, std::size_t>>();
    for (std::size_t c = 0; c < table->representatives.size(); ++c) {
        const auto& rep = table->representatives[c];
        if (rep.alternatives() != table->m || rep.voters() != table->n) {
            throw DomainError("rule table representative has the wrong size");
        }
        if (table->lotteries[c].size() != table->m) throw DomainError("rule table lottery has the wrong size");
        if (!index->emplace(class_key(rep, table->mode), c).second) {
            throw DomainError("rule table lists one class twice");
        }
    }
    Symmetries sym;
    sym.anonymous = table->mode != SymmetryMode::full;
    sym.rank_based = table->mode == SymmetryMode::rank_based;
    const int m = table->m;
    const int n = table->n;
    return SDS(
        std::move(name),
        [table, index](const Profile& r) {
            auto it = index->find(class_key(r, table->mode));
            if (it == index->end()) throw DomainError("profile is not covered by the rule table");
            return table->lotteries[it->second];
        },
        [m, n](int mm, int nn) -> std::optional<std::string> {
            if (mm != m || nn != n) {
                return "table is defined for m = " + std::to_string(m) + ", n = " + std::to_string(n);
            }
            return std::nullopt;
        },
        sym, n);
}

std::string table_to_json(const RuleTable& table, int indent) {
    nlohmann::ordered_json doc;
    doc["m"] = table.m;
    doc["n"] = table.n;
    doc["symmetry"] = to_string(table.mode);
    auto& classes = doc["classes"] = nlohmann::ordered_json::array();
    for (std::size_t c = 0; c < table.representatives.size(); ++c) {
        nlohmann::ordered_json entry;
        auto& prefs = entry["profile"] = nlohmann::ordered_json::array();
        for (const auto& p : table.representatives[c].preferences()) prefs.push_back(p.order());
        auto& lottery = entry["lottery"] = nlohmann::ordered_json::array();
        for (const auto& q : table.lotteries[c].probabilities()) lottery.push_back(to_string(q));
        classes.push_back(std::move(entry));
    }
    return doc.dump(indent);
}

RuleTable table_from_json(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("rule table: ") + e.what());
    }
    try {
        RuleTable table;
        table.m = doc.at("m").get<int>();
        table.n = doc.at("n").get<int>();
        table.mode = parse_symmetry_mode(doc.at("symmetry").get<std::string>());
        for (const auto& entry : doc.at("classes")) {
            std::vector<PreferenceRelation> prefs;
            for (const auto& order : entry.at("profile")) prefs.emplace_back(order.get<std::vector<int>>());
            table.representatives.emplace_back(table.m, std::move(prefs));
            std::vector<Rational> probs;
            for (const auto& q : entry.at("lottery")) probs.push_back(parse_rational(q.get<std::string>()));
            table.lotteries.emplace_back(std::move(probs));
        }
        return table;
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("rule table: ") + e.what());
    }
}

// --- rule specifications ---------------------------------------------------------

namespace {

// Splits "a=1,b=(x,y)" on top-level commas.
std::map<std::string, std::string> parse_params(std::string_view text) {
    std::map<std::string, std::string> out;
    std::size_t start = 0;
    int depth = 0;
    for (std::size_t i = 0; i <= text.size(); ++i) {
        if (i < text.size() && text[i] == '(') ++depth;
        if (i < text.size() && text[i] == ')') --depth;
        if (depth < 0) throw DomainError("unbalanced parentheses in rule specification");
        if (i == text.size() || (text[i] == ',' && depth == 0)) {
            std::string_view item = text.substr(start, i - start);
            start = i + 1;
            if (item.empty()) continue;
            auto eq = item.find('=');
            if (eq == std::string_view::npos) throw DomainError("rule parameter without '=': " + std::string(item));
            std::string value(item.substr(eq + 1));
            if (value.size() >= 2 && value.front() == '(' && value.back() == ')') value = value.substr(1, value.size() - 2);
            out[std::string(item.substr(0, eq))] = value;
        }
    }
    if (depth != 0) throw DomainError("unbalanced parentheses in rule specification");
    return out;
}

int param_int(const std::map<std::string, std::string>& params, const std::string& key) {
    auto it = params.find(key);
    if (it == params.end()) throw DomainError("missing rule parameter '" + key + "'");
    try {
        std::size_t used = 0;
        int v = std::stoi(it->second, &used);
        if (used != it->second.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw DomainError("rule parameter '" + key + "' must be an integer");
    }
}

const std::string& param(const std::map<std::string, std::string>& params, const std::string& key) {
    auto it = params.find(key);
    if (it == params.end()) throw DomainError("missing rule parameter '" + key + "'");
    return it->second;
}

}  // namespace

std::vector<std::string> rule_names() {
    return {"rd", "rd_k", "omni_star", "cond", "f1", "f2", "f3", "uniform", "dictator", "constant", "mix", "lift",
            "table"};
}

SDS parse_rule(std::string_view spec) {
    auto colon = spec.find(':');
    std::string name(spec.substr(0, colon));
    std::string rest = colon == std::string_view::npos ? "" : std::string(spec.substr(colon + 1));
    if (name == "table") {
        std::ifstream in(rest);
        if (!in) throw DomainError("cannot open rule table '" + rest + "'");
        std::stringstream buf;
        buf << in.rdbuf();
        return table_rule(std::make_shared<RuleTable>(table_from_json(buf.str())), "table:" + rest);
    }
    auto params = parse_params(rest);
    if (name == "rd") return rules::rd();
    if (name == "rd_k") return rules::rd_k(param_int(params, "k"));
    if (name == "omni_star") return rules::omni_star();
    if (name == "cond") return rules::cond();
    if (name == "f1") return rules::f1();
    if (name == "f2") return rules::f2();
    if (name == "f3") return rules::f3();
    if (name == "uniform") return rules::uniform();
    if (name == "dictator") return rules::dictatorship(param_int(params, "voter"));
    if (name == "constant") return rules::constant(param_int(params, "x"));
    if (name == "mix") {
        return rules::mix(parse_rule(param(params, "f")), parse_rule(param(params, "g")),
                          parse_rational(param(params, "lambda")));
    }
    if (name == "lift") {
        SDS base = parse_rule(param(params, "base"));
        int from = 0;
        if (params.count("from")) {
            from = param_int(params, "from");
        } else if (base.fixed_voters()) {
            from = *base.fixed_voters();
        } else {
            throw DomainError("lift: base rule has no fixed electorate; pass from=<n>");
        }
        return rules::subset_lift(base, from, param_int(params, "n"));
    }
    std::string valid;
    for (const auto& n : rule_names()) valid += (valid.empty() ? "" : ", ") + n;
    throw DomainError("unknown rule '" + name + "' (valid: " + valid + ")");
}

}  // namespace sds
