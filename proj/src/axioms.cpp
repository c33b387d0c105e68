#include "sds/axioms.hpp"

#include <map>
#include <numeric>

namespace sds {

void require_sweep_size(int m, int n, const SweepOptions& opts) {
    std::uint64_t size = opts.profiles ? opts.profiles->size() : profile_count(m, n);
    if (size > opts.cap) {
        throw Refusal("sweep over " + (size == std::numeric_limits<std::uint64_t>::max() ? std::string("too many")
                                                                                          : std::to_string(size)) +
                      " profiles exceeds the cap of " + std::to_string(opts.cap));
    }
}

namespace {

using Visitor = std::function<std::optional<AxiomViolation>(const Profile&)>;

AxiomReport sweep(const char* axiom, const SDS& f, int m, int n, const SweepOptions& opts, const Visitor& visit) {
    f.require_domain(m, n);
    require_sweep_size(m, n, opts);
    AxiomReport report{axiom, f.name(), m, n, 0, std::nullopt};
    auto step = [&](const Profile& r) {
        if (r.alternatives() != m || r.voters() != n) throw DomainError("supplied profile has the wrong size");
        ++report.profiles_visited;
        report.counterexample = visit(r);
        return !report.counterexample;
    };
    if (opts.profiles) {
        for (const auto& r : *opts.profiles) {
            if (!step(r)) break;
        }
    } else {
        for_each_profile(m, n, step);
    }
    return report;
}

AxiomViolation pair_violation(const Profile& a, const Lottery& la, const Profile& b, const Lottery& lb,
                              Alternative xa, Alternative xb, std::string witness) {
    return AxiomViolation{{a, b}, {la, lb}, xb, lb[xb], la[xa], Comparison::equal, std::move(witness)};
}

std::string names(int m, Alternative x) { return default_names(m)[x]; }

}  // namespace

AxiomReport check_anonymity(const SDS& f, int m, int n, const SweepOptions& opts) {
    return sweep("anonymity", f, m, n, opts, [&](const Profile& r) -> std::optional<AxiomViolation> {
        Lottery base = f.evaluate_unchecked(r);
        for (int v = 0; v + 1 < n; ++v) {
            if (r[v] == r[v + 1]) continue;
            std::vector<int> perm(n);
            std::iota(perm.begin(), perm.end(), 0);
            std::swap(perm[v], perm[v + 1]);
            Profile moved = permute_voters(r, perm);
            Lottery other = f.evaluate_unchecked(moved);
            for (Alternative x = 0; x < m; ++x) {
                if (base[x] != other[x]) {
                    return pair_violation(r, base, moved, other, x, x,
                                          "swap voters " + std::to_string(v) + " and " + std::to_string(v + 1));
                }
            }
        }
        return std::nullopt;
    });
}

AxiomReport check_neutrality(const SDS& f, int m, int n, const SweepOptions& opts) {
    return sweep("neutrality", f, m, n, opts, [&](const Profile& r) -> std::optional<AxiomViolation> {
        Lottery base = f.evaluate_unchecked(r);
        for (Alternative a = 0; a + 1 < m; ++a) {
            std::vector<Alternative> tau(m);
            std::iota(tau.begin(), tau.end(), 0);
            std::swap(tau[a], tau[a + 1]);
            Profile moved = permute_alternatives(r, tau);
            Lottery other = f.evaluate_unchecked(moved);
            for (Alternative x = 0; x < m; ++x) {
                if (base[x] != other[tau[x]]) {
                    return pair_violation(r, base, moved, other, x, tau[x],
                                          "swap alternatives " + names(m, a) + " and " + names(m, a + 1));
                }
            }
        }
        return std::nullopt;
    });
}

namespace {

template <class Key>
AxiomReport grouped(const char* axiom, const SDS& f, int m, int n, const SweepOptions& opts, Key key,
                    const char* what) {
    std::map<std::vector<int>, std::pair<Profile, Lottery>> seen;
    return sweep(axiom, f, m, n, opts, [&](const Profile& r) -> std::optional<AxiomViolation> {
        Lottery value = f.evaluate_unchecked(r);
        auto [it, fresh] = seen.try_emplace(key(r), r, value);
        if (fresh) return std::nullopt;
        const auto& [first, first_value] = it->second;
        for (Alternative x = 0; x < m; ++x) {
            if (first_value[x] != value[x]) return pair_violation(first, first_value, r, value, x, x, what);
        }
        return std::nullopt;
    });
}

}  // namespace

AxiomReport check_rank_basedness(const SDS& f, int m, int n, const SweepOptions& opts) {
    return grouped(
        "rank_basedness", f, m, n, opts, [](const Profile& r) { return class_key(r, SymmetryMode::rank_based); },
        "profiles share a rank matrix");
}

AxiomReport check_tops_only(const SDS& f, int m, int n, const SweepOptions& opts) {
    return grouped(
        "tops_only", f, m, n, opts,
        [](const Profile& r) {
            std::vector<int> tops;
            for (const auto& p : r.preferences()) tops.push_back(p.top());
            return tops;
        },
        "profiles share every voter's favourite");
}

namespace {

AxiomReport unanimity(const char* axiom, const SDS& f, int k, const Rational& alpha, Comparison cmp, int m, int n,
                      const SweepOptions& opts) {
    return sweep(axiom, f, m, n, opts, [&](const Profile& r) -> std::optional<AxiomViolation> {
        auto tops = r.top_counts();
        for (Alternative x = 0; x < m; ++x) {
            if (tops[x] < n - k) continue;
            Lottery value = f.evaluate_unchecked(r);
            bool ok = cmp == Comparison::equal ? value[x] == alpha : value[x] >= alpha;
            if (!ok) {
                return AxiomViolation{{r},
                                      {value},
                                      x,
                                      value[x],
                                      alpha,
                                      cmp,
                                      std::to_string(tops[x]) + " of " + std::to_string(n) + " voters top " +
                                          names(m, x)};
            }
        }
        return std::nullopt;
    });
}

}  // namespace

AxiomReport check_k_unanimity(const SDS& f, int k, int m, int n, const SweepOptions& opts) {
    if (k < 0 || 2 * k >= n) throw DomainError("k-unanimity needs 0 <= k < n/2");
    return unanimity("k_unanimity", f, k, Rational(1), Comparison::equal, m, n, opts);
}

AxiomReport check_k_alpha_unanimity(const SDS& f, int k, const Rational& alpha, int m, int n,
                                    const SweepOptions& opts) {
    if (k < 0 || k > n) throw DomainError("(k, alpha)-unanimity needs 0 <= k <= n");
    if (alpha < 0 || alpha > 1) throw DomainError("(k, alpha)-unanimity needs 0 <= alpha <= 1");
    return unanimity("k_alpha_unanimity", f, k, alpha, Comparison::at_least, m, n, opts);
}

AxiomReport check_condorcet_consistency(const SDS& f, int m, int n, const SweepOptions& opts) {
    return sweep("condorcet", f, m, n, opts, [&](const Profile& r) -> std::optional<AxiomViolation> {
        auto w = condorcet_winner(r);
        if (!w) return std::nullopt;
        Lottery value = f.evaluate_unchecked(r);
        if (value[*w] == 1) return std::nullopt;
        return AxiomViolation{{r}, {value}, *w, value[*w], Rational(1), Comparison::equal,
                              names(m, *w) + " is the Condorcet winner"};
    });
}

AxiomReport check_ex_post_efficiency(const SDS& f, int m, int n, const SweepOptions& opts) {
    return sweep("ex_post", f, m, n, opts, [&](const Profile& r) -> std::optional<AxiomViolation> {
        Lottery value = f.evaluate_unchecked(r);
        auto efficient = pareto_optimal_set(r);
        for (Alternative x = 0; x < m; ++x) {
            if (efficient.count(x) || sgn(value[x]) == 0) continue;
            return AxiomViolation{{r}, {value}, x, value[x], Rational(0), Comparison::equal,
                                  names(m, x) + " is Pareto-dominated"};
        }
        return std::nullopt;
    });
}

bool replay(const SDS& f, const AxiomViolation& v) {
    if (v.profiles.empty() || v.profiles.size() != v.lotteries.size()) return false;
    for (std::size_t i = 0; i < v.profiles.size(); ++i) {
        if (!(f(v.profiles[i]) == v.lotteries[i])) return false;
    }
    const Rational& observed = v.lotteries.back()[v.observed_alternative];
    if (observed != v.observed) return false;
    return v.comparison == Comparison::equal ? observed != v.required : observed < v.required;
}

}  // namespace sds
