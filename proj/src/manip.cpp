#include "sds/manip.hpp"

#include "sds/lp.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <thread>

namespace sds {

std::string to_string(SweepReduction r) {
    switch (r) {
        case SweepReduction::full: return "full";
        case SweepReduction::anonymous: return "anonymous";
        case SweepReduction::symmetric: return "symmetric";
        case SweepReduction::tops: return "tops";
    }
    return "?";
}

SweepReduction parse_sweep_reduction(std::string_view text) {
    if (text == "full") return SweepReduction::full;
    if (text == "anonymous") return SweepReduction::anonymous;
    if (text == "symmetric") return SweepReduction::symmetric;
    if (text == "tops") return SweepReduction::tops;
    throw DomainError("unknown sweep reduction '" + std::string(text) + "' (full, anonymous, symmetric, tops)");
}

SweepReduction strongest_reduction(const Symmetries& s) {
    if (!s.anonymous) return SweepReduction::full;
    if (!s.neutral) return SweepReduction::anonymous;
    if (!s.tops_only) return SweepReduction::symmetric;
    return SweepReduction::tops;
}

Profile GroupManipulationWitness::deviated() const {
    Profile out = profile;
    for (std::size_t i = 0; i < coalition.size(); ++i) out = out.with_voter(coalition[i], misreports[i]);
    return out;
}

namespace {

// --- sweep sites -------------------------------------------------------------

std::uint64_t saturating_binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    unsigned __int128 r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i;
        if (r > std::numeric_limits<std::uint64_t>::max()) return std::numeric_limits<std::uint64_t>::max();
    }
    return static_cast<std::uint64_t>(r);
}

void require_reduction(const SDS& f, SweepReduction r) {
    const auto& s = f.symmetries();
    bool ok = true;
    if (r >= SweepReduction::anonymous) ok &= s.anonymous;
    if (r >= SweepReduction::symmetric) ok &= s.neutral;
    if (r >= SweepReduction::tops) ok &= s.tops_only;
    if (!ok) throw DomainError(f.name() + " does not declare the symmetries needed for the " + to_string(r) + " sweep");
}

// A truthful profile together with the voters whose deviations are examined.
struct Site {
    Profile profile;
    std::vector<int> voters;
    bool tops_misreports = false;
};

std::uint64_t site_count(int m, int n, SweepReduction r, const SPOptions& opts) {
    if (opts.profiles) return opts.profiles->size();
    const std::uint64_t kinds = PreferenceRelation::all(m).size();
    switch (r) {
        case SweepReduction::full: return profile_count(m, n);
        case SweepReduction::anonymous: return saturating_binomial(kinds + n - 1, n);
        case SweepReduction::symmetric: return saturating_binomial(kinds + n - 2, n - 1);
        case SweepReduction::tops: return saturating_binomial(m + n - 2, n - 1);
    }
    return 0;
}

void for_each_site(int m, int n, SweepReduction r, const SPOptions& opts,
                   const std::function<bool(const Site&)>& visit) {
    std::vector<int> everyone(n);
    std::iota(everyone.begin(), everyone.end(), 0);
    if (opts.profiles) {
        for (const auto& p : *opts.profiles) {
            if (p.alternatives() != m || p.voters() != n) throw DomainError("supplied profile has the wrong size");
            if (!visit(Site{p, everyone, false})) return;
        }
        return;
    }
    const auto& all = PreferenceRelation::all(m);
    switch (r) {
        case SweepReduction::full:
            for_each_profile(m, n, [&](const Profile& p) { return visit(Site{p, everyone, false}); });
            return;
        case SweepReduction::anonymous:
            for_each_multiset(static_cast<int>(all.size()), n, [&](const std::vector<int>& idx) {
                std::vector<PreferenceRelation> prefs;
                std::vector<int> voters;
                for (int v = 0; v < n; ++v) {
                    prefs.push_back(all[idx[v]]);
                    if (v == 0 || idx[v] != idx[v - 1]) voters.push_back(v);
                }
                return visit(Site{Profile(m, std::move(prefs)), std::move(voters), false});
            });
            return;
        case SweepReduction::symmetric:
            for_each_multiset(static_cast<int>(all.size()), n - 1, [&](const std::vector<int>& idx) {
                std::vector<PreferenceRelation> prefs{PreferenceRelation::identity(m)};
                for (int i : idx) prefs.push_back(all[i]);
                return visit(Site{Profile(m, std::move(prefs)), {0}, false});
            });
            return;
        case SweepReduction::tops:
            for_each_multiset(m, n - 1, [&](const std::vector<int>& tops) {
                std::vector<PreferenceRelation> prefs{PreferenceRelation::identity(m)};
                for (int t : tops) prefs.push_back(PreferenceRelation::canonical_with_top(m, t));
                return visit(Site{Profile(m, std::move(prefs)), {0}, true});
            });
            return;
    }
}

std::vector<PreferenceRelation> misreports_for(const PreferenceRelation& truth, bool tops_only) {
    std::vector<PreferenceRelation> out;
    const int m = truth.size();
    if (tops_only) {
        for (Alternative t = 0; t < m; ++t) {
            if (t != truth.top()) out.push_back(PreferenceRelation::canonical_with_top(m, t));
        }
        return out;
    }
    for (const auto& p : PreferenceRelation::all(m)) {
        if (!(p == truth)) out.push_back(p);
    }
    return out;
}

// Memoised evaluation within one worker.
class Evaluator {
public:
    explicit Evaluator(const SDS& f) : f_(f) {}

    const Lottery& operator()(const Profile& r) {
        std::vector<std::uint16_t> key;
        key.reserve(r.voters());
        for (const auto& p : r.preferences()) key.push_back(static_cast<std::uint16_t>(p.index()));
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;
        return memo_.emplace(std::move(key), f_.evaluate_unchecked(r)).first->second;
    }

private:
    const SDS& f_;
    std::map<std::vector<std::uint16_t>, Lottery> memo_;
};

// Checks the declared symmetries that license a reduced sweep on one profile.
void spot_check(const SDS& f, SweepReduction r, const Profile& profile, const Lottery& value) {
    if (r == SweepReduction::full) return;
    const int m = profile.alternatives();
    const int n = profile.voters();
    auto fail = [&](const char* what) {
        throw DomainError(f.name() + " violates its declared " + std::string(what) + " at profile " +
                          format_profile(profile, default_names(m)));
    };
    std::vector<int> reverse(n);
    for (int i = 0; i < n; ++i) reverse[i] = n - 1 - i;
    if (!(f.evaluate_unchecked(permute_voters(profile, reverse)) == value)) fail("anonymity");
    if (r == SweepReduction::anonymous) return;
    std::vector<Alternative> rotate(m);
    for (Alternative x = 0; x < m; ++x) rotate[x] = (x + 1) % m;
    Lottery moved = f.evaluate_unchecked(permute_alternatives(profile, rotate));
    for (Alternative x = 0; x < m; ++x) {
        if (moved[rotate[x]] != value[x]) fail("neutrality");
    }
    if (r == SweepReduction::symmetric) return;
    std::vector<PreferenceRelation> prefs;
    for (const auto& p : profile.preferences()) {
        auto order = p.order();
        std::reverse(order.begin() + 1, order.end());
        prefs.emplace_back(order);
    }
    if (!(f.evaluate_unchecked(Profile(m, std::move(prefs))) == value)) fail("tops-only property");
}

// Gain coefficients by rank: gain(u) = sum_r c[r-1] u(r).
std::vector<Rational> rank_coefficients(const Lottery& truthful, const Lottery& manipulated,
                                        const PreferenceRelation& truth) {
    const int m = truth.size();
    std::vector<Rational> c(m);
    for (int pos = 0; pos < m; ++pos) {
        Alternative x = truth.at(pos);
        c[pos] = manipulated[x] - truthful[x];
    }
    return c;
}

Rational dot(const std::vector<Rational>& c, const std::vector<Rational>& u) {
    Rational s;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (sgn(c[i]) != 0) s += c[i] * u[i];
    }
    return s;
}

struct Verdict {
    UtilityVector utility;
    Rational gain;
};

// Moves a gaining closure point toward a strict member of U while keeping the gain positive.
Verdict perturb(const std::vector<Rational>& c, const UtilityVector& best, const Rational& best_gain,
                const UtilityVector& interior) {
    if (best.strict()) return {best, best_gain};
    Rational g_int = dot(c, interior.values());
    Rational t(1, 2);
    if (g_int < 0) t = best_gain / (2 * (best_gain - g_int));
    std::vector<Rational> u(c.size());
    for (std::size_t r = 0; r < u.size(); ++r) u[r] = (1 - t) * best.values()[r] + t * interior.values()[r];
    UtilityVector strict(u);
    return {strict, dot(c, strict.values())};
}

// Decides, for a gain coefficient vector, whether some u in U gains.
class Judge {
public:
    explicit Judge(const UtilitySet& set) : set_(set) {
        if (set.kind() == UtilitySet::Kind::polytope) {
            const int m = set.alternatives();
            lp::LinearProgram prog;
            for (int r = 0; r < m; ++r) prog.add_variable(std::nullopt, std::nullopt);
            prog.add({{0, 1}}, lp::Relation::eq, 1);
            prog.add({{static_cast<std::size_t>(m - 1), 1}}, lp::Relation::eq, 0);
            for (int r = 0; r + 1 < m; ++r) {
                prog.add({{static_cast<std::size_t>(r), 1}, {static_cast<std::size_t>(r + 1), -1}}, lp::Relation::ge,
                         0);
            }
            for (const auto& con : set.constraints()) {
                std::vector<lp::Term> terms;
                for (int r = 0; r < m; ++r) terms.push_back({static_cast<std::size_t>(r), con.coeffs[r]});
                lp::Relation rel = con.rel == UtilityRelation::le   ? lp::Relation::le
                                   : con.rel == UtilityRelation::eq ? lp::Relation::eq
                                                                    : lp::Relation::ge;
                prog.add(std::move(terms), rel, 0);
            }
            region_.emplace(std::move(prog));
            if (!region_->feasible()) throw std::logic_error("validated utility polytope became empty");
        }
    }

    std::optional<Verdict> operator()(const std::vector<Rational>& c) {
        if (std::all_of(c.begin(), c.end(), [](const Rational& x) { return sgn(x) == 0; })) return std::nullopt;
        switch (set_.kind()) {
            case UtilitySet::Kind::finite: return best_of(c, set_.vectors(), false);
            case UtilitySet::Kind::vertices: return best_of(c, set_.vectors(), true);
            case UtilitySet::Kind::polytope: return polytope(c);
        }
        return std::nullopt;
    }

    std::uint64_t lp_calls = 0;

private:
    std::optional<Verdict> best_of(const std::vector<Rational>& c, const std::vector<UtilityVector>& vs,
                                   bool perturbable) const {
        const UtilityVector* best = nullptr;
        Rational best_gain;
        for (const auto& v : vs) {
            Rational g = dot(c, v.values());
            if (sgn(g) > 0 && (!best || g > best_gain)) {
                best = &v;
                best_gain = g;
            }
        }
        if (!best) return std::nullopt;
        if (!perturbable) return Verdict{*best, best_gain};
        return perturb(c, *best, best_gain, set_.interior_point());
    }

    std::optional<Verdict> polytope(const std::vector<Rational>& c) {
        auto it = cache_.find(c);
        if (it != cache_.end()) return it->second;
        std::vector<lp::Term> objective;
        for (std::size_t r = 0; r < c.size(); ++r) {
            if (sgn(c[r]) != 0) objective.push_back({r, c[r]});
        }
        ++lp_calls;
        auto outcome = region_->optimize(objective, lp::Sense::maximize);
        const auto* opt = std::get_if<lp::Optimal>(&outcome);
        if (!opt) throw std::logic_error("bounded utility polytope reported " + lp::describe(outcome));
        std::optional<Verdict> verdict;
        if (sgn(opt->value) > 0) {
            verdict = perturb(c, UtilityVector::closure_point(opt->point), opt->value, set_.interior_point());
        }
        cache_.emplace(c, verdict);
        return verdict;
    }

    const UtilitySet& set_;
    std::optional<lp::RegionOptimizer> region_;
    std::map<std::vector<Rational>, std::optional<Verdict>> cache_;
};

// Runs `process` over all sites with `jobs` workers; the witness at the
// smallest site index wins, so the result does not depend on scheduling.
template <class Witness, class Process>
std::optional<Witness> parallel_sweep(int m, int n, SweepReduction r, const SPOptions& opts, Process make_worker,
                                      std::uint64_t& visited) {
    const unsigned jobs = std::max(1u, opts.jobs);
    std::atomic<std::uint64_t> best{std::numeric_limits<std::uint64_t>::max()};
    std::vector<std::optional<Witness>> found(jobs);
    std::vector<std::uint64_t> counts(jobs, 0);
    std::vector<std::exception_ptr> errors(jobs);
    auto run = [&](unsigned w) {
        try {
            auto process = make_worker(w);
            std::uint64_t idx = 0;
            for_each_site(m, n, r, opts, [&](const Site& site) {
                const std::uint64_t i = idx++;
                if (i >= best.load()) return false;
                if (i % jobs != w) return true;
                ++counts[w];
                if (auto wit = process(site)) {
                    found[w] = std::move(wit);
                    std::uint64_t cur = best.load();
                    while (i < cur && !best.compare_exchange_weak(cur, i)) {
                    }
                    return false;
                }
                return true;
            });
        } catch (...) {
            errors[w] = std::current_exception();
            best.store(0);
        }
    };
    if (jobs == 1) {
        run(0);
    } else {
        std::vector<std::thread> threads;
        for (unsigned w = 0; w < jobs; ++w) threads.emplace_back(run, w);
        for (auto& t : threads) t.join();
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    visited = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
    const std::uint64_t b = best.load();
    if (b == std::numeric_limits<std::uint64_t>::max()) return std::nullopt;
    return std::move(found[b % jobs]);
}

SweepReduction choose_reduction(const SDS& f, const SPOptions& opts) {
    if (opts.profiles) return SweepReduction::full;
    SweepReduction r = opts.reduction.value_or(strongest_reduction(f.symmetries()));
    require_reduction(f, r);
    return r;
}

void require_sizes(const SDS& f, const UtilitySet* u, int m, int n, SweepReduction r, const SPOptions& opts) {
    f.require_domain(m, n);
    if (u && u->alternatives() != m) throw DomainError("utility set is over a different number of alternatives");
    std::uint64_t sites = site_count(m, n, r, opts);
    if (sites > opts.cap) {
        throw Refusal("sweep over " + std::to_string(sites) + " profiles (" + to_string(r) +
                      " reduction) exceeds the cap of " + std::to_string(opts.cap));
    }
}

}  // namespace

Rational gain(const SDS& f, const Deviation& dev, const UtilityVector& u) {
    const auto& truth = dev.profile[dev.voter];
    return expected_utility(f(dev.deviated()), u, truth) - expected_utility(f(dev.profile), u, truth);
}

std::optional<ManipulationWitness> best_manipulation_utility(const SDS& f, const Deviation& dev,
                                                             const UtilitySet& u) {
    if (u.kind() == UtilitySet::Kind::finite) {
        throw DomainError("best_manipulation_utility needs a polytope or vertex-list utility set");
    }
    if (dev.voter < 0 || dev.voter >= dev.profile.voters()) throw DomainError("voter out of range");
    if (dev.misreport == dev.profile[dev.voter]) throw DomainError("a deviation must change the voter's report");
    if (u.alternatives() != dev.profile.alternatives()) throw DomainError("utility set dimension mismatch");
    Lottery truthful = f(dev.profile);
    Lottery manipulated = f(dev.deviated());
    Judge judge(u);
    auto verdict = judge(rank_coefficients(truthful, manipulated, dev.profile[dev.voter]));
    if (!verdict) return std::nullopt;
    return ManipulationWitness{dev, verdict->utility, verdict->gain, truthful, manipulated};
}

SPReport check_u_sp(const SDS& f, const UtilitySet& u, int m, int n, const SPOptions& opts) {
    SPReport report;
    report.reduction = choose_reduction(f, opts);
    require_sizes(f, &u, m, n, report.reduction, opts);
    const SweepReduction red = report.reduction;
    std::mutex stats_mutex;
    std::vector<std::unique_ptr<Judge>> judges;
    std::atomic<std::uint64_t> deviations{0};
    auto make_worker = [&](unsigned) {
        std::unique_ptr<Judge>* slot;
        {
            std::lock_guard lock(stats_mutex);
            judges.push_back(std::make_unique<Judge>(u));
            slot = &judges.back();
        }
        Judge* judge = slot->get();
        auto eval = std::make_shared<Evaluator>(f);
        return [&f, judge, eval, red, &deviations](const Site& site) -> std::optional<ManipulationWitness> {
            const Lottery truthful = (*eval)(site.profile);
            spot_check(f, red, site.profile, truthful);
            for (int voter : site.voters) {
                const auto& truth = site.profile[voter];
                for (const auto& lie : misreports_for(truth, site.tops_misreports)) {
                    ++deviations;
                    Deviation dev{site.profile, voter, lie};
                    const Lottery& manipulated = (*eval)(dev.deviated());
                    if (auto v = (*judge)(rank_coefficients(truthful, manipulated, truth))) {
                        return ManipulationWitness{dev, v->utility, v->gain, truthful, manipulated};
                    }
                }
            }
            return std::nullopt;
        };
    };
    report.witness = parallel_sweep<ManipulationWitness>(m, n, red, opts, make_worker, report.profiles_visited);
    report.deviations = deviations.load();
    for (const auto& j : judges) report.lp_calls += j->lp_calls;
    return report;
}

SPReport check_u_pi_sp(const SDS& f, const UtilityVector& u, int m, int n, const SPOptions& opts) {
    if (!u.strict()) throw DomainError("u^Pi-strategyproofness needs a strictly decreasing utility vector");
    return check_u_sp(f, UtilitySet::finite({u}), m, n, opts);
}

GroupSPReport check_group_sp(const SDS& f, const UtilitySet& u, int m, int n, const SPOptions& opts) {
    GroupSPReport report;
    SPOptions local = opts;
    if (!opts.profiles) {
        SweepReduction r = opts.reduction.value_or(strongest_reduction(f.symmetries()));
        local.reduction = std::min(r, SweepReduction::anonymous);
    }
    report.reduction = choose_reduction(f, local);
    require_sizes(f, &u, m, n, report.reduction, local);
    const bool anonymous = report.reduction == SweepReduction::anonymous;
    const auto& all = PreferenceRelation::all(m);
    const std::uint64_t kinds = all.size();

    Judge judge(u);
    Evaluator eval(f);
    std::uint64_t deviations = 0;
    auto process = [&](const Site& site) -> std::optional<GroupManipulationWitness> {
        const Lottery truthful = eval(site.profile);
        spot_check(f, report.reduction, site.profile, truthful);
        // Voters grouped by preference, in order of first appearance.
        std::vector<std::vector<int>> groups;
        std::map<std::size_t, std::size_t> slot;
        for (int v = 0; v < n; ++v) {
            auto [it, fresh] = slot.try_emplace(site.profile[v].index(), groups.size());
            if (fresh) groups.emplace_back();
            groups[it->second].push_back(v);
        }
        for (const auto& group : groups) {
            const auto& truth = site.profile[group.front()];
            const std::size_t truth_index = truth.index();
            const int size = static_cast<int>(group.size());
            // Coalitions: prefixes of the group under anonymity, all subsets otherwise.
            std::vector<std::vector<int>> coalitions;
            if (anonymous) {
                for (int s = 1; s <= size; ++s) coalitions.emplace_back(group.begin(), group.begin() + s);
            } else {
                for (std::uint32_t mask = 1; mask < (1u << size); ++mask) {
                    std::vector<int> c;
                    for (int i = 0; i < size; ++i) {
                        if (mask & (1u << i)) c.push_back(group[i]);
                    }
                    coalitions.push_back(std::move(c));
                }
            }
            for (const auto& coalition : coalitions) {
                const int s = static_cast<int>(coalition.size());
                std::uint64_t combos = anonymous ? saturating_binomial(kinds + s - 1, s) : [&] {
                    std::uint64_t t = 1;
                    for (int i = 0; i < s; ++i) t = t > opts.coalition_budget ? t : t * kinds;
                    return t;
                }();
                if (combos > opts.coalition_budget) {
                    throw Refusal("coalition of " + std::to_string(s) + " voters has " + std::to_string(combos) +
                                  " misreport combinations, above the budget of " +
                                  std::to_string(opts.coalition_budget));
                }
                std::optional<GroupManipulationWitness> hit;
                auto try_reports = [&](const std::vector<int>& idx) {
                    if (std::all_of(idx.begin(), idx.end(), [&](int i) { return static_cast<std::size_t>(i) == truth_index; })) {
                        return true;
                    }
                    ++deviations;
                    GroupManipulationWitness w{site.profile, coalition, {}, UtilityVector({1}), 0, truthful, truthful};
                    for (int i : idx) w.misreports.push_back(all[i]);
                    const Lottery& manipulated = eval(w.deviated());
                    if (auto v = judge(rank_coefficients(truthful, manipulated, truth))) {
                        w.utility = v->utility;
                        w.gain = v->gain;
                        w.manipulated = manipulated;
                        hit = std::move(w);
                        return false;
                    }
                    return true;
                };
                if (anonymous) {
                    for_each_multiset(static_cast<int>(kinds), s, try_reports);
                } else {
                    std::vector<int> idx(s, 0);
                    while (true) {
                        if (!try_reports(idx)) break;
                        int v = s - 1;
                        while (v >= 0 && ++idx[v] == static_cast<int>(kinds)) idx[v--] = 0;
                        if (v < 0) break;
                    }
                }
                if (hit) return hit;
            }
        }
        return std::nullopt;
    };
    for_each_site(m, n, report.reduction, local, [&](const Site& site) {
        ++report.profiles_visited;
        report.witness = process(site);
        return !report.witness;
    });
    report.deviations = deviations;
    report.lp_calls = judge.lp_calls;
    return report;
}

BoundaryResult sp_boundary(const SDS& f, const std::vector<Rational>& tail, int m, int n, const SPOptions& opts) {
    if (static_cast<int>(tail.size()) != m - 1) throw DomainError("tail must list u(2), ..., u(m)");
    for (std::size_t i = 0; i + 1 < tail.size(); ++i) {
        if (!(tail[i] > tail[i + 1])) throw DomainError("tail must be strictly decreasing");
    }
    BoundaryResult result;
    result.reduction = choose_reduction(f, opts);
    require_sizes(f, nullptr, m, n, result.reduction, opts);
    const SweepReduction red = result.reduction;
    Evaluator eval(f);
    std::optional<Rational> bound;
    for_each_site(m, n, red, opts, [&](const Site& site) {
        const Lottery truthful = eval(site.profile);
        spot_check(f, red, site.profile, truthful);
        for (int voter : site.voters) {
            const auto& truth = site.profile[voter];
            for (const auto& lie : misreports_for(truth, site.tops_misreports)) {
                ++result.deviations;
                Deviation dev{site.profile, voter, lie};
                auto c = rank_coefficients(truthful, eval(dev.deviated()), truth);
                // gain(u1) = a u1 + b
                const Rational& a = c[0];
                Rational b;
                for (int r = 1; r < m; ++r) b += c[r] * tail[r - 1];
                if (sgn(a) > 0 || (sgn(a) == 0 && sgn(b) > 0)) {
                    throw DomainError("boundary undefined for this rule: a deviation at " +
                                      format_profile(site.profile, default_names(m)) +
                                      "gains for arbitrarily large u(1)");
                }
                if (sgn(a) < 0) {
                    Rational cut = -b / a;
                    if (!bound || cut > *bound) {
                        bound = cut;
                        result.binding = dev;
                    }
                }
            }
        }
        return true;
    });
    const Rational& u2 = tail.front();
    result.value = bound && *bound > u2 ? *bound : u2;
    if (!(bound && *bound > u2)) result.binding.reset();

    auto with_top = [&](const Rational& u1) {
        std::vector<Rational> u{u1};
        u.insert(u.end(), tail.begin(), tail.end());
        return UtilityVector(u);
    };
    SPOptions verify = opts;
    verify.reduction = red;
    const Rational step(1, 1000);
    Rational pass_at = result.value == u2 ? u2 + step : result.value;
    if (!check_u_pi_sp(f, with_top(pass_at), m, n, verify).pass()) {
        throw std::logic_error("sp_boundary: no strategyproofness at the computed boundary");
    }
    if (result.value - step > u2 && check_u_pi_sp(f, with_top(result.value - step), m, n, verify).pass()) {
        throw std::logic_error("sp_boundary: strategyproof below the computed boundary");
    }
    return result;
}

bool replay(const SDS& f, const ManipulationWitness& w, const UtilitySet* u) {
    const auto& dev = w.deviation;
    if (dev.voter < 0 || dev.voter >= dev.profile.voters()) return false;
    const auto& truth = dev.profile[dev.voter];
    if (dev.misreport == truth || !w.utility.strict()) return false;
    Lottery truthful = f(dev.profile);
    Lottery manipulated = f(dev.deviated());
    if (!(truthful == w.truthful) || !(manipulated == w.manipulated)) return false;
    Rational g = expected_utility(manipulated, w.utility, truth) - expected_utility(truthful, w.utility, truth);
    if (g != w.gain || sgn(g) <= 0) return false;
    return !u || u->contains(w.utility);
}

bool replay(const SDS& f, const GroupManipulationWitness& w, const UtilitySet* u) {
    if (w.coalition.empty() || w.coalition.size() != w.misreports.size() || !w.utility.strict()) return false;
    const auto& truth = w.profile[w.coalition.front()];
    for (int v : w.coalition) {
        if (v < 0 || v >= w.profile.voters() || !(w.profile[v] == truth)) return false;
    }
    Lottery truthful = f(w.profile);
    Lottery manipulated = f(w.deviated());
    if (!(truthful == w.truthful) || !(manipulated == w.manipulated)) return false;
    Rational g = expected_utility(manipulated, w.utility, truth) - expected_utility(truthful, w.utility, truth);
    if (g != w.gain || sgn(g) <= 0) return false;
    return !u || u->contains(w.utility);
}

}  // namespace sds
