#include "sds/synth.hpp"

#include <algorithm>
#include <atomic>
#include <numeric>
#include <set>
#include <thread>
#include <tuple>

namespace sds {

// --- profile classes -------------------------------------------------------------

std::optional<std::size_t> ProfileClassIndex::find(const Profile& profile) const {
    auto it = lookup_.find(class_key(profile, mode));
    if (it == lookup_.end()) return std::nullopt;
    return it->second;
}

namespace {

std::uint64_t multinomial(const std::vector<int>& sorted_indices) {
    // n! / prod(count!) computed incrementally to stay exact.
    std::uint64_t result = 1;
    int run = 0;
    for (std::size_t i = 0; i < sorted_indices.size(); ++i) {
        run = (i > 0 && sorted_indices[i] == sorted_indices[i - 1]) ? run + 1 : 1;
        result = result * (i + 1) / run;
    }
    return result;
}

std::uint64_t multiset_count(std::uint64_t kinds, int n) {
    unsigned __int128 r = 1;
    for (int i = 1; i <= n; ++i) {
        r = r * (kinds + i - 1) / i;
        if (r > std::numeric_limits<std::uint64_t>::max()) return std::numeric_limits<std::uint64_t>::max();
    }
    return static_cast<std::uint64_t>(r);
}

}  // namespace

ProfileClassIndex enumerate_profiles(int m, int n, SymmetryMode mode, std::uint64_t cap) {
    if (m < 1 || n < 1) throw DomainError("profile enumeration needs m >= 1 and n >= 1");
    const auto& all = PreferenceRelation::all(m);
    const std::uint64_t raw = mode == SymmetryMode::full ? profile_count(m, n) : multiset_count(all.size(), n);
    if (raw > cap) {
        throw Refusal("enumerating " + std::to_string(raw) + " profiles exceeds the cap of " + std::to_string(cap));
    }
    ProfileClassIndex index;
    index.m = m;
    index.n = n;
    index.mode = mode;
    auto add = [&](const Profile& r, std::uint64_t size) {
        auto [it, fresh] = index.lookup_.try_emplace(class_key(r, mode), index.representatives.size());
        if (fresh) {
            index.representatives.push_back(r);
            index.members.emplace_back();
            index.sizes.push_back(0);
        }
        if (mode == SymmetryMode::rank_based || fresh) index.members[it->second].push_back(r);
        index.sizes[it->second] += size;
    };
    if (mode == SymmetryMode::full) {
        for_each_profile(m, n, [&](const Profile& r) {
            add(r, 1);
            return true;
        });
    } else {
        for_each_multiset(static_cast<int>(all.size()), n, [&](const std::vector<int>& idx) {
            std::vector<PreferenceRelation> prefs;
            prefs.reserve(n);
            for (int i : idx) prefs.push_back(all[i]);
            add(Profile(m, std::move(prefs)), multinomial(idx));
            return true;
        });
    }

    std::set<std::tuple<std::size_t, std::size_t, std::size_t>> seen;
    for (std::size_t c = 0; c < index.classes(); ++c) {
        for (const auto& member : index.members[c]) {
            for (int v = 0; v < n; ++v) {
                const auto& truth = member[v];
                if (mode != SymmetryMode::full && v > 0 && member[v - 1] == truth) continue;
                for (const auto& lie : all) {
                    if (lie == truth) continue;
                    Profile moved = member.with_voter(v, lie);
                    std::size_t target = index.lookup_.at(class_key(moved, mode));
                    if (target == c) continue;
                    if (seen.emplace(c, truth.index(), target).second) {
                        index.edges.push_back(DeviationEdge{c, target, truth, member, v, lie});
                    }
                }
            }
        }
    }
    return index;
}

// --- LP construction ---------------------------------------------------------------

std::string to_string(const AxiomSpec& a) {
    switch (a.kind) {
        case AxiomSpec::Kind::k_unanimity: return "k_unanimity(k=" + std::to_string(a.k) + ")";
        case AxiomSpec::Kind::k_alpha_unanimity:
            return "k_alpha_unanimity(k=" + std::to_string(a.k) + ",alpha=" + to_string(a.alpha) + ")";
        case AxiomSpec::Kind::condorcet: return "condorcet";
        case AxiomSpec::Kind::ex_post: return "ex_post";
    }
    return "?";
}

namespace {

void validate(const SynthesisProblem& p) {
    if (p.m < 1 || p.n < 1) throw DomainError("synthesis needs m >= 1 and n >= 1");
    if (p.utilities && p.utilities->kind() == UtilitySet::Kind::polytope) {
        throw DomainError("synthesis needs a finite or vertex-list utility set; convert the polytope to its vertices");
    }
    if (p.utilities && p.utilities->alternatives() != p.m) {
        throw DomainError("utility set is over a different number of alternatives");
    }
    for (const auto& a : p.axioms) {
        if (a.kind == AxiomSpec::Kind::k_unanimity && (a.k < 0 || 2 * a.k >= p.n)) {
            throw DomainError("k-unanimity needs 0 <= k < n/2");
        }
        if (a.kind == AxiomSpec::Kind::k_alpha_unanimity) {
            if (a.k < 0 || a.k > p.n) throw DomainError("(k, alpha)-unanimity needs 0 <= k <= n");
            if (a.alpha < 0 || a.alpha > 1) throw DomainError("(k, alpha)-unanimity needs 0 <= alpha <= 1");
        }
    }
}

std::string describe_class(const ProfileClassIndex& index, std::size_t c) {
    std::string out = "class " + std::to_string(c) + " [";
    const auto& rep = index.representatives[c];
    for (int v = 0; v < rep.voters(); ++v) {
        if (v) out += "; ";
        for (int pos = 0; pos < rep.alternatives(); ++pos) out += default_names(rep.alternatives())[rep[v].at(pos)];
    }
    return out + "]";
}

}  // namespace

SynthesisProgram build_program(const SynthesisProblem& problem, const ProfileClassIndex& index) {
    validate(problem);
    const int m = problem.m;
    SynthesisProgram out;
    auto& prog = out.program;
    const std::size_t classes = index.classes();
    for (std::size_t i = 0; i < classes * m; ++i) prog.add_variable(Rational(0));
    auto var = [m](std::size_t c, Alternative x) { return c * m + static_cast<std::size_t>(x); };
    auto names = default_names(m);
    auto add = [&](std::vector<lp::Term> terms, lp::Relation rel, Rational rhs, std::string why) {
        prog.add(std::move(terms), rel, std::move(rhs));
        out.provenance.push_back(std::move(why));
    };
    auto point_mass = [&](std::size_t c, Alternative x, const std::string& why) {
        for (Alternative y = 0; y < m; ++y) {
            add({{var(c, y), 1}}, lp::Relation::eq, y == x ? 1 : 0, why);
        }
    };

    for (std::size_t c = 0; c < classes; ++c) {
        const std::string cls = describe_class(index, c);
        std::vector<lp::Term> sum;
        for (Alternative x = 0; x < m; ++x) sum.push_back({var(c, x), 1});
        add(std::move(sum), lp::Relation::eq, 1, "lottery " + cls);
        for (const auto& member : index.members[c]) {
            auto tops = member.top_counts();
            for (const auto& a : problem.axioms) {
                switch (a.kind) {
                    case AxiomSpec::Kind::k_unanimity:
                        for (Alternative x = 0; x < m; ++x) {
                            if (tops[x] >= problem.n - a.k) point_mass(c, x, to_string(a) + " " + names[x] + " at " + cls);
                        }
                        break;
                    case AxiomSpec::Kind::k_alpha_unanimity:
                        for (Alternative x = 0; x < m; ++x) {
                            if (tops[x] >= problem.n - a.k) {
                                add({{var(c, x), 1}}, lp::Relation::ge, a.alpha,
                                    to_string(a) + " " + names[x] + " at " + cls);
                            }
                        }
                        break;
                    case AxiomSpec::Kind::condorcet:
                        if (auto w = condorcet_winner(member)) point_mass(c, *w, "condorcet " + names[*w] + " at " + cls);
                        break;
                    case AxiomSpec::Kind::ex_post: {
                        auto efficient = pareto_optimal_set(member);
                        for (Alternative x = 0; x < m; ++x) {
                            if (!efficient.count(x)) {
                                add({{var(c, x), 1}}, lp::Relation::eq, 0, "ex_post " + names[x] + " at " + cls);
                            }
                        }
                        break;
                    }
                }
            }
        }
    }

    const std::vector<UtilityVector> none;
    const auto& us = problem.utilities ? problem.utilities->vectors() : none;
    for (std::size_t e = 0; us.size() && e < index.edges.size(); ++e) {
        const auto& edge = index.edges[e];
        for (const auto& u : us) {
            // sum_x (f(target, x) - f(source, x)) u(rank(x)) <= 0
            std::vector<lp::Term> terms;
            for (Alternative x = 0; x < m; ++x) {
                const Rational& ux = u(edge.truth.rank(x));
                if (sgn(ux) == 0) continue;
                terms.push_back({var(edge.target, x), ux});
                terms.push_back({var(edge.source, x), -ux});
            }
            add(std::move(terms), lp::Relation::le, 0,
                "strategyproofness u=" + u.to_string() + " voter " + edge.truth.to_string(&names) + " from " +
                    describe_class(index, edge.source) + " to " + describe_class(index, edge.target));
        }
    }
    return out;
}

namespace {

std::vector<std::pair<std::size_t, Rational>> nonzero(const std::vector<Rational>& v) {
    std::vector<std::pair<std::size_t, Rational>> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (sgn(v[i]) != 0) out.emplace_back(i, v[i]);
    }
    return out;
}

RuleTable table_from_point(const ProfileClassIndex& index, const std::vector<Rational>& point) {
    RuleTable table;
    table.m = index.m;
    table.n = index.n;
    table.mode = index.mode;
    table.representatives = index.representatives;
    for (std::size_t c = 0; c < index.classes(); ++c) {
        std::vector<Rational> probs(point.begin() + c * index.m, point.begin() + (c + 1) * index.m);
        table.lotteries.emplace_back(std::move(probs));
    }
    return table;
}

void replay_table(const SynthesisProblem& problem, const RuleTable& table) {
    SDS f = table_rule(std::make_shared<RuleTable>(table), "synthesized");
    const int m = problem.m;
    const int n = problem.n;
    auto require = [](bool ok, const std::string& what) {
        if (!ok) throw std::logic_error("synthesized table fails " + what + " on replay");
    };
    for (const auto& a : problem.axioms) {
        switch (a.kind) {
            case AxiomSpec::Kind::k_unanimity: require(check_k_unanimity(f, a.k, m, n).pass(), to_string(a)); break;
            case AxiomSpec::Kind::k_alpha_unanimity:
                require(check_k_alpha_unanimity(f, a.k, a.alpha, m, n).pass(), to_string(a));
                break;
            case AxiomSpec::Kind::condorcet: require(check_condorcet_consistency(f, m, n).pass(), to_string(a)); break;
            case AxiomSpec::Kind::ex_post: require(check_ex_post_efficiency(f, m, n).pass(), to_string(a)); break;
        }
    }
    if (problem.mode == SymmetryMode::rank_based) require(check_rank_basedness(f, m, n).pass(), "rank-basedness");
    if (problem.mode != SymmetryMode::full) require(check_anonymity(f, m, n).pass(), "anonymity");
    if (problem.utilities) {
        require(check_u_sp(f, *problem.utilities, m, n, {.reduction = SweepReduction::full}).pass(), "strategyproofness");
    }
}

}  // namespace

SynthesisOutcome synthesize(const SynthesisProblem& problem, std::uint64_t cap) {
    validate(problem);
    ProfileClassIndex index = enumerate_profiles(problem.m, problem.n, problem.mode, cap);
    auto built = build_program(problem, index);
    SynthesisOutcome out;
    out.classes = index.classes();
    out.edges = index.edges.size();
    auto program = std::make_shared<lp::LinearProgram>(std::move(built.program));
    out.provenance = std::move(built.provenance);
    auto result = lp::check_feasible(*program, &out.stats);
    out.program = program;
    if (auto* inf = std::get_if<lp::Infeasible>(&result)) {
        if (!lp::verify_certificate(*program, inf->certificate)) {
            throw std::logic_error("synthesis produced an invalid certificate");
        }
        out.certificate = std::move(inf->certificate);
        return out;
    }
    const auto& opt = std::get<lp::Optimal>(result);
    out.feasible = true;
    out.table = table_from_point(index, opt.point);
    if (problem.m <= 3 && problem.n <= 4) {
        replay_table(problem, *out.table);
        out.replayed = true;
    }
    return out;
}

ProbabilityBounds bound_probability(const SynthesisProblem& problem, std::size_t cls, Alternative x) {
    validate(problem);
    ProfileClassIndex index = enumerate_profiles(problem.m, problem.n, problem.mode);
    if (cls >= index.classes()) throw DomainError("class index out of range");
    if (x < 0 || x >= problem.m) throw DomainError("alternative out of range");
    auto built = build_program(problem, index);
    lp::RegionOptimizer region(built.program);
    if (!region.feasible()) {
        throw DomainError("synthesis problem is infeasible; bounds are undefined (certificate with " +
                          std::to_string(nonzero(region.certificate()->rows).size()) + " active rows)");
    }
    std::vector<lp::Term> objective{{cls * problem.m + static_cast<std::size_t>(x), 1}};
    auto lo = region.optimize(objective, lp::Sense::minimize);
    auto hi = region.optimize(objective, lp::Sense::maximize);
    return {std::get<lp::Optimal>(lo).value, std::get<lp::Optimal>(hi).value};
}

BoundTable bound_all(const SynthesisProblem& problem, unsigned jobs) {
    validate(problem);
    BoundTable out{enumerate_profiles(problem.m, problem.n, problem.mode), {}, 0};
    auto built = build_program(problem, out.index);
    lp::RegionOptimizer region(built.program);
    if (!region.feasible()) throw DomainError("synthesis problem is infeasible; bounds are undefined");
    const int m = problem.m;
    const std::size_t total = out.index.classes() * m;
    out.bounds.assign(out.index.classes(), std::vector<ProbabilityBounds>(m));
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(std::max(1u, jobs));
    auto work = [&](unsigned w) {
        try {
            for (std::size_t v = next++; v < total; v = next++) {
                std::vector<lp::Term> objective{{v, 1}};
                auto lo = region.optimize(objective, lp::Sense::minimize);
                auto hi = region.optimize(objective, lp::Sense::maximize);
                out.bounds[v / m][v % m] = {std::get<lp::Optimal>(lo).value, std::get<lp::Optimal>(hi).value};
            }
        } catch (...) {
            errors[w] = std::current_exception();
            next = total;
        }
    };
    if (jobs <= 1) {
        work(0);
    } else {
        std::vector<std::thread> threads;
        for (unsigned w = 0; w < jobs; ++w) threads.emplace_back(work, w);
        for (auto& t : threads) t.join();
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    out.lp_calls = 2 * total;
    return out;
}

// --- impossibility certificates --------------------------------------------------------

namespace {

// x, y, z are alternatives 0, 1, 2; '*' expands to 3..m-1 in increasing order.
PreferenceRelation gadget_pref(int m, std::string_view pattern) {
    std::vector<Alternative> order;
    for (char c : pattern) {
        if (c == '*') {
            for (Alternative w = 3; w < m; ++w) order.push_back(w);
        } else {
            order.push_back(c - 'x');
        }
    }
    return PreferenceRelation(order);
}

Profile gadget_profile(int m, std::initializer_list<std::string_view> patterns) {
    std::vector<PreferenceRelation> prefs;
    for (auto p : patterns) prefs.push_back(gadget_pref(m, p));
    return Profile(m, std::move(prefs));
}

}  // namespace

CondorcetGadget condorcet_gadget(int m, GadgetCase which) {
    if (m < 4) throw DomainError("the Condorcet gadgets need m >= 4");
    CondorcetGadget g;
    g.which = which;
    Profile r1 = which == GadgetCase::one
                     ? gadget_profile(m, {"xy*z", "yz*x", "zx*y"})
                     : gadget_profile(m, {"x*yz", "z*xy", "y*zx", "xyz*", "zyx*"});
    g.profiles.push_back(r1);
    const std::vector<std::string_view> changed = which == GadgetCase::one
                                                      ? std::vector<std::string_view>{"yx*z", "zy*x", "xz*y"}
                                                      : std::vector<std::string_view>{"x*zy", "z*yx", "y*xz"};
    for (int v = 0; v < 3; ++v) g.profiles.push_back(r1.with_voter(v, gadget_pref(m, changed[v])));
    // Named winners: y, z, x in the first case; z, y, x in the second.
    const std::vector<Alternative> expected =
        which == GadgetCase::one ? std::vector<Alternative>{1, 2, 0} : std::vector<Alternative>{2, 1, 0};
    for (int j = 1; j <= 3; ++j) {
        auto w = condorcet_winner(g.profiles[j]);
        if (!w || *w != expected[j - 1]) throw std::logic_error("gadget profile lacks its Condorcet winner");
        g.winners.push_back(*w);
    }
    return g;
}

CondorcetCertificate certify_condorcet_impossibility(int m, const UtilityVector& u, std::optional<GadgetCase> forced) {
    if (m < 4) throw DomainError("the Condorcet impossibility needs m >= 4");
    if (u.size() != m || !u.strict()) throw DomainError("u must be a strictly decreasing vector of length m");
    GadgetCase which;
    if (forced) {
        which = *forced;
    } else if (u(1) - u(2) < u(2) - u(m)) {
        which = GadgetCase::one;
    } else if (u(1) - u(m - 1) > u(m - 1) - u(m)) {
        which = GadgetCase::two;
    } else {
        throw std::logic_error("utility vector satisfies neither gadget condition");
    }
    CondorcetCertificate cert{condorcet_gadget(m, which), {}};
    const auto& g = cert.gadget;
    auto prog = std::make_shared<lp::LinearProgram>();
    for (Alternative x = 0; x < m; ++x) prog->add_variable(Rational(0));
    std::vector<lp::Term> sum;
    for (Alternative x = 0; x < m; ++x) sum.push_back({static_cast<std::size_t>(x), 1});
    prog->add(std::move(sum), lp::Relation::eq, 1);
    auto& prov = cert.outcome.provenance;
    prov.push_back("lottery R1");
    auto names = default_names(m);
    for (int v = 0; v < 3; ++v) {
        const Alternative w = g.winners[v];
        std::vector<lp::Term> terms;
        if (which == GadgetCase::one) {
            // Voter v in R^1 must not gain by moving to R^{v+2}: u(f(R^1)) >= u(w).
            const auto& truth = g.profiles[0][v];
            for (Alternative x = 0; x < m; ++x) terms.push_back({static_cast<std::size_t>(x), u(truth.rank(x))});
            prog->add(std::move(terms), lp::Relation::ge, u(truth.rank(w)));
        } else {
            // Voter v in R^{v+2} must not gain by moving to R^1: u(w) >= u(f(R^1)).
            const auto& truth = g.profiles[v + 1][v];
            for (Alternative x = 0; x < m; ++x) terms.push_back({static_cast<std::size_t>(x), u(truth.rank(x))});
            prog->add(std::move(terms), lp::Relation::le, u(truth.rank(w)));
        }
        prov.push_back("strategyproofness voter " + std::to_string(v + 1) + " between R1 and R" +
                       std::to_string(v + 2) + " (Condorcet winner " + names[w] + ")");
    }
    auto result = lp::check_feasible(*prog, &cert.outcome.stats);
    cert.outcome.program = prog;
    cert.outcome.classes = 1;
    cert.outcome.edges = 3;
    if (auto* inf = std::get_if<lp::Infeasible>(&result)) {
        cert.outcome.certificate = inf->certificate;
    } else {
        cert.outcome.feasible = true;
        RuleTable table;
        table.m = m;
        table.n = g.profiles[0].voters();
        table.mode = SymmetryMode::full;
        table.representatives = {g.profiles[0]};
        table.lotteries = {Lottery(std::get<lp::Optimal>(result).point)};
        cert.outcome.table = std::move(table);
    }
    return cert;
}

SynthesisOutcome certify_expost_impossibility(int m, int n, int k, const Rational& epsilon, const UtilityVector& u,
                                              std::uint64_t cap) {
    if (m < 3 || n < 3) throw DomainError("the ex post impossibility needs m >= 3 and n >= 3");
    if (u.size() != m || !u.strict()) throw DomainError("u must be a strictly decreasing vector of length m");
    if (k < 0 || k > n) throw DomainError("k must lie in 0..n");
    if (sgn(epsilon) <= 0) throw DomainError("epsilon must be positive");
    if (u(1) - u(2) > epsilon / 2 * (u(2) - u(3))) {
        throw DomainError("hypothesis violated: u(1) - u(2) <= (epsilon/2)(u(2) - u(3)) does not hold");
    }
    Rational alpha = Rational(n - k, n) + epsilon;
    if (alpha > 1) throw DomainError("hypothesis violated: (n-k)/n + epsilon exceeds 1");
    SynthesisProblem p{m, n, SymmetryMode::anonymous,
                       {AxiomSpec::ex_post(), AxiomSpec::k_alpha_unanimity(k, alpha)},
                       UtilitySet::finite({u})};
    return synthesize(p, cap);
}

Rational rank_based_bound(const std::vector<Rational>& u, int k) {
    const int m = static_cast<int>(u.size());
    Rational s;
    for (int i = std::max(3, m - k + 1); i <= m; ++i) s += u[1] - u[i - 1];
    return s;
}

SynthesisOutcome certify_rank_based_impossibility(int m, int n, int k, const UtilityVector& u, std::uint64_t cap) {
    if (m < 3 || n < 3) throw DomainError("the rank-based impossibility needs m >= 3 and n >= 3");
    if (k < 1 || 2 * k > n - 1) throw DomainError("k must lie in 1..floor((n-1)/2)");
    if (u.size() != m || !u.strict()) throw DomainError("u must be a strictly decreasing vector of length m");
    if (!(u(1) - u(2) < rank_based_bound(u.values(), k))) {
        throw DomainError("hypothesis violated: u(1) - u(2) < sum_{i=max(3,m-k+1)}^m (u(2) - u(i)) does not hold");
    }
    SynthesisProblem p{m, n, SymmetryMode::rank_based, {AxiomSpec::k_unanimity(k)}, UtilitySet::finite({u})};
    return synthesize(p, cap);
}

}  // namespace sds
