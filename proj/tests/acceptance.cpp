// Prints one PASS/FAIL line per acceptance criterion; exits 1 if any fails.
// Optional arguments select criteria by number.

#include "sds/documents.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <thread>

using namespace sds;

namespace {

struct Failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& what) {
    if (!ok) throw Failure(what);
}

Rational q(long p, long d = 1) { return make_rational(p, d); }

UtilityVector uv(std::vector<Rational> v) { return UtilityVector(std::move(v)); }

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), "cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

unsigned workers() { return std::max(1u, std::thread::hardware_concurrency()); }

// Farkas certificate checked directly and again through its serialized form.
void require_certificate(const SynthesisOutcome& o, const std::string& what) {
    require(!o.feasible && o.certificate, what + ": expected Infeasible");
    require(lp::verify_certificate(*o.program, *o.certificate), what + ": certificate does not verify");
    auto json = doc::certificate_to_json(*o.program, *o.certificate, o.provenance);
    require(doc::replay_certificate(doc::Json::parse(json.dump())), what + ": serialized certificate does not replay");
}

// The lotteries of `f` on the class representatives, as a point of the program.
std::vector<Rational> table_point(const SDS& f, const ProfileClassIndex& idx) {
    std::vector<Rational> point;
    for (const auto& rep : idx.representatives) {
        auto p = f(rep);
        point.insert(point.end(), p.probabilities().begin(), p.probabilities().end());
    }
    return point;
}

bool admissible(const SDS& f, const SynthesisProblem& problem) {
    auto idx = enumerate_profiles(problem.m, problem.n, problem.mode);
    auto built = build_program(problem, idx);
    return lp::satisfies(built.program, table_point(f, idx));
}

// u(2) = 1 > ... > u(m) = 0 evenly spaced, u(1) = 1 + top_gap.
UtilityVector spaced(int m, const Rational& top_gap) {
    std::vector<Rational> v{1 + top_gap};
    for (int i = 2; i <= m; ++i) v.push_back(q(m - i, m - 2));
    return uv(v);
}

std::string example_regression() {
    const std::string dir = SDS_FIXTURES;
    auto r1 = parse_profile(read_file(dir + "/ex1.prof")).profile;
    auto r2 = parse_profile(read_file(dir + "/ex1_r2.prof")).profile;
    auto f1 = Lottery::uniform(3);
    auto f2 = Lottery::point(3, 1);
    require(rules::rd()(r1) == f1, "rd(R1) is not uniform");
    require(r2 == r1.with_voter(0, r2[0]), "R2 differs from R1 beyond voter 1");
    const auto& truth = r1[0];
    auto eu = [&](const Lottery& p, std::vector<Rational> u) { return expected_utility(p, uv(std::move(u)), truth); };
    require(eu(f1, {2, 1, 0}) == 1 && eu(f2, {2, 1, 0}) == 1, "u1 values");
    require(eu(f1, {3, 1, 0}) == q(4, 3) && eu(f2, {3, 1, 0}) == 1, "u2 values");
    require(eu(f1, {3, 2, 0}) == q(5, 3) && eu(f2, {3, 2, 0}) == 2, "u3 values");
    return "1, 4/3, 5/3, 2";
}

std::string rdk_boundaries() {
    std::string detail;
    for (auto [m, n, k] : {std::tuple{3, 3, 1}, {3, 5, 1}, {3, 5, 2}, {4, 5, 1}, {5, 5, 2}}) {
        auto f = rules::rd_k(k);
        auto at = spaced(m, k);
        auto below = spaced(m, k - q(1, 10));
        auto tag = "(" + std::to_string(m) + "," + std::to_string(n) + "," + std::to_string(k) + ")";
        require(check_u_pi_sp(f, at, m, n).pass(), tag + " fails at the boundary");
        auto r = check_u_pi_sp(f, below, m, n);
        require(!r.pass(), tag + " passes below the boundary");
        require(r.witness->gain > 0 && replay(f, *r.witness), tag + " witness does not replay");
        if (m == 3 && n == 3) {
            auto w = check_u_pi_sp(f, uv({q(19, 10), 1, 0}), 3, 3).witness;
            require(w && w->gain == q(1, 30), "gain at (19/10,1,0) is not 1/30");
        }
        detail += tag + " ";
    }
    return detail + "gain 1/30";
}

std::string omni_boundary() {
    auto f = rules::omni_star();
    require(check_u_pi_sp(f, uv({9, 3, 2, 1, 0}), 5, 5).pass(), "(9,3,2,1,0) fails");
    auto r = check_u_pi_sp(f, uv({q(89, 10), 3, 2, 1, 0}), 5, 5);
    require(!r.pass() && replay(f, *r.witness), "(89/10,3,2,1,0) has no replaying witness");
    auto b = sp_boundary(f, {3, 2, 1, 0}, 5, 5);
    require(b.value == 9, "sp_boundary = " + to_string(b.value));
    return "boundary 9";
}

std::string threshold_table() {
    std::vector<Rational> tail{3, 2, 1, 0};
    auto bound = [&](const char* spec, int n) { return sp_boundary(parse_rule(spec), tail, 5, n).value; };
    auto rd = bound("rd", 11), rd1 = bound("rd_k:k=1", 11), rd2 = bound("rd_k:k=2", 11), omni = bound("omni_star", 11);
    require(rd == 3 && rd1 == 6 && rd2 == 9 && omni == 9,
            "RD " + to_string(rd) + " RD1 " + to_string(rd1) + " RD2 " + to_string(rd2) + " OMNI " + to_string(omni));
    std::vector<Rational> u{3, 3, 2, 1, 0};
    require(3 + rank_based_bound(u, 2) == 8, "k=2 lower bound");
    return "RD:3 RD1:6 RD2:9 OMNI*:9";
}

std::string rank_based_instance() {
    auto out = certify_rank_based_impossibility(3, 3, 1, uv({q(3, 2), 1, 0}));
    require_certificate(out, "u=(3/2,1,0)");
    SynthesisProblem control{3, 3, SymmetryMode::rank_based, {AxiomSpec::k_unanimity(1)},
                             UtilitySet::finite({uv({2, 1, 0})})};
    auto ok = synthesize(control);
    require(ok.feasible && ok.replayed, "u=(2,1,0) is not Feasible");
    require(admissible(rules::rd_k(1), control), "rd_k(1) violates the control program");
    return "Infeasible with certificate; control Feasible";
}

std::string condorcet_gadgets() {
    auto one = certify_condorcet_impossibility(4, uv({3, 2, 1, 0}));
    require(one.gadget.which == GadgetCase::one, "(3,2,1,0) did not select case one");
    require_certificate(one.outcome, "case one");
    auto two = certify_condorcet_impossibility(4, uv({10, 2, 1, 0}));
    require(two.gadget.which == GadgetCase::two, "(10,2,1,0) did not select case two");
    require_certificate(two.outcome, "case two");
    require(one.gadget.winners == std::vector<Alternative>{1, 2, 0}, "case one winners");
    require(two.gadget.winners == std::vector<Alternative>{2, 1, 0}, "case two winners");
    for (const auto* g : {&one.gadget, &two.gadget}) {
        for (std::size_t i = 1; i < g->profiles.size(); ++i) {
            require(condorcet_winner(g->profiles[i]) == g->winners[i - 1], "gadget winner mismatch");
        }
    }
    return "case one and case two Infeasible";
}

std::string cond_sp() {
    auto u = UtilitySet::equidistant(3).as_vertex_list();
    SPOptions opts;
    opts.reduction = SweepReduction::full;
    std::string detail;
    for (int n : {3, 4, 5}) {
        auto r = check_u_sp(rules::cond(), u, 3, n, opts);
        require(r.pass(), "n=" + std::to_string(n) + " fails");
        require(r.profiles_visited == profile_count(3, n), "sweep was not exhaustive");
        detail += std::to_string(r.profiles_visited) + " ";
    }
    return detail + "profiles";
}

std::string cond_uniqueness() {
    SynthesisProblem p{3, 3, SymmetryMode::full, {AxiomSpec::condorcet()}, UtilitySet::equidistant(3).as_vertex_list()};
    auto t = bound_all(p, workers());
    std::size_t cyclic = 0, winners = 0;
    for (std::size_t c = 0; c < t.index.classes(); ++c) {
        auto w = condorcet_winner(t.index.representatives[c]);
        for (Alternative x = 0; x < 3; ++x) {
            const auto& b = t.bounds[c][x];
            if (!w) {
                require(b.min == q(1, 3) && b.max == q(1, 3), "cyclic class not pinned to 1/3");
            } else if (x == *w) {
                require(b.min == 1 && b.max == 1, "Condorcet coordinate not pinned to 1");
            }
        }
        ++(w ? winners : cyclic);
    }
    require(cyclic == 12 && winners == 204, "unexpected class split");
    return std::to_string(cyclic) + " cyclic and " + std::to_string(winners) + " winner profiles, " +
           std::to_string(t.lp_calls) + " LPs";
}

std::string expost_instance() {
    auto out = certify_expost_impossibility(3, 3, 1, q(1, 4), uv({q(9, 8), 1, 0}));
    require_certificate(out, "alpha=(n-k)/n+1/4");
    SynthesisProblem relaxed{3, 3, SymmetryMode::anonymous,
                             {AxiomSpec::ex_post(), AxiomSpec::k_alpha_unanimity(1, q(2, 3))},
                             UtilitySet::finite({uv({q(9, 8), 1, 0})})};
    auto ok = synthesize(relaxed);
    require(ok.feasible && ok.replayed, "alpha=2/3 is not Feasible");
    require(admissible(rules::rd(), relaxed), "rd violates the relaxed program");
    return "Infeasible; alpha=2/3 Feasible with rd admissible";
}

std::string f2_synthesis() {
    auto vertices = UtilitySet::vertex_list({uv({q(3, 2), 1, 0}), uv({3, 1, 0})});
    SynthesisProblem p{3, 4, SymmetryMode::anonymous, {AxiomSpec::k_unanimity(1)}, vertices};
    auto out = synthesize(p);
    require(out.feasible && out.replayed, "not Feasible");
    auto f2 = rules::f2();
    require(check_u_sp(f2, vertices, 3, 4).pass(), "f2 fails U-strategyproofness");
    require(check_k_unanimity(f2, 1, 3, 4).pass(), "f2 fails 1-unanimity");
    require(admissible(f2, p), "f2 violates the program");
    auto table = table_rule(std::make_shared<RuleTable>(*out.table));
    SPOptions full;
    full.reduction = SweepReduction::full;
    require(check_u_sp(table, vertices, 3, 4, full).pass(), "table fails U-strategyproofness");
    require(check_k_unanimity(table, 1, 3, 4).pass(), "table fails 1-unanimity");
    require(check_anonymity(table, 3, 4).pass(), "table is not anonymous");
    return "Feasible; f2 and the expanded table pass";
}

std::string property_suites() {
    // Lottery invariants on every rule.
    for (const std::string spec : {"rd", "rd_k:k=1", "rd_k:k=2", "omni_star", "cond", "f1", "f2", "f3", "uniform",
                                   "dictator:voter=0", "constant:x=1", "mix:f=(rd),g=(cond),lambda=1/3",
                                   "lift:base=rd,n=5,from=3"}) {
        auto f = parse_rule(spec);
        bool checked = false;
        for (auto [m, n] : {std::pair{3, 3}, {3, 4}, {3, 5}, {4, 5}}) {
            if (!f.in_domain(m, n) || (m == 4 && checked)) continue;
            for_each_profile(m, n, [&](const Profile& r) {
                auto p = f(r);
                Rational sum;
                for (const auto& v : p.probabilities()) {
                    require(v >= 0, spec + " negative probability");
                    sum += v;
                }
                require(sum == 1 && p.size() == m, spec + " is not a lottery");
                return true;
            });
            checked = true;
        }
        require(checked, spec + " has no desk-scale domain");
    }
    // Symmetries of rd, rd_k, omni_star and cond.
    for (const auto& f : {rules::rd(), rules::rd_k(1), rules::omni_star(), rules::cond()}) {
        require(check_anonymity(f, 3, 3).pass(), f.name() + " is not anonymous");
        require(check_neutrality(f, 3, 3).pass(), f.name() + " is not neutral");
    }
    for (const auto& f : {rules::rd(), rules::rd_k(1)}) {
        require(check_rank_basedness(f, 3, 3).pass(), f.name() + " is not rank-based");
    }
    require(check_rank_basedness(rules::rd_k(2), 3, 5).pass(), "rd_k(2) is not rank-based");
    // Symmetric closure: a finite {u} agrees with u^Pi on a neutral rule.
    auto u = uv({2, 1, 0});
    require(check_u_sp(rules::cond(), UtilitySet::finite({u}), 3, 3).pass() ==
                check_u_pi_sp(rules::cond(), u, 3, 3).pass(),
            "symmetric closure");
    // Convexity in U.
    require(check_u_pi_sp(rules::rd_k(1), uv({2, 1, 0}), 3, 3).pass() &&
                check_u_pi_sp(rules::rd_k(1), uv({3, 1, 0}), 3, 3).pass() &&
                check_u_pi_sp(rules::rd_k(1), uv({q(5, 2), 1, 0}), 3, 3).pass(),
            "midpoint of passing utilities");
    // Mixtures.
    auto rdk_set = UtilitySet::rdk(3, 1);
    for (auto lambda : {q(0), q(1, 3), q(1, 2), q(2, 3), q(1)}) {
        require(check_u_sp(rules::mix(rules::rd(), rules::rd_k(1), lambda), rdk_set, 3, 3).pass(), "mixture");
    }
    // SD-strategyproofness implies U-strategyproofness.
    require(check_u_sp(rules::rd(), UtilitySet::sd(3), 3, 3).pass(), "rd is not SD-strategyproof");
    // subset_lift(rd, 3 -> 5) = rd.
    auto lifted = rules::subset_lift(rules::rd(), 3, 5);
    for_each_profile(3, 5, [&](const Profile& r) {
        require(lifted(r) == rules::rd()(r), "subset_lift(rd) differs from rd");
        return true;
    });
    // Affine invariance: the sign of a gain survives positive affine maps.
    for_each_profile(3, 2, [&](const Profile& r) {
        for (const auto& mis : PreferenceRelation::all(3)) {
            Deviation d{r, 0, mis};
            for (const auto& base : {uv({2, 1, 0}), uv({3, 1, 0}), uv({q(9, 8), 1, 0})}) {
                std::vector<Rational> mapped;
                for (const auto& v : base.values()) mapped.push_back(q(7, 3) * v - 5);
                auto g = gain(rules::omni_star(), d, base);
                auto h = gain(rules::omni_star(), d, uv(mapped));
                require(sgn(g) == sgn(h), "affine map changed the sign of a gain");
            }
        }
        return true;
    });
    // Certificate replay on a small infeasible program.
    lp::LinearProgram prog(2);
    prog.add({{0, 1}, {1, 1}}, lp::Relation::le, 1);
    prog.add({{0, 1}, {1, -1}}, lp::Relation::ge, 2);
    prog.add({{1, 1}}, lp::Relation::ge, 0);
    auto o = lp::solve(prog);
    require(lp::is_infeasible(o) && lp::verify_certificate(prog, std::get<lp::Infeasible>(o).certificate),
            "small infeasible LP");
    return "lotteries, symmetries, closure, convexity, mixtures, lift, affine, certificates";
}

struct Criterion {
    int id;
    const char* title;
    std::function<std::string()> check;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria{
        {1, "expected utilities on the three-voter cycle", example_regression},
        {2, "rd_k u^Pi-strategyproofness boundary", rdk_boundaries},
        {3, "omni_star boundary at m=5, n=5", omni_boundary},
        {4, "threshold table for tail (3,2,1,0)", threshold_table},
        {5, "rank-based k-unanimity impossibility", rank_based_instance},
        {6, "Condorcet gadget certificates", condorcet_gadgets},
        {7, "cond is equidistant-strategyproof at m=3", cond_sp},
        {8, "cond is unique on majority-tie-free profiles", cond_uniqueness},
        {9, "ex post efficiency impossibility", expost_instance},
        {10, "f2 synthesis at m=3, n=4", f2_synthesis},
        {11, "property suites", property_suites},
    };
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
    bool all_pass = true;
    for (const auto& c : criteria) {
        if (!selected.empty() && !selected.count(c.id)) continue;
        const auto start = std::chrono::steady_clock::now();
        std::string verdict, detail;
        try {
            detail = c.check();
            verdict = "PASS";
        } catch (const std::exception& e) {
            detail = e.what();
            verdict = "FAIL";
            all_pass = false;
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("criterion %2d: %s  %s (%s) [%.1fs]\n", c.id, verdict.c_str(), c.title, detail.c_str(), secs);
        std::fflush(stdout);
    }
    return all_pass ? 0 : 1;
}
