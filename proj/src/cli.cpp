#include "sds/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace sds::cli {

using doc::Json;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DomainError("cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DomainError("cannot write '" + path + "'");
    out << text;
}

// Arguments and file contents that determine a report.
struct Inputs {
    std::vector<std::string> args;
    std::vector<std::string> files;

    std::string digest() const {
        std::string all;
        for (const auto& a : args) all += a + '\n';
        for (const auto& f : files) all += '\0' + f;
        return fnv1a64(all);
    }
};

const std::vector<std::string>& axiom_names() {
    static const std::vector<std::string> names{"anonymity",         "neutrality", "rank_basedness",
                                                "tops_only",         "k_unanimity", "k_alpha_unanimity",
                                                "condorcet",         "ex_post"};
    return names;
}

std::string joined(const std::vector<std::string>& names) {
    std::string out;
    for (const auto& n : names) out += (out.empty() ? "" : ", ") + n;
    return out;
}

AxiomReport check_axiom(const std::string& axiom, const SDS& f, int m, int n, std::optional<int> k,
                        std::optional<Rational> alpha, const SweepOptions& opts) {
    auto need_k = [&] {
        if (!k) throw DomainError("axiom '" + axiom + "' needs --k");
        return *k;
    };
    if (axiom == "anonymity") return check_anonymity(f, m, n, opts);
    if (axiom == "neutrality") return check_neutrality(f, m, n, opts);
    if (axiom == "rank_basedness") return check_rank_basedness(f, m, n, opts);
    if (axiom == "tops_only") return check_tops_only(f, m, n, opts);
    if (axiom == "k_unanimity") return check_k_unanimity(f, need_k(), m, n, opts);
    if (axiom == "k_alpha_unanimity") {
        int kk = need_k();
        if (!alpha) throw DomainError("axiom 'k_alpha_unanimity' needs --alpha");
        return check_k_alpha_unanimity(f, kk, *alpha, m, n, opts);
    }
    if (axiom == "condorcet") return check_condorcet_consistency(f, m, n, opts);
    if (axiom == "ex_post") return check_ex_post_efficiency(f, m, n, opts);
    throw DomainError("unknown axiom '" + axiom + "' (valid: " + joined(axiom_names()) + ")");
}

Json outcome_stats(const SynthesisOutcome& o) {
    Json s;
    s["classes"] = o.classes;
    s["edges"] = o.edges;
    s["variables"] = o.program ? o.program->variables : 0;
    s["rows"] = o.program ? o.program->constraints.size() : 0;
    s["presolved_fixed"] = o.stats.presolved_fixed;
    s["pivots"] = o.stats.pivots;
    s["lp_calls"] = 1;
    return s;
}

// Fills result and payload fields shared by every synthesis outcome.
void describe_outcome(const SynthesisOutcome& o, Report& r) {
    r.result = o.feasible ? "feasible" : "infeasible";
    if (o.feasible) {
        r.payload["table"] = Json::parse(table_to_json(*o.table));
        r.payload["replayed"] = o.replayed;
    } else {
        r.payload["certificate"] = doc::certificate_to_json(*o.program, *o.certificate, o.provenance);
    }
    r.stats = outcome_stats(o);
}

std::string gadget_case_name(GadgetCase c) { return c == GadgetCase::one ? "one" : "two"; }

std::vector<Rational> parse_list(const std::string& text, const char* what) {
    try {
        return parse_rational_list(text);
    } catch (const std::exception& e) {
        throw DomainError(std::string("--") + what + ": " + e.what());
    }
}

}  // namespace

std::string fnv1a64(std::string_view data) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string("fnv1a64:") + buf;
}

std::string to_json(const Report& r) {
    Json out;
    out["command"] = r.command;
    out["inputs_digest"] = r.inputs_digest;
    out["result"] = r.result;
    out["payload"] = r.payload;
    out["stats"] = r.stats;
    out["duration_us"] = r.duration_us;
    return out.dump(2) + "\n";
}

Report report_from_json(std::string_view text) {
    try {
        auto d = Json::parse(text);
        Report r;
        r.command = d.at("command").get<std::vector<std::string>>();
        r.inputs_digest = d.at("inputs_digest").get<std::string>();
        r.result = d.at("result").get<std::string>();
        r.payload = d.at("payload");
        r.stats = d.at("stats");
        r.duration_us = d.at("duration_us").get<std::int64_t>();
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("report: ") + e.what());
    }
}

int exit_code(const Report& r) { return r.result == "fail" || r.result == "infeasible" ? 1 : 0; }

std::vector<FigureRow> figure1(int m, const std::vector<Rational>& tail, int n, int max_rd_rows,
                               const SPOptions& opts) {
    if (static_cast<int>(tail.size()) != m - 1) {
        throw DomainError("tail has " + std::to_string(tail.size()) + " entries; m=" + std::to_string(m) +
                          " needs " + std::to_string(m - 1));
    }
    if (m < 2) throw DomainError("figure1 needs m >= 2");
    std::vector<Rational> u{tail.front()};
    u.insert(u.end(), tail.begin(), tail.end());
    auto impossible_below = [&](int k) -> Rational { return tail.front() + (k >= 1 ? rank_based_bound(u, k) : Rational(0)); };
    const int top_k = (n - 1) / 2;
    std::vector<FigureRow> rows;
    auto add = [&](std::string spec, std::string label, int k) {
        auto f = parse_rule(spec);
        auto b = sp_boundary(f, tail, m, n, opts);
        rows.push_back({std::move(spec), std::move(label), k, b.value, impossible_below(k)});
    };
    add("rd", "RD", 0);
    for (int k = 1; k <= std::min(top_k, max_rd_rows); ++k) add("rd_k:k=" + std::to_string(k), "RD^" + std::to_string(k), k);
    add("omni_star", "OMNI*", top_k);
    return rows;
}

std::string format_figure(const std::vector<FigureRow>& rows) {
    std::vector<std::array<std::string, 4>> cells{{"rule", "k", "boundary", "impossible_below"}};
    for (const auto& r : rows) cells.push_back({r.label, std::to_string(r.k), to_string(r.boundary), to_string(r.impossible_below)});
    std::array<std::size_t, 4> width{};
    for (const auto& c : cells) {
        for (std::size_t i = 0; i < 4; ++i) width[i] = std::max(width[i], c[i].size());
    }
    std::string out;
    for (const auto& c : cells) {
        std::string line;
        for (std::size_t i = 0; i < 4; ++i) {
            line += c[i];
            if (i + 1 < 4) line += std::string(width[i] - c[i].size() + 2, ' ');
        }
        out += line + "\n";
    }
    return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Exact toolkit for strategyproofness of social decision schemes", "sds"};
    app.require_subcommand(1);

    unsigned jobs = 1;
    std::uint64_t cap = kDefaultSweepCap;
    auto common = [&](CLI::App* sub) {
        sub->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--cap", cap, "Largest sweep or class count attempted");
    };

    std::string rule, profile_path;
    auto* eval = app.add_subcommand("eval", "Evaluate a rule on a profile file");
    eval->add_option("--rule", rule, "Rule specification")->required();
    eval->add_option("--profile", profile_path, "Profile file")->required();

    int m = 0, n = 0;
    std::optional<int> k;
    std::string alpha_text, axiom;
    auto* axioms = app.add_subcommand("axioms", "Axiom checkers");
    axioms->require_subcommand(1);
    auto* axioms_check = axioms->add_subcommand("check", "Exhaustive axiom check");
    axioms_check->add_option("--rule", rule)->required();
    axioms_check->add_option("--axiom", axiom, "One of: " + joined(axiom_names()))->required();
    axioms_check->add_option("--m", m)->required();
    axioms_check->add_option("--n", n)->required();
    axioms_check->add_option("--k", k);
    axioms_check->add_option("--alpha", alpha_text);
    common(axioms_check);

    std::string utility_spec, reduction_text, tail_text;
    bool group = false;
    std::uint64_t budget = 1'000'000;
    auto* sp = app.add_subcommand("sp", "Strategyproofness checks");
    sp->require_subcommand(1);
    auto* sp_check = sp->add_subcommand("check", "Exhaustive U-strategyproofness check");
    sp_check->add_option("--rule", rule)->required();
    sp_check->add_option("--utility-set", utility_spec,
                         "Preset (SD, OMNI, EQUIDISTANT, RDK:k=1, EPS_INDIFF:epsilon=1/4), vertices:<preset>, "
                         "finite:2,1,0;3,1,0, pi:2,1,0 or a utility-set file")
        ->required();
    sp_check->add_option("--m", m)->required();
    sp_check->add_option("--n", n)->required();
    sp_check->add_option("--reduction", reduction_text, "full, anonymous, symmetric or tops");
    sp_check->add_flag("--group", group, "Coalitions of voters sharing a preference");
    sp_check->add_option("--budget", budget, "Misreport combinations per coalition");
    common(sp_check);
    auto* sp_boundary_cmd = sp->add_subcommand("boundary", "Least u(1) for u^Pi-strategyproofness");
    sp_boundary_cmd->add_option("--rule", rule)->required();
    sp_boundary_cmd->add_option("--tail", tail_text, "u(2),...,u(m)")->required();
    sp_boundary_cmd->add_option("--m", m)->required();
    sp_boundary_cmd->add_option("--n", n)->required();
    common(sp_boundary_cmd);

    std::string problem_path, out_path, u_text, epsilon_text;
    std::optional<std::string> class_profile;
    int gadget_case = 0;
    auto* synth = app.add_subcommand("synth", "Linear-programming synthesis");
    synth->require_subcommand(1);
    auto* synth_run = synth->add_subcommand("run", "Solve a synthesis problem");
    synth_run->add_option("--problem", problem_path)->required();
    synth_run->add_option("--out", out_path, "Write the feasible table here");
    common(synth_run);
    auto* synth_bounds = synth->add_subcommand("bounds", "Probability range of every class and alternative");
    synth_bounds->add_option("--problem", problem_path)->required();
    synth_bounds->add_option("--profile", class_profile, "Restrict to the class of this profile file");
    common(synth_bounds);
    auto* thm2 = synth->add_subcommand("certify-thm2", "Rank-based k-unanimity impossibility");
    thm2->add_option("--m", m)->required();
    thm2->add_option("--n", n)->required();
    thm2->add_option("--k", k)->required();
    thm2->add_option("--u", u_text, "u(1),...,u(m)")->required();
    common(thm2);
    auto* thm3 = synth->add_subcommand("certify-thm3", "Condorcet-consistency gadget impossibility");
    thm3->add_option("--m", m)->required();
    thm3->add_option("--u", u_text)->required();
    thm3->add_option("--case", gadget_case, "Force gadget 1 or 2")->check(CLI::IsMember({1, 2}));
    auto* thm5 = synth->add_subcommand("certify-thm5", "Ex post efficiency impossibility");
    thm5->add_option("--m", m)->required();
    thm5->add_option("--n", n)->required();
    thm5->add_option("--k", k)->required();
    thm5->add_option("--epsilon", epsilon_text)->required();
    thm5->add_option("--u", u_text)->required();
    common(thm5);

    int max_rows = 3;
    std::string format = "json";
    auto* fig = app.add_subcommand("figure1", "Strategyproofness thresholds of RD, RD^k and OMNI*");
    fig->add_option("--m", m)->required();
    fig->add_option("--tail", tail_text)->required();
    fig->add_option("--n", n)->required();
    fig->add_option("--rows", max_rows, "Most RD^k rows")->check(CLI::NonNegativeNumber);
    fig->add_option("--format", format)->check(CLI::IsMember({"json", "text"}));
    common(fig);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? 0 : 2;
    }

    const auto start = std::chrono::steady_clock::now();
    Inputs inputs{args, {}};
    Report report;
    report.command = args;
    const auto names = [&] { return default_names(m); };
    SPOptions sp_opts;
    sp_opts.cap = cap;
    sp_opts.jobs = jobs;

    try {
        if (eval->parsed()) {
            auto text = read_file(profile_path);
            inputs.files.push_back(text);
            auto pd = parse_profile(text);
            auto f = parse_rule(rule);
            report.result = "value";
            report.payload["rule"] = f.name();
            report.payload["alternatives"] = pd.names;
            report.payload["profile"] = doc::profile_to_json(pd.profile, pd.names);
            report.payload["lottery"] = doc::lottery_to_json(f(pd.profile));
            report.stats["profiles_visited"] = 1;
        } else if (axioms_check->parsed()) {
            auto f = parse_rule(rule);
            std::optional<Rational> alpha;
            if (!alpha_text.empty()) alpha = parse_rational(alpha_text);
            SweepOptions opts;
            opts.cap = cap;
            auto r = check_axiom(axiom, f, m, n, k, alpha, opts);
            report.result = r.pass() ? "pass" : "fail";
            report.payload["rule"] = r.rule;
            report.payload["axiom"] = r.axiom;
            report.payload["m"] = m;
            report.payload["n"] = n;
            if (k) report.payload["k"] = *k;
            if (alpha) report.payload["alpha"] = to_string(*alpha);
            report.payload["counterexample"] =
                r.counterexample ? doc::violation_to_json(*r.counterexample, names()) : Json();
            report.stats["profiles_visited"] = r.profiles_visited;
        } else if (sp_check->parsed()) {
            auto f = parse_rule(rule);
            if (!reduction_text.empty()) sp_opts.reduction = parse_sweep_reduction(reduction_text);
            sp_opts.coalition_budget = budget;
            report.payload["rule"] = f.name();
            report.payload["m"] = m;
            report.payload["n"] = n;
            const bool pi = utility_spec.size() > 3 && (utility_spec.compare(0, 3, "pi:") == 0 ||
                                                        utility_spec.compare(0, 3, "PI:") == 0);
            std::optional<UtilitySet> set;
            std::optional<UtilityVector> pi_vector;
            if (pi) {
                pi_vector = UtilityVector(parse_list(utility_spec.substr(3), "utility-set"));
                report.payload["utility_set"] = Json{{"kind", "pi"}, {"vector", doc::rational_list(pi_vector->values())}};
            } else {
                auto src = doc::resolve_utility_set(utility_spec, m);
                if (src.text) inputs.files.push_back(*src.text);
                set = std::move(src.set);
                report.payload["utility_set"] = doc::utility_set_to_json(*set);
            }
            if (group) {
                if (!set) set = UtilitySet::finite({*pi_vector});
                auto r = check_group_sp(f, *set, m, n, sp_opts);
                report.result = r.pass() ? "pass" : "fail";
                report.payload["group"] = true;
                report.payload["witness"] = r.witness ? doc::group_witness_to_json(*r.witness, names()) : Json();
                report.stats["reduction"] = to_string(r.reduction);
                report.stats["profiles_visited"] = r.profiles_visited;
                report.stats["deviations"] = r.deviations;
                report.stats["lp_calls"] = r.lp_calls;
            } else {
                auto r = pi ? check_u_pi_sp(f, *pi_vector, m, n, sp_opts) : check_u_sp(f, *set, m, n, sp_opts);
                report.result = r.pass() ? "pass" : "fail";
                report.payload["witness"] = r.witness ? doc::witness_to_json(*r.witness, names()) : Json();
                report.stats["reduction"] = to_string(r.reduction);
                report.stats["profiles_visited"] = r.profiles_visited;
                report.stats["deviations"] = r.deviations;
                report.stats["lp_calls"] = r.lp_calls;
            }
        } else if (sp_boundary_cmd->parsed()) {
            auto f = parse_rule(rule);
            auto tail = parse_list(tail_text, "tail");
            if (static_cast<int>(tail.size()) != m - 1) throw DomainError("--tail needs m-1 entries");
            auto b = sp_boundary(f, tail, m, n, sp_opts);
            report.result = "value";
            report.payload["rule"] = f.name();
            report.payload["m"] = m;
            report.payload["n"] = n;
            report.payload["tail"] = doc::rational_list(tail);
            report.payload["boundary"] = to_string(b.value);
            report.payload["binding"] = b.binding ? doc::deviation_to_json(*b.binding, names()) : Json();
            report.stats["reduction"] = to_string(b.reduction);
            report.stats["deviations"] = b.deviations;
        } else if (synth_run->parsed()) {
            auto text = read_file(problem_path);
            inputs.files.push_back(text);
            auto src = doc::problem_from_json(text, std::filesystem::path(problem_path).parent_path());
            for (auto& t : src.inputs) inputs.files.push_back(t);
            auto outcome = synthesize(src.problem, cap);
            report.payload["problem"] = doc::problem_to_json(src.problem);
            describe_outcome(outcome, report);
            if (outcome.feasible && !out_path.empty()) write_file(out_path, table_to_json(*outcome.table));
        } else if (synth_bounds->parsed()) {
            auto text = read_file(problem_path);
            inputs.files.push_back(text);
            auto src = doc::problem_from_json(text, std::filesystem::path(problem_path).parent_path());
            for (auto& t : src.inputs) inputs.files.push_back(t);
            const auto& p = src.problem;
            report.payload["problem"] = doc::problem_to_json(p);
            auto outcome = synthesize(p, cap);
            if (!outcome.feasible) {
                describe_outcome(outcome, report);
            } else {
                report.result = "value";
                auto nm = default_names(p.m);
                auto entry = [&](const ProfileClassIndex& idx, std::size_t c, const std::vector<ProbabilityBounds>& b) {
                    Json e;
                    e["class"] = c;
                    e["representative"] = doc::profile_to_json(idx.representatives[c], nm);
                    e["size"] = idx.sizes[c];
                    std::vector<Rational> lo, hi;
                    for (const auto& x : b) {
                        lo.push_back(x.min);
                        hi.push_back(x.max);
                    }
                    e["min"] = doc::rational_list(lo);
                    e["max"] = doc::rational_list(hi);
                    return e;
                };
                report.payload["bounds"] = Json::array();
                if (class_profile) {
                    auto ptext = read_file(*class_profile);
                    inputs.files.push_back(ptext);
                    auto pd = parse_profile(ptext);
                    auto idx = enumerate_profiles(p.m, p.n, p.mode, cap);
                    auto c = idx.find(pd.profile);
                    if (!c) throw DomainError("profile does not match the problem's m and n");
                    std::vector<ProbabilityBounds> b;
                    for (Alternative x = 0; x < p.m; ++x) b.push_back(bound_probability(p, *c, x));
                    report.payload["bounds"].push_back(entry(idx, *c, b));
                    report.stats["classes"] = idx.classes();
                    report.stats["lp_calls"] = 2 * p.m;
                } else {
                    auto t = bound_all(p, jobs);
                    for (std::size_t c = 0; c < t.index.classes(); ++c) {
                        report.payload["bounds"].push_back(entry(t.index, c, t.bounds[c]));
                    }
                    report.stats["classes"] = t.index.classes();
                    report.stats["lp_calls"] = t.lp_calls;
                }
            }
        } else if (thm2->parsed()) {
            auto u = parse_list(u_text, "u");
            auto outcome = certify_rank_based_impossibility(m, n, *k, UtilityVector(u), cap);
            report.payload["m"] = m;
            report.payload["n"] = n;
            report.payload["k"] = *k;
            report.payload["u"] = doc::rational_list(u);
            report.payload["bound"] = to_string(rank_based_bound(u, *k));
            describe_outcome(outcome, report);
        } else if (thm3->parsed()) {
            auto u = parse_list(u_text, "u");
            std::optional<GadgetCase> forced;
            if (gadget_case) forced = gadget_case == 1 ? GadgetCase::one : GadgetCase::two;
            auto cert = certify_condorcet_impossibility(m, UtilityVector(u), forced);
            auto nm = names();
            report.payload["m"] = m;
            report.payload["u"] = doc::rational_list(u);
            report.payload["case"] = gadget_case_name(cert.gadget.which);
            Json gadget;
            gadget["profiles"] = Json::array();
            for (const auto& p : cert.gadget.profiles) gadget["profiles"].push_back(doc::profile_to_json(p, nm));
            gadget["winners"] = Json::array();
            for (auto w : cert.gadget.winners) gadget["winners"].push_back(nm[w]);
            report.payload["gadget"] = gadget;
            describe_outcome(cert.outcome, report);
        } else if (thm5->parsed()) {
            auto u = parse_list(u_text, "u");
            auto eps = parse_rational(epsilon_text);
            auto outcome = certify_expost_impossibility(m, n, *k, eps, UtilityVector(u), cap);
            report.payload["m"] = m;
            report.payload["n"] = n;
            report.payload["k"] = *k;
            report.payload["epsilon"] = to_string(eps);
            report.payload["u"] = doc::rational_list(u);
            describe_outcome(outcome, report);
        } else if (fig->parsed()) {
            auto tail = parse_list(tail_text, "tail");
            auto rows = figure1(m, tail, n, max_rows, sp_opts);
            if (format == "text") {
                out << format_figure(rows);
                return 0;
            }
            report.result = "value";
            report.payload["m"] = m;
            report.payload["n"] = n;
            report.payload["tail"] = doc::rational_list(tail);
            report.payload["rows"] = Json::array();
            for (const auto& r : rows) {
                Json row;
                row["rule"] = r.rule;
                row["label"] = r.label;
                row["k"] = r.k;
                row["boundary"] = to_string(r.boundary);
                row["impossible_below"] = to_string(r.impossible_below);
                report.payload["rows"].push_back(row);
            }
            report.stats["sweeps"] = rows.size();
        }
    } catch (const Refusal& e) {
        err << "refused: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return 3;
    }

    report.inputs_digest = inputs.digest();
    report.duration_us = std::chrono::duration_cast<std::chrono::microseconds>(
                             std::chrono::steady_clock::now() - start)
                             .count();
    out << to_json(report);
    return exit_code(report);
}

}  // namespace sds::cli
