#include "sds/cli.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace sds;
using doc::Json;

namespace {

struct Run {
    int code = 0;
    std::string out;
    std::string err;

    cli::Report report() const { return cli::report_from_json(out); }
    Json payload() const { return report().payload; }
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    Run r;
    r.code = cli::run(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::string fixture(const char* name) { return std::string(SDS_FIXTURES) + "/" + name; }

std::filesystem::path scratch() {
    auto dir = std::filesystem::temp_directory_path() / "sds_cli_test";
    std::filesystem::create_directories(dir);
    return dir;
}

std::string write(const std::string& name, const std::string& text) {
    auto path = scratch() / name;
    std::ofstream(path) << text;
    return path.string();
}

std::string without_duration(std::string text) {
    auto r = cli::report_from_json(text);
    r.duration_us = 0;
    return cli::to_json(r);
}

}  // namespace

TEST_CASE("eval on the three-voter cycle") {
    auto r = run({"eval", "--rule", "rd", "--profile", fixture("ex1.prof")});
    REQUIRE(r.code == 0);
    auto p = r.payload();
    CHECK(r.report().result == "value");
    CHECK(p["lottery"] == Json::array({"1/3", "1/3", "1/3"}));
    CHECK(p["alternatives"] == Json::array({"a", "b", "c"}));

    auto r2 = run({"eval", "--rule", "rd", "--profile", fixture("ex1_r2.prof")});
    REQUIRE(r2.code == 0);
    CHECK(r2.payload()["lottery"] == Json::array({"0", "2/3", "1/3"}));
    CHECK(r.report().inputs_digest != r2.report().inputs_digest);
}

TEST_CASE("reports are deterministic and round-trip") {
    std::vector<std::string> args{"sp", "check", "--rule", "rd_k:k=1", "--utility-set", "pi:19/10,1,0",
                                  "--m", "3", "--n", "3"};
    auto a = run(args);
    auto b = run(args);
    CHECK(without_duration(a.out) == without_duration(b.out));
    auto rep = a.report();
    CHECK(cli::report_from_json(cli::to_json(rep)) == rep);
    CHECK(cli::to_json(cli::report_from_json(a.out)) == a.out);
    CHECK(rep.inputs_digest == cli::fnv1a64([&] {
              std::string s;
              for (const auto& x : args) s += x + '\n';
              return s;
          }()));
    CHECK(cli::fnv1a64("") == "fnv1a64:cbf29ce484222325");
    CHECK(cli::fnv1a64("a") == "fnv1a64:af63dc4c8601ec8c");
}

TEST_CASE("sp check witnesses replay") {
    auto r = run({"sp", "check", "--rule", "rd_k:k=1", "--utility-set", "pi:19/10,1,0", "--m", "3", "--n", "3"});
    REQUIRE(r.code == 1);
    auto p = r.payload();
    CHECK(r.report().result == "fail");
    CHECK(p["witness"]["gain"] == "1/30");
    auto w = doc::witness_from_json(p["witness"], default_names(3));
    CHECK(replay(rules::rd_k(1), w));

    auto ok = run({"sp", "check", "--rule", "rd_k:k=1", "--utility-set", "pi:2,1,0", "--m", "3", "--n", "3"});
    CHECK(ok.code == 0);
    CHECK(ok.report().result == "pass");
    CHECK(ok.payload()["witness"].is_null());

    auto cond = run({"sp", "check", "--rule", "cond", "--utility-set", "EQUIDISTANT", "--m", "3", "--n", "3"});
    CHECK(cond.code == 0);
    CHECK(cond.report().stats["profiles_visited"].get<std::uint64_t>() > 0);

    auto grp = run({"sp", "check", "--rule", "rd", "--utility-set", "SD", "--m", "3", "--n", "3", "--group"});
    CHECK(grp.code == 0);
    CHECK(grp.payload()["group"] == true);
}

TEST_CASE("utility sets from files and inline forms") {
    auto path = write("u.json", R"({"kind": "finite", "m": 3, "vectors": [["2", "1", "0"], ["3", "1", "0"]]})");
    auto r = run({"sp", "check", "--rule", "rd", "--utility-set", path, "--m", "3", "--n", "3"});
    CHECK(r.code == 0);
    CHECK(r.payload()["utility_set"]["vectors"].size() == 2);

    auto mismatch = run({"sp", "check", "--rule", "rd", "--utility-set", path, "--m", "4", "--n", "2"});
    CHECK(mismatch.code == 2);

    for (const char* spec : {"SD", "OMNI", "EQUIDISTANT", "RDK:k=1", "EPS_INDIFF:epsilon=1/4", "vertices:RDK:k=1",
                             "finite:2,1,0;3/2,1,0"}) {
        CAPTURE(spec);
        auto u = doc::resolve_utility_set(spec, 3).set;
        auto back = doc::utility_set_from_json(doc::utility_set_to_json(u));
        CHECK(back.kind() == u.kind());
        CHECK(back.vertices() == u.vertices());
    }
    auto verts = doc::utility_set_from_json(Json::parse(R"({"kind": "vertices", "preset": {"name": "EQUIDISTANT"}})"), 3);
    CHECK(verts.kind() == UtilitySet::Kind::vertices);
    CHECK(verts.vertices() == UtilitySet::equidistant(3).vertices());
}

TEST_CASE("usage errors exit 2 and list valid names") {
    auto rule = run({"eval", "--rule", "borda", "--profile", fixture("ex1.prof")});
    CHECK(rule.code == 2);
    CHECK(rule.err.find("omni_star") != std::string::npos);
    CHECK(rule.out.empty());

    auto axiom = run({"axioms", "check", "--rule", "rd", "--axiom", "pareto", "--m", "3", "--n", "3"});
    CHECK(axiom.code == 2);
    CHECK(axiom.err.find("ex_post") != std::string::npos);

    auto preset = run({"sp", "check", "--rule", "rd", "--utility-set", "LEXI", "--m", "3", "--n", "3"});
    CHECK(preset.code == 2);
    CHECK(preset.err.find("EQUIDISTANT") != std::string::npos);

    CHECK(run({}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({"sp", "boundary", "--rule", "rd", "--m", "3"}).code == 2);
    CHECK(run({"sp", "boundary", "--rule", "rd", "--tail", "1,0", "--m", "4", "--n", "3"}).code == 2);

    auto refused = run({"axioms", "check", "--rule", "rd", "--axiom", "anonymity", "--m", "3", "--n", "6",
                        "--cap", "1000"});
    CHECK(refused.code == 2);
    CHECK(refused.err.find("refused") != std::string::npos);
}

TEST_CASE("axioms check") {
    auto pass = run({"axioms", "check", "--rule", "rd_k:k=1", "--axiom", "k_unanimity", "--k", "1", "--m", "3",
                     "--n", "3"});
    CHECK(pass.code == 0);
    CHECK(pass.report().stats["profiles_visited"] == 216);

    auto fail = run({"axioms", "check", "--rule", "omni_star", "--axiom", "condorcet", "--m", "3", "--n", "3"});
    REQUIRE(fail.code == 1);
    auto v = doc::violation_from_json(fail.payload()["counterexample"], default_names(3));
    CHECK(replay(rules::omni_star(), v));

    CHECK(run({"axioms", "check", "--rule", "rd", "--axiom", "k_unanimity", "--m", "3", "--n", "3"}).code == 2);
}

TEST_CASE("sp boundary and the threshold table") {
    auto r = run({"sp", "boundary", "--rule", "omni_star", "--tail", "3,2,1,0", "--m", "5", "--n", "5"});
    REQUIRE(r.code == 0);
    CHECK(r.payload()["boundary"] == "9");

    auto rows = cli::figure1(5, {3, 2, 1, 0}, 11);
    REQUIRE(rows.size() == 5);
    CHECK(rows[0].label == "RD");
    CHECK(rows[0].boundary == 3);
    CHECK(rows[1].boundary == 6);
    CHECK(rows[2].boundary == 9);
    CHECK(rows[2].impossible_below == 8);
    CHECK(rows[4].label == "OMNI*");
    CHECK(rows[4].k == 5);
    CHECK(rows[4].boundary == 9);

    auto small = cli::figure1(3, {1, 0}, 5);
    CHECK(small.back().boundary == 2);
    CHECK_THROWS_AS(cli::figure1(4, {1, 0}, 5), DomainError);

    auto text = run({"figure1", "--m", "5", "--tail", "3,2,1,0", "--n", "11", "--rows", "2", "--format", "text"});
    CHECK(text.code == 0);
    CHECK(text.out.find("RD^2") != std::string::npos);
    CHECK(text.out.find("RD^3") == std::string::npos);
}

TEST_CASE("synth run writes a usable table and certificates replay") {
    auto problem = write("p_feasible.json", R"({"m": 3, "n": 3, "symmetry": "rank_based",
        "axioms": [{"name": "k_unanimity", "k": 1}],
        "utility_set": {"kind": "finite", "vectors": [["2", "1", "0"]]}})");
    auto table = (scratch() / "table.json").string();
    auto ok = run({"synth", "run", "--problem", problem, "--out", table});
    REQUIRE(ok.code == 0);
    CHECK(ok.report().result == "feasible");
    CHECK(ok.payload()["replayed"] == true);
    auto f = parse_rule("table:" + table);
    auto check = check_u_pi_sp(f, UtilityVector({2, 1, 0}), 3, 3);
    CHECK(check.pass());

    auto bad = write("p_infeasible.json", R"({"m": 3, "n": 3, "symmetry": "rank_based",
        "axioms": [{"name": "k_unanimity", "k": 1}],
        "utility_set": "finite:3/2,1,0"})");
    auto no = run({"synth", "run", "--problem", bad});
    REQUIRE(no.code == 1);
    auto cert = no.payload()["certificate"];
    CHECK(doc::replay_certificate(cert));
    CHECK(cert["rows"].size() > 0);
    CHECK(cert["rows"][0].contains("label"));
    cert["rows"][0]["multiplier"] = "0";
    CHECK_FALSE(doc::replay_certificate(cert));

    auto thm2 = run({"synth", "certify-thm2", "--m", "3", "--n", "3", "--k", "1", "--u", "3/2,1,0"});
    REQUIRE(thm2.code == 1);
    CHECK(thm2.payload()["bound"] == "1");
    CHECK(doc::replay_certificate(thm2.payload()["certificate"]));
}

TEST_CASE("gadget and ex post certificates") {
    auto one = run({"synth", "certify-thm3", "--m", "4", "--u", "3,2,1,0"});
    REQUIRE(one.code == 1);
    auto p = one.payload();
    CHECK(p["case"] == "one");
    CHECK(p["gadget"]["winners"] == Json::array({"b", "c", "a"}));
    CHECK(doc::replay_certificate(p["certificate"]));

    auto two = run({"synth", "certify-thm3", "--m", "4", "--u", "10,2,1,0"});
    REQUIRE(two.code == 1);
    CHECK(two.payload()["case"] == "two");
    CHECK(doc::replay_certificate(two.payload()["certificate"]));

    auto forced = run({"synth", "certify-thm3", "--m", "4", "--u", "5,2,1,0", "--case", "1"});
    CHECK(forced.code == 0);

    auto thm5 = run({"synth", "certify-thm5", "--m", "3", "--n", "3", "--k", "1", "--epsilon", "1/4", "--u",
                     "9/8,1,0"});
    REQUIRE(thm5.code == 1);
    CHECK(doc::replay_certificate(thm5.payload()["certificate"]));

    auto outside = run({"synth", "certify-thm5", "--m", "3", "--n", "3", "--k", "1", "--epsilon", "1/4", "--u",
                        "2,1,0"});
    CHECK(outside.code == 2);
}

TEST_CASE("synth bounds agree across worker counts") {
    auto problem = write("p_bounds.json", R"({"m": 3, "n": 2, "symmetry": "anonymous",
        "axioms": [{"name": "condorcet"}],
        "utility_set": "vertices:EQUIDISTANT"})");
    auto a = run({"synth", "bounds", "--problem", problem});
    auto b = run({"synth", "bounds", "--problem", problem, "--jobs", "2"});
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    CHECK(a.payload() == b.payload());
    CHECK(a.payload()["bounds"].size() == 21);
    CHECK(a.report().stats["lp_calls"] == 126);

    auto prof = write("unanimous.prof", "alternatives: a b c\n2: a > b > c\n");
    auto one = run({"synth", "bounds", "--problem", problem, "--profile", prof});
    REQUIRE(one.code == 0);
    auto entry = one.payload()["bounds"][0];
    CHECK(entry["min"] == Json::array({"1", "0", "0"}));
    CHECK(entry["max"] == Json::array({"1", "0", "0"}));
}

TEST_CASE("problem documents round-trip") {
    auto src = doc::problem_from_json(R"({"m": 3, "n": 4, "symmetry": "anonymous",
        "axioms": [{"name": "k_alpha_unanimity", "k": 1, "alpha": "2/3"}, {"name": "ex_post"}],
        "utility_set": {"kind": "vertices", "vertices": [["3/2", "1", "0"], ["3", "1", "0"]]}})");
    auto again = doc::problem_from_json(doc::problem_to_json(src.problem).dump());
    CHECK(doc::problem_to_json(again.problem) == doc::problem_to_json(src.problem));
    CHECK(again.problem.axioms[0].alpha == make_rational(2, 3));
    CHECK_THROWS_AS(doc::problem_from_json(R"({"m": 3, "n": 3, "axioms": [{"name": "pareto"}]})"), DomainError);
    CHECK_THROWS_AS(doc::problem_from_json("{"), DomainError);
}

TEST_CASE("tool binary exit codes") {
    auto status = [](const std::string& cmd) {
        int s = std::system((cmd + " >/dev/null 2>&1").c_str());
        return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
    };
    const std::string tool = SDS_TOOL;
    CHECK(status(tool + " eval --rule rd --profile " + fixture("ex1.prof")) == 0);
    CHECK(status(tool + " eval --rule nope --profile " + fixture("ex1.prof")) == 2);
    CHECK(status(tool + " sp check --rule rd_k:k=1 --utility-set pi:19/10,1,0 --m 3 --n 3") == 1);
    CHECK(status(tool + " --help") == 0);
}
