#include "sds/documents.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace sds::doc {

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DomainError("cannot read '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

Json parse_json(std::string_view text, const std::string& what) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(what + ": " + e.what());
    }
}

Rational rational(const Json& v) {
    if (v.is_string()) return parse_rational(v.get<std::string>());
    if (v.is_number_integer()) return Rational(v.get<long>());
    throw DomainError("rationals are written as \"p/q\" strings");
}

std::string upper(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::toupper(c); });
    return out;
}

// "k=1,epsilon=1/4" -> pairs
std::vector<std::pair<std::string, std::string>> parameters(std::string_view text) {
    std::vector<std::pair<std::string, std::string>> out;
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find(',', start);
        if (end == std::string_view::npos) end = text.size();
        auto item = text.substr(start, end - start);
        auto eq = item.find('=');
        if (eq == std::string_view::npos) throw DomainError("expected key=value, got '" + std::string(item) + "'");
        out.emplace_back(std::string(item.substr(0, eq)), std::string(item.substr(eq + 1)));
        start = end + 1;
    }
    return out;
}

std::string valid_presets() {
    std::string out;
    for (const auto& n : preset_names()) out += (out.empty() ? "" : ", ") + n;
    return out;
}

int require_m(std::optional<int> m, const std::string& what) {
    if (!m) throw DomainError(what + " needs the number of alternatives m");
    return *m;
}

UtilitySet make_preset(const std::string& raw_name, std::optional<int> k, std::optional<Rational> epsilon,
                       std::optional<int> m) {
    const std::string name = upper(raw_name);
    if (name == "SD") return UtilitySet::sd(require_m(m, name));
    if (name == "OMNI") return UtilitySet::omni(require_m(m, name));
    if (name == "EQUIDISTANT") return UtilitySet::equidistant(require_m(m, name));
    if (name == "RDK") {
        if (!k) throw DomainError("RDK needs k");
        return UtilitySet::rdk(require_m(m, name), *k);
    }
    if (name == "EPS_INDIFF") {
        if (!epsilon) throw DomainError("EPS_INDIFF needs epsilon");
        return UtilitySet::eps_indiff(require_m(m, name), *epsilon);
    }
    throw DomainError("unknown utility preset '" + raw_name + "' (valid: " + valid_presets() + ")");
}

std::optional<int> merge_m(const Json& doc, std::optional<int> m) {
    if (!doc.contains("m")) return m;
    int own = doc.at("m").get<int>();
    if (m && *m != own) {
        throw DomainError("utility set is for m=" + std::to_string(own) + " but m=" + std::to_string(*m) +
                          " was requested");
    }
    return own;
}

UtilityVector utility_vector(const Json& v, bool closure) {
    auto values = parse_rationals(v);
    if (!closure) return UtilityVector(values);
    return UtilityVector::closure_point(std::move(values));
}

std::vector<UtilityVector> vector_list(const Json& arr, bool closure, std::optional<int> m) {
    std::vector<UtilityVector> out;
    for (const auto& v : arr) {
        out.push_back(utility_vector(v, closure));
        if (m && out.back().size() != *m) throw DomainError("utility vector length differs from m");
    }
    return out;
}

UtilitySet preset_from_json(const Json& p, std::optional<int> m) {
    std::optional<int> k;
    std::optional<Rational> eps;
    if (p.contains("k")) k = p.at("k").get<int>();
    if (p.contains("epsilon")) eps = rational(p.at("epsilon"));
    return make_preset(p.at("name").get<std::string>(), k, eps, m);
}

Json utility_values(const UtilityVector& u) { return rational_list(u.values()); }

UtilityVector utility_from(const Json& v) {
    auto values = parse_rationals(v);
    try {
        return UtilityVector(values);
    } catch (const DomainError&) {
        return UtilityVector::closure_point(std::move(values));
    }
}

std::string relation_name(lp::Relation r) {
    switch (r) {
        case lp::Relation::le: return "le";
        case lp::Relation::eq: return "eq";
        case lp::Relation::ge: return "ge";
    }
    return "?";
}

lp::Relation relation_from(const std::string& s) {
    if (s == "le") return lp::Relation::le;
    if (s == "eq") return lp::Relation::eq;
    if (s == "ge") return lp::Relation::ge;
    throw DomainError("unknown relation '" + s + "'");
}

Alternative alternative_from(const Json& v, const std::vector<std::string>& names) {
    auto it = std::find(names.begin(), names.end(), v.get<std::string>());
    if (it == names.end()) throw DomainError("unknown alternative '" + v.get<std::string>() + "'");
    return static_cast<Alternative>(it - names.begin());
}

}  // namespace

Json rational_list(const std::vector<Rational>& values) {
    Json out = Json::array();
    for (const auto& v : values) out.push_back(to_string(v));
    return out;
}

std::vector<Rational> parse_rationals(const Json& value) {
    if (!value.is_array()) throw DomainError("expected an array of rationals");
    std::vector<Rational> out;
    for (const auto& v : value) out.push_back(rational(v));
    return out;
}

std::vector<std::string> preset_names() { return {"SD", "RDK", "OMNI", "EQUIDISTANT", "EPS_INDIFF"}; }

UtilitySet utility_set_from_json(const Json& doc, std::optional<int> m) {
    try {
        m = merge_m(doc, m);
        const auto kind = doc.at("kind").get<std::string>();
        if (kind == "finite") return UtilitySet::finite(vector_list(doc.at("vectors"), false, m));
        if (kind == "vertices") {
            if (doc.contains("preset")) return preset_from_json(doc.at("preset"), m).as_vertex_list();
            return UtilitySet::vertex_list(vector_list(doc.at("vertices"), true, m));
        }
        if (kind == "preset") return preset_from_json(doc, m);
        if (kind == "polytope") {
            std::vector<RankConstraint> rows;
            for (const auto& c : doc.at("constraints")) {
                auto rel = c.at("rel").get<std::string>();
                UtilityRelation r = rel == "le" ? UtilityRelation::le
                                  : rel == "eq" ? UtilityRelation::eq
                                  : rel == "ge" ? UtilityRelation::ge
                                                : throw DomainError("unknown relation '" + rel + "'");
                rows.push_back({parse_rationals(c.at("coeffs")), r});
            }
            return UtilitySet::polytope(require_m(m, "polytope"), std::move(rows));
        }
        throw DomainError("unknown utility-set kind '" + kind + "' (valid: finite, vertices, preset, polytope)");
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("utility set: ") + e.what());
    }
}

Json utility_set_to_json(const UtilitySet& u) {
    Json out;
    switch (u.kind()) {
        case UtilitySet::Kind::finite:
            out["kind"] = "finite";
            out["m"] = u.alternatives();
            out["vectors"] = Json::array();
            for (const auto& v : u.vectors()) out["vectors"].push_back(utility_values(v));
            break;
        case UtilitySet::Kind::vertices:
            out["kind"] = "vertices";
            out["m"] = u.alternatives();
            out["vertices"] = Json::array();
            for (const auto& v : u.vectors()) out["vertices"].push_back(utility_values(v));
            break;
        case UtilitySet::Kind::polytope:
            if (const auto& tag = u.preset()) {
                out["kind"] = "preset";
                out["m"] = u.alternatives();
                switch (tag->preset) {
                    case UtilityPreset::sd: out["name"] = "SD"; break;
                    case UtilityPreset::omni: out["name"] = "OMNI"; break;
                    case UtilityPreset::equidistant: out["name"] = "EQUIDISTANT"; break;
                    case UtilityPreset::rdk:
                        out["name"] = "RDK";
                        out["k"] = tag->k;
                        break;
                    case UtilityPreset::eps_indiff:
                        out["name"] = "EPS_INDIFF";
                        out["epsilon"] = to_string(tag->epsilon);
                        break;
                }
            } else {
                out["kind"] = "polytope";
                out["m"] = u.alternatives();
                out["constraints"] = Json::array();
                for (const auto& c : u.constraints()) {
                    Json row;
                    row["coeffs"] = rational_list(c.coeffs);
                    row["rel"] = c.rel == UtilityRelation::le ? "le" : c.rel == UtilityRelation::eq ? "eq" : "ge";
                    out["constraints"].push_back(row);
                }
            }
            break;
    }
    return out;
}

UtilitySource resolve_utility_set(std::string_view spec, std::optional<int> m, const std::filesystem::path& base) {
    std::string s(spec);
    auto colon = s.find(':');
    std::string head = upper(s.substr(0, colon));
    std::string rest = colon == std::string::npos ? "" : s.substr(colon + 1);
    if (head == "VERTICES") {
        auto inner = resolve_utility_set(rest, m, base);
        return {inner.set.as_vertex_list(), inner.text};
    }
    if (head == "FINITE") {
        std::vector<UtilityVector> vectors;
        std::size_t start = 0;
        while (start <= rest.size()) {
            auto end = rest.find(';', start);
            if (end == std::string::npos) end = rest.size();
            vectors.emplace_back(parse_rational_list(rest.substr(start, end - start)));
            if (m && vectors.back().size() != *m) throw DomainError("utility vector length differs from m");
            start = end + 1;
        }
        return {UtilitySet::finite(std::move(vectors)), std::nullopt};
    }
    auto presets = preset_names();
    if (std::find(presets.begin(), presets.end(), head) != presets.end()) {
        std::optional<int> k;
        std::optional<Rational> eps;
        for (const auto& [key, value] : parameters(rest)) {
            if (key == "k") k = std::stoi(value);
            else if (key == "epsilon") eps = parse_rational(value);
            else throw DomainError("unknown preset parameter '" + key + "'");
        }
        return {make_preset(head, k, eps, m), std::nullopt};
    }
    std::filesystem::path path(s);
    if (path.is_relative() && !base.empty()) path = base / path;
    if (!std::filesystem::exists(path)) {
        throw DomainError("unknown utility set '" + s + "' (presets: " + valid_presets() +
                          "; or finite:..., vertices:<preset>, or a file)");
    }
    auto text = read_file(path);
    return {utility_set_from_json(parse_json(text, path.string()), m), text};
}

AxiomSpec axiom_from_json(const Json& a) {
    const auto name = a.at("name").get<std::string>();
    if (name == "k_unanimity") return AxiomSpec::k_unanimity(a.at("k").get<int>());
    if (name == "k_alpha_unanimity") return AxiomSpec::k_alpha_unanimity(a.at("k").get<int>(), rational(a.at("alpha")));
    if (name == "condorcet") return AxiomSpec::condorcet();
    if (name == "ex_post") return AxiomSpec::ex_post();
    throw DomainError("unknown synthesis axiom '" + name + "' (valid: k_unanimity, k_alpha_unanimity, condorcet, ex_post)");
}

Json axiom_to_json(const AxiomSpec& a) {
    Json out;
    switch (a.kind) {
        case AxiomSpec::Kind::k_unanimity:
            out["name"] = "k_unanimity";
            out["k"] = a.k;
            break;
        case AxiomSpec::Kind::k_alpha_unanimity:
            out["name"] = "k_alpha_unanimity";
            out["k"] = a.k;
            out["alpha"] = to_string(a.alpha);
            break;
        case AxiomSpec::Kind::condorcet: out["name"] = "condorcet"; break;
        case AxiomSpec::Kind::ex_post: out["name"] = "ex_post"; break;
    }
    return out;
}

ProblemSource problem_from_json(std::string_view text, const std::filesystem::path& base) {
    Json d = parse_json(text, "synthesis problem");
    try {
        ProblemSource out;
        auto& p = out.problem;
        p.m = d.at("m").get<int>();
        p.n = d.at("n").get<int>();
        p.mode = parse_symmetry_mode(d.value("symmetry", std::string("anonymous")));
        if (d.contains("axioms")) {
            for (const auto& a : d.at("axioms")) p.axioms.push_back(axiom_from_json(a));
        }
        if (d.contains("utility_set") && !d.at("utility_set").is_null()) {
            const auto& u = d.at("utility_set");
            std::optional<UtilitySet> set;
            if (u.is_string()) {
                auto src = resolve_utility_set(u.get<std::string>(), p.m, base);
                if (src.text) out.inputs.push_back(*src.text);
                set = std::move(src.set);
            } else {
                set = utility_set_from_json(u, p.m);
            }
            if (set->kind() == UtilitySet::Kind::polytope) set = set->as_vertex_list();
            p.utilities = std::move(set);
        }
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("synthesis problem: ") + e.what());
    }
}

Json problem_to_json(const SynthesisProblem& p) {
    Json out;
    out["m"] = p.m;
    out["n"] = p.n;
    out["symmetry"] = to_string(p.mode);
    out["axioms"] = Json::array();
    for (const auto& a : p.axioms) out["axioms"].push_back(axiom_to_json(a));
    out["utility_set"] = p.utilities ? utility_set_to_json(*p.utilities) : Json();
    return out;
}

Json profile_to_json(const Profile& profile, const std::vector<std::string>& names) {
    Json out = Json::array();
    for (const auto& pref : profile.preferences()) out.push_back(pref.to_string(&names));
    return out;
}

Profile profile_from_json(const Json& doc, const std::vector<std::string>& names) {
    std::vector<PreferenceRelation> prefs;
    for (const auto& v : doc) prefs.push_back(parse_preference(v.get<std::string>(), names));
    return Profile(static_cast<int>(names.size()), std::move(prefs));
}

Json lottery_to_json(const Lottery& p) { return rational_list(p.probabilities()); }

Lottery lottery_from_json(const Json& doc) { return Lottery(parse_rationals(doc)); }

Json deviation_to_json(const Deviation& d, const std::vector<std::string>& names) {
    Json out;
    out["profile"] = profile_to_json(d.profile, names);
    out["voter"] = d.voter;
    out["misreport"] = d.misreport.to_string(&names);
    return out;
}

Deviation deviation_from_json(const Json& doc, const std::vector<std::string>& names) {
    return {profile_from_json(doc.at("profile"), names), doc.at("voter").get<int>(),
            parse_preference(doc.at("misreport").get<std::string>(), names)};
}

Json witness_to_json(const ManipulationWitness& w, const std::vector<std::string>& names) {
    Json out;
    out["deviation"] = deviation_to_json(w.deviation, names);
    out["utility"] = utility_values(w.utility);
    out["gain"] = to_string(w.gain);
    out["truthful"] = lottery_to_json(w.truthful);
    out["manipulated"] = lottery_to_json(w.manipulated);
    return out;
}

ManipulationWitness witness_from_json(const Json& doc, const std::vector<std::string>& names) {
    return {deviation_from_json(doc.at("deviation"), names), utility_from(doc.at("utility")), rational(doc.at("gain")),
            lottery_from_json(doc.at("truthful")), lottery_from_json(doc.at("manipulated"))};
}

Json group_witness_to_json(const GroupManipulationWitness& w, const std::vector<std::string>& names) {
    Json out;
    out["profile"] = profile_to_json(w.profile, names);
    out["coalition"] = w.coalition;
    out["misreports"] = Json::array();
    for (const auto& r : w.misreports) out["misreports"].push_back(r.to_string(&names));
    out["utility"] = utility_values(w.utility);
    out["gain"] = to_string(w.gain);
    out["truthful"] = lottery_to_json(w.truthful);
    out["manipulated"] = lottery_to_json(w.manipulated);
    return out;
}

GroupManipulationWitness group_witness_from_json(const Json& doc, const std::vector<std::string>& names) {
    std::vector<PreferenceRelation> misreports;
    for (const auto& r : doc.at("misreports")) misreports.push_back(parse_preference(r.get<std::string>(), names));
    return {profile_from_json(doc.at("profile"), names),
            doc.at("coalition").get<std::vector<int>>(),
            std::move(misreports),
            utility_from(doc.at("utility")),
            rational(doc.at("gain")),
            lottery_from_json(doc.at("truthful")),
            lottery_from_json(doc.at("manipulated"))};
}

Json violation_to_json(const AxiomViolation& v, const std::vector<std::string>& names) {
    Json out;
    out["profiles"] = Json::array();
    for (const auto& p : v.profiles) out["profiles"].push_back(profile_to_json(p, names));
    out["lotteries"] = Json::array();
    for (const auto& p : v.lotteries) out["lotteries"].push_back(lottery_to_json(p));
    out["observed_alternative"] = names[v.observed_alternative];
    out["observed"] = to_string(v.observed);
    out["required"] = to_string(v.required);
    out["comparison"] = v.comparison == Comparison::equal ? "equal" : "at_least";
    out["witness"] = v.witness;
    return out;
}

AxiomViolation violation_from_json(const Json& doc, const std::vector<std::string>& names) {
    AxiomViolation v;
    for (const auto& p : doc.at("profiles")) v.profiles.push_back(profile_from_json(p, names));
    for (const auto& p : doc.at("lotteries")) v.lotteries.push_back(lottery_from_json(p));
    v.observed_alternative = alternative_from(doc.at("observed_alternative"), names);
    v.observed = rational(doc.at("observed"));
    v.required = rational(doc.at("required"));
    v.comparison = doc.at("comparison").get<std::string>() == "equal" ? Comparison::equal : Comparison::at_least;
    v.witness = doc.at("witness").get<std::string>();
    return v;
}

Json certificate_to_json(const lp::LinearProgram& program, const lp::FarkasCertificate& cert,
                         const std::vector<std::string>& provenance) {
    Json out;
    out["variables"] = program.variables;
    out["rows"] = Json::array();
    for (std::size_t i = 0; i < program.constraints.size(); ++i) {
        if (cert.rows[i] == 0) continue;
        const auto& c = program.constraints[i];
        Json row;
        row["index"] = i;
        if (i < provenance.size()) row["label"] = provenance[i];
        row["terms"] = Json::array();
        for (const auto& t : c.terms) row["terms"].push_back(Json::array({t.var, to_string(t.coeff)}));
        row["rel"] = relation_name(c.rel);
        row["rhs"] = to_string(c.rhs);
        row["multiplier"] = to_string(cert.rows[i]);
        out["rows"].push_back(row);
    }
    out["bounds"] = Json::array();
    for (std::size_t j = 0; j < program.variables; ++j) {
        for (bool lower : {true, false}) {
            const auto& y = lower ? cert.lower[j] : cert.upper[j];
            const auto& b = lower ? program.lower[j] : program.upper[j];
            if (y == 0 || !b) continue;
            Json e;
            e["variable"] = j;
            e["side"] = lower ? "lower" : "upper";
            e["value"] = to_string(*b);
            e["multiplier"] = to_string(y);
            out["bounds"].push_back(e);
        }
    }
    return out;
}

bool replay_certificate(const Json& doc) {
    const auto vars = doc.at("variables").get<std::size_t>();
    lp::LinearProgram program(vars);
    for (std::size_t j = 0; j < vars; ++j) program.lower[j].reset();
    lp::FarkasCertificate cert;
    for (const auto& row : doc.at("rows")) {
        std::vector<lp::Term> terms;
        for (const auto& t : row.at("terms")) {
            auto var = t.at(0).get<std::size_t>();
            if (var >= vars) return false;
            terms.push_back({var, rational(t.at(1))});
        }
        program.add(std::move(terms), relation_from(row.at("rel").get<std::string>()), rational(row.at("rhs")));
        cert.rows.push_back(rational(row.at("multiplier")));
    }
    cert.lower.assign(vars, Rational(0));
    cert.upper.assign(vars, Rational(0));
    for (const auto& b : doc.at("bounds")) {
        auto j = b.at("variable").get<std::size_t>();
        if (j >= vars) return false;
        bool lower = b.at("side").get<std::string>() == "lower";
        (lower ? program.lower[j] : program.upper[j]) = rational(b.at("value"));
        (lower ? cert.lower[j] : cert.upper[j]) = rational(b.at("multiplier"));
    }
    return lp::verify_certificate(program, cert);
}

}  // namespace sds::doc
