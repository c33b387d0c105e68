#pragma once

#include "sds/synth.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sds::doc {

using Json = nlohmann::ordered_json;

Json rational_list(const std::vector<Rational>& values);
std::vector<Rational> parse_rationals(const Json& value);

// --- utility sets ----------------------------------------------------------------

// Documents:
//   {"kind": "finite",   "m": 3, "vectors":  [["2","1","0"], ...]}
//   {"kind": "vertices", "m": 3, "vertices": [["1","1/2","0"], ...]}
//   {"kind": "vertices", "preset": {"name": "EQUIDISTANT"}, "m": 3}
//   {"kind": "preset",   "name": "RDK", "k": 1, "m": 3}
//   {"kind": "preset",   "name": "EPS_INDIFF", "epsilon": "1/4", "m": 3}
// "m" may be omitted when the caller supplies it; a mismatch is a DomainError.
UtilitySet utility_set_from_json(const Json& doc, std::optional<int> m = std::nullopt);
Json utility_set_to_json(const UtilitySet& u);

std::vector<std::string> preset_names();

// Inline forms: SD, OMNI, EQUIDISTANT, RDK:k=1, EPS_INDIFF:epsilon=1/4,
// vertices:<preset>, finite:2,1,0;3,1,0. Anything else is read as a file path.
struct UtilitySource {
    UtilitySet set;
    // File contents when the set came from a file.
    std::optional<std::string> text;
};

UtilitySource resolve_utility_set(std::string_view spec, std::optional<int> m,
                                  const std::filesystem::path& base = {});

// --- synthesis problems ------------------------------------------------------------

// {"m": 3, "n": 4, "symmetry": "anonymous",
//  "axioms": [{"name": "k_unanimity", "k": 1}, {"name": "k_alpha_unanimity", "k": 1, "alpha": "2/3"},
//             {"name": "condorcet"}, {"name": "ex_post"}],
//  "utility_set": <utility-set document, inline form or path relative to the problem file>}
// Preset polytopes are replaced by their vertex lists.
struct ProblemSource {
    SynthesisProblem problem;
    std::vector<std::string> inputs;  // referenced file contents, in reading order
};

ProblemSource problem_from_json(std::string_view text, const std::filesystem::path& base = {});
Json problem_to_json(const SynthesisProblem& problem);

AxiomSpec axiom_from_json(const Json& doc);
Json axiom_to_json(const AxiomSpec& axiom);

// --- profiles, lotteries, witnesses ----------------------------------------------------

Json profile_to_json(const Profile& profile, const std::vector<std::string>& names);
Profile profile_from_json(const Json& doc, const std::vector<std::string>& names);
Json lottery_to_json(const Lottery& p);
Lottery lottery_from_json(const Json& doc);

Json deviation_to_json(const Deviation& d, const std::vector<std::string>& names);
Deviation deviation_from_json(const Json& doc, const std::vector<std::string>& names);
Json witness_to_json(const ManipulationWitness& w, const std::vector<std::string>& names);
ManipulationWitness witness_from_json(const Json& doc, const std::vector<std::string>& names);
Json group_witness_to_json(const GroupManipulationWitness& w, const std::vector<std::string>& names);
GroupManipulationWitness group_witness_from_json(const Json& doc, const std::vector<std::string>& names);
Json violation_to_json(const AxiomViolation& v, const std::vector<std::string>& names);
AxiomViolation violation_from_json(const Json& doc, const std::vector<std::string>& names);

// --- certificates ------------------------------------------------------------------

// The rows and bounds with nonzero multipliers, each with its coefficients,
// so the certificate can be checked without rebuilding the program.
Json certificate_to_json(const lp::LinearProgram& program, const lp::FarkasCertificate& cert,
                         const std::vector<std::string>& provenance);

// Rebuilds the supported subsystem and verifies the combination.
bool replay_certificate(const Json& doc);

}  // namespace sds::doc
