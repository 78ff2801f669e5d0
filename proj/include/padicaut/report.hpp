#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "padicaut/autgroup.hpp"
#include "padicaut/bounds.hpp"
#include "padicaut/flows.hpp"
#include "padicaut/nilpotent.hpp"
#include "padicaut/pipeline.hpp"

namespace padicaut {

using Json = nlohmann::json;

/// FNV-1a digest of the input text, as 16 hex digits.
std::string input_digest(const std::string& text);

Json bounds_json(int d, std::int64_t p, const FieldSpec& field);
Json certificate_json(const LinearizationCertificate& cert);
Json optimal_group_json(const OptimalGroupReport& rep);
/// {"e1,...,ed": residue} for one series.
Json series_table(const TateSeries& s);
/// {"e1,...,ed,j": residue} per component for the t-power view.
Json flow_json(const TateFlow& phi);
Json field_json(const VectorField& x);
Json lie_json(const LieAlgebraBasis& h);
Json witness_json(const VdlWitness& w);
Json theorem_b_json(const TheoremBReport& rep);

/// Schema check by report kind: "bounds", "certificate", "optimal", "flow",
/// "field", "lie", "nilpotent", "theoremB", "prime-search". Returns the violations.
std::vector<std::string> validate_report(const std::string& kind, const Json& j);

}  // namespace padicaut
