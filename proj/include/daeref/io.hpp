#pragma once

// JSON documents for systems, controllers and certificates:
//   {"schema": 1, "kind": "dae" | "dv" | "controller" | "certificate",
//    "matrices": {"A": [[row], ...], ...}, "shapes": {"A": [rows, cols], ...},
//    "initial_states": "free" | [[x0], ...], "metadata": {...}}
// "shapes" disambiguates empty matrices; readers fall back to the row arrays.

#include <optional>
#include <string>

#include "json.hpp"

#include "daeref/certificates.hpp"
#include "daeref/conversion.hpp"
#include "daeref/refinement.hpp"

namespace daeref {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

Json matrix_to_json(const Mat& m);
Mat matrix_from_json(const Json& j, const std::string& name);

Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& doc);

/// Checks the schema version and returns the "kind" field.
std::string document_kind(const Json& doc);

Json dae_to_json(const DaeSystem& sys, const DrivingRecovery* recovery = nullptr);

struct LoadedDae {
  DaeSystem sys;
  std::optional<DrivingRecovery> recovery;
};

LoadedDae dae_from_json(const Json& doc);

Json dv_to_json(const DvSystem& dv);
DvSystem dv_from_json(const Json& doc);

/// Abstract controllers have "form": "dae"; refined controllers "refined".
Json controller_to_json(const DaeController& ctrl);
Json refined_to_json(const RefinedController& ctrl);
std::string controller_form(const Json& doc);
DaeController controller_from_json(const Json& doc);
RefinedController refined_from_json(const Json& doc);

Json certificate_to_json(const RefinementCertificate& cert);
RefinementCertificate certificate_from_json(const Json& doc);

}  // namespace daeref
