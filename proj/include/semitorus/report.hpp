#pragma once

// JSON reports. Exact rationals are written as "p/q" strings and certified
// reals as {value, errorRadius} decimal pairs together with their exact
// rationals, so that a verifier never depends on floating point.

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "semitorus/entropy.hpp"
#include "semitorus/equidist.hpp"
#include "semitorus/measures.hpp"
#include "semitorus/nazarov.hpp"
#include "semitorus/rigidity.hpp"
#include "semitorus/semigroup.hpp"

namespace semitorus {

/// Keys keep insertion order, so equal inputs give byte-identical output.
using Json = nlohmann::ordered_json;

constexpr const char* kToolVersion = "0.1.0";

struct RunManifest {
  std::vector<std::string> command_line;
  Json config = Json::object();
  std::uint64_t seed = 0;
  unsigned precision = 0;
  std::string version = kToolVersion;
  /// Left out of reports unless set, so repeated runs compare equal.
  std::optional<double> wall_seconds;
};

Json to_json(const RunManifest& m);
RunManifest manifest_from_json(const Json& j);

Json rational_json(const Rational& r);
Rational rational_from_json(const Json& j);
Json integers_json(const std::vector<Integer>& v);
std::vector<Integer> integers_from_json(const Json& j);
Json to_json(const CertifiedReal& c);
CertifiedReal certified_from_json(const Json& j);
Json to_json(const ComplexValue& z);
Json to_json(const Arc& a);

Json to_json(const DensityReport& r);
Json to_json(const LacunarityResult& r);
Json to_json(const InvarianceReport& r);
Json to_json(const SmbEstimate& e, bool include_values = false);
Json to_json(const Lemma1Report& r);
Json to_json(const CollisionWitness& w);
Json to_json(const ReconstructionTrace& t);
Json to_json(const PigeonholeReport& r);
Json to_json(const ClassificationReport& r);
Json to_json(const DiscrepancyReport& r);

Json to_json(const NazarovConfig& c);
NazarovConfig nazarov_config_from_json(const Json& j);
Json to_json(const ConstructionState& s);
/// Throws Parse on missing or malformed fields.
ConstructionState construction_from_json(const Json& j);

/// Two-space indentation and a trailing newline.
std::string dump(const Json& j);

}  // namespace semitorus
