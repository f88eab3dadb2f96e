#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ldq/ingest.hpp"
#include "ldq/rational.hpp"

namespace ldq {

enum class DefectKind { MissingObject, Duplicate, WrongUnit, NameVariant, StaleTimestamp, Outlier };
std::string_view defect_kind_name(DefectKind kind);
std::optional<DefectKind> parse_defect_kind(std::string_view name);

struct FixtureCounts {
  // Records per type. Series types are spread round-robin over their
  // sources, one reading per source per hour.
  std::map<RecordType, int> records = {
      {RecordType::Consumption, 96}, {RecordType::Generation, 24},
      {RecordType::BuildingInfo, 2}, {RecordType::Occupancy, 24},
      {RecordType::Dweller, 6},      {RecordType::Weather, 24},
      {RecordType::Environment, 24}};

  // Scales every series type to `hours` readings per source.
  static FixtureCounts for_hours(int hours);
};

struct DefectRates {
  std::map<DefectKind, Rational> rates;
  // "Type.field" slots MissingObject may blank; empty means every
  // non-numeric mapped field.
  std::set<std::string> missing_fields;
};

struct GroundTruthEntry {
  // Subject IRI under the default subject template.
  std::string subject;
  std::string field;
  std::string original;
  std::string injected;
  // MissingObject: the planted pattern predicts the removed value.
  bool recoverable = false;
  // NameVariant: the subject the variant should be linked with.
  std::string counterpart;
};

struct InjectedDefect {
  DefectKind kind;
  Rational rate;
  std::size_t candidates = 0;
  std::vector<GroundTruthEntry> ground_truth;
};

struct FixtureManifest {
  std::uint64_t seed = 0;
  UnixSeconds start = 0;
  // One hour after the last reading; the freshness reference for the fixture.
  UnixSeconds reference_now = 0;
  std::map<RecordType, int> counts;
  std::vector<std::string> planted_patterns;
  std::vector<InjectedDefect> defects;

  const InjectedDefect* find(DefectKind kind) const;
};

struct Fixture {
  std::vector<EnergyRecord> records;
  FixtureManifest manifest;
  // Fixture probe answering every http IRI in the records.
  std::string probe_json;
};

// Pure function of its arguments. Throws ConfigError for rates outside [0, 1].
Fixture generate_fixture(std::uint64_t seed, const FixtureCounts& counts = {},
                         const DefectRates& rates = {});

// Header: recordType,sourceId,timestamp, then fields and "<field>@unit"
// columns in a fixed order.
std::string records_to_csv(const std::vector<EnergyRecord>& records);
std::string manifest_to_json(const FixtureManifest& manifest);

// Subject a record maps to under the default template.
std::string default_subject(const EnergyRecord& record);

}  // namespace ldq
