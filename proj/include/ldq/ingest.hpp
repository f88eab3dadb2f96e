#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ldq/rdf.hpp"
#include "ldq/time.hpp"

namespace ldq {

enum class RecordType {
  Consumption,
  Generation,
  BuildingInfo,
  Occupancy,
  Dweller,
  Weather,
  Environment
};

inline constexpr std::array<RecordType, 7> kAllRecordTypes = {
    RecordType::Consumption, RecordType::Generation, RecordType::BuildingInfo,
    RecordType::Occupancy,   RecordType::Dweller,    RecordType::Weather,
    RecordType::Environment};

std::string_view record_type_name(RecordType type);
std::optional<RecordType> parse_record_type(std::string_view name);

struct RecordField {
  std::string name;
  std::string value;
  std::optional<std::string> unit;
};

struct EnergyRecord {
  RecordType type = RecordType::Consumption;
  std::string source_id;
  UnixSeconds timestamp = 0;
  std::vector<RecordField> fields;
};

struct FieldMapping {
  std::string name;
  std::string predicate;
  // xsd datatype IRI, or "@id" to emit the value as an IRI.
  std::string datatype;
  // Unit assumed when the record does not declare one.
  std::optional<std::string> unit;
};

struct MappingRule {
  RecordType type = RecordType::Consumption;
  std::string class_iri;
  std::string subject_template;
  std::vector<FieldMapping> fields;

  const FieldMapping* find_field(std::string_view name) const;
};

inline constexpr std::string_view kDefaultSubjectTemplate =
    "urn:ldq:{recordType}:{sourceId}:{timestamp}";

// Throws ConfigError, DuplicateRecordType.
std::vector<MappingRule> load_mapping(std::string_view config_json);

struct ProvenanceStamp {
  // Empty: derived per record as urn:ldq:source:{sourceId}.
  std::string source_iri;
  UnixSeconds generated_at = 0;
  std::string agent = "ldq";
};

std::string source_iri_for(std::string_view source_id);

// Throws NoRuleForType, TemplateError. Unmapped field names are appended to
// `skipped` when given.
Graph map_record(const EnergyRecord& record,
                 const std::vector<MappingRule>& rules,
                 const ProvenanceStamp& prov,
                 std::vector<std::string>* skipped = nullptr);

struct IngestReport {
  std::size_t records = 0;
  // "recordType.field" -> occurrences
  std::map<std::string, std::size_t> skipped_fields;
};

Graph map_records(const std::vector<EnergyRecord>& records,
                  const std::vector<MappingRule>& rules,
                  const ProvenanceStamp& prov, IngestReport* report = nullptr);

// CSV with a header row; required columns recordType, sourceId, timestamp.
// A column "<field>@unit" declares the unit of <field>. Empty cells are
// treated as absent fields. Throws ConfigError.
std::vector<EnergyRecord> parse_records_csv(std::string_view text);

// JSON array of objects with recordType, sourceId, timestamp; every other key
// is a field, either a scalar or {"value": ..., "unit": ...}. Null values are
// absent fields. Throws ConfigError.
std::vector<EnergyRecord> parse_records_json(std::string_view text);

// Picks the parser by the first non-blank character ('[' means JSON).
std::vector<EnergyRecord> parse_records(std::string_view text);

}  // namespace ldq
