#include <gtest/gtest.h>

#include "ldq/errors.hpp"
#include "ldq/ingest.hpp"
#include "ldq/vocab.hpp"
#include "support/files.hpp"

using namespace ldq;

namespace {

const char* kConsumptionMapping = R"({"rules":[{
  "recordType":"Consumption", "classIri":"urn:e#Consumption",
  "fields":[{"name":"kwh","predicate":"urn:e#consumedEnergy",
             "datatype":"http://www.w3.org/2001/XMLSchema#decimal","unit":"kWh"}]}]})";

const UnixSeconds kNoon = 1704110400;  // 2024-01-01T12:00:00Z

EnergyRecord consumption(std::vector<RecordField> fields) {
  EnergyRecord r;
  r.type = RecordType::Consumption;
  r.source_id = "m1";
  r.timestamp = kNoon;
  r.fields = std::move(fields);
  return r;
}

ProvenanceStamp stamp() {
  ProvenanceStamp p;
  p.generated_at = kNoon + 60;
  return p;
}

}  // namespace

TEST(LoadMapping, SingleRule) {
  auto rules = load_mapping(kConsumptionMapping);
  ASSERT_EQ(rules.size(), 1u);
  EXPECT_EQ(rules[0].type, RecordType::Consumption);
  EXPECT_EQ(rules[0].subject_template, kDefaultSubjectTemplate);
  const FieldMapping* f = rules[0].find_field("kwh");
  ASSERT_NE(f, nullptr);
  EXPECT_EQ(f->predicate, "urn:e#consumedEnergy");
  EXPECT_EQ(f->unit, "kWh");
}

TEST(LoadMapping, DuplicateRecordType) {
  EXPECT_THROW(load_mapping(R"({"rules":[
      {"recordType":"Consumption","classIri":"urn:e#A"},
      {"recordType":"Consumption","classIri":"urn:e#B"}]})"),
               DuplicateRecordType);
}

TEST(LoadMapping, RejectsInvalidConfigs) {
  EXPECT_THROW(load_mapping(R"({"rules":[{"recordType":"Nope","classIri":"urn:e#A"}]})"),
               ConfigError);
  EXPECT_THROW(load_mapping(R"({"rules":[{"recordType":"Weather","classIri":"rel"}]})"),
               ConfigError);
  EXPECT_THROW(load_mapping(R"({"rules":[{"recordType":"Weather","classIri":"urn:e#W",
      "subjectTemplate":"no scheme {sourceId}"}]})"),
               ConfigError);
  EXPECT_THROW(load_mapping(R"({"rules":[{"recordType":"Weather","classIri":"urn:e#W",
      "fields":[{"name":"a","predicate":"urn:p"},{"name":"a","predicate":"urn:q"}]}]})"),
               ConfigError);
  EXPECT_THROW(load_mapping(R"({"rules":[{"recordType":"Weather","classIri":"urn:e#W",
      "fields":[{"name":"a","predicate":"urn:p","unit":"K"},
                {"name":"b","predicate":"urn:q","unit":"K"}]}]})"),
               ConfigError);
  EXPECT_THROW(load_mapping("[]"), ConfigError);
  EXPECT_THROW(load_mapping("{"), ConfigError);
}

TEST(LoadMapping, ShippedFixture) {
  auto rules = load_mapping(test::read_source("fixtures/mapping/energy.json"));
  EXPECT_EQ(rules.size(), 7u);
}

TEST(MapRecord, ConsumptionHandExpansion) {
  auto rules = load_mapping(kConsumptionMapping);
  Graph g = map_record(consumption({{"kwh", "3.5", "kWh"}}), rules, stamp());
  const std::string expected =
      "<urn:ldq:Consumption:m1:2024-01-01T12:00:00Z> "
      "<http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <urn:e#Consumption> .\n"
      "<urn:ldq:Consumption:m1:2024-01-01T12:00:00Z> <urn:e#consumedEnergy> "
      "\"3.5\"^^<http://www.w3.org/2001/XMLSchema#decimal> .\n"
      "<urn:ldq:Consumption:m1:2024-01-01T12:00:00Z> <urn:eldv#generatedAt> "
      "\"2024-01-01T12:01:00Z\"^^<http://www.w3.org/2001/XMLSchema#dateTime> .\n"
      "<urn:ldq:Consumption:m1:2024-01-01T12:00:00Z> <urn:eldv#observedAt> "
      "\"2024-01-01T12:00:00Z\"^^<http://www.w3.org/2001/XMLSchema#dateTime> .\n"
      "<urn:ldq:Consumption:m1:2024-01-01T12:00:00Z> <urn:eldv#source> "
      "<urn:ldq:source:m1> .\n"
      "<urn:ldq:Consumption:m1:2024-01-01T12:00:00Z> <urn:eldv#unit> "
      "\"kWh\" .\n";
  EXPECT_EQ(g.size(), 6u);
  EXPECT_EQ(serialize_ntriples(g), expected);
}

TEST(MapRecord, ZeroMappedFields) {
  auto rules = load_mapping(kConsumptionMapping);
  std::vector<std::string> skipped;
  Graph g = map_record(consumption({{"voltage", "230", std::nullopt}}), rules,
                       stamp(), &skipped);
  EXPECT_EQ(g.size(), 4u);
  EXPECT_EQ(skipped, std::vector<std::string>{"voltage"});
}

TEST(MapRecord, NoRuleForType) {
  auto rules = load_mapping(kConsumptionMapping);
  EnergyRecord r = consumption({});
  r.type = RecordType::Weather;
  EXPECT_THROW(map_record(r, rules, stamp()), NoRuleForType);
}

TEST(MapRecord, TemplateError) {
  auto rules = load_mapping(R"({"rules":[{"recordType":"Consumption",
      "classIri":"urn:e#C","subjectTemplate":"urn:x:{sourceId}"}]})");
  EnergyRecord r = consumption({});
  r.source_id = "has space";
  EXPECT_THROW(map_record(r, rules, stamp()), TemplateError);
}

TEST(MapRecord, TripleCountInvariantAndDeterminism) {
  auto rules = load_mapping(test::read_source("fixtures/mapping/energy.json"));
  EnergyRecord r;
  r.type = RecordType::BuildingInfo;
  r.source_id = "bms";
  r.timestamp = kNoon;
  r.fields = {{"name", "Main Hall", std::nullopt},
              {"floorArea", "1200", std::nullopt},
              {"homepage", "http://example.org/b1", std::nullopt},
              {"colour", "red", std::nullopt}};
  Graph g = map_record(r, rules, stamp());
  // type + 3 mapped fields + 0 units + 3 provenance/time
  EXPECT_EQ(g.size(), 7u);
  EXPECT_EQ(serialize_ntriples(g), serialize_ntriples(map_record(r, rules, stamp())));
  EXPECT_TRUE(g.contains(Triple(Term::iri("urn:ldq:BuildingInfo:bms:2024-01-01T12:00:00Z"),
                                Term::iri(ns::rdfs_("seeAlso")),
                                Term::iri("http://example.org/b1"))));
}

TEST(MapRecord, MappingUnitIsFallback) {
  auto rules = load_mapping(kConsumptionMapping);
  Graph g = map_record(consumption({{"kwh", "3.5", std::nullopt}}), rules, stamp());
  auto units = match(g, {std::nullopt, Term::iri(vocab::unit()), std::nullopt});
  ASSERT_EQ(units.size(), 1u);
  EXPECT_EQ(units[0].object, Term::literal("kWh"));
  g = map_record(consumption({{"kwh", "3500", "Wh"}}), rules, stamp());
  units = match(g, {std::nullopt, Term::iri(vocab::unit()), std::nullopt});
  EXPECT_EQ(units[0].object, Term::literal("Wh"));
}

TEST(Records, CsvWithUnitsAndQuotes) {
  auto records = parse_records_csv(
      "recordType,sourceId,timestamp,kwh,kwh@unit,note\n"
      "Consumption,m1,2024-01-01T12:00:00Z,3.5,kWh,\"a, \"\"quoted\"\" note\"\n"
      "Consumption,m1,2024-01-01T13:00:00Z,,,\n");
  ASSERT_EQ(records.size(), 2u);
  EXPECT_EQ(records[0].timestamp, kNoon);
  ASSERT_EQ(records[0].fields.size(), 2u);
  EXPECT_EQ(records[0].fields[0].name, "kwh");
  EXPECT_EQ(records[0].fields[0].unit, "kWh");
  EXPECT_EQ(records[0].fields[1].value, "a, \"quoted\" note");
  EXPECT_TRUE(records[1].fields.empty());
}

TEST(Records, CsvErrors) {
  EXPECT_THROW(parse_records_csv("sourceId,timestamp\nm1,2024-01-01T00:00:00Z\n"),
               ConfigError);
  EXPECT_THROW(parse_records_csv("recordType,sourceId,timestamp\nConsumption,m1,yesterday\n"),
               ConfigError);
  EXPECT_THROW(parse_records_csv("recordType,sourceId,timestamp\nConsumption,m1\n"),
               ConfigError);
  EXPECT_THROW(parse_records_csv("recordType,sourceId,timestamp\n\"Consumption,m1,x\n"),
               ConfigError);
}

TEST(Records, JsonWithUnitObjects) {
  auto records = parse_records(R"([
    {"recordType":"Weather","sourceId":"ws","timestamp":"2024-01-01T12:00:00Z",
     "temperature":{"value":21.5,"unit":"°C"},"humidity":40,"skip":null}])");
  ASSERT_EQ(records.size(), 1u);
  EXPECT_EQ(records[0].type, RecordType::Weather);
  ASSERT_EQ(records[0].fields.size(), 2u);
  EXPECT_EQ(records[0].fields[0].name, "humidity");
  EXPECT_EQ(records[0].fields[0].value, "40");
  EXPECT_EQ(records[0].fields[1].value, "21.5");
  EXPECT_EQ(records[0].fields[1].unit, "\xC2\xB0" "C");
}

TEST(Records, CsvAndJsonMapIdentically) {
  auto rules = load_mapping(test::read_source("fixtures/mapping/energy.json"));
  auto from_csv = parse_records(
      "recordType,sourceId,timestamp,energy,energy@unit,appliance\n"
      "Consumption,m1,2024-01-01T12:00:00Z,3.5,kWh,fridge\n");
  auto from_json = parse_records(R"([{"recordType":"Consumption","sourceId":"m1",
      "timestamp":"2024-01-01T12:00:00Z","energy":{"value":"3.5","unit":"kWh"},
      "appliance":"fridge"}])");
  EXPECT_EQ(serialize_ntriples(map_records(from_csv, rules, stamp())),
            serialize_ntriples(map_records(from_json, rules, stamp())));
}

TEST(Records, MapRecordsCountsSkips) {
  auto rules = load_mapping(kConsumptionMapping);
  IngestReport report;
  Graph g = map_records({consumption({{"x", "1", std::nullopt}}),
                         consumption({{"x", "2", std::nullopt}})},
                        rules, stamp(), &report);
  EXPECT_EQ(report.records, 2u);
  EXPECT_EQ(report.skipped_fields.at("Consumption.x"), 2u);
  // Same subject, same statements: the second record is all duplicates.
  EXPECT_EQ(g.size(), 4u);
  EXPECT_EQ(g.raw_statement_count(), 8u);
}

TEST(Records, EverySubjectHasOneTypeAndOneObservedAt) {
  auto rules = load_mapping(test::read_source("fixtures/mapping/energy.json"));
  std::vector<EnergyRecord> records;
  for (auto type : kAllRecordTypes) {
    for (int i = 0; i < 3; ++i) {
      EnergyRecord r;
      r.type = type;
      r.source_id = "s" + std::to_string(i);
      r.timestamp = kNoon + 3600 * i;
      records.push_back(r);
    }
  }
  Graph g = map_records(records, rules, stamp());
  std::size_t subjects = 0;
  for_each_subject(g, [&](const Term&, const std::vector<const Triple*>& ts) {
    ++subjects;
    int types = 0, observed = 0;
    for (const auto* t : ts) {
      types += t->predicate.value() == ns::rdf_("type");
      observed += t->predicate.value() == vocab::observed_at();
    }
    EXPECT_EQ(types, 1);
    EXPECT_EQ(observed, 1);
  });
  EXPECT_EQ(subjects, records.size());
}
