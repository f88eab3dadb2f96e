#include "ldq/ingest.hpp"

#include <algorithm>
#include <json.hpp>
#include <set>

#include "ldq/errors.hpp"
#include "ldq/vocab.hpp"

namespace ldq {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, 7> kTypeNames = {
    "Consumption", "Generation", "BuildingInfo", "Occupancy",
    "Dweller",     "Weather",    "Environment"};

constexpr std::string_view kUnitSuffix = "@unit";

std::string replace_all(std::string text, std::string_view key,
                        std::string_view value) {
  std::size_t pos = 0;
  while ((pos = text.find(key, pos)) != std::string::npos) {
    text.replace(pos, key.size(), value);
    pos += value.size();
  }
  return text;
}

std::string expand_template(const std::string& tmpl, const EnergyRecord& r) {
  std::string out = replace_all(tmpl, "{recordType}", record_type_name(r.type));
  out = replace_all(std::move(out), "{sourceId}", r.source_id);
  out = replace_all(std::move(out), "{timestamp}", format_utc(r.timestamp));
  return out;
}

const std::string& str(const json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(path + "." + key, "missing required key");
  if (!it->is_string()) throw ConfigError(path + "." + key, "expected a string");
  return it->get_ref<const std::string&>();
}

// Template check with placeholder values that are valid IRI characters.
void check_template(const std::string& tmpl, const std::string& path) {
  std::string probe = replace_all(tmpl, "{recordType}", "T");
  probe = replace_all(std::move(probe), "{sourceId}", "s");
  probe = replace_all(std::move(probe), "{timestamp}", "2000-01-01T00:00:00Z");
  if (probe.find('{') != std::string::npos || !is_valid_iri(probe))
    throw ConfigError(path, "template does not yield an absolute IRI");
}

EnergyRecord make_record(const std::string& type, const std::string& source,
                         const std::string& timestamp, const std::string& where) {
  EnergyRecord r;
  auto t = parse_record_type(type);
  if (!t) throw ConfigError(where + ".recordType", "unknown record type " + type);
  r.type = *t;
  if (source.empty()) throw ConfigError(where + ".sourceId", "empty source id");
  r.source_id = source;
  auto ts = parse_utc(timestamp);
  if (!ts) throw ConfigError(where + ".timestamp", "not an ISO-8601 UTC datetime");
  r.timestamp = *ts;
  return r;
}

// RFC 4180 rows; quoted fields may contain separators, quotes and newlines.
std::vector<std::vector<std::string>> read_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string cell;
  bool quoted = false;
  bool row_has_content = false;
  std::size_t line = 1;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          cell += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        cell += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!cell.empty())
          throw ConfigError("csv line " + std::to_string(line),
                            "quote inside unquoted field");
        quoted = true;
        row_has_content = true;
        break;
      case ',':
        row.push_back(std::move(cell));
        cell.clear();
        row_has_content = true;
        break;
      case '\r':
        break;
      case '\n':
        if (row_has_content || !cell.empty()) {
          row.push_back(std::move(cell));
          rows.push_back(std::move(row));
        }
        row.clear();
        cell.clear();
        row_has_content = false;
        ++line;
        break;
      default:
        cell += c;
        row_has_content = true;
    }
  }
  if (quoted) throw ConfigError("csv line " + std::to_string(line), "unterminated quote");
  if (row_has_content || !cell.empty()) {
    row.push_back(std::move(cell));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string scalar_text(const json& v, const std::string& path) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
  if (v.is_number_float()) {
    // nlohmann prints the shortest round-trip form.
    return v.dump();
  }
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  throw ConfigError(path, "expected a scalar value");
}

}  // namespace

std::string_view record_type_name(RecordType type) {
  return kTypeNames[static_cast<std::size_t>(type)];
}

std::optional<RecordType> parse_record_type(std::string_view name) {
  for (std::size_t i = 0; i < kTypeNames.size(); ++i)
    if (kTypeNames[i] == name) return kAllRecordTypes[i];
  return std::nullopt;
}

const FieldMapping* MappingRule::find_field(std::string_view name) const {
  for (const auto& f : fields)
    if (f.name == name) return &f;
  return nullptr;
}

std::string source_iri_for(std::string_view source_id) {
  return "urn:ldq:source:" + std::string(source_id);
}

std::vector<MappingRule> load_mapping(std::string_view config_json) {
  json config;
  try {
    config = json::parse(config_json);
  } catch (const json::parse_error& e) {
    throw ConfigError("mapping", e.what());
  }
  if (!config.is_object()) throw ConfigError("mapping", "expected an object");
  auto rules_it = config.find("rules");
  if (rules_it == config.end() || !rules_it->is_array())
    throw ConfigError("mapping.rules", "expected an array");

  std::vector<MappingRule> rules;
  std::set<RecordType> seen;
  for (std::size_t i = 0; i < rules_it->size(); ++i) {
    const json& rj = (*rules_it)[i];
    std::string path = "mapping.rules[" + std::to_string(i) + "]";
    if (!rj.is_object()) throw ConfigError(path, "expected an object");
    MappingRule rule;
    const std::string& type_name = str(rj, "recordType", path);
    auto type = parse_record_type(type_name);
    if (!type) throw ConfigError(path + ".recordType", "unknown record type " + type_name);
    rule.type = *type;
    if (!seen.insert(rule.type).second) throw DuplicateRecordType(type_name);
    rule.class_iri = str(rj, "classIri", path);
    if (!is_valid_iri(rule.class_iri))
      throw ConfigError(path + ".classIri", "not an absolute IRI");
    rule.subject_template = rj.contains("subjectTemplate")
                                ? str(rj, "subjectTemplate", path)
                                : std::string(kDefaultSubjectTemplate);
    check_template(rule.subject_template, path + ".subjectTemplate");

    auto fields_it = rj.find("fields");
    if (fields_it != rj.end()) {
      if (!fields_it->is_array()) throw ConfigError(path + ".fields", "expected an array");
      std::size_t unit_fields = 0;
      for (std::size_t k = 0; k < fields_it->size(); ++k) {
        const json& fj = (*fields_it)[k];
        std::string fpath = path + ".fields[" + std::to_string(k) + "]";
        if (!fj.is_object()) throw ConfigError(fpath, "expected an object");
        FieldMapping f;
        f.name = str(fj, "name", fpath);
        if (f.name.empty()) throw ConfigError(fpath + ".name", "empty field name");
        if (rule.find_field(f.name))
          throw ConfigError(fpath + ".name", "duplicate field name " + f.name);
        f.predicate = str(fj, "predicate", fpath);
        if (!is_valid_iri(f.predicate))
          throw ConfigError(fpath + ".predicate", "not an absolute IRI");
        f.datatype = fj.contains("datatype") ? str(fj, "datatype", fpath)
                                              : ns::xsd_("string");
        if (f.datatype != kIriDatatype && !is_valid_iri(f.datatype))
          throw ConfigError(fpath + ".datatype", "expected an IRI or \"@id\"");
        if (fj.contains("unit")) {
          f.unit = str(fj, "unit", fpath);
          ++unit_fields;
        }
        rule.fields.push_back(std::move(f));
      }
      if (unit_fields > 1)
        throw ConfigError(path + ".fields",
                          "at most one unit-bearing field per record type");
    }
    rules.push_back(std::move(rule));
  }
  return rules;
}

Graph map_record(const EnergyRecord& record,
                 const std::vector<MappingRule>& rules,
                 const ProvenanceStamp& prov, std::vector<std::string>* skipped) {
  auto rule_it = std::find_if(rules.begin(), rules.end(),
                              [&](const MappingRule& r) { return r.type == record.type; });
  if (rule_it == rules.end())
    throw NoRuleForType(std::string(record_type_name(record.type)));
  const MappingRule& rule = *rule_it;

  std::string subject_text = expand_template(rule.subject_template, record);
  if (!is_valid_iri(subject_text))
    throw TemplateError("subject template yields an invalid IRI: " + subject_text);
  Term subject = Term::iri(subject_text);

  Graph g;
  g.add(subject, Term::iri(ns::rdf_("type")), Term::iri(rule.class_iri));
  for (const auto& field : record.fields) {
    const FieldMapping* m = rule.find_field(field.name);
    if (!m) {
      if (skipped) skipped->push_back(field.name);
      continue;
    }
    Term object = m->datatype == kIriDatatype ? Term::iri(field.value)
                                              : Term::literal(field.value, m->datatype);
    g.add(subject, Term::iri(m->predicate), object);
    std::optional<std::string> unit = field.unit ? field.unit : m->unit;
    if (unit) g.add(subject, Term::iri(vocab::unit()), Term::literal(*unit));
  }
  std::string source =
      prov.source_iri.empty() ? source_iri_for(record.source_id) : prov.source_iri;
  const std::string date_time = ns::xsd_("dateTime");
  g.add(subject, Term::iri(vocab::source()), Term::iri(source));
  g.add(subject, Term::iri(vocab::generated_at()),
        Term::literal(format_utc(prov.generated_at), date_time));
  g.add(subject, Term::iri(vocab::observed_at()),
        Term::literal(format_utc(record.timestamp), date_time));
  return g;
}

Graph map_records(const std::vector<EnergyRecord>& records,
                  const std::vector<MappingRule>& rules,
                  const ProvenanceStamp& prov, IngestReport* report) {
  Graph out;
  std::vector<std::string> skipped;
  for (const auto& record : records) {
    skipped.clear();
    Graph g = map_record(record, rules, prov, &skipped);
    for (const auto& t : g) out.add(t);
    if (report) {
      ++report->records;
      for (const auto& name : skipped)
        ++report->skipped_fields[std::string(record_type_name(record.type)) + "." + name];
    }
  }
  return out;
}

std::vector<EnergyRecord> parse_records_csv(std::string_view text) {
  validate_utf8(text);
  auto rows = read_csv(text);
  if (rows.empty()) return {};
  const auto& header = rows.front();
  auto column = [&](std::string_view name) -> std::size_t {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
      throw ConfigError("csv header", "missing required column " + std::string(name));
    return static_cast<std::size_t>(it - header.begin());
  };
  std::size_t type_col = column("recordType");
  std::size_t source_col = column("sourceId");
  std::size_t time_col = column("timestamp");

  // Field columns and their optional unit columns.
  struct FieldColumn {
    std::size_t index;
    std::optional<std::size_t> unit_index;
  };
  std::vector<FieldColumn> field_columns;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c == type_col || c == source_col || c == time_col) continue;
    const std::string& name = header[c];
    if (name.size() > kUnitSuffix.size() &&
        name.compare(name.size() - kUnitSuffix.size(), kUnitSuffix.size(),
                     kUnitSuffix) == 0)
      continue;
    FieldColumn fc{c, std::nullopt};
    auto unit_it = std::find(header.begin(), header.end(), name + std::string(kUnitSuffix));
    if (unit_it != header.end())
      fc.unit_index = static_cast<std::size_t>(unit_it - header.begin());
    field_columns.push_back(fc);
  }

  std::vector<EnergyRecord> records;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    std::string where = "csv row " + std::to_string(i);
    if (row.size() != header.size())
      throw ConfigError(where, "expected " + std::to_string(header.size()) +
                                   " cells, found " + std::to_string(row.size()));
    EnergyRecord r = make_record(row[type_col], row[source_col], row[time_col], where);
    for (const auto& fc : field_columns) {
      if (row[fc.index].empty()) continue;
      RecordField f{header[fc.index], row[fc.index], std::nullopt};
      if (fc.unit_index && !row[*fc.unit_index].empty()) f.unit = row[*fc.unit_index];
      r.fields.push_back(std::move(f));
    }
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<EnergyRecord> parse_records_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("records", e.what());
  }
  if (!doc.is_array()) throw ConfigError("records", "expected an array");
  std::vector<EnergyRecord> records;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const json& rj = doc[i];
    std::string where = "records[" + std::to_string(i) + "]";
    if (!rj.is_object()) throw ConfigError(where, "expected an object");
    EnergyRecord r = make_record(str(rj, "recordType", where), str(rj, "sourceId", where),
                                 str(rj, "timestamp", where), where);
    for (const auto& [name, value] : rj.items()) {
      if (name == "recordType" || name == "sourceId" || name == "timestamp") continue;
      if (value.is_null()) continue;
      std::string fpath = where + "." + name;
      RecordField f{name, {}, std::nullopt};
      if (value.is_object()) {
        auto v = value.find("value");
        if (v == value.end()) throw ConfigError(fpath, "object field needs \"value\"");
        if (v->is_null()) continue;
        f.value = scalar_text(*v, fpath + ".value");
        if (auto u = value.find("unit"); u != value.end() && !u->is_null())
          f.unit = scalar_text(*u, fpath + ".unit");
      } else {
        f.value = scalar_text(value, fpath);
      }
      r.fields.push_back(std::move(f));
    }
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<EnergyRecord> parse_records(std::string_view text) {
  for (char c : text) {
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') continue;
    if (c == '[') return parse_records_json(text);
    break;
  }
  return parse_records_csv(text);
}

}  // namespace ldq
