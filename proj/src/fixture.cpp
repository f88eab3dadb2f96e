#include "ldq/fixture.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <limits>
#include <random>

#include "ldq/errors.hpp"

namespace ldq {

namespace {

constexpr UnixSeconds kStart = 1709251200;  // 2024-03-01T00:00:00Z
constexpr std::int64_t kHour = 3600;
constexpr std::int64_t kStaleShift = 60 * 86400;
constexpr double kPi = 3.14159265358979323846;

// Distribution code is local so output does not depend on the standard
// library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  std::uint64_t below(std::uint64_t bound) {
    std::uint64_t threshold = (std::numeric_limits<std::uint64_t>::max() - bound + 1) % bound;
    for (;;) {
      std::uint64_t x = gen_();
      if (x >= threshold) return x % bound;
    }
  }
  double unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  double symmetric(double half_width) { return (2 * unit() - 1) * half_width; }

  // k distinct indices of [0, n) in ascending order.
  std::vector<std::size_t> choose(std::size_t n, std::size_t k) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    k = std::min(k, n);
    for (std::size_t i = 0; i < k; ++i) std::swap(idx[i], idx[i + below(n - i)]);
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
    return idx;
  }

 private:
  std::mt19937_64 gen_;
};

std::string fixed(double v, int digits) {
  double scale = std::pow(10.0, digits);
  long long scaled = std::llround(v * scale);
  std::string sign = scaled < 0 ? "-" : "";
  scaled = std::llabs(scaled);
  std::string whole = std::to_string(scaled / static_cast<long long>(scale));
  if (digits == 0) return sign + whole;
  std::string frac = std::to_string(scaled % static_cast<long long>(scale));
  frac.insert(0, digits - frac.size(), '0');
  return sign + whole + "." + frac;
}

const char* kAppliances[] = {"fridge", "hvac", "lighting", "washer", "dishwasher", "boiler"};
const double kApplianceBase[] = {0.4, 1.8, 0.6, 0.9, 0.7, 1.2};
const char* kBuildings[] = {"Maple Court", "Birch House",  "Cedar Hall",
                            "Oak Terrace", "Willow Lodge", "Aspen Row"};
const char* kDwellers[] = {"Ana Silva",  "Ben Okafor", "Chloé Martin", "Dev Patel",
                           "Eli Cohen",  "Fay Wong",   "Gus Berg",     "Hana Sato"};
constexpr int kMeters = 4;

int sources_of(RecordType type) { return type == RecordType::Consumption ? kMeters : 1; }

bool is_series(RecordType type) {
  return type != RecordType::BuildingInfo && type != RecordType::Dweller;
}

double daily(int hour, double phase_hour) {
  return std::sin(2 * kPi * (hour - phase_hour) / 24.0);
}

EnergyRecord make_record(RecordType type, int index, Rng& rng) {
  EnergyRecord r;
  r.type = type;
  int source = index % sources_of(type);
  int hour = index / sources_of(type);
  r.timestamp = kStart + hour * kHour;
  auto field = [&](std::string name, std::string value,
                   std::optional<std::string> unit = std::nullopt) {
    r.fields.push_back({std::move(name), std::move(value), std::move(unit)});
  };
  switch (type) {
    case RecordType::Consumption: {
      int m = source % 6;
      double base = kApplianceBase[m];
      double v = base + 0.01 * (m + 1) * hour + 0.3 * base * daily(hour, 6) +
                 rng.symmetric(0.02);
      r.source_id = "meter-" + std::to_string(source + 1);
      field("energy", fixed(std::max(v, 0.01), 3), "kWh");
      field("appliance", kAppliances[m]);
      field("building", "urn:building:b1");
      break;
    }
    case RecordType::Generation: {
      int h = hour % 24;
      double v = (h >= 6 && h <= 18) ? 3.0 * std::sin(kPi * (h - 6) / 12.0) : 0.0;
      r.source_id = "pv-1";
      field("generated", fixed(std::max(0.0, v + (v > 0 ? rng.symmetric(0.05) : 0)), 3), "kWh");
      field("generatorType", "solar-pv");
      break;
    }
    case RecordType::BuildingInfo: {
      int k = index % 6;
      r.timestamp = kStart;
      r.source_id = "registry-b" + std::to_string(index + 1);
      field("name", kBuildings[k]);
      field("floorArea", fixed(1200 + 350 * index, 1));
      field("yearBuilt", std::to_string(1965 + 9 * index));
      field("homepage", "http://buildings.example.org/b" + std::to_string(index + 1));
      break;
    }
    case RecordType::Occupancy: {
      int h = hour % 24;
      double v = (h >= 8 && h <= 18) ? 30 + 8 * std::sin(kPi * (h - 8) / 10.0) : 4;
      r.source_id = "occupancy-b1";
      field("occupants", std::to_string(std::llround(v + rng.symmetric(2))));
      break;
    }
    case RecordType::Dweller: {
      r.timestamp = kStart;
      r.source_id = "household-p" + std::to_string(index + 1);
      field("name", kDwellers[index % 8]);
      field("age", std::to_string(8 + (index * 17 + static_cast<int>(rng.below(9))) % 75));
      break;
    }
    case RecordType::Weather: {
      r.source_id = "station-1";
      field("temperature", fixed(8 + 6 * daily(hour, 9) + rng.symmetric(0.3), 2), "°C");
      field("humidity", fixed(60 - 15 * daily(hour, 9) + rng.symmetric(1), 1));
      break;
    }
    case RecordType::Environment: {
      r.source_id = "sensor-b1";
      int h = hour % 24;
      double co2 = 430 + ((h >= 8 && h <= 18) ? 350 : 40) + rng.symmetric(15);
      field("co2", fixed(co2, 0));
      field("indoorTemperature", fixed(21 + 0.8 * daily(hour, 12) + rng.symmetric(0.1), 2), "°C");
      break;
    }
  }
  return r;
}

RecordField* find_field(EnergyRecord& r, std::string_view name) {
  for (auto& f : r.fields)
    if (f.name == name) return &f;
  return nullptr;
}

// Fields MissingObject may blank: the non-numeric mapped ones.
const std::map<RecordType, std::vector<std::string>>& blankable() {
  static const std::map<RecordType, std::vector<std::string>> fields = {
      {RecordType::Consumption, {"appliance", "building"}},
      {RecordType::Generation, {"generatorType"}},
      {RecordType::BuildingInfo, {"name", "homepage"}},
      {RecordType::Dweller, {"name"}}};
  return fields;
}

std::size_t scaled_count(const Rational& rate, std::size_t n) {
  return round_half_even(rate * Rational(n)).get_ui();
}

std::string name_variant(const std::string& name) {
  std::string out;
  for (char c : name) {
    if (c == ' ')
      out += '-';
    else
      out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

}  // namespace

std::string_view defect_kind_name(DefectKind kind) {
  switch (kind) {
    case DefectKind::MissingObject: return "MissingObject";
    case DefectKind::Duplicate: return "Duplicate";
    case DefectKind::WrongUnit: return "WrongUnit";
    case DefectKind::NameVariant: return "NameVariant";
    case DefectKind::StaleTimestamp: return "StaleTimestamp";
    case DefectKind::Outlier: return "Outlier";
  }
  return "";
}

std::optional<DefectKind> parse_defect_kind(std::string_view name) {
  for (auto k : {DefectKind::MissingObject, DefectKind::Duplicate, DefectKind::WrongUnit,
                 DefectKind::NameVariant, DefectKind::StaleTimestamp, DefectKind::Outlier})
    if (defect_kind_name(k) == name) return k;
  return std::nullopt;
}

FixtureCounts FixtureCounts::for_hours(int hours) {
  FixtureCounts c;
  for (auto& [type, n] : c.records)
    if (is_series(type)) n = hours * sources_of(type);
  return c;
}

const InjectedDefect* FixtureManifest::find(DefectKind kind) const {
  for (const auto& d : defects)
    if (d.kind == kind) return &d;
  return nullptr;
}

std::string default_subject(const EnergyRecord& record) {
  return "urn:ldq:" + std::string(record_type_name(record.type)) + ":" + record.source_id +
         ":" + format_utc(record.timestamp);
}

Fixture generate_fixture(std::uint64_t seed, const FixtureCounts& counts,
                         const DefectRates& rates) {
  for (const auto& [kind, rate] : rates.rates)
    if (rate < 0 || rate > 1)
      throw ConfigError("defectRates." + std::string(defect_kind_name(kind)),
                        "rate must lie in [0, 1]");

  Fixture fx;
  Rng rng(seed);
  auto& records = fx.records;
  UnixSeconds last = kStart;
  for (RecordType type : kAllRecordTypes) {
    auto it = counts.records.find(type);
    int n = it == counts.records.end() ? 0 : it->second;
    for (int i = 0; i < n; ++i) {
      records.push_back(make_record(type, i, rng));
      last = std::max(last, records.back().timestamp);
    }
  }

  auto& m = fx.manifest;
  m.seed = seed;
  m.start = kStart;
  m.reference_now = last + kHour;
  for (const auto& [type, n] : counts.records) m.counts[type] = n;
  m.planted_patterns.push_back("every Consumption record has building urn:building:b1");

  auto rate_of = [&](DefectKind k) -> std::optional<Rational> {
    auto it = rates.rates.find(k);
    if (it == rates.rates.end()) return std::nullopt;
    return it->second;
  };
  std::set<std::size_t> touched;
  auto pick_records = [&](DefectKind kind, auto eligible) {
    InjectedDefect d{kind, *rate_of(kind), 0, {}};
    std::vector<std::size_t> pool;
    for (std::size_t i = 0; i < records.size(); ++i)
      if (!touched.count(i) && eligible(records[i])) pool.push_back(i);
    d.candidates = pool.size();
    std::vector<std::size_t> chosen;
    for (std::size_t c : rng.choose(pool.size(), scaled_count(d.rate, pool.size())))
      chosen.push_back(pool[c]);
    touched.insert(chosen.begin(), chosen.end());
    return std::make_pair(d, chosen);
  };

  if (auto rate = rate_of(DefectKind::MissingObject)) {
    InjectedDefect d{DefectKind::MissingObject, *rate, 0, {}};
    std::vector<std::pair<std::size_t, std::string>> slots;
    for (std::size_t i = 0; i < records.size(); ++i) {
      auto it = blankable().find(records[i].type);
      if (it == blankable().end()) continue;
      for (const auto& f : it->second) {
        std::string key = std::string(record_type_name(records[i].type)) + "." + f;
        if (!rates.missing_fields.empty() && !rates.missing_fields.count(key)) continue;
        if (find_field(records[i], f)) slots.emplace_back(i, f);
      }
    }
    d.candidates = slots.size();
    for (std::size_t c : rng.choose(slots.size(), scaled_count(*rate, slots.size()))) {
      auto& r = records[slots[c].first];
      const std::string& f = slots[c].second;
      GroundTruthEntry e;
      e.subject = default_subject(r);
      e.field = f;
      e.original = find_field(r, f)->value;
      e.recoverable = r.type == RecordType::Consumption && f == "building";
      r.fields.erase(std::remove_if(r.fields.begin(), r.fields.end(),
                                    [&](const RecordField& x) { return x.name == f; }),
                     r.fields.end());
      d.ground_truth.push_back(std::move(e));
    }
    m.defects.push_back(std::move(d));
  }

  if (rate_of(DefectKind::WrongUnit)) {
    auto [d, chosen] = pick_records(DefectKind::WrongUnit, [](const EnergyRecord& r) {
      return r.type == RecordType::Consumption || r.type == RecordType::Generation;
    });
    for (std::size_t i : chosen) {
      auto& r = records[i];
      RecordField* f = find_field(r, r.type == RecordType::Consumption ? "energy" : "generated");
      if (!f) continue;
      d.ground_truth.push_back({default_subject(r), f->name, f->unit.value_or(""), "kW", false, ""});
      f->unit = "kW";
    }
    m.defects.push_back(std::move(d));
  }

  if (rate_of(DefectKind::Outlier)) {
    auto [d, chosen] = pick_records(DefectKind::Outlier, [](const EnergyRecord& r) {
      return r.type == RecordType::Consumption;
    });
    for (std::size_t i : chosen) {
      auto& r = records[i];
      RecordField* f = find_field(r, "energy");
      if (!f) continue;
      auto v = parse_decimal(f->value);
      std::string injected = format_decimal(*v * 100);
      d.ground_truth.push_back({default_subject(r), "energy", f->value, injected, false, ""});
      f->value = injected;
    }
    m.defects.push_back(std::move(d));
  }

  if (rate_of(DefectKind::NameVariant)) {
    auto [d, chosen] = pick_records(DefectKind::NameVariant, [](const EnergyRecord& r) {
      return r.type == RecordType::BuildingInfo;
    });
    for (std::size_t i : chosen) {
      EnergyRecord variant = records[i];
      RecordField* name = find_field(variant, "name");
      if (!name) continue;
      variant.source_id = "alias-" + variant.source_id;
      std::string original = name->value;
      name->value = name_variant(original);
      d.ground_truth.push_back(
          {default_subject(variant), "name", original, name->value, false, default_subject(records[i])});
      touched.insert(records.size());
      records.push_back(std::move(variant));
    }
    m.defects.push_back(std::move(d));
  }

  if (rate_of(DefectKind::StaleTimestamp)) {
    auto [d, chosen] = pick_records(DefectKind::StaleTimestamp, [](const EnergyRecord& r) {
      return !is_series(r.type);
    });
    for (std::size_t i : chosen) {
      auto& r = records[i];
      std::string before = format_utc(r.timestamp);
      r.timestamp -= kStaleShift;
      d.ground_truth.push_back({default_subject(r), "timestamp", before, format_utc(r.timestamp),
                                false, ""});
    }
    m.defects.push_back(std::move(d));
  }

  if (auto rate = rate_of(DefectKind::Duplicate)) {
    InjectedDefect d{DefectKind::Duplicate, *rate, records.size(), {}};
    std::vector<EnergyRecord> copies;
    for (std::size_t i : rng.choose(records.size(), scaled_count(*rate, records.size()))) {
      d.ground_truth.push_back({default_subject(records[i]), "", "", "", false, ""});
      copies.push_back(records[i]);
    }
    records.insert(records.end(), copies.begin(), copies.end());
    m.defects.push_back(std::move(d));
  }

  nlohmann::ordered_json probe = nlohmann::ordered_json::object();
  std::set<std::string> homepages;
  for (const auto& r : records)
    for (const auto& f : r.fields)
      if (f.name == "homepage") homepages.insert(f.value);
  for (const auto& h : homepages) probe[h] = {{"status", 200}, {"latencyMs", 20}};
  fx.probe_json = probe.dump(2) + "\n";
  return fx;
}

namespace {

std::string csv_cell(const std::string& v) {
  if (v.find_first_of(",\"\r\n") == std::string::npos) return v;
  std::string out = "\"";
  for (char c : v) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string records_to_csv(const std::vector<EnergyRecord>& records) {
  std::vector<std::string> columns;
  std::set<std::string> seen;
  auto add = [&](const std::string& c) {
    if (seen.insert(c).second) columns.push_back(c);
  };
  for (const auto& r : records)
    for (const auto& f : r.fields) add(f.name);
  std::sort(columns.begin(), columns.end());
  std::vector<std::string> unit_columns;
  for (const auto& c : columns) {
    for (const auto& r : records) {
      bool has_unit = false;
      for (const auto& f : r.fields) has_unit = has_unit || (f.name == c && f.unit);
      if (has_unit) {
        unit_columns.push_back(c);
        break;
      }
    }
  }

  std::string out = "recordType,sourceId,timestamp";
  for (const auto& c : columns) {
    out += "," + c;
    if (std::find(unit_columns.begin(), unit_columns.end(), c) != unit_columns.end())
      out += "," + c + "@unit";
  }
  out += "\n";
  for (const auto& r : records) {
    out += std::string(record_type_name(r.type)) + "," + csv_cell(r.source_id) + "," +
           format_utc(r.timestamp);
    for (const auto& c : columns) {
      const RecordField* f = nullptr;
      for (const auto& x : r.fields)
        if (x.name == c) f = &x;
      out += "," + (f ? csv_cell(f->value) : std::string());
      if (std::find(unit_columns.begin(), unit_columns.end(), c) != unit_columns.end())
        out += "," + (f && f->unit ? csv_cell(*f->unit) : std::string());
    }
    out += "\n";
  }
  return out;
}

std::string manifest_to_json(const FixtureManifest& m) {
  using json = nlohmann::ordered_json;
  json counts = json::object();
  for (const auto& [type, n] : m.counts) counts[std::string(record_type_name(type))] = n;
  json defects = json::array();
  for (const auto& d : m.defects) {
    json truth = json::array();
    for (const auto& e : d.ground_truth) {
      json entry{{"subject", e.subject}};
      if (!e.field.empty()) entry["field"] = e.field;
      if (!e.original.empty()) entry["original"] = e.original;
      if (!e.injected.empty()) entry["injected"] = e.injected;
      if (d.kind == DefectKind::MissingObject) entry["recoverable"] = e.recoverable;
      if (!e.counterpart.empty()) entry["counterpart"] = e.counterpart;
      truth.push_back(std::move(entry));
    }
    defects.push_back({{"kind", defect_kind_name(d.kind)},
                       {"rate", format_decimal(d.rate)},
                       {"candidates", d.candidates},
                       {"count", d.ground_truth.size()},
                       {"groundTruth", truth}});
  }
  json out{{"seed", m.seed},
           {"start", format_utc(m.start)},
           {"referenceNow", format_utc(m.reference_now)},
           {"counts", counts},
           {"plantedPatterns", m.planted_patterns},
           {"injectedDefects", defects}};
  return out.dump(2) + "\n";
}

}  // namespace ldq
