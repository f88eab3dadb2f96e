#include "ldq/vocab.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <json.hpp>
#include <set>

#include "ldq/errors.hpp"

namespace ldq {

using nlohmann::json;

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Categories and metrics

std::string category_iri(DimensionCategory category) {
  switch (category) {
    case DimensionCategory::Accessibility:
      return ns::eldv_("accessibility");
    case DimensionCategory::Intrinsic:
      return ns::eldv_("consistency");
    case DimensionCategory::RdfLevel:
      return ns::eldv_("RDFLevel");
    case DimensionCategory::TaskDependent:
      return ns::eldv_("tasksDependent");
  }
  return {};
}

std::string_view category_name(DimensionCategory category) {
  switch (category) {
    case DimensionCategory::Accessibility:
      return "accessibility";
    case DimensionCategory::Intrinsic:
      return "intrinsic";
    case DimensionCategory::RdfLevel:
      return "rdfLevel";
    case DimensionCategory::TaskDependent:
      return "taskDependent";
  }
  return {};
}

std::optional<DimensionCategory> parse_category(std::string_view text) {
  std::string key = lower(text);
  if (key == "accessibility") return DimensionCategory::Accessibility;
  if (key == "intrinsic" || key == "consistency")
    return DimensionCategory::Intrinsic;
  if (key == "rdflevel") return DimensionCategory::RdfLevel;
  if (key == "taskdependent" || key == "tasksdependent")
    return DimensionCategory::TaskDependent;
  return std::nullopt;
}

std::optional<DimensionCategory> builtin_metric_category(std::string_view id) {
  static const std::map<std::string_view, DimensionCategory> table = {
      {metric::availability, DimensionCategory::Accessibility},
      {metric::interlinking, DimensionCategory::Accessibility},
      {metric::performance, DimensionCategory::Accessibility},
      {metric::completeness, DimensionCategory::Intrinsic},
      {metric::consistency, DimensionCategory::Intrinsic},
      {metric::semantic_accuracy, DimensionCategory::Intrinsic},
      {metric::interpretability, DimensionCategory::RdfLevel},
      {metric::interoperability, DimensionCategory::RdfLevel},
      {metric::compactness, DimensionCategory::RdfLevel},
      {metric::provenance, DimensionCategory::TaskDependent},
      {metric::freshness, DimensionCategory::TaskDependent},
      {metric::usability, DimensionCategory::TaskDependent},
  };
  auto it = table.find(id);
  if (it == table.end()) return std::nullopt;
  return it->second;
}

std::string metric_iri(std::string_view id) {
  return ns::eldv_(std::string(id) + "Metric");
}

namespace method {
std::string association_rule_mining() {
  return ns::eldv_("associationRuleMining");
}
std::string clustering_data_interlinking() {
  return ns::eldv_("clusteringDataInterlinking");
}
std::string support_vector_regression() {
  return ns::eldv_("supportVectorRegression");
}
std::string etl() { return ns::eldv_("etl"); }
}  // namespace method

namespace vocab {
std::string unit() { return ns::eldv_("unit"); }
std::string source() { return ns::eldv_("source"); }
std::string generated_at() { return ns::eldv_("generatedAt"); }
std::string observed_at() { return ns::eldv_("observedAt"); }
std::string original_observed_at() { return ns::eldv_("originalObservedAt"); }
std::string imputed_by() { return ns::eldv_("imputedBy"); }
std::string flagged_outlier() { return ns::eldv_("flaggedOutlier"); }
}  // namespace vocab

Rational MetricDefinition::number(const std::string& name,
                                  const Rational& fallback) const {
  auto it = params.find(name);
  if (it == params.end()) return fallback;
  if (const auto* value = std::get_if<Rational>(&it->second)) return *value;
  throw ConfigError("metrics." + id + ".params." + name, "expected a number");
}

std::string MetricDefinition::text(const std::string& name,
                                   const std::string& fallback) const {
  auto it = params.find(name);
  if (it == params.end()) return fallback;
  if (const auto* value = std::get_if<std::string>(&it->second)) return *value;
  throw ConfigError("metrics." + id + ".params." + name, "expected a string");
}

const MetricDefinition* QualityPolicy::find_metric(std::string_view id) const {
  for (const auto& m : metrics)
    if (m.id == id) return &m;
  return nullptr;
}

// ---------------------------------------------------------------------------
// Units

std::string_view unit_dimension_name(UnitDimension d) {
  switch (d) {
    case UnitDimension::Energy:
      return "Energy";
    case UnitDimension::Power:
      return "Power";
    case UnitDimension::Temperature:
      return "Temperature";
    case UnitDimension::Time:
      return "Time";
    case UnitDimension::Dimensionless:
      return "Dimensionless";
  }
  return {};
}

std::optional<UnitDimension> parse_unit_dimension(std::string_view text) {
  std::string key = lower(text);
  if (key == "energy") return UnitDimension::Energy;
  if (key == "power") return UnitDimension::Power;
  if (key == "temperature") return UnitDimension::Temperature;
  if (key == "time") return UnitDimension::Time;
  if (key == "dimensionless") return UnitDimension::Dimensionless;
  return std::nullopt;
}

const UnitTable& UnitTable::builtin() {
  static const UnitTable table = [] {
    UnitTable t;
    using D = UnitDimension;
    t.entries_ = {
        {"J", D::Energy, 1, 0},
        {"Wh", D::Energy, 3600, 0},
        {"kWh", D::Energy, 3600000, 0},
        {"MJ", D::Energy, 1000000, 0},
        {"W", D::Power, 1, 0},
        {"kW", D::Power, 1000, 0},
        {"K", D::Temperature, 1, 0},
        {"\xC2\xB0"
         "C",
         D::Temperature, 1, ratio(27315, 100)},
        // (F - 32) * 5/9 + 273.15 = F * 5/9 + 45967/180
        {"\xC2\xB0"
         "F",
         D::Temperature, ratio(5, 9), ratio(45967, 180)},
        {"s", D::Time, 1, 0},
        {"min", D::Time, 60, 0},
        {"h", D::Time, 3600, 0},
    };
    return t;
  }();
  return table;
}

const UnitEntry* UnitTable::find(std::string_view symbol) const {
  for (const auto& e : entries_)
    if (e.symbol == symbol) return &e;
  return nullptr;
}

const UnitEntry* UnitTable::canonical(UnitDimension dimension) const {
  for (const auto& e : entries_)
    if (e.dimension == dimension && e.factor == 1 && e.offset == 0) return &e;
  return nullptr;
}

Rational convert_unit(const Rational& value, const UnitEntry& from,
                      UnitDimension target) {
  if (from.dimension != target)
    throw DimensionMismatch("cannot convert " + from.symbol + " (" +
                            std::string(unit_dimension_name(from.dimension)) +
                            ") to " +
                            std::string(unit_dimension_name(target)));
  Rational out = value * from.factor + from.offset;
  out.canonicalize();
  return out;
}

Rational from_canonical(const Rational& canonical_value, const UnitEntry& to) {
  Rational out = (canonical_value - to.offset) / to.factor;
  out.canonicalize();
  return out;
}

// ---------------------------------------------------------------------------
// Policy loading

namespace {

Rational json_number(const json& value, const std::string& path) {
  if (value.is_number_integer()) {
    return Rational(BigInt(value.dump()));
  }
  if (value.is_number_float()) {
    // Shortest round-trip text keeps 0.9 as 9/10 instead of its binary value.
    char buffer[64];
    double d = value.get<double>();
    auto result = std::to_chars(buffer, buffer + sizeof buffer, d);
    auto parsed = parse_decimal(std::string_view(buffer, result.ptr - buffer));
    if (!parsed) throw ConfigError(path, "not a finite number");
    return *parsed;
  }
  if (value.is_string()) {
    auto parsed = parse_decimal(value.get<std::string>());
    if (parsed) return *parsed;
  }
  throw ConfigError(path, "expected a number");
}

std::string json_string(const json& value, const std::string& path) {
  if (!value.is_string()) throw ConfigError(path, "expected a string");
  return value.get<std::string>();
}

std::string json_iri(const json& value, const std::string& path) {
  std::string iri = json_string(value, path);
  if (!is_valid_iri(iri)) throw ConfigError(path, "not an absolute IRI: " + iri);
  return iri;
}

const json& require(const json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end())
    throw ConfigError(path + "." + key, "missing required key");
  return *it;
}

json parse_json(std::string_view text, const std::string& path) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(path, e.what());
  }
}

Rational checked_threshold(const json& value, const std::string& path) {
  Rational t = json_number(value, path);
  if (t < 0 || t > 1) throw ThresholdOutOfRange(path, t.get_d());
  return t;
}

bool valid_metric_id(const std::string& id) {
  return !id.empty() && std::all_of(id.begin(), id.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '-';
  });
}

MetricDefinition parse_metric(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  MetricDefinition m;
  m.id = json_string(require(j, "id", path), path + ".id");
  if (!valid_metric_id(m.id))
    throw ConfigError(path + ".id", "metric ids are [A-Za-z0-9_-]+");
  if (auto it = j.find("category"); it != j.end()) {
    auto category = parse_category(json_string(*it, path + ".category"));
    if (!category) throw ConfigError(path + ".category", "unknown category");
    m.category = *category;
  } else if (auto builtin = builtin_metric_category(m.id)) {
    m.category = *builtin;
  } else {
    throw ConfigError(path + ".category", "custom metrics need a category");
  }
  if (auto it = j.find("weight"); it != j.end()) {
    m.weight = json_number(*it, path + ".weight");
    if (m.weight < 0) throw ConfigError(path + ".weight", "negative weight");
  }
  if (auto it = j.find("params"); it != j.end()) {
    if (!it->is_object()) throw ConfigError(path + ".params", "expected an object");
    for (const auto& [name, value] : it->items()) {
      std::string param_path = path + ".params." + name;
      if (value.is_number()) {
        m.params[name] = json_number(value, param_path);
      } else if (value.is_string()) {
        m.params[name] = value.get<std::string>();
      } else if (value.is_boolean()) {
        m.params[name] = std::string(value.get<bool>() ? "true" : "false");
      } else {
        throw ConfigError(param_path, "params are numbers or strings");
      }
    }
  }
  return m;
}

ShapeRequirement parse_shape(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  ShapeRequirement shape;
  shape.class_iri = json_iri(require(j, "class", path), path + ".class");
  const json& props = require(j, "properties", path);
  if (!props.is_array() || props.empty())
    throw ConfigError(path + ".properties", "expected a nonempty array");
  for (std::size_t i = 0; i < props.size(); ++i) {
    std::string p_path = path + ".properties[" + std::to_string(i) + "]";
    const json& pj = props[i];
    if (!pj.is_object()) throw ConfigError(p_path, "expected an object");
    PropertyRequirement prop;
    prop.predicate =
        json_iri(require(pj, "predicate", p_path), p_path + ".predicate");
    prop.datatype = ns::xsd_("string");
    if (auto it = pj.find("datatype"); it != pj.end()) {
      std::string dt = json_string(*it, p_path + ".datatype");
      if (dt != kIriDatatype && !is_valid_iri(dt))
        throw ConfigError(p_path + ".datatype", "expected an IRI or \"@id\"");
      prop.datatype = dt;
    }
    if (auto it = pj.find("unitDimension"); it != pj.end()) {
      auto dim = parse_unit_dimension(json_string(*it, p_path + ".unitDimension"));
      if (!dim) throw ConfigError(p_path + ".unitDimension", "unknown dimension");
      prop.unit_dimension = *dim;
    }
    if (auto it = pj.find("functional"); it != pj.end()) {
      if (!it->is_boolean())
        throw ConfigError(p_path + ".functional", "expected a boolean");
      prop.functional = it->get<bool>();
    }
    if (auto it = pj.find("range"); it != pj.end()) {
      if (!it->is_array() || it->size() != 2)
        throw ConfigError(p_path + ".range", "expected [min, max]");
      Rational lo = json_number((*it)[0], p_path + ".range[0]");
      Rational hi = json_number((*it)[1], p_path + ".range[1]");
      if (lo > hi) throw ConfigError(p_path + ".range", "min exceeds max");
      prop.range = std::pair{lo, hi};
    }
    shape.properties.push_back(std::move(prop));
  }
  return shape;
}

std::vector<std::string> parse_iri_list(const json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path, "expected an array");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(json_string(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

void parse_improvement(const json& j, ImprovementParams& params) {
  const std::string path = "rules.improvement";
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  auto probability = [&](const char* key, Rational& out, bool allow_zero) {
    if (auto it = j.find(key); it != j.end()) {
      out = json_number(*it, path + "." + key);
      if (out > 1 || out < 0 || (!allow_zero && out == 0))
        throw ConfigError(path + "." + key, "outside (0,1]");
    }
  };
  probability("minSupport", params.min_support, false);
  probability("minConfidence", params.min_confidence, false);
  probability("tau", params.tau, false);
  if (auto it = j.find("gridSeconds"); it != j.end()) {
    if (!it->is_number_integer() || it->get<std::int64_t>() <= 0)
      throw ConfigError(path + ".gridSeconds", "expected a positive integer");
    params.grid_seconds = it->get<std::int64_t>();
  }
  if (auto it = j.find("labelPredicate"); it != j.end())
    params.label_predicate = json_iri(*it, path + ".labelPredicate");
  if (auto it = j.find("svr"); it != j.end()) {
    const json& svr = *it;
    auto positive = [&](const char* key, double& out, bool allow_zero) {
      if (auto f = svr.find(key); f != svr.end()) {
        if (!f->is_number()) throw ConfigError(path + ".svr." + key, "expected a number");
        out = f->get<double>();
        if (out < 0 || (!allow_zero && out == 0))
          throw ConfigError(path + ".svr." + key, "out of range");
      }
    };
    positive("epsilon", params.svr.epsilon, false);
    positive("lambda", params.svr.lambda, true);
    positive("eta0", params.svr.eta0, false);
    if (auto f = svr.find("iterations"); f != svr.end()) {
      if (!f->is_number_integer() || f->get<int>() <= 0)
        throw ConfigError(path + ".svr.iterations", "expected a positive integer");
      params.svr.iterations = f->get<int>();
    }
  }
}

}  // namespace

QualityPolicy load_policy(std::string_view assessment_json,
                          std::string_view business_rules_json) {
  json assessment = parse_json(assessment_json, "assessment");
  json rules = parse_json(business_rules_json, "rules");
  if (!assessment.is_object()) throw ConfigError("assessment", "expected an object");
  if (!rules.is_object()) throw ConfigError("rules", "expected an object");

  QualityPolicy policy;
  if (auto it = assessment.find("taskId"); it != assessment.end())
    policy.task_id = json_string(*it, "assessment.taskId");
  if (auto it = rules.find("taskId"); it != rules.end())
    policy.task_id = json_string(*it, "rules.taskId");

  const json& metrics = require(assessment, "metrics", "assessment");
  if (!metrics.is_array()) throw ConfigError("assessment.metrics", "expected an array");
  std::set<std::string> ids;
  for (std::size_t i = 0; i < metrics.size(); ++i) {
    MetricDefinition m =
        parse_metric(metrics[i], "assessment.metrics[" + std::to_string(i) + "]");
    if (!ids.insert(m.id).second)
      throw ConfigError("assessment.metrics[" + std::to_string(i) + "].id",
                        "duplicate metric id " + m.id);
    policy.metrics.push_back(std::move(m));
  }
  if (auto it = assessment.find("shapes"); it != assessment.end()) {
    if (!it->is_array()) throw ConfigError("assessment.shapes", "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i)
      policy.shapes.push_back(
          parse_shape((*it)[i], "assessment.shapes[" + std::to_string(i) + "]"));
  }

  if (auto it = rules.find("thresholds"); it != rules.end()) {
    if (!it->is_object()) throw ConfigError("rules.thresholds", "expected an object");
    for (const auto& [id, value] : it->items()) {
      std::string path = "rules.thresholds." + id;
      Rational t = checked_threshold(value, path);
      if (!ids.count(id)) throw UnknownMetricReference(path, id);
      policy.thresholds[id] = t;
    }
  }
  if (auto it = rules.find("categoryThresholds"); it != rules.end()) {
    if (!it->is_object())
      throw ConfigError("rules.categoryThresholds", "expected an object");
    for (const auto& [name, value] : it->items()) {
      std::string path = "rules.categoryThresholds." + name;
      auto category = parse_category(name);
      if (!category) throw ConfigError(path, "unknown category");
      policy.category_thresholds[*category] = checked_threshold(value, path);
    }
  }
  if (auto it = rules.find("categoryWeights"); it != rules.end()) {
    if (!it->is_object())
      throw ConfigError("rules.categoryWeights", "expected an object");
    for (const auto& [name, value] : it->items()) {
      std::string path = "rules.categoryWeights." + name;
      auto category = parse_category(name);
      if (!category) throw ConfigError(path, "unknown category");
      Rational w = json_number(value, path);
      if (w < 0) throw ConfigError(path, "negative weight");
      policy.category_weights[category_index(*category)] = w;
    }
    if (std::all_of(policy.category_weights.begin(), policy.category_weights.end(),
                    [](const Rational& w) { return w == 0; }))
      throw ConfigError("rules.categoryWeights", "all category weights are zero");
  }
  if (auto it = rules.find("maxAgeSeconds"); it != rules.end()) {
    if (!it->is_number_integer() || it->get<std::int64_t>() <= 0)
      throw ConfigError("rules.maxAgeSeconds", "expected a positive integer");
    policy.max_age_seconds = it->get<std::int64_t>();
  }
  if (auto it = rules.find("maxRounds"); it != rules.end()) {
    if (!it->is_number_integer() || it->get<int>() <= 0)
      throw ConfigError("rules.maxRounds", "expected a positive integer");
    policy.max_rounds = it->get<int>();
  }
  if (auto it = rules.find("standardNamespaces"); it != rules.end())
    policy.standard_namespaces = parse_iri_list(*it, "rules.standardNamespaces");
  if (policy.standard_namespaces.empty())
    policy.standard_namespaces = {std::string(ns::rdf), std::string(ns::rdfs),
                                  std::string(ns::xsd), std::string(ns::owl),
                                  std::string(ns::dqv), std::string(ns::eldv)};
  if (auto it = rules.find("linkingPredicates"); it != rules.end()) {
    policy.linking_predicates = parse_iri_list(*it, "rules.linkingPredicates");
    for (std::size_t i = 0; i < policy.linking_predicates.size(); ++i)
      if (!is_valid_iri(policy.linking_predicates[i]))
        throw ConfigError("rules.linkingPredicates[" + std::to_string(i) + "]",
                          "not an absolute IRI");
  }
  if (policy.linking_predicates.empty())
    policy.linking_predicates = {ns::owl_("sameAs"), ns::rdfs_("seeAlso")};
  if (auto it = rules.find("usabilityWeights"); it != rules.end()) {
    if (!it->is_object())
      throw ConfigError("rules.usabilityWeights", "expected an object");
    for (const auto& [id, value] : it->items()) {
      std::string path = "rules.usabilityWeights." + id;
      Rational w = json_number(value, path);
      if (w < 0) throw ConfigError(path, "negative weight");
      if (!ids.count(id)) throw UnknownMetricReference(path, id);
      policy.usability_weights[id] = w;
    }
  }
  if (auto it = rules.find("improvement"); it != rules.end())
    parse_improvement(*it, policy.improvement);
  return policy;
}

// ---------------------------------------------------------------------------
// Vocabulary

const std::string& builtin_vocab_turtle() {
  static const std::string text = R"TTL(@prefix rdf: <http://www.w3.org/1999/02/22-rdf-syntax-ns#> .
@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .
@prefix dqv: <http://www.w3.org/ns/dqv#> .
@prefix eldv: <urn:eldv#> .

# Dimension sets
eldv:accessibility a dqv:Dimension ;
    rdfs:label "accessibility" .
eldv:consistency a dqv:Dimension ;
    rdfs:label "intrinsic (consistency)" .
eldv:RDFLevel a dqv:Dimension ;
    rdfs:label "RDF level or data model level" .
eldv:tasksDependent a dqv:Dimension ;
    rdfs:label "tasks dependent" .

# Metrics
eldv:availabilityMetric a dqv:Metric ; dqv:inDimension eldv:accessibility .
eldv:interlinkingMetric a dqv:Metric ; dqv:inDimension eldv:accessibility .
eldv:performanceMetric a dqv:Metric ; dqv:inDimension eldv:accessibility .
eldv:completenessMetric a dqv:Metric ; dqv:inDimension eldv:consistency .
eldv:consistencyMetric a dqv:Metric ; dqv:inDimension eldv:consistency .
eldv:semanticAccuracyMetric a dqv:Metric ; dqv:inDimension eldv:consistency .
eldv:interpretabilityMetric a dqv:Metric ; dqv:inDimension eldv:RDFLevel .
eldv:interoperabilityMetric a dqv:Metric ; dqv:inDimension eldv:RDFLevel .
eldv:compactnessMetric a dqv:Metric ; dqv:inDimension eldv:RDFLevel .
eldv:provenanceMetric a dqv:Metric ; dqv:inDimension eldv:tasksDependent .
eldv:freshnessMetric a dqv:Metric ; dqv:inDimension eldv:tasksDependent .
eldv:usabilityMetric a dqv:Metric ; dqv:inDimension eldv:tasksDependent .

# Improvement methods
eldv:ImprovementMethod a rdfs:Class .
eldv:clusteringDataInterlinking a eldv:ImprovementMethod ;
    rdfs:label "clustering data interlinking" .
eldv:supportVectorRegression a eldv:ImprovementMethod ;
    rdfs:label "support vector regression" .
eldv:associationRuleMining a eldv:ImprovementMethod ;
    rdfs:label "association rule mining" .
eldv:etl a eldv:ImprovementMethod ;
    rdfs:label "extract, transform and load" .

# Precision of an improvement
eldv:PrecisionRecord a rdfs:Class .
eldv:precision a rdf:Property ;
    rdfs:subPropertyOf dqv:precision ;
    rdfs:domain eldv:PrecisionRecord .
eldv:improvedBy a rdf:Property ; rdfs:range eldv:ImprovementMethod .
eldv:valueBefore a rdf:Property ; rdfs:domain eldv:PrecisionRecord .
eldv:valueAfter a rdf:Property ; rdfs:domain eldv:PrecisionRecord .

# Annotation properties used on data
eldv:unit a rdf:Property .
eldv:source a rdf:Property .
eldv:generatedAt a rdf:Property .
eldv:observedAt a rdf:Property .
eldv:originalObservedAt a rdf:Property .
eldv:imputedBy a rdf:Property ; rdfs:range eldv:ImprovementMethod .
eldv:flaggedOutlier a rdf:Property .
)TTL";
  return text;
}

Graph builtin_vocab() { return parse_turtle_subset(builtin_vocab_turtle()); }

Graph policy_vocab(const QualityPolicy& policy) {
  Graph g;
  Term type = Term::iri(ns::rdf_("type"));
  Term rdf_class = Term::iri(ns::rdfs_("Class"));
  Term property = Term::iri(ns::rdf_("Property"));
  for (const auto& shape : policy.shapes) {
    g.add(Term::iri(shape.class_iri), type, rdf_class);
    for (const auto& prop : shape.properties)
      g.add(Term::iri(prop.predicate), type, property);
  }
  for (const auto& p : policy.linking_predicates)
    g.add(Term::iri(p), type, property);
  if (policy.improvement.label_predicate.size())
    g.add(Term::iri(policy.improvement.label_predicate), type, property);
  return g;
}

}  // namespace ldq
