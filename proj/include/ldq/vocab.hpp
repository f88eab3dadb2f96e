#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "ldq/rational.hpp"
#include "ldq/rdf.hpp"

namespace ldq {

// The four dimension sets. Intrinsic is published as eldv:consistency.
enum class DimensionCategory { Accessibility, Intrinsic, RdfLevel, TaskDependent };

inline constexpr std::array<DimensionCategory, 4> kAllCategories = {
    DimensionCategory::Accessibility, DimensionCategory::Intrinsic,
    DimensionCategory::RdfLevel, DimensionCategory::TaskDependent};

std::string category_iri(DimensionCategory category);
// JSON key: "accessibility", "intrinsic", "rdfLevel", "taskDependent".
std::string_view category_name(DimensionCategory category);
// Case-insensitive; also accepts the eldv local names.
std::optional<DimensionCategory> parse_category(std::string_view text);
inline std::size_t category_index(DimensionCategory c) {
  return static_cast<std::size_t>(c);
}

// Built-in metric identifiers.
namespace metric {
inline constexpr std::string_view availability = "availability";
inline constexpr std::string_view interlinking = "interlinking";
inline constexpr std::string_view performance = "performance";
inline constexpr std::string_view completeness = "completeness";
inline constexpr std::string_view consistency = "consistency";
inline constexpr std::string_view semantic_accuracy = "semanticAccuracy";
inline constexpr std::string_view interpretability = "interpretability";
inline constexpr std::string_view interoperability = "interoperability";
inline constexpr std::string_view compactness = "compactness";
inline constexpr std::string_view provenance = "provenance";
inline constexpr std::string_view freshness = "freshness";
inline constexpr std::string_view usability = "usability";
}  // namespace metric

// Category of a built-in metric id, nullopt for custom ids.
std::optional<DimensionCategory> builtin_metric_category(std::string_view id);
// urn:eldv#<id>Metric (the bare local names are taken by the categories).
std::string metric_iri(std::string_view id);

// Improvement method resources.
namespace method {
std::string association_rule_mining();
std::string clustering_data_interlinking();
std::string support_vector_regression();
std::string etl();
}  // namespace method

using ParamValue = std::variant<Rational, std::string>;

struct MetricDefinition {
  std::string id;
  DimensionCategory category = DimensionCategory::Intrinsic;
  std::map<std::string, ParamValue> params;
  Rational weight = 1;

  Rational number(const std::string& name, const Rational& fallback) const;
  std::string text(const std::string& name, const std::string& fallback) const;
};

enum class UnitDimension { Energy, Power, Temperature, Time, Dimensionless };
std::string_view unit_dimension_name(UnitDimension d);
std::optional<UnitDimension> parse_unit_dimension(std::string_view text);

// Datatype value that marks an object property (IRI-valued).
inline constexpr std::string_view kIriDatatype = "@id";

struct PropertyRequirement {
  std::string predicate;
  // xsd datatype IRI, or "@id" for IRI-valued properties.
  std::string datatype;
  std::optional<UnitDimension> unit_dimension;
  bool functional = false;
  // Inclusive bounds in the dimension's canonical unit.
  std::optional<std::pair<Rational, Rational>> range;

  bool expects_literal() const { return datatype != kIriDatatype; }
  bool is_numeric() const { return is_numeric_datatype(datatype); }
};

struct ShapeRequirement {
  std::string class_iri;
  std::vector<PropertyRequirement> properties;
};

struct SvrHyperparameters {
  double epsilon = 0.01;
  double lambda = 1e-4;
  double eta0 = 5.0;
  int iterations = 2000;
};

struct ImprovementParams {
  Rational min_support{3, 10};
  Rational min_confidence{4, 5};
  Rational tau{17, 20};
  std::int64_t grid_seconds = 900;
  std::string label_predicate = ns::rdfs_("label");
  SvrHyperparameters svr;
};

struct QualityPolicy {
  std::string task_id;
  std::vector<MetricDefinition> metrics;
  std::vector<ShapeRequirement> shapes;
  std::map<std::string, Rational> thresholds;
  std::map<DimensionCategory, Rational> category_thresholds;
  std::array<Rational, 4> category_weights = {1, 1, 1, 1};
  std::int64_t max_age_seconds = 86400;
  std::vector<std::string> standard_namespaces;
  std::vector<std::string> linking_predicates;
  int max_rounds = 3;
  std::map<std::string, Rational> usability_weights;
  ImprovementParams improvement;

  const MetricDefinition* find_metric(std::string_view id) const;
};

// Merges the assessment file (metrics, shapes) with the business-rules file
// (thresholds, weights, task context). Throws ConfigError and subclasses.
QualityPolicy load_policy(std::string_view assessment_json,
                          std::string_view business_rules_json);

struct UnitEntry {
  std::string symbol;
  UnitDimension dimension;
  // value_canonical = value * factor + offset
  Rational factor;
  Rational offset;
};

class UnitTable {
 public:
  // Wh kWh MJ J / W kW / °C °F K / s min h.
  static const UnitTable& builtin();

  const UnitEntry* find(std::string_view symbol) const;
  // J, W, K, s; nullptr for Dimensionless.
  const UnitEntry* canonical(UnitDimension dimension) const;
  const std::vector<UnitEntry>& entries() const { return entries_; }

 private:
  std::vector<UnitEntry> entries_;
};

// Exact affine conversion into the canonical unit of `target`. Throws
// DimensionMismatch when `from` belongs to another dimension.
Rational convert_unit(const Rational& value, const UnitEntry& from,
                      UnitDimension target);
Rational from_canonical(const Rational& canonical_value, const UnitEntry& to);

// The eldv extension vocabulary.
const std::string& builtin_vocab_turtle();
Graph builtin_vocab();

// Declarations for every class and predicate the policy's shapes and
// linking predicates mention.
Graph policy_vocab(const QualityPolicy& policy);

// Well-known vocabulary predicates.
namespace vocab {
std::string unit();
std::string source();
std::string generated_at();
std::string observed_at();
std::string original_observed_at();
std::string imputed_by();
std::string flagged_outlier();
}  // namespace vocab

}  // namespace ldq
