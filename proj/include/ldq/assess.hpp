#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ldq/rational.hpp"
#include "ldq/rdf.hpp"
#include "ldq/time.hpp"
#include "ldq/vocab.hpp"

namespace ldq {

struct Measurement {
  std::string metric_id;
  DimensionCategory category = DimensionCategory::Intrinsic;
  Rational value = 1;
  // value == numerator / denominator when denominator > 0; denominator 0 is
  // the vacuous pass (value 1).
  BigInt numerator = 0;
  BigInt denominator = 0;
  UnixSeconds computed_at = 0;
};

// Ratio measurement with the vacuous-pass convention applied.
Measurement ratio_measurement(std::string metric_id, DimensionCategory category,
                              const BigInt& numerator, const BigInt& denominator);

// ---------------------------------------------------------------------------
// Dereferenceability probes

struct ProbeResult {
  // HTTP status; 0 when the IRI could not be fetched at all.
  int status = 0;
  std::int64_t latency_ms = 0;
};

class DereferenceProbe {
 public:
  virtual ~DereferenceProbe() = default;
  virtual ProbeResult fetch(const std::string& iri) const = 0;
};

// Answers from a fixed table; IRIs missing from the table report status 0.
class FixtureProbe : public DereferenceProbe {
 public:
  FixtureProbe() = default;
  explicit FixtureProbe(std::map<std::string, ProbeResult> table)
      : table_(std::move(table)) {}
  // {"<iri>": 200, "<iri>": {"status": 404, "latencyMs": 35}, ...}
  // Throws ConfigError.
  static FixtureProbe from_json(std::string_view text);

  ProbeResult fetch(const std::string& iri) const override;
  const std::map<std::string, ProbeResult>& table() const { return table_; }

 private:
  std::map<std::string, ProbeResult> table_;
};

// Live HEAD requests over the network. Opt-in only.
class HttpProbe : public DereferenceProbe {
 public:
  explicit HttpProbe(int timeout_ms = 5000) : timeout_ms_(timeout_ms) {}
  ProbeResult fetch(const std::string& iri) const override;

 private:
  int timeout_ms_;
};

// Seeded sample of k distinct elements (partial Fisher-Yates over a 64-bit
// Mersenne Twister with rejection-sampled bounds, so the result does not
// depend on the standard library's distributions).
std::vector<std::string> seeded_sample(std::vector<std::string> population,
                                       std::size_t k, std::uint64_t seed);

// Sorted distinct http(s) IRIs in subject or object position.
std::vector<std::string> dereferenceable_population(const Graph& g);

// ---------------------------------------------------------------------------
// Metrics

// Throws ProbeUnavailable when probe is null. Latencies of the sampled IRIs
// are appended to `latencies` when given.
Measurement metric_availability(const Graph& g, const DereferenceProbe* probe,
                                std::size_t sample_size, std::uint64_t seed,
                                std::vector<std::int64_t>* latencies = nullptr);
Measurement metric_interlinking(const Graph& g, const QualityPolicy& policy);
Measurement metric_performance(std::vector<std::int64_t> latencies_ms,
                               std::int64_t l_max_ms);
Measurement metric_completeness(const Graph& g,
                                const std::vector<ShapeRequirement>& shapes);
Measurement metric_consistency(const Graph& g,
                               const std::vector<ShapeRequirement>& shapes,
                               const UnitTable& units);
Measurement metric_semantic_accuracy(const Graph& g,
                                     const std::vector<ShapeRequirement>& shapes,
                                     const UnitTable& units);
Measurement metric_interpretability(const Graph& g, const Graph& declared_vocab);
Measurement metric_interoperability(const Graph& g, const QualityPolicy& policy);
Measurement metric_compactness(const Graph& g);
Measurement metric_provenance(const Graph& g);
Measurement metric_freshness(const Graph& g, UnixSeconds now,
                             std::int64_t max_age_seconds);
Measurement metric_usability(const std::vector<Measurement>& measured,
                             const QualityPolicy& policy);

// Outliers per (shape, numeric property) population; shared with the ETL
// FlagOutlier step so both agree on what an outlier is.
struct NumericObservation {
  Triple triple;
  std::string class_iri;
  // Value in the property's canonical unit when the subject's unit resolves,
  // otherwise the literal value as written.
  Rational canonical;
};
std::vector<NumericObservation> numeric_observations(
    const Graph& g, const std::vector<ShapeRequirement>& shapes,
    const UnitTable& units);
// Triples whose value is an outlier. Range-configured properties use the
// range; others use the IQR rule on populations of at least 8.
std::vector<Triple> outlier_triples(const Graph& g,
                                    const std::vector<ShapeRequirement>& shapes,
                                    const UnitTable& units);

// Lower/upper-median (Tukey hinge) quartiles of sorted values; n >= 2.
std::pair<Rational, Rational> quartiles(const std::vector<Rational>& sorted);

// Subjects typed with the class, in serialization order.
std::vector<Term> instances_of(const Graph& g, const std::string& class_iri);

// ---------------------------------------------------------------------------
// Assessment

struct MetricContext {
  const Graph& graph;
  const QualityPolicy& policy;
  const MetricDefinition& definition;
  UnixSeconds now;
};
using MetricFn = std::function<Measurement(const MetricContext&)>;

// A metric implementation outside the built-in set.
struct CustomMetric {
  std::string id;
  DimensionCategory category = DimensionCategory::Intrinsic;
  Rational weight = 1;
  MetricFn fn;
};

struct AssessOptions {
  const DereferenceProbe* probe = nullptr;
  UnixSeconds now = 0;
  int round = 0;
  std::uint64_t seed = 0;
  std::string dataset_id;
  // Used for ids not built in; entries whose id the policy does not declare
  // are measured after the declared metrics.
  std::vector<CustomMetric> custom_metrics;
};

struct FailingEntry {
  bool is_category = false;
  // Metric id, or the category's JSON name.
  std::string id;
  Rational threshold;
  Rational value;
};

struct SkippedMetric {
  std::string metric_id;
  std::string reason;
};

struct AssessmentReport {
  std::string dataset_id;
  int round = 0;
  UnixSeconds computed_at = 0;
  std::vector<Measurement> measurements;
  std::vector<SkippedMetric> skipped;
  // nullopt when no metric of the category was measured.
  std::array<std::optional<Rational>, 4> category_scores;
  Rational overall = 1;
  std::vector<FailingEntry> failing;
  bool passed = true;

  const Measurement* find(std::string_view metric_id) const;
  bool is_failing(std::string_view metric_id) const;
  std::optional<Rational> category_score(DimensionCategory c) const {
    return category_scores[category_index(c)];
  }
};

// Builtin vocabulary plus the policy's declarations.
Graph declared_vocabulary(const QualityPolicy& policy);

AssessmentReport assess(const Graph& g, const QualityPolicy& policy,
                        const AssessOptions& options);

// Recomputes a single metric the same way assess does. Throws on metric
// errors (ProbeUnavailable etc.).
Measurement measure_metric(const Graph& g, const QualityPolicy& policy,
                           const std::string& metric_id,
                           const AssessOptions& options);

std::string measurement_iri(const std::string& dataset_id, int round,
                            std::size_t seq);
std::string dataset_iri(const std::string& dataset_id);

Graph emit_report_graph(const AssessmentReport& report);

// {"datasetId", "round", "computedAt", "measurements", "skipped",
//  "categoryScores", "overall", "failing", "passed"}; rationals as decimal
// strings plus exact fractions.
std::string report_to_json(const AssessmentReport& report);

// Canonical dataset id: first 16 hex digits of SHA-256 over the N-Triples.
std::string content_dataset_id(const Graph& g);
// First 16 hex digits of SHA-256.
std::string sha256_prefix(std::string_view text);

}  // namespace ldq
