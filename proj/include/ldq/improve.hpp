#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "ldq/assess.hpp"
#include "ldq/rational.hpp"
#include "ldq/rdf.hpp"
#include "ldq/time.hpp"
#include "ldq/vocab.hpp"

namespace ldq {

enum class Orientation { ObjectImputation, SubjectImputation };

// (predicate, partner): the partner is the object for ObjectImputation
// transactions and the subject for SubjectImputation ones.
struct Item {
  std::string predicate;
  Term partner = Term::literal("");

  std::string text() const;
  friend bool operator==(const Item&, const Item&) = default;
  friend std::strong_ordering operator<=>(const Item& a, const Item& b) {
    if (auto c = a.predicate <=> b.predicate; c != 0) return c;
    return a.partner <=> b.partner;
  }
};

struct Transaction {
  // Canonical text of the subject (object) the transaction is keyed by.
  std::string key;
  std::set<Item> items;
};

struct AssociationRule {
  std::vector<Item> antecedent;  // sorted, nonempty
  Item consequent;
  Rational support;
  Rational confidence;
  Orientation orientation = Orientation::ObjectImputation;

  // "{a, b} => c", used as the final sort key.
  std::string text() const;
};

// Numeric-datatype literals are never items.
std::vector<Transaction> build_transactions(const Graph& g, Orientation orientation);

// Level-wise apriori; rules have one consequent item and are sorted by
// confidence desc, support desc, rule text.
std::vector<AssociationRule> mine_apriori(const std::vector<Transaction>& transactions,
                                          const Rational& min_support,
                                          const Rational& min_confidence,
                                          Orientation orientation =
                                              Orientation::ObjectImputation);

enum class ActionKind {
  ImputeTriple,
  Interlink,
  RegressFill,
  UnitNormalize,
  Dedupe,
  AlignTimestamp,
  FlagOutlier
};
std::string_view action_kind_name(ActionKind kind);

struct ImprovementAction {
  ActionKind kind = ActionKind::ImputeTriple;
  std::set<Triple> additions;
  std::set<Triple> deletions;
  std::string method_iri;
  std::string justification;
  // Things the family saw but would not change (unresolved gaps, unknown
  // units, ...).
  std::vector<std::string> findings;
  // Dedupe only.
  std::uint64_t duplicates_removed = 0;

  bool empty() const {
    return additions.empty() && deletions.empty() && duplicates_removed == 0;
  }
};

// Applies deletions, then additions that are not already present; Dedupe
// compacts the raw statement count.
void apply_action(Graph& g, const ImprovementAction& action);

struct PrecisionRecord {
  std::string metric_id;
  Rational before;
  Rational after;
  Rational delta;
  std::string method_iri;
};

// Fills completeness gaps from the first applicable rule. Rules of both
// orientations may be passed.
ImprovementAction impute_missing(const Graph& g,
                                 const std::vector<ShapeRequirement>& shapes,
                                 const std::vector<AssociationRule>& rules);

// Rules mined over the subjects without completeness gaps.
std::vector<AssociationRule> mine_clean_portion(const Graph& g,
                                                const std::vector<ShapeRequirement>& shapes,
                                                const ImprovementParams& params);

// Lowercase, trim, collapse whitespace, drop . , _ -
std::u32string canonical_label(std::string_view label);
std::size_t levenshtein(const std::u32string& a, const std::u32string& b);
// 1 - lev / max length over canonical labels; 1 when both are empty.
Rational label_similarity(std::string_view a, std::string_view b);

ImprovementAction interlink_clusters(const Graph& g, const std::string& label_predicate,
                                     const Rational& tau);

struct RegressionModel {
  double weight = 0;
  double bias = 0;
  double epsilon = 0;
  double lambda = 0;
  int iterations = 0;
  UnixSeconds t_min = 0;
  UnixSeconds t_max = 0;
  double y_mean = 0;
  double y_scale = 0;
  std::string feature_spec = "x = (t - tMin) / (tMax - tMin); y standardized";

  double predict(UnixSeconds t) const;
};

struct SeriesPoint {
  UnixSeconds t;
  double y;
};

// Linear epsilon-insensitive SVR by subgradient descent. Throws
// DegenerateTimeRange, and Error for fewer than 5 points.
RegressionModel train_svr(const std::vector<SeriesPoint>& points,
                          const SvrHyperparameters& hyper);

ImprovementAction regress_fill(const Graph& g, const std::vector<ShapeRequirement>& shapes,
                               std::int64_t grid_seconds, const SvrHyperparameters& hyper,
                               const UnitTable& units = UnitTable::builtin());

// ETL steps; each reads the graph as given.
ImprovementAction unit_normalize(const Graph& g, const std::vector<ShapeRequirement>& shapes,
                                 const UnitTable& units);
ImprovementAction align_timestamps(const Graph& g, std::int64_t grid_seconds);
ImprovementAction flag_outliers(const Graph& g, const std::vector<ShapeRequirement>& shapes,
                                const UnitTable& units);
ImprovementAction dedupe(const Graph& g);

// Nearest epoch-anchored slot; exact halves go to the earlier slot.
UnixSeconds align_to_grid(UnixSeconds t, std::int64_t grid_seconds);

struct EtlResult {
  Graph graph;
  std::vector<ImprovementAction> actions;
};
// Unit normalization, timestamp alignment, outlier flags and dedupe, each on
// the output of the previous step.
EtlResult etl_normalize(const Graph& g, const std::vector<ShapeRequirement>& shapes,
                        const UnitTable& units, std::int64_t grid_seconds);

struct ImproveResult {
  Graph graph;
  std::vector<ImprovementAction> actions;
  std::vector<PrecisionRecord> precision;
  // Metrics the routing targeted.
  std::vector<std::string> targets;
};

// Runs the families routed from the report's failing entries in the fixed
// order etl -> interlink -> impute -> regress, re-measuring every target
// metric after each family.
ImproveResult improve(const Graph& g, const AssessmentReport& report,
                      const QualityPolicy& policy, const AssessOptions& options);

// Net patch between two graphs.
Graph graph_difference(const Graph& a, const Graph& b);

// {"actions": [...], "precision": [...]}
std::string improvement_log_json(const ImproveResult& result);

}  // namespace ldq
