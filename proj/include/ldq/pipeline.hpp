#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ldq/assess.hpp"
#include "ldq/improve.hpp"
#include "ldq/ingest.hpp"

namespace ldq {

enum class Stage { Ingest, Assess, Improve, Done, Failed };
std::string_view stage_name(Stage stage);

struct PipelineMessage {
  std::string correlation_id;
  Stage stage = Stage::Ingest;
  // Dataset IRI, or report IRI for Assess and Done.
  std::string payload_ref;
  int round = 0;
  // Set on Failed.
  std::string error;
};

enum class Terminal { Passed, MaxRoundsExhausted, NoImprovement, Failed };
std::string_view terminal_name(Terminal terminal);

struct RoundRecord {
  AssessmentReport report;
  // Records of the improvement that followed this report (empty on the last
  // round).
  std::vector<PrecisionRecord> precision;
};

struct RunState {
  std::string dataset_id;
  std::string correlation_id;
  int round = 0;
  std::vector<RoundRecord> history;
  std::optional<Terminal> terminal;
  std::vector<PipelineMessage> trace;
  std::vector<ImprovementAction> actions;
  Graph initial;
  Graph graph;
  std::string error;

  // Net patch of the run.
  Graph additions() const { return graph_difference(graph, initial); }
  Graph deletions() const { return graph_difference(initial, graph); }
};

struct PipelineInput {
  // Either a graph, or records with their mapping.
  std::optional<Graph> graph;
  std::vector<EnergyRecord> records;
  std::vector<MappingRule> mapping;
  ProvenanceStamp provenance;
};

struct PipelineOptions {
  const DereferenceProbe* probe = nullptr;
  UnixSeconds now = 0;
  std::uint64_t seed = 0;
  // Empty: the content hash of the initial graph.
  std::string dataset_id;
  // Overrides policy.max_rounds when set.
  std::optional<int> max_rounds;
};

enum class StageKind { Metric, Improver, Observer };

using ImproverFn = std::function<ImprovementAction(
    const Graph&, const AssessmentReport&, const QualityPolicy&)>;
using ObserverFn = std::function<void(const PipelineMessage&)>;

struct StageDescriptor {
  std::string id;
  StageKind kind = StageKind::Observer;
  // Metric stages.
  CustomMetric metric;
  // Improver stages run after the built-in families when the report fails.
  ImproverFn improver;
  // Observer stages see every message.
  ObserverFn observer;
};

struct StageHandle {
  std::string id;
};

class Pipeline {
 public:
  // "ingest", "assess" and "improve" are pre-registered.
  Pipeline();

  // Throws DuplicateStageId.
  StageHandle register_stage(StageDescriptor descriptor);
  std::vector<std::string> stage_ids() const;

  // Upstream errors end the run with terminal Failed instead of throwing.
  RunState run(const PipelineInput& input, const QualityPolicy& policy,
               const PipelineOptions& options) const;

 private:
  std::vector<StageDescriptor> stages_;
};

RunState run_pipeline(const PipelineInput& input, const QualityPolicy& policy,
                      const PipelineOptions& options);

std::string report_iri(const std::string& dataset_id, int round);
std::string correlation_id(const std::string& dataset_id, std::uint64_t seed);

// One JSON object per line.
std::string trace_to_jsonl(const std::vector<PipelineMessage>& trace);
// {"datasetId", "correlationId", "round", "terminal", "error", "history"}
std::string run_state_to_json(const RunState& state);

}  // namespace ldq
