#include "ldq/pipeline.hpp"

#include <algorithm>
#include <json.hpp>

#include "ldq/errors.hpp"

namespace ldq {

std::string_view stage_name(Stage stage) {
  switch (stage) {
    case Stage::Ingest: return "Ingest";
    case Stage::Assess: return "Assess";
    case Stage::Improve: return "Improve";
    case Stage::Done: return "Done";
    case Stage::Failed: return "Failed";
  }
  return "";
}

std::string_view terminal_name(Terminal terminal) {
  switch (terminal) {
    case Terminal::Passed: return "Passed";
    case Terminal::MaxRoundsExhausted: return "MaxRoundsExhausted";
    case Terminal::NoImprovement: return "NoImprovement";
    case Terminal::Failed: return "Failed";
  }
  return "";
}

std::string report_iri(const std::string& dataset_id, int round) {
  return "urn:ldq:report:" + dataset_id + ":" + std::to_string(round);
}

std::string correlation_id(const std::string& dataset_id, std::uint64_t seed) {
  return "urn:ldq:run:" + dataset_id + ":" + std::to_string(seed);
}

Pipeline::Pipeline() {
  for (const char* id : {"ingest", "assess", "improve"}) {
    StageDescriptor d;
    d.id = id;
    d.kind = StageKind::Observer;
    stages_.push_back(std::move(d));
  }
}

StageHandle Pipeline::register_stage(StageDescriptor descriptor) {
  if (descriptor.id.empty()) throw Error("stage id must not be empty");
  for (const auto& s : stages_)
    if (s.id == descriptor.id) throw DuplicateStageId(descriptor.id);
  StageHandle handle{descriptor.id};
  stages_.push_back(std::move(descriptor));
  return handle;
}

std::vector<std::string> Pipeline::stage_ids() const {
  std::vector<std::string> ids;
  for (const auto& s : stages_) ids.push_back(s.id);
  return ids;
}

RunState Pipeline::run(const PipelineInput& input, const QualityPolicy& policy,
                       const PipelineOptions& options) const {
  RunState state;
  const int max_rounds = options.max_rounds.value_or(policy.max_rounds);

  auto emit = [&](Stage stage, std::string ref, std::string error = {}) {
    PipelineMessage m{state.correlation_id, stage, std::move(ref), state.round,
                      std::move(error)};
    for (const auto& s : stages_)
      if (s.kind == StageKind::Observer && s.observer) s.observer(m);
    state.trace.push_back(std::move(m));
  };
  auto finish = [&](Terminal t) {
    state.terminal = t;
    emit(t == Terminal::Failed ? Stage::Failed : Stage::Done,
         state.history.empty() ? dataset_iri(state.dataset_id)
                               : report_iri(state.dataset_id, state.round),
         state.error);
  };

  try {
    state.initial = input.graph ? *input.graph
                                : map_records(input.records, input.mapping, input.provenance);
  } catch (const Error& e) {
    state.dataset_id = options.dataset_id;
    state.correlation_id = correlation_id(state.dataset_id, options.seed);
    state.error = e.what();
    finish(Terminal::Failed);
    return state;
  }
  state.graph = state.initial;
  state.dataset_id =
      options.dataset_id.empty() ? content_dataset_id(state.initial) : options.dataset_id;
  state.correlation_id = correlation_id(state.dataset_id, options.seed);
  emit(Stage::Ingest, dataset_iri(state.dataset_id));

  AssessOptions assess_options;
  assess_options.probe = options.probe;
  assess_options.now = options.now;
  assess_options.seed = options.seed;
  assess_options.dataset_id = state.dataset_id;
  for (const auto& s : stages_)
    if (s.kind == StageKind::Metric) assess_options.custom_metrics.push_back(s.metric);

  std::vector<std::string> previous_targets;
  try {
    for (;;) {
      assess_options.round = state.round;
      AssessmentReport report = assess(state.graph, policy, assess_options);
      emit(Stage::Assess, report_iri(state.dataset_id, state.round));

      if (!state.history.empty()) {
        const AssessmentReport& prev = state.history.back().report;
        bool improved = false;
        for (const auto& id : previous_targets) {
          const Measurement* before = prev.find(id);
          const Measurement* after = report.find(id);
          if (before && after && after->value > before->value) improved = true;
        }
        state.history.push_back({std::move(report), {}});
        if (state.history.back().report.passed) {
          finish(Terminal::Passed);
          return state;
        }
        if (!improved) {
          finish(Terminal::NoImprovement);
          return state;
        }
      } else {
        state.history.push_back({std::move(report), {}});
        if (state.history.back().report.passed) {
          finish(Terminal::Passed);
          return state;
        }
      }
      if (state.round >= max_rounds) {
        finish(Terminal::MaxRoundsExhausted);
        return state;
      }

      const AssessmentReport& current = state.history.back().report;
      ImproveResult result = improve(state.graph, current, policy, assess_options);
      for (const auto& s : stages_) {
        if (s.kind != StageKind::Improver || !s.improver) continue;
        ImprovementAction action = s.improver(result.graph, current, policy);
        apply_action(result.graph, action);
        result.actions.push_back(std::move(action));
      }
      state.graph = std::move(result.graph);
      state.history.back().precision = std::move(result.precision);
      for (auto& a : result.actions) state.actions.push_back(std::move(a));
      previous_targets = std::move(result.targets);
      emit(Stage::Improve, dataset_iri(state.dataset_id));
      ++state.round;
    }
  } catch (const Error& e) {
    state.error = e.what();
    finish(Terminal::Failed);
  }
  return state;
}

RunState run_pipeline(const PipelineInput& input, const QualityPolicy& policy,
                      const PipelineOptions& options) {
  return Pipeline().run(input, policy, options);
}

std::string trace_to_jsonl(const std::vector<PipelineMessage>& trace) {
  std::string out;
  for (const auto& m : trace) {
    nlohmann::ordered_json line{{"correlationId", m.correlation_id},
                                {"stage", stage_name(m.stage)},
                                {"payloadRef", m.payload_ref},
                                {"round", m.round}};
    if (!m.error.empty()) line["error"] = m.error;
    out += line.dump() + "\n";
  }
  return out;
}

std::string run_state_to_json(const RunState& state) {
  using json = nlohmann::ordered_json;
  auto number = [](const Rational& v) {
    return json{{"value", format_decimal(v)}, {"fraction", to_fraction_string(v)}};
  };
  json history = json::array();
  for (const auto& r : state.history) {
    json precision = json::array();
    for (const auto& p : r.precision)
      precision.push_back({{"metric", p.metric_id},
                           {"method", p.method_iri},
                           {"before", number(p.before)},
                           {"after", number(p.after)},
                           {"delta", number(p.delta)}});
    history.push_back(
        {{"report", json::parse(report_to_json(r.report))}, {"precision", precision}});
  }
  json out{{"datasetId", state.dataset_id},
           {"correlationId", state.correlation_id},
           {"round", state.round},
           {"terminal", state.terminal ? json(terminal_name(*state.terminal)) : json()},
           {"additions", state.additions().size()},
           {"deletions", state.deletions().size()}};
  if (!state.error.empty()) out["error"] = state.error;
  out["history"] = history;
  return out.dump(2) + "\n";
}

}  // namespace ldq
