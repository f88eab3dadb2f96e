#include "ldq/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include "ldq/errors.hpp"
#include "ldq/facade.hpp"
#include "ldq/fixture.hpp"
#include "ldq/pipeline.hpp"
#include "ldq/service.hpp"

namespace ldq::cli {

namespace {

namespace fs = std::filesystem;
using facade::Format;

struct Flags {
  std::string dataset, mapping, input, assessment, rules, report, out, format, data_dir;
  std::uint64_t seed = 0;
  int rounds = -1;
  bool strict = false;
  int port = 8080;

  std::optional<Format> fmt() const {
    if (format.empty()) return std::nullopt;
    return facade::parse_format(format);
  }
};

void add_format(CLI::App* cmd, Flags& f) {
  cmd->add_option("--format", f.format, "ntriples, json or turtle")
      ->check(CLI::IsMember({"ntriples", "json", "turtle"}));
}

void add_policy(CLI::App* cmd, Flags& f) {
  cmd->add_option("--assessment", f.assessment, "assessment policy JSON")->required();
  cmd->add_option("--rules", f.rules, "business rules JSON")->required();
  cmd->add_option("--seed", f.seed, "sampling seed");
}

std::string summary(const AssessmentReport& r) {
  std::string s = "dataset " + r.dataset_id + " round " + std::to_string(r.round) + ": " +
                  (r.passed ? "passed" : "failed") + " (overall " + format_decimal(r.overall, 6) +
                  ")\n";
  for (const auto& f : r.failing)
    s += "  failing " + std::string(f.is_category ? "category " : "metric ") + f.id + " " +
         format_decimal(f.value, 6) + " < " + format_decimal(f.threshold) + "\n";
  for (const auto& k : r.skipped) s += "  skipped " + k.metric_id + ": " + k.reason + "\n";
  return s;
}

ProvenanceStamp stamp(UnixSeconds now) {
  ProvenanceStamp p;
  p.generated_at = now;
  return p;
}

int cmd_ingest(const Flags& f, std::ostream& out) {
  auto records = parse_records(facade::read_file(f.input));
  auto rules = load_mapping(facade::read_file(f.mapping));
  auto prov = stamp(reference_now());
  std::string text = facade::ingest_to_ntriples(records, rules, prov);
  Format format = facade::format_for(f.fmt(), f.out);
  if (format == Format::Json) throw ConfigError("--format", "datasets are RDF; use ntriples or turtle");
  if (format == Format::Turtle) {
    Graph g = map_records(records, rules, prov);
    text = facade::render_graph(g, Format::Turtle);
  }
  facade::write_file(f.out, text);
  IngestReport report;
  Graph g = map_records(records, rules, prov, &report);
  out << "ingested " << report.records << " records into " << g.size() << " triples ("
      << g.raw_statement_count() << " statements)\n";
  for (const auto& [field, n] : report.skipped_fields)
    out << "  skipped field " << field << " x" << n << "\n";
  return kOk;
}

AssessOptions assess_options(const Flags& f, const facade::LoadedPolicy& loaded, const Graph& g) {
  AssessOptions opts;
  opts.probe = loaded.probe.get();
  opts.now = reference_now();
  opts.seed = f.seed;
  opts.dataset_id = content_dataset_id(g);
  return opts;
}

int cmd_assess(const Flags& f, std::ostream& out) {
  auto loaded = facade::load_policy_files(f.assessment, f.rules);
  Graph g = facade::load_dataset(f.dataset);
  auto report = assess(g, loaded.policy, assess_options(f, loaded, g));
  if (f.report.empty()) {
    out << facade::render_report(report, f.fmt().value_or(Format::Json));
  } else {
    facade::write_file(f.report, facade::render_report(report, facade::format_for(f.fmt(), f.report)));
    out << summary(report);
  }
  return f.strict && !report.passed ? kQualityFailed : kOk;
}

int cmd_improve(const Flags& f, std::ostream& out) {
  auto loaded = facade::load_policy_files(f.assessment, f.rules);
  Graph g = facade::load_dataset(f.dataset);
  auto opts = assess_options(f, loaded, g);
  auto report = assess(g, loaded.policy, opts);
  fs::path dir = f.out;
  facade::write_file(dir / "report.json", report_to_json(report));
  if (report.passed) {
    out << summary(report) << "nothing to improve\n";
    facade::write_file(dir / "improved.nt", serialize_ntriples(g));
    facade::write_file(dir / "additions.nt", "");
    facade::write_file(dir / "deletions.nt", "");
    facade::write_file(dir / "improvement.json", improvement_log_json(ImproveResult{g, {}, {}, {}}));
    return kOk;
  }
  auto result = improve(g, report, loaded.policy, opts);
  Format format = f.fmt().value_or(Format::NTriples);
  if (format == Format::Json) throw ConfigError("--format", "graphs are RDF; use ntriples or turtle");
  std::string ext = format == Format::Turtle ? ".ttl" : ".nt";
  facade::write_file(dir / ("improved" + ext), facade::render_graph(result.graph, format));
  Graph additions = graph_difference(result.graph, g);
  Graph deletions = graph_difference(g, result.graph);
  facade::write_file(dir / "additions.nt", serialize_ntriples(additions));
  facade::write_file(dir / "deletions.nt", serialize_ntriples(deletions));
  facade::write_file(dir / "improvement.json", improvement_log_json(result));
  out << summary(report) << "improved: +" << additions.size() << " -" << deletions.size()
      << " triples\n";
  for (const auto& p : result.precision)
    out << "  " << p.metric_id << " " << format_decimal(p.before, 6) << " -> "
        << format_decimal(p.after, 6) << " via " << p.method_iri << "\n";
  return kOk;
}

int cmd_pipeline(const Flags& f, std::ostream& out) {
  auto loaded = facade::load_policy_files(f.assessment, f.rules);
  UnixSeconds now = reference_now();
  PipelineInput input;
  if (!f.dataset.empty()) {
    input.graph = facade::load_dataset(f.dataset);
  } else if (!f.input.empty() && !f.mapping.empty()) {
    input.records = parse_records(facade::read_file(f.input));
    input.mapping = load_mapping(facade::read_file(f.mapping));
    input.provenance = stamp(now);
  } else {
    throw ConfigError("--dataset", "pipeline needs --dataset or --input with --mapping");
  }
  PipelineOptions opts;
  opts.probe = loaded.probe.get();
  opts.now = now;
  opts.seed = f.seed;
  if (f.rounds >= 0) opts.max_rounds = f.rounds;
  RunState state = run_pipeline(input, loaded.policy, opts);

  fs::path dir = f.out;
  facade::write_file(dir / "final.nt", serialize_ntriples(state.graph));
  facade::write_file(dir / "additions.nt", serialize_ntriples(state.additions()));
  facade::write_file(dir / "deletions.nt", serialize_ntriples(state.deletions()));
  facade::write_file(dir / "trace.jsonl", trace_to_jsonl(state.trace));
  facade::write_file(dir / "run.json", run_state_to_json(state));
  ImproveResult log{state.graph, state.actions, {}, {}};
  for (const auto& h : state.history)
    log.precision.insert(log.precision.end(), h.precision.begin(), h.precision.end());
  facade::write_file(dir / "improvement.json", improvement_log_json(log));
  for (const auto& h : state.history) {
    std::string base = "reports/round-" + std::to_string(h.report.round);
    facade::write_file(dir / (base + ".ttl"), facade::render_report(h.report, Format::Turtle));
    facade::write_file(dir / (base + ".json"), report_to_json(h.report));
  }
  if (!state.history.empty()) out << summary(state.history.back().report);
  out << "terminal " << (state.terminal ? terminal_name(*state.terminal) : "none") << " after "
      << state.history.size() << " assessments\n";
  if (state.terminal == Terminal::Failed) {
    out << "error: " << state.error << "\n";
    return kUsage;
  }
  return f.strict && state.terminal != Terminal::Passed ? kQualityFailed : kOk;
}

int cmd_gen_fixture(const Flags& f, std::ostream& out) {
  FixtureCounts counts;
  DefectRates rates;
  if (!f.input.empty()) {
    nlohmann::json cfg;
    try {
      cfg = nlohmann::json::parse(facade::read_file(f.input));
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(f.input, e.what());
    }
    if (cfg.contains("hours")) counts = FixtureCounts::for_hours(cfg["hours"].get<int>());
    if (cfg.contains("counts")) {
      counts.records.clear();
      for (const auto& [name, n] : cfg["counts"].items()) {
        auto type = parse_record_type(name);
        if (!type) throw ConfigError("counts." + name, "unknown record type");
        counts.records[*type] = n.get<int>();
      }
    }
    if (cfg.contains("defectRates")) {
      for (const auto& [name, v] : cfg["defectRates"].items()) {
        auto kind = parse_defect_kind(name);
        if (!kind) throw ConfigError("defectRates." + name, "unknown defect kind");
        auto rate = parse_decimal(v.dump());
        if (!v.is_number() || !rate) throw ConfigError("defectRates." + name, "expected a number");
        rates.rates[*kind] = *rate;
      }
    }
    if (cfg.contains("missingFields"))
      for (const auto& field : cfg["missingFields"]) rates.missing_fields.insert(field.get<std::string>());
  }
  Fixture fx = generate_fixture(f.seed, counts, rates);
  fs::path dir = f.out;
  facade::write_file(dir / "records.csv", records_to_csv(fx.records));
  facade::write_file(dir / "manifest.json", manifest_to_json(fx.manifest));
  facade::write_file(dir / "probe.json", fx.probe_json);
  out << "wrote " << fx.records.size() << " records (seed " << f.seed << ", reference time "
      << format_utc(fx.manifest.reference_now) << ")\n";
  return kOk;
}

int cmd_serve(const Flags& f, std::ostream& out) {
  ServiceConfig config;
  config.data_dir = facade::resolve_data_dir(
      f.data_dir.empty() ? std::nullopt : std::optional<std::string>(f.data_dir));
  Service service(config);
  out << "serving on port " << f.port << ", data in " << config.data_dir.string() << std::endl;
  if (!service.listen("0.0.0.0", f.port)) throw ConfigError("--port", "cannot listen");
  return kOk;
}

int cmd_vocab(const Flags& f, std::ostream& out) {
  Format format = f.fmt().value_or(f.out.empty() ? Format::Turtle : facade::format_for({}, f.out));
  if (format == Format::Json) throw ConfigError("--format", "the vocabulary is RDF; use ntriples or turtle");
  std::string text = format == Format::Turtle ? builtin_vocab_turtle()
                                              : facade::render_graph(builtin_vocab(), format);
  if (f.out.empty())
    out << text;
  else
    facade::write_file(f.out, text);
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Linked data quality assessment and improvement"};
  app.require_subcommand(1);
  Flags f;

  auto* ingest = app.add_subcommand("ingest", "map raw records to RDF");
  ingest->add_option("--input", f.input, "records (CSV or JSON)")->required();
  ingest->add_option("--mapping", f.mapping, "mapping JSON")->required();
  ingest->add_option("--out", f.out, "dataset file")->required();
  add_format(ingest, f);

  auto* assess_cmd = app.add_subcommand("assess", "assess a dataset");
  assess_cmd->add_option("--dataset", f.dataset, "N-Triples or Turtle dataset")->required();
  add_policy(assess_cmd, f);
  assess_cmd->add_option("--report", f.report, "report file");
  assess_cmd->add_flag("--strict", f.strict, "exit 1 when the dataset fails");
  add_format(assess_cmd, f);

  auto* improve_cmd = app.add_subcommand("improve", "assess and improve once");
  improve_cmd->add_option("--dataset", f.dataset, "N-Triples or Turtle dataset")->required();
  add_policy(improve_cmd, f);
  improve_cmd->add_option("--out", f.out, "output directory")->required();
  add_format(improve_cmd, f);

  auto* pipeline = app.add_subcommand("pipeline", "assess/improve until passed or stuck");
  pipeline->add_option("--dataset", f.dataset, "N-Triples or Turtle dataset");
  pipeline->add_option("--input", f.input, "records (CSV or JSON)");
  pipeline->add_option("--mapping", f.mapping, "mapping JSON");
  add_policy(pipeline, f);
  pipeline->add_option("--out", f.out, "output directory")->required();
  pipeline->add_option("--rounds", f.rounds, "override maxRounds")->check(CLI::NonNegativeNumber);
  pipeline->add_flag("--strict", f.strict, "exit 1 unless the run passes");

  auto* gen = app.add_subcommand("gen-fixture", "generate a synthetic fixture");
  gen->add_option("--seed", f.seed, "generator seed");
  gen->add_option("--input", f.input, "generator config JSON");
  gen->add_option("--out", f.out, "output directory")->required();

  auto* serve = app.add_subcommand("serve", "run the HTTP service");
  serve->add_option("--port", f.port, "TCP port")->check(CLI::Range(1, 65535));
  serve->add_option("--data-dir", f.data_dir, "store directory (LDQ_DATA_DIR wins)");

  auto* vocab_cmd = app.add_subcommand("vocab", "print the vocabulary");
  vocab_cmd->add_option("--out", f.out, "output file");
  add_format(vocab_cmd, f);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kOk;
    }
    err << "usage error: " << e.what() << "\n" << app.help();
    return kUsage;
  }

  try {
    if (ingest->parsed()) return cmd_ingest(f, out);
    if (assess_cmd->parsed()) return cmd_assess(f, out);
    if (improve_cmd->parsed()) return cmd_improve(f, out);
    if (pipeline->parsed()) return cmd_pipeline(f, out);
    if (gen->parsed()) return cmd_gen_fixture(f, out);
    if (serve->parsed()) return cmd_serve(f, out);
    if (vocab_cmd->parsed()) return cmd_vocab(f, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace ldq::cli
