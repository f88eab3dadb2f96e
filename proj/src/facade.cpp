#include "ldq/facade.hpp"

#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "ldq/errors.hpp"

namespace ldq::facade {

namespace fs = std::filesystem;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string(), "cannot read file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, std::string_view text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError(path.string(), "cannot write file");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw ConfigError(path.string(), "write failed");
}

Graph parse_dataset(std::string_view text, bool turtle) {
  return turtle ? parse_turtle_subset(text) : parse_ntriples(text);
}

Graph load_dataset(const fs::path& path) {
  return parse_dataset(read_file(path), path.extension() == ".ttl");
}

LoadedPolicy load_policy(std::string_view assessment_json, std::string_view rules_json,
                         const fs::path& base_dir) {
  LoadedPolicy out{ldq::load_policy(assessment_json, rules_json), nullptr};
  const MetricDefinition* availability = out.policy.find_metric(metric::availability);
  if (!availability) return out;
  std::string probe = availability->text("probeFile", "");
  if (probe.empty()) return out;
  if (probe == "live") {
    out.probe = std::make_shared<HttpProbe>();
    return out;
  }
  fs::path file = fs::path(probe).is_absolute() ? fs::path(probe) : base_dir / probe;
  out.probe = std::make_shared<FixtureProbe>(FixtureProbe::from_json(read_file(file)));
  return out;
}

LoadedPolicy load_policy_files(const fs::path& assessment, const fs::path& rules) {
  return load_policy(read_file(assessment), read_file(rules), assessment.parent_path());
}

std::optional<Format> parse_format(std::string_view name) {
  if (name == "ntriples") return Format::NTriples;
  if (name == "json") return Format::Json;
  if (name == "turtle") return Format::Turtle;
  return std::nullopt;
}

Format format_for(const std::optional<Format>& flag, const fs::path& path) {
  if (flag) return *flag;
  if (path.extension() == ".json") return Format::Json;
  if (path.extension() == ".nt") return Format::NTriples;
  return Format::Turtle;
}

std::string render_graph(const Graph& g, Format format) {
  if (format == Format::Turtle) return serialize_turtle(g, standard_prefixes());
  return serialize_ntriples(g);
}

std::string render_report(const AssessmentReport& report, Format format) {
  if (format == Format::Json) return report_to_json(report);
  return render_graph(emit_report_graph(report), format);
}

std::string ingest_to_ntriples(const std::vector<EnergyRecord>& records,
                               const std::vector<MappingRule>& rules,
                               const ProvenanceStamp& prov) {
  std::map<Triple, std::size_t> seen;
  for (const auto& r : records)
    for (const auto& t : map_record(r, rules, prov)) ++seen[t];
  std::string out;
  for (const auto& [t, n] : seen) {
    std::string line = t.text() + "\n";
    for (std::size_t i = 0; i < n; ++i) out += line;
  }
  return out;
}

fs::path resolve_data_dir(const std::optional<std::string>& flag) {
  if (const char* env = std::getenv("LDQ_DATA_DIR"); env && *env) return env;
  if (flag && !flag->empty()) return *flag;
  return "ldq-data";
}

}  // namespace ldq::facade
