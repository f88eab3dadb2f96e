#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "ldq/assess.hpp"
#include "ldq/ingest.hpp"
#include "ldq/vocab.hpp"

// Plumbing shared by the CLI and the HTTP service, so both surfaces load
// inputs and render reports the same way.
namespace ldq::facade {

// Throw ConfigError naming the path.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view text);

// Turtle when the name ends in .ttl, N-Triples otherwise.
Graph parse_dataset(std::string_view text, bool turtle);
Graph load_dataset(const std::filesystem::path& path);

struct LoadedPolicy {
  QualityPolicy policy;
  // Null when the policy has no availability metric or names no probe.
  std::shared_ptr<const DereferenceProbe> probe;
};

// The availability metric's "probeFile" param is resolved against base_dir;
// the value "live" selects HttpProbe.
LoadedPolicy load_policy(std::string_view assessment_json, std::string_view rules_json,
                         const std::filesystem::path& base_dir);
LoadedPolicy load_policy_files(const std::filesystem::path& assessment,
                               const std::filesystem::path& rules);

enum class Format { NTriples, Json, Turtle };
std::optional<Format> parse_format(std::string_view name);
// Explicit format, else by extension (.json, .nt), else Turtle.
Format format_for(const std::optional<Format>& flag, const std::filesystem::path& path);

std::string render_graph(const Graph& g, Format format);
std::string render_report(const AssessmentReport& report, Format format);

// Mapped records as N-Triples with one line per ingested statement, so
// duplicate records survive a round trip through a file.
std::string ingest_to_ntriples(const std::vector<EnergyRecord>& records,
                               const std::vector<MappingRule>& rules,
                               const ProvenanceStamp& prov);

// LDQ_DATA_DIR wins over the flag; "ldq-data" when neither is given.
std::filesystem::path resolve_data_dir(const std::optional<std::string>& flag);

}  // namespace ldq::facade
