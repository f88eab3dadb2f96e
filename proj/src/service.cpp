#include "ldq/service.hpp"

#include <httplib.h>

#include <atomic>
#include <condition_variable>
#include <cstdio>
#include <json.hpp>
#include <map>
#include <mutex>
#include <regex>
#include <thread>

#include "ldq/errors.hpp"
#include "ldq/facade.hpp"
#include "ldq/pipeline.hpp"

namespace ldq {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

const std::regex kIdPattern("[A-Za-z0-9._-]{1,128}");

bool valid_id(const std::string& id) { return std::regex_match(id, kIdPattern); }

void send_json(httplib::Response& res, int status, const ordered_json& body) {
  res.status = status;
  res.set_content(body.dump(2) + "\n", "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message) {
  send_json(res, status, ordered_json{{"error", message}});
}

// Thrown inside request handlers to pick the status code.
struct HttpFailure {
  int status;
  std::string message;
};

enum class JobKind { Assess, Pipeline };
enum class JobState { Queued, Running, Done, Failed };

const char* job_kind_name(JobKind k) { return k == JobKind::Assess ? "assess" : "pipeline"; }

const char* job_state_name(JobState s) {
  switch (s) {
    case JobState::Queued: return "Queued";
    case JobState::Running: return "Running";
    case JobState::Done: return "Done";
    case JobState::Failed: return "Failed";
  }
  return "Failed";
}

struct Job {
  std::string id;
  JobKind kind = JobKind::Assess;
  JobState state = JobState::Queued;
  std::string created_at;
  std::string dataset_id;
  std::vector<std::string> report_ids;
  ordered_json run_state;
  std::string error;

  ordered_json to_json() const {
    ordered_json j{{"jobId", id},
                   {"kind", job_kind_name(kind)},
                   {"state", job_state_name(state)},
                   {"createdAt", created_at},
                   {"datasetId", dataset_id},
                   {"reportIds", report_ids}};
    j["runState"] = run_state;
    if (!error.empty()) j["error"] = error;
    return j;
  }
};

// Everything a job needs, resolved before it is queued so policy errors
// surface as 422 on the request.
struct JobSpec {
  JobKind kind;
  std::string dataset_id;
  Graph graph;
  facade::LoadedPolicy policy;
  std::uint64_t seed = 0;
  std::optional<int> rounds;
};

}  // namespace

struct Service::Impl {
  ServiceConfig config;
  httplib::Server server;
  std::mutex mu;
  std::condition_variable idle;
  std::map<std::string, Job> jobs;
  std::vector<std::thread> threads;
  std::size_t running = 0;
  std::uint64_t next_job = 1;

  explicit Impl(ServiceConfig c) : config(std::move(c)) {
    for (const char* sub : {"datasets", "reports", "traces", "jobs"})
      fs::create_directories(config.data_dir / sub);
    routes();
  }

  ~Impl() {
    server.stop();
    for (auto& t : threads)
      if (t.joinable()) t.join();
  }

  fs::path path(const std::string& sub, const std::string& name) const {
    return config.data_dir / sub / name;
  }

  // Dataset store.

  std::optional<fs::path> dataset_file(const std::string& id) const {
    for (const char* ext : {".nt", ".ttl"}) {
      fs::path p = path("datasets", id + ext);
      if (fs::exists(p)) return p;
    }
    return std::nullopt;
  }

  void post_dataset(const httplib::Request& req, httplib::Response& res) {
    std::string text;
    bool turtle = false;
    Graph g;
    try {
      if (req.is_multipart_form_data()) {
        if (!req.has_file("records") || !req.has_file("mapping"))
          throw HttpFailure{400, "multipart upload needs \"records\" and \"mapping\" parts"};
        auto records = parse_records(req.get_file_value("records").content);
        auto mapping = load_mapping(req.get_file_value("mapping").content);
        ProvenanceStamp prov;
        prov.generated_at = reference_now();
        text = facade::ingest_to_ntriples(records, mapping, prov);
      } else {
        text = req.body;
        std::string type = req.get_header_value("Content-Type");
        turtle = type.find("turtle") != std::string::npos;
      }
      g = facade::parse_dataset(text, turtle);
    } catch (const Error& e) {
      throw HttpFailure{400, e.what()};
    }

    std::string id = req.has_param("id") ? req.get_param_value("id") : content_dataset_id(g);
    if (!valid_id(id)) throw HttpFailure{400, "invalid dataset id"};
    {
      std::lock_guard lock(mu);
      if (dataset_file(id)) throw HttpFailure{409, "dataset " + id + " already exists"};
      facade::write_file(path("datasets", id + (turtle ? ".ttl" : ".nt")), text);
    }
    ordered_json meta{{"datasetId", id},
                      {"format", turtle ? "turtle" : "ntriples"},
                      {"triples", g.size()},
                      {"rawStatementCount", g.raw_statement_count()},
                      {"createdAt", format_utc(reference_now())}};
    facade::write_file(path("datasets", id + ".json"), meta.dump(2) + "\n");
    send_json(res, 201, ordered_json{{"datasetId", id}});
  }

  // Policy references: an inline object, or a path on the server's disk.
  facade::LoadedPolicy resolve_policy(const ordered_json& body) {
    if (!body.contains("assessment") || !body.contains("rules"))
      throw HttpFailure{400, "body needs \"assessment\" and \"rules\""};
    auto text_of = [](const ordered_json& ref) -> std::pair<std::string, fs::path> {
      if (ref.is_string()) {
        fs::path p = ref.get<std::string>();
        return {facade::read_file(p), p.parent_path()};
      }
      if (ref.is_object()) return {ref.dump(), fs::path()};
      throw HttpFailure{400, "policy references are objects or paths"};
    };
    try {
      auto [assessment, base] = text_of(body["assessment"]);
      auto [rules, unused] = text_of(body["rules"]);
      (void)unused;
      if (base.empty()) base = config.data_dir;
      facade::LoadedPolicy loaded;
      if (body.contains("probe")) {
        // An inline probe replaces whatever the policy names.
        nlohmann::json a = nlohmann::json::parse(assessment);
        for (auto& m : a["metrics"])
          if (m.value("id", "") == metric::availability && m.contains("params"))
            m["params"]["probeFile"] = "";
        loaded = facade::load_policy(a.dump(), rules, base);
        loaded.probe = std::make_shared<FixtureProbe>(FixtureProbe::from_json(body["probe"].dump()));
      } else {
        loaded = facade::load_policy(assessment, rules, base);
      }
      return loaded;
    } catch (const nlohmann::json::exception& e) {
      throw HttpFailure{400, e.what()};
    } catch (const Error& e) {
      throw HttpFailure{422, e.what()};
    }
  }

  void post_job(JobKind kind, const httplib::Request& req, httplib::Response& res) {
    std::string id = req.matches[1];
    auto file = dataset_file(id);
    if (!file) throw HttpFailure{404, "unknown dataset " + id};
    ordered_json body;
    try {
      body = req.body.empty() ? ordered_json::object() : ordered_json::parse(req.body);
    } catch (const nlohmann::json::exception& e) {
      throw HttpFailure{400, e.what()};
    }
    if (!body.is_object()) throw HttpFailure{400, "body must be a JSON object"};

    JobSpec spec{kind, id, facade::load_dataset(*file), resolve_policy(body), 0, std::nullopt};
    try {
      if (body.contains("seed")) spec.seed = body["seed"].get<std::uint64_t>();
      if (body.contains("rounds")) spec.rounds = body["rounds"].get<int>();
    } catch (const nlohmann::json::exception& e) {
      throw HttpFailure{400, e.what()};
    }
    if (spec.rounds && *spec.rounds < 0) throw HttpFailure{400, "rounds must be non-negative"};

    std::string job_id;
    {
      std::lock_guard lock(mu);
      char buf[32];
      std::snprintf(buf, sizeof buf, "job-%06llu", static_cast<unsigned long long>(next_job++));
      job_id = buf;
      Job job;
      job.id = job_id;
      job.kind = kind;
      job.created_at = format_utc(reference_now());
      job.dataset_id = id;
      persist(job);
      jobs.emplace(job_id, std::move(job));
      ++running;
      threads.emplace_back([this, job_id, spec = std::move(spec)]() mutable {
        execute(job_id, std::move(spec));
      });
    }
    send_json(res, 202, ordered_json{{"jobId", job_id}});
  }

  void persist(const Job& job) {
    facade::write_file(path("jobs", job.id + ".json"), job.to_json().dump(2) + "\n");
  }

  void update(const std::string& job_id, const std::function<void(Job&)>& change) {
    std::lock_guard lock(mu);
    Job& job = jobs.at(job_id);
    change(job);
    persist(job);
  }

  // Report files are named by the hash of their N-Triples form.
  std::string store_report(const AssessmentReport& report) {
    std::string nt = facade::render_report(report, facade::Format::NTriples);
    std::string id = sha256_prefix(nt);
    facade::write_file(path("reports", id + ".nt"), nt);
    facade::write_file(path("reports", id + ".ttl"),
                       facade::render_report(report, facade::Format::Turtle));
    facade::write_file(path("reports", id + ".json"), report_to_json(report));
    return id;
  }

  void execute(const std::string& job_id, JobSpec spec) {
    update(job_id, [](Job& j) { j.state = JobState::Running; });
    try {
      UnixSeconds now = reference_now();
      std::vector<std::string> ids;
      ordered_json state_json;
      if (spec.kind == JobKind::Assess) {
        AssessOptions opts;
        opts.probe = spec.policy.probe.get();
        opts.now = now;
        opts.seed = spec.seed;
        opts.dataset_id = content_dataset_id(spec.graph);
        ids.push_back(store_report(assess(spec.graph, spec.policy.policy, opts)));
      } else {
        PipelineInput input;
        input.graph = std::move(spec.graph);
        PipelineOptions opts;
        opts.probe = spec.policy.probe.get();
        opts.now = now;
        opts.seed = spec.seed;
        opts.max_rounds = spec.rounds;
        RunState state = run_pipeline(input, spec.policy.policy, opts);
        for (const auto& h : state.history) ids.push_back(store_report(h.report));
        facade::write_file(path("traces", job_id + ".jsonl"), trace_to_jsonl(state.trace));
        facade::write_file(path("datasets", job_id + "-final.nt"), serialize_ntriples(state.graph));
        state_json = ordered_json::parse(run_state_to_json(state));
        if (state.terminal == Terminal::Failed) throw Error(state.error);
      }
      update(job_id, [&](Job& j) {
        j.state = JobState::Done;
        j.report_ids = ids;
        j.run_state = state_json;
      });
    } catch (const std::exception& e) {
      std::string message = e.what();
      update(job_id, [&](Job& j) {
        j.state = JobState::Failed;
        j.error = message;
      });
    }
    std::lock_guard lock(mu);
    --running;
    idle.notify_all();
  }

  void get_job(const httplib::Request& req, httplib::Response& res) {
    std::lock_guard lock(mu);
    auto it = jobs.find(req.matches[1]);
    if (it == jobs.end()) throw HttpFailure{404, "unknown job"};
    send_json(res, 200, it->second.to_json());
  }

  void get_report(const httplib::Request& req, httplib::Response& res) {
    std::string id = req.matches[1];
    std::string accept = req.get_header_value("Accept");
    std::string ext = ".json", type = "application/json";
    if (accept.find("turtle") != std::string::npos) {
      ext = ".ttl";
      type = "text/turtle";
    } else if (accept.find("n-triples") != std::string::npos ||
               accept.find("text/plain") != std::string::npos) {
      ext = ".nt";
      type = "application/n-triples";
    }
    fs::path p = path("reports", id + ext);
    if (!fs::exists(p)) throw HttpFailure{404, "unknown report " + id};
    res.status = 200;
    res.set_content(facade::read_file(p), type);
  }

  void get_dataset(const httplib::Request& req, httplib::Response& res) {
    auto file = dataset_file(req.matches[1]);
    if (!file) throw HttpFailure{404, "unknown dataset"};
    res.status = 200;
    res.set_content(facade::read_file(*file),
                    file->extension() == ".ttl" ? "text/turtle" : "application/n-triples");
  }

  using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

  static httplib::Server::Handler guarded(Handler h) {
    return [h = std::move(h)](const httplib::Request& req, httplib::Response& res) {
      try {
        h(req, res);
      } catch (const HttpFailure& f) {
        send_error(res, f.status, f.message);
      } catch (const std::exception& e) {
        send_error(res, 500, e.what());
      }
    };
  }

  void routes() {
    const std::string id = "([A-Za-z0-9._-]+)";
    server.Get("/health", [](const httplib::Request&, httplib::Response& res) {
      send_json(res, 200, ordered_json{{"status", "ok"}});
    });
    server.Post("/datasets", guarded([this](auto& q, auto& r) { post_dataset(q, r); }));
    server.Get("/datasets/" + id, guarded([this](auto& q, auto& r) { get_dataset(q, r); }));
    server.Post("/datasets/" + id + "/assess",
                guarded([this](auto& q, auto& r) { post_job(JobKind::Assess, q, r); }));
    server.Post("/datasets/" + id + "/pipeline",
                guarded([this](auto& q, auto& r) { post_job(JobKind::Pipeline, q, r); }));
    server.Get("/jobs/" + id, guarded([this](auto& q, auto& r) { get_job(q, r); }));
    server.Get("/reports/" + id, guarded([this](auto& q, auto& r) { get_report(q, r); }));
  }
};

Service::Service(ServiceConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {}
Service::~Service() = default;

bool Service::listen(const std::string& host, int port) { return impl_->server.listen(host, port); }
int Service::bind_to_any_port(const std::string& host) {
  return impl_->server.bind_to_any_port(host);
}
bool Service::listen_after_bind() { return impl_->server.listen_after_bind(); }
void Service::stop() { impl_->server.stop(); }

void Service::wait_for_jobs() {
  std::unique_lock lock(impl_->mu);
  impl_->idle.wait(lock, [this] { return impl_->running == 0; });
}

}  // namespace ldq
