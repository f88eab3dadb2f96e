#pragma once

#include <filesystem>
#include <memory>
#include <string>

namespace ldq {

struct ServiceConfig {
  std::filesystem::path data_dir = "ldq-data";
};

// HTTP front end over a flat-file store:
//   datasets/<id>.nt|.ttl + <id>.json, reports/<id>.{nt,ttl,json},
//   traces/<jobId>.jsonl, jobs/<jobId>.json
// Jobs run on their own threads; the job table is guarded by one mutex.
class Service {
 public:
  explicit Service(ServiceConfig config);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Blocks until stop().
  bool listen(const std::string& host, int port);
  // Returns the bound port, or -1.
  int bind_to_any_port(const std::string& host);
  bool listen_after_bind();
  void stop();
  // Waits for every started job to finish.
  void wait_for_jobs();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace ldq
