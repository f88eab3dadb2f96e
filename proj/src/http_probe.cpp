#include <httplib.h>

#include <chrono>

#include "ldq/assess.hpp"

namespace ldq {

ProbeResult HttpProbe::fetch(const std::string& iri) const {
  auto scheme_end = iri.find("://");
  if (scheme_end == std::string::npos) return {};
  auto path_start = iri.find('/', scheme_end + 3);
  std::string origin = path_start == std::string::npos ? iri : iri.substr(0, path_start);
  std::string path = path_start == std::string::npos ? "/" : iri.substr(path_start);
  if (auto hash = path.find('#'); hash != std::string::npos) path.resize(hash);

  auto started = std::chrono::steady_clock::now();
  ProbeResult result;
  try {
    httplib::Client client(origin);
    client.set_connection_timeout(std::chrono::milliseconds(timeout_ms_));
    client.set_read_timeout(std::chrono::milliseconds(timeout_ms_));
    client.set_follow_location(true);
    if (auto response = client.Head(path)) result.status = response->status;
  } catch (const std::exception&) {
    result.status = 0;
  }
  result.latency_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                          std::chrono::steady_clock::now() - started)
                          .count();
  return result;
}

}  // namespace ldq
