#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace ldq::test {

inline std::string source_path(const std::string& relative) {
  return std::string(LDQ_SOURCE_DIR) + "/" + relative;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

inline std::string read_source(const std::string& relative) {
  return read_file(source_path(relative));
}

}  // namespace ldq::test
