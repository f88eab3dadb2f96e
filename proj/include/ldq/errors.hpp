#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ldq {

// Root of every typed error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t line, std::size_t column, std::string reason)
      : Error("syntax error at " + std::to_string(line) + ":" +
              std::to_string(column) + ": " + reason),
        line_(line),
        column_(column),
        reason_(std::move(reason)) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::string& reason() const { return reason_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string reason_;
};

class EncodingError : public Error {
 public:
  explicit EncodingError(std::size_t offset)
      : Error("invalid UTF-8 at byte offset " + std::to_string(offset)),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class UnknownPrefix : public Error {
 public:
  UnknownPrefix(std::string prefix, std::size_t line)
      : Error("unknown prefix '" + prefix + "' at line " +
              std::to_string(line)),
        prefix_(std::move(prefix)),
        line_(line) {}
  const std::string& prefix() const { return prefix_; }
  std::size_t line() const { return line_; }

 private:
  std::string prefix_;
  std::size_t line_;
};

class TermError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  ConfigError(std::string path, std::string reason)
      : Error("config error at " + path + ": " + reason),
        path_(std::move(path)),
        reason_(std::move(reason)) {}
  const std::string& path() const { return path_; }
  const std::string& reason() const { return reason_; }

 private:
  std::string path_;
  std::string reason_;
};

class DuplicateRecordType : public ConfigError {
 public:
  explicit DuplicateRecordType(const std::string& type)
      : ConfigError("rules", "duplicate rule for record type " + type) {}
};

class ThresholdOutOfRange : public ConfigError {
 public:
  ThresholdOutOfRange(const std::string& key, double value)
      : ConfigError(key, "threshold " + std::to_string(value) +
                             " outside [0,1]") {}
};

class UnknownMetricReference : public ConfigError {
 public:
  UnknownMetricReference(const std::string& path, const std::string& id)
      : ConfigError(path, "unknown metric '" + id + "'") {}
};

class NoRuleForType : public Error {
 public:
  explicit NoRuleForType(const std::string& type)
      : Error("no mapping rule for record type " + type) {}
};

class TemplateError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class UnknownUnitSymbol : public Error {
 public:
  explicit UnknownUnitSymbol(const std::string& symbol)
      : Error("unknown unit symbol '" + symbol + "'"), symbol_(symbol) {}
  const std::string& symbol() const { return symbol_; }

 private:
  std::string symbol_;
};

class ProbeUnavailable : public Error {
 public:
  ProbeUnavailable() : Error("no dereference probe configured") {}
};

class DegenerateTimeRange : public Error {
 public:
  DegenerateTimeRange() : Error("all training timestamps are equal") {}
};

class DuplicateStageId : public Error {
 public:
  explicit DuplicateStageId(const std::string& id)
      : Error("stage id already registered: " + id) {}
};

class MalformedTimestamp : public Error {
 public:
  explicit MalformedTimestamp(const std::string& text)
      : Error("malformed ISO-8601 UTC timestamp: '" + text + "'") {}
};

}  // namespace ldq
