#pragma once

#include <stdexcept>
#include <string>

namespace wmdecomp {

// Base for every error raised by the library. `stage` names the pipeline step
// that failed ("load", "vectorize", "solve", ...), empty for direct calls.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what, std::string stage = {})
      : std::runtime_error(stage.empty() ? what : stage + ": " + what),
        stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class SolverError : public Error {
 public:
  SolverError(const std::string& what, std::string instance_dump)
      : Error(what), dump_(std::move(instance_dump)) {}

  // Textual dump of the transport instance that failed, for bug reports.
  const std::string& instance_dump() const noexcept { return dump_; }

 private:
  std::string dump_;
};

}  // namespace wmdecomp
