#pragma once

#include <stdexcept>
#include <string>

namespace bathyplan {

/// Malformed or inconsistent input data (raster files, feature tables, specs).
class DataError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Parse failure with the 1-based line number of the offending input line.
class ParseError : public DataError {
public:
  ParseError(std::size_t line, const std::string& what)
      : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

/// Invalid configuration: bad knob values, inconsistent terrain specs.
class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A planner could not produce a path (no operable cells, no start, ...).
class PlannerError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace bathyplan
