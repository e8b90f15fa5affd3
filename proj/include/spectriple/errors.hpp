#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace spectriple {

enum class ErrorKind {
  invalid_argument,
  size_limit,
  parse,
  metric_axiom,
  insufficient_data,
  insufficient_chain,
  degenerate_pair,
  empty_triple,
  oracle_size,
  range,
  config,
};

const char* to_string(ErrorKind kind);

// Base class for every error raised by the library.  The kind lets the CLI
// map failures to exit codes without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class MetricAxiomError : public Error {
 public:
  // triple is (i, k, j) for a violation d(i,j) > d(i,k) + d(k,j); the other
  // axioms report (i, j, j).
  MetricAxiomError(const std::string& what, std::array<std::size_t, 3> triple)
      : Error(ErrorKind::metric_axiom, what), triple_(triple) {}
  const std::array<std::size_t, 3>& triple() const noexcept { return triple_; }

 private:
  std::array<std::size_t, 3> triple_;
};

class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& message)
      : Error(ErrorKind::config, field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace spectriple
