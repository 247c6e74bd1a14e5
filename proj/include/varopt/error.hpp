#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace varopt {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed game, rule, or joint space.
class InvalidModel : public Error {
 public:
  using Error::Error;
};

// A parameter required for evaluation has no value.
class MissingParameter : public Error {
 public:
  explicit MissingParameter(const std::string& id)
      : Error("missing value for parameter '" + id + "'"), id_(id) {}
  [[nodiscard]] const std::string& id() const { return id_; }

 private:
  std::string id_;
};

// A meta-game cell has no unique equilibrium payoff.
class AmbiguityError : public Error {
 public:
  explicit AmbiguityError(const std::string& cell)
      : Error("ambiguous meta-game cell " + cell), cell_(cell) {}
  [[nodiscard]] const std::string& cell() const { return cell_; }

 private:
  std::string cell_;
};

// Game-file syntax or semantic error with a 1-based source location.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line_(line),
        column_(column),
        message_(what) {}
  [[nodiscard]] std::size_t line() const { return line_; }
  [[nodiscard]] std::size_t column() const { return column_; }
  // The message without the location prefix.
  [[nodiscard]] const std::string& message() const { return message_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string message_;
};

}  // namespace varopt
