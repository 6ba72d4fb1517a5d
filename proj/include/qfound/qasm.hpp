#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "qfound/circuit.hpp"

namespace qfound::qasm {

/// Lexical or syntactic failure. line/column are 1-based and point at the
/// offending character or token.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, int column, std::string message, std::string expected);

  int line() const { return line_; }
  int column() const { return column_; }
  const std::string& message() const { return message_; }
  const std::string& expected() const { return expected_; }

 private:
  int line_;
  int column_;
  std::string message_;
  std::string expected_;
};

/// Well-formed program that names an undeclared register, an unsupported
/// gate, an out-of-range index, or violates a circuit invariant.
class SemanticError : public std::runtime_error {
 public:
  SemanticError(int line, int column, std::string message);

  int line() const { return line_; }
  int column() const { return column_; }
  const std::string& message() const { return message_; }

 private:
  int line_;
  int column_;
  std::string message_;
};

// Strict OpenQASM 2.0 subset; see docs/qasm_grammar.md.
Circuit parse(std::string_view source);
Circuit load(const std::filesystem::path& path);

// One statement per line, lowercase gate names, angles with 17 significant
// digits, LF line endings. Registers are emitted as q and c.
std::string emit(const Circuit& circuit);

}  // namespace qfound::qasm
