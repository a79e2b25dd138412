#pragma once

#include <stdexcept>
#include <string>

namespace dkit {

enum class ErrorKind {
  Parse,
  IrregularPencil,
  InconsistentInitialCondition,
  UnresolvableSpectrum,
  InputHorizonTooShort,
  ChainConstructionFailure,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class IrregularPencil : public Error {
 public:
  explicit IrregularPencil(const std::string& what) : Error(ErrorKind::IrregularPencil, what) {}
};

/// Exact mode met an irreducible factor of degree >= 2; rerun in float mode.
class UnresolvableSpectrum : public Error {
 public:
  explicit UnresolvableSpectrum(const std::string& what) : Error(ErrorKind::UnresolvableSpectrum, what) {}
};

class ChainConstructionFailure : public Error {
 public:
  explicit ChainConstructionFailure(const std::string& what)
      : Error(ErrorKind::ChainConstructionFailure, what) {}
};

class InputHorizonTooShort : public Error {
 public:
  explicit InputHorizonTooShort(const std::string& what) : Error(ErrorKind::InputHorizonTooShort, what) {}
};

class InconsistentInitialCondition : public Error {
 public:
  explicit InconsistentInitialCondition(const std::string& what)
      : Error(ErrorKind::InconsistentInitialCondition, what) {}
};

class ParseError : public Error {
 public:
  ParseError(const std::string& field, const std::string& what, int line = 0)
      : Error(ErrorKind::Parse, describe(field, what, line)), field_(field), line_(line) {}

  const std::string& field() const noexcept { return field_; }
  int line() const noexcept { return line_; }

 private:
  static std::string describe(const std::string& field, const std::string& what, int line) {
    std::string s;
    if (line > 0) s += "line " + std::to_string(line) + ": ";
    if (!field.empty()) s += field + ": ";
    return s + what;
  }

  std::string field_;
  int line_;
};

}  // namespace dkit
