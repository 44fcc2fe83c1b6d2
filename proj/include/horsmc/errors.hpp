#pragma once

#include <stdexcept>
#include <string>

namespace horsmc {

struct SourcePos {
  int line = 0;
  int column = 0;
  std::string str() const { return std::to_string(line) + ":" + std::to_string(column); }
};

/// Base class for every diagnostic raised by the checker.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(SourcePos pos, const std::string& msg)
      : Error(pos.str() + ": " + msg), pos_(pos) {}
  SourcePos pos() const { return pos_; }

 private:
  SourcePos pos_;
};

class SortError : public Error {
 public:
  SortError(std::string name, const std::string& conflict)
      : Error("sort error at '" + name + "': " + conflict), name_(std::move(name)) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

class ArityError : public Error {
 public:
  using Error::Error;
};

class WeaknessViolation : public Error {
 public:
  using Error::Error;
};

class MissingTransition : public Error {
 public:
  MissingTransition(const std::string& state, const std::string& symbol)
      : Error("missing transition for state '" + state + "' on symbol '" + symbol + "'") {}
};

class UnknownSymbol : public Error {
 public:
  explicit UnknownSymbol(const std::string& name) : Error("unknown symbol '" + name + "'") {}
};

class UnknownAtom : public Error {
 public:
  explicit UnknownAtom(const std::string& name)
      : Error("atomic proposition '" + name + "' is not in the alphabet") {}
};

class AlphabetMismatch : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class TargetNotConsistent : public Error {
 public:
  using Error::Error;
};

}  // namespace horsmc
