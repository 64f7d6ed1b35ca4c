#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tdr {

// Base of every error raised by the library. Callers that only care about
// "something went wrong" catch this.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class CapacityError : public Error {
 public:
  using Error::Error;
};

class InvalidParam : public Error {
 public:
  using Error::Error;
};

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t offset, const std::string& what)
      : Error("offset " + std::to_string(offset) + ": " + what),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class PatternTooComplex : public Error {
 public:
  using Error::Error;
};

class TooManyRequiredLabels : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class QuotaUnmet : public Error {
 public:
  QuotaUnmet(std::string kind, bool polarity)
      : Error("quota unmet for " + kind + "/" + (polarity ? "true" : "false")),
        kind_(std::move(kind)),
        polarity_(polarity) {}
  const std::string& kind() const { return kind_; }
  bool polarity() const { return polarity_; }

 private:
  std::string kind_;
  bool polarity_;
};

class MismatchError : public Error {
 public:
  MismatchError(std::vector<std::size_t> offenders, const std::string& what)
      : Error(what), offenders_(std::move(offenders)) {}
  const std::vector<std::size_t>& offenders() const { return offenders_; }

 private:
  std::vector<std::size_t> offenders_;
};

}  // namespace tdr
