#pragma once

#include <stdexcept>
#include <string>

namespace sbqe {

// All library failures derive from sbqe::Error so callers can catch one type.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class ShapeError : public Error {
  public:
    using Error::Error;
};

class SizeError : public ShapeError {
  public:
    using ShapeError::ShapeError;
};

// A documented precondition on a value (unitarity, normalisation, ...) was violated.
class ContractError : public Error {
  public:
    using Error::Error;
};

class RangeError : public Error {
  public:
    using Error::Error;
};

class DegenerateInputError : public Error {
  public:
    using Error::Error;
};

class NumericError : public Error {
  public:
    using Error::Error;
};

class ParseError : public Error {
  public:
    ParseError(const std::string& what, std::size_t line)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    [[nodiscard]] std::size_t line() const noexcept { return line_; }

  private:
    std::size_t line_;
};

class FormatError : public Error {
  public:
    using Error::Error;
};

class IoError : public Error {
  public:
    using Error::Error;
};

class StratificationError : public Error {
  public:
    using Error::Error;
};

class ConfigError : public Error {
  public:
    ConfigError(const std::string& key, const std::string& what)
        : Error("config key '" + key + "': " + what), key_(key) {}
    [[nodiscard]] const std::string& key() const noexcept { return key_; }

  private:
    std::string key_;
};

class PairingError : public Error {
  public:
    using Error::Error;
};

class AggregationError : public Error {
  public:
    using Error::Error;
};

} // namespace sbqe
