#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace bellrand {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

// A matrix that was supposed to be a state, measurement or unitary is not one.
class InvalidOperator : public Error {
 public:
  using Error::Error;
};

// Collapsing onto, or conditioning on, something that cannot happen.
class ZeroProbability : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

// An exhaustive computation was asked for beyond its size cap.
class EnumerationLimit : public Error {
 public:
  using Error::Error;
};

class SourceExhausted : public Error {
 public:
  SourceExhausted(const std::string& what, std::uint64_t bits_consumed, std::uint64_t items_completed = 0)
      : Error(what), bits_consumed_(bits_consumed), items_completed_(items_completed) {}

  std::uint64_t bits_consumed() const { return bits_consumed_; }
  std::uint64_t items_completed() const { return items_completed_; }

 private:
  std::uint64_t bits_consumed_;
  std::uint64_t items_completed_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace bellrand
