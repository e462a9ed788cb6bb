#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hoi {

// All library failures derive from Error so callers can catch one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  // Column is npos when the whole row is at fault (ragged rows).
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  ParseError(std::size_t row, std::size_t col, const std::string& what)
      : Error(what), row_(row), col_(col) {}

  std::size_t row() const noexcept { return row_; }
  std::size_t col() const noexcept { return col_; }

 private:
  std::size_t row_;
  std::size_t col_;
};

class EmptyInput : public Error {
 public:
  using Error::Error;
};

class DegenerateChannel : public Error {
 public:
  explicit DegenerateChannel(std::size_t channel)
      : Error("channel " + std::to_string(channel) + " is constant"), channel_(channel) {}
  std::size_t channel() const noexcept { return channel_; }

 private:
  std::size_t channel_;
};

class TooFewSamples : public Error {
 public:
  using Error::Error;
};

class TooFewChannels : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

class SingularCovariance : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace hoi
