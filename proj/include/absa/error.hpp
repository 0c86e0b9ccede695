#pragma once

#include <stdexcept>
#include <string>

namespace absa {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed XML or an invalid record inside an otherwise well-formed corpus.
struct ParseError : Error {
  using Error::Error;
};

// Malformed embedding file, config document, or model directory.
struct FormatError : Error {
  using Error::Error;
};

struct ShapeError : Error {
  using Error::Error;
};

struct ArgumentError : Error {
  using Error::Error;
};

// Non-finite values encountered while training.
struct TrainingError : Error {
  using Error::Error;
};

struct UsageError : Error {
  using Error::Error;
};

}  // namespace absa
