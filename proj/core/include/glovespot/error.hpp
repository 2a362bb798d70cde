#pragma once

#include <stdexcept>
#include <string>

namespace glovespot {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidTopology : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent document. `field()` names the offending key path.
class ParseError : public Error {
 public:
  ParseError(std::string field, const std::string& what)
      : Error(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class GenerationError : public Error {
 public:
  using Error::Error;
};

class HarvestError : public Error {
 public:
  using Error::Error;
};

class MissingFrame : public Error {
 public:
  using Error::Error;
};

class StreamOrderError : public Error {
 public:
  using Error::Error;
};

class NoSavedPose : public Error {
 public:
  using Error::Error;
};

class TrainingDiverged : public Error {
 public:
  TrainingDiverged(std::size_t epoch, const std::string& what) : Error(what), epoch_(epoch) {}
  std::size_t epoch() const noexcept { return epoch_; }

 private:
  std::size_t epoch_;
};

class ExperimentError : public Error {
 public:
  using Error::Error;
};

}  // namespace glovespot
