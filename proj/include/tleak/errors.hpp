#pragma once

#include <stdexcept>
#include <string>

namespace tleak {

// Base of everything the library throws for a domain-level failure.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

// The near-zero subspace of a chain is not a single particle-hole pair.
class DegenerateSubspace : public Error {
 public:
  using Error::Error;
};

// A state or matrix failed a physicality check (imaginary residue, basis mismatch).
class NonPhysical : public Error {
 public:
  using Error::Error;
};

class StepSizeTooCoarse : public Error {
 public:
  using Error::Error;
};

class FitFailure : public Error {
 public:
  using Error::Error;
};

class ConfigInvalid : public Error {
 public:
  ConfigInvalid(std::string field, const std::string& reason)
      : Error(field + ": " + reason), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace tleak
