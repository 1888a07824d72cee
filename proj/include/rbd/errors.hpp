#pragma once

#include <stdexcept>
#include <string>

namespace rbd {

// Base for everything raised by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Violated interface precondition (shape mismatch, empty batch, bad range).
struct ContractError : Error {
  using Error::Error;
};

// NaN/Inf where finite values are required.
struct NumericalFault : Error {
  using Error::Error;
};

// Bad configuration value.
struct ConfigError : Error {
  using Error::Error;
};

// Dataset files missing or unreadable.
struct LoadError : Error {
  using Error::Error;
};

// Dataset contents violate the format (e.g. label out of range).
struct CorruptDataError : Error {
  using Error::Error;
};

// Requested poison set exceeds the available target-class samples.
struct CapacityError : Error {
  using Error::Error;
};

// Forget set would not nest inside the poison set.
struct NestingError : Error {
  using Error::Error;
};

// Partition index outside the dataset.
struct IndexError : Error {
  using Error::Error;
};

// Cosine of a zero vector.
struct UndefinedCosineError : Error {
  using Error::Error;
};

// PCGrad projection against a zero reference gradient.
struct DegenerateProjectionError : Error {
  using Error::Error;
};

// A pipeline stage was invoked before the stage it depends on.
struct DependencyError : Error {
  using Error::Error;
};

// On-disk artifact was produced under a different configuration.
struct StaleArtifactError : Error {
  using Error::Error;
};

}  // namespace rbd
