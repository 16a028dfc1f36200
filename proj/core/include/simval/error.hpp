#pragma once

#include <stdexcept>
#include <string>

namespace simval {

// Every failure raised by the library derives from Error so callers can map
// the concrete type onto an exit code.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
  public:
    using Error::Error;
};

class InvalidPriorError : public ConfigError {
  public:
    using ConfigError::ConfigError;
};

class PlacementError : public Error {
  public:
    using Error::Error;
};

class OutOfBoundsError : public Error {
  public:
    using Error::Error;
};

class DomainError : public Error {
  public:
    using Error::Error;
};

class PathError : public Error {
  public:
    using Error::Error;
};

class IdentityMismatchError : public Error {
  public:
    using Error::Error;
};

class MissingBufferError : public Error {
  public:
    using Error::Error;
};

class EmptyContextError : public Error {
  public:
    using Error::Error;
};

class AllOccludedError : public Error {
  public:
    using Error::Error;
};

class PatchTooSmallError : public Error {
  public:
    using Error::Error;
};

class MissingNeighborError : public Error {
  public:
    using Error::Error;
};

class RankDeficientError : public Error {
  public:
    using Error::Error;
};

class LabelMismatchError : public Error {
  public:
    using Error::Error;
};

class FormatError : public Error {
  public:
    using Error::Error;
};

class IngestError : public Error {
  public:
    using Error::Error;
};

}  // namespace simval
