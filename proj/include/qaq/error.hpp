#pragma once

#include <stdexcept>
#include <string>

namespace qaq {

// Base of every error raised by the library. Callers that only need a
// message can catch this; the CLI maps the concrete kinds to exit codes.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error { public: using Error::Error; };
class FormatError : public Error { public: using Error::Error; };
class DomainError : public Error { public: using Error::Error; };
class DimensionError : public Error { public: using Error::Error; };

// Sample sets that cannot be fitted (too few samples, zero variance,
// single-signed products, ...).
class DegenerateInputError : public Error { public: using Error::Error; };

// No patch survived sharpness selection.
class SelectionError : public DegenerateInputError {
public:
  using DegenerateInputError::DegenerateInputError;
};

class InsufficientDataError : public Error { public: using Error::Error; };
class IncompatibleModelError : public Error { public: using Error::Error; };
class VersionError : public Error { public: using Error::Error; };
class CorruptionError : public Error { public: using Error::Error; };

}  // namespace qaq
