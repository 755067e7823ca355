#pragma once

#include <stdexcept>
#include <string>

namespace qcosamp {

/// Malformed input file or argument value (CLI exit code 2).
class SchemaError : public std::runtime_error {
public:
    explicit SchemaError(const std::string& what) : std::runtime_error(what) {}
};

/// Problem size beyond the desk-scale simulation limit (CLI exit code 3).
class GuardrailError : public std::runtime_error {
public:
    explicit GuardrailError(const std::string& what) : std::runtime_error(what) {}
};

/// A numerical invariant (norm, probability sum) drifted out of tolerance
/// (CLI exit code 4). Surfaced, never clamped.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace qcosamp
