#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qbc {

/// Invalid or non-finite input parameter.
struct ParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Caller broke a documented precondition (e.g. non-hermitian input to trace_norm).
struct ContractViolation : std::logic_error {
    using std::logic_error::logic_error;
};

struct DimensionMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A protocol run had to abort (length mismatch, bad reveal, peer abort).
struct ProtocolError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Message arrived out of the HELLO -> COMMIT -> OPEN -> VERDICT order,
/// or after the session was closed.
struct ProtocolStateError : ProtocolError {
    using ProtocolError::ProtocolError;
};

struct DecodeError : std::runtime_error {
    DecodeError(const std::string& what, std::size_t byte_offset)
        : std::runtime_error(what + " (at byte " + std::to_string(byte_offset) + ")"),
          offset(byte_offset) {}
    std::size_t offset;
};

struct SearchExhausted : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateEigenvalue : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace qbc
