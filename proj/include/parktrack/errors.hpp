#pragma once

#include <stdexcept>
#include <string>

namespace parktrack {

/// Base class for every error raised by the engine.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A numeric or structural argument violated a precondition.
class InvalidParameter : public Error {
public:
    using Error::Error;
};

/// Two embeddings (or an embedding and a gallery) disagree on dimension.
class DimensionMismatch : public Error {
public:
    using Error::Error;
};

/// An embedding failed validation (non-finite values or zero norm).
class InvalidEmbedding : public Error {
public:
    using Error::Error;
};

/// Enrollment attempted with a subject_id that is already in the gallery.
class DuplicateSubject : public Error {
public:
    using Error::Error;
};

/// An event was routed to a session that belongs to a different subject.
class RoutingError : public Error {
public:
    using Error::Error;
};

/// An operation is not valid in the session's current state.
class StateError : public Error {
public:
    using Error::Error;
};

/// Stats were requested from a session with no accepted sightings.
class EmptySession : public Error {
public:
    using Error::Error;
};

/// A file or wire payload (CSV, JSON, JSONL) could not be parsed.
class ParseError : public Error {
public:
    using Error::Error;
};

}  // namespace parktrack
