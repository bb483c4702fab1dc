#pragma once

#include <stdexcept>
#include <string>

namespace coaeval {

/// Base class for every error raised by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid run configuration or invalid argument at a module boundary.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A precondition of an operation was violated by its inputs.
class InvalidInputError : public Error {
public:
    using Error::Error;
};

/// Prompt rendering failed (missing field, unresolved placeholder, ...).
class RenderError : public Error {
public:
    using Error::Error;
};

/// Judge output could not be parsed into the expected typed value.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Transport-level or HTTP-level backend failure for a single attempt.
class BackendError : public Error {
public:
    BackendError(const std::string& what, bool retryable, int status = 0)
        : Error(what), retryable_(retryable), status_(status) {}

    bool retryable() const { return retryable_; }
    int status() const { return status_; }

private:
    bool retryable_;
    int status_;
};

/// The backend stayed unreachable after exhausting the retry budget.
class BackendUnavailableError : public Error {
public:
    using Error::Error;
};

/// The endpoint answered with a non-retryable error status.
class RequestRejectedError : public Error {
public:
    RequestRejectedError(const std::string& what, int status, std::string body_excerpt)
        : Error(what), status_(status), body_excerpt_(std::move(body_excerpt)) {}

    int status() const { return status_; }
    const std::string& body_excerpt() const { return body_excerpt_; }

private:
    int status_;
    std::string body_excerpt_;
};

/// A scripted backend received a request no rule matches.
class NoScriptMatchError : public Error {
public:
    using Error::Error;
};

/// A replay backend received a request whose digest is not in the transcript.
class ReplayMissError : public Error {
public:
    ReplayMissError(const std::string& what, std::string digest)
        : Error(what), digest_(std::move(digest)) {}

    const std::string& digest() const { return digest_; }

private:
    std::string digest_;
};

/// Relevant-aspect generation produced nothing usable; the run cannot proceed.
class StageOneError : public Error {
public:
    using Error::Error;
};

/// Chain and score set have no aspect in common.
class EmptyKnowledgeError : public Error {
public:
    using Error::Error;
};

}  // namespace coaeval
