#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gotflow {

/// Raised for any defect in a workflow document: malformed JSON (carries the
/// byte offset), a missing required key, an unknown enum string, or a
/// duplicate node id. `node_id`/`key` are filled in when known.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(std::string message,
                        std::optional<std::size_t> byte_offset = std::nullopt,
                        std::string node_id = {},
                        std::string key = {})
        : std::runtime_error(std::move(message)),
          byte_offset(byte_offset),
          node_id(std::move(node_id)),
          key(std::move(key)) {}

    std::optional<std::size_t> byte_offset;
    std::string node_id;
    std::string key;
};

/// A `${NAME}` in a path template could not be resolved (or was malformed).
class PathError : public std::runtime_error {
public:
    explicit PathError(std::string message, std::string variable = {})
        : std::runtime_error(std::move(message)), variable(std::move(variable)) {}

    std::string variable;
};

/// A `#{` opening in a template that does not form a valid placeholder.
class UnterminatedPlaceholder : public std::runtime_error {
public:
    UnterminatedPlaceholder(std::string message, std::size_t byte_offset)
        : std::runtime_error(std::move(message)), byte_offset(byte_offset) {}

    std::size_t byte_offset;
};

/// Template rendering failed; lists every placeholder that did not resolve.
class RenderError : public std::runtime_error {
public:
    RenderError(std::string message, std::vector<std::string> unresolved)
        : std::runtime_error(std::move(message)), unresolved(std::move(unresolved)) {}

    std::vector<std::string> unresolved;
};

/// A single name lookup that found nothing in any scope layer.
class NameNotFound : public std::runtime_error {
public:
    explicit NameNotFound(std::string name)
        : std::runtime_error("name not found: " + name), name(std::move(name)) {}

    std::string name;
};

/// Condition evaluation referenced a variable absent from the store.
class EvalError : public std::runtime_error {
public:
    explicit EvalError(std::string message, std::string variable = {})
        : std::runtime_error(std::move(message)), variable(std::move(variable)) {}

    std::string variable;
};

class CycleError : public std::runtime_error {
public:
    CycleError(std::string message, std::vector<std::string> cycle)
        : std::runtime_error(std::move(message)), cycle(std::move(cycle)) {}

    /// Witness cycle as node ids; the first id is repeated implicitly.
    std::vector<std::string> cycle;
};

enum class BackendErrorKind {
    timeout,
    rate_limited,
    http_status,
    no_rule_matched,
    malformed_response,
    io,
};

class BackendError : public std::runtime_error {
public:
    BackendError(BackendErrorKind kind, std::string message, int status_code = 0)
        : std::runtime_error(std::move(message)), kind(kind), status_code(status_code) {}

    BackendErrorKind kind;
    int status_code;  // set for kind == http_status
};

const char* to_string(BackendErrorKind kind);

/// Trace files that cannot be read back: corrupt lines (carries the byte
/// offset of the offending line) or a schema version this reader does not
/// understand.
class TraceError : public std::runtime_error {
public:
    explicit TraceError(std::string message,
                        std::optional<std::size_t> byte_offset = std::nullopt)
        : std::runtime_error(std::move(message)), byte_offset(byte_offset) {}

    std::optional<std::size_t> byte_offset;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace gotflow
