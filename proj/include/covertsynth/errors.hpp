#pragma once

#include <stdexcept>
#include <string>

namespace covertsynth {

/// Input that is not the expected JSON shape (missing keys, wrong types,
/// duplicate transitions, malformed text).
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/// Structurally well-formed input that violates a model-level requirement
/// (unknown identifiers, constraint subset violations, invalid supervisor
/// or attacker, unsound forced elision, ...).
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// A configured node or search cap was exceeded.  The outcome of the
/// surrounding query is indeterminate, which is distinct from "none".
class ResourceLimitError : public std::runtime_error {
public:
    explicit ResourceLimitError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace covertsynth
