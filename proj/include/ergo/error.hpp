#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace ergo {

// Base error carrying the module that raised it, so the CLI can surface
// provenance in its machine-readable error output.
class Error : public std::runtime_error {
public:
    Error(std::string module, const std::string& what)
        : std::runtime_error(what), module_(std::move(module)) {}
    const std::string& module() const { return module_; }

private:
    std::string module_;
};

// Malformed input: bad JSON, wrong field types, unknown keys.
class ParseError : public Error {
public:
    using Error::Error;
};

// Well-formed input that violates a documented invariant
// (non-monotone timestamps, wrong landmark count, missing modality).
class ValidationError : public Error {
public:
    using Error::Error;
};

// Operation called outside its stated domain (trial too short,
// degenerate geometry, zero normalization).
class PreconditionError : public Error {
public:
    using Error::Error;
};

}  // namespace ergo
