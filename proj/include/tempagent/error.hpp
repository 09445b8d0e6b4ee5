// ============================================================================
// tempagent/error.hpp: exception hierarchy
// ============================================================================
//
// Every failure surfaced by the library derives from tempagent::Error.  The
// CLI maps the concrete type onto its exit-code contract:
//
//   ParseError   -> 2   (formula / rule text)
//   ModelError   -> 3   (model file, schema, unknown state, agent mismatch)
//   EvalError    -> 3   (formula does not fit the model, bad horizon)
//   CapExceeded  -> 4   (enumeration budget)
//
// ============================================================================

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tempagent {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, std::size_t column, std::string detail,
               std::vector<std::string> expected = {})
        : Error(format(line, column, detail, expected)),
          line_(line), column_(column),
          detail_(std::move(detail)), expected_(std::move(expected)) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }
    const std::string& detail() const noexcept { return detail_; }
    const std::vector<std::string>& expected() const noexcept { return expected_; }

private:
    static std::string format(std::size_t line, std::size_t column,
                              const std::string& detail,
                              const std::vector<std::string>& expected) {
        std::string msg = std::to_string(line) + ":" + std::to_string(column) + ": " + detail;
        if (!expected.empty()) {
            msg += " (expected one of:";
            for (const auto& e : expected) msg += " " + e;
            msg += ")";
        }
        return msg;
    }

    std::size_t line_;
    std::size_t column_;
    std::string detail_;
    std::vector<std::string> expected_;
};

class ModelError : public Error {
public:
    using Error::Error;
};

class EvalError : public Error {
public:
    using Error::Error;
};

class CapExceeded : public Error {
public:
    CapExceeded(std::string what_tripped, unsigned long long cap)
        : Error("resource cap exceeded: " + what_tripped + " (cap " + std::to_string(cap) + ")"),
          bound_(std::move(what_tripped)), cap_(cap) {}

    const std::string& bound() const noexcept { return bound_; }
    unsigned long long cap() const noexcept { return cap_; }

private:
    std::string bound_;
    unsigned long long cap_;
};

} // namespace tempagent
