#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dynagg {

// Raised on malformed textual input: formulas, rule/operator specs, agenda files.
// position() is a zero-based byte offset into the offending text where known.
class parse_error : public std::runtime_error {
public:
    explicit parse_error(const std::string& message, std::size_t position = npos)
        : std::runtime_error(message), position_(position) {}

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

// Raised when well-formed input violates a semantic precondition:
// out-of-range indices, empty valuation sets, non-total operator maps, ...
class semantic_error : public std::runtime_error {
public:
    explicit semantic_error(const std::string& message) : std::runtime_error(message) {}
};

// Raised when an exhaustive enumeration would exceed its configured budget.
// Distinct from semantic_error so callers can map it to a dedicated exit code.
class resource_limit_error : public std::runtime_error {
public:
    explicit resource_limit_error(const std::string& message) : std::runtime_error(message) {}
};

} // namespace dynagg
