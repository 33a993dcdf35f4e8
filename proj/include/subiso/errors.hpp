#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace subiso {

/// Malformed DIMACS, CGF, assignment or embedding text. Carries the 1-based line.
class parse_error : public std::runtime_error {
public:
    parse_error(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// An operation was called outside its precondition.
class contract_error : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// An exhaustive procedure declined to start because its work exceeds a limit.
class refusal_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Greedy construction (coloring, packing) could not complete.
class construction_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace subiso
