#pragma once

#include <stdexcept>
#include <string>

namespace didrf {

// Bad run configuration: invalid field values, unknown keys, inconsistent
// parameter combinations. CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad input data: unreadable files, malformed records, empty corpora.
// CLI exit code 3.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Parse failure pinned to a line of an input file.
class ParseError : public DataError {
public:
    ParseError(const std::string& what, long line)
        : DataError(what + " (line " + std::to_string(line) + ")"), line_(line) {}

    long line() const noexcept { return line_; }

private:
    long line_;
};

}  // namespace didrf
