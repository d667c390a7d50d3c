#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pisynth {

/// Input data violates a documented schema or precondition. Maps to exit code 2.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A malformed line in a line-delimited input.
class ParseError : public DataError {
public:
    ParseError(std::size_t line, const std::string& reason)
        : DataError("line " + std::to_string(line) + ": " + reason), line_(line) {}

    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// Raised by sample_pair when a listing cannot produce a valid pair (fewer than two captions).
class UnusableListing : public DataError {
public:
    using DataError::DataError;
};

}  // namespace pisynth
