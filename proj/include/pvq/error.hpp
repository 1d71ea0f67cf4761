#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace pvq {

// Failure categories. The CLI maps these onto exit codes, tests match on
// them, and messages carry the specifics.
enum class ErrorKind {
    Format,            // malformed magic, header or version field
    Truncation,        // payload shorter than the header declares
    UnsupportedDepth,  // sample depth outside 8-bit range
    DegenerateInput,   // input too small to be meaningful
    Dimension,         // operand sizes disagree
    Tiling,            // image does not divide into whole blocks
    Reassembly,        // vector count does not match the target image
    InsufficientData,  // fewer training vectors than requested codewords
    NoExactLevel,      // no pyramid level yields the requested block count
    Corruption,        // internally inconsistent or out-of-range payload
    Config,            // invalid parameter combination
    Io,                // file system failure
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string message)
        : std::runtime_error(std::move(message)), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

} // namespace pvq
