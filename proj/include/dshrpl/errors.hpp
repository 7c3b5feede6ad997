#pragma once

#include <stdexcept>
#include <string>

namespace dshrpl {

// Error taxonomy used across the library. Callers that care about the
// category catch Error and switch on kind(); everyone else treats these
// as ordinary runtime errors.
enum class ErrorKind {
    Format,        // malformed bytes, unknown tag, truncation
    Integrity,     // checksum mismatch, tampered ciphertext
    Domain,        // argument outside its declared range
    Config,        // invalid weights, bad scenario file
    Overflow,      // field or rank overflow
    Routing,       // unattached source, unreachable route
    Evidence,      // empty observation list, indeterminate probe
    Key,           // ciphertext/key mismatch, key generation failure
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

} // namespace dshrpl
