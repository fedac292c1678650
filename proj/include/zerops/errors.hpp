#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace zerops {

// Thrown by the binary and CSV codecs. Carries the byte offset (binary) or
// line number (CSV) where decoding failed, when known.
class CodecError : public std::runtime_error {
public:
    static constexpr uint64_t npos = std::numeric_limits<uint64_t>::max();

    explicit CodecError(std::string msg, uint64_t byte_offset = npos, uint64_t line = npos)
        : std::runtime_error(std::move(msg)), byte_offset_(byte_offset), line_(line) {}

    uint64_t byte_offset() const { return byte_offset_; }
    uint64_t line() const { return line_; }

private:
    uint64_t byte_offset_;
    uint64_t line_;
};

// Stream endpoint failures (connect refused, broken pipe, unreadable file).
class TransportError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Counter sources that cannot be read, named by counter group.
class CollectError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Model repository I/O and corruption errors.
class RepoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Registry violations: duplicate registration, unknown object names.
class RegistryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed configuration or input files (catalogues, dependency models).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace zerops
