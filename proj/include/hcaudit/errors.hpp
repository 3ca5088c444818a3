#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hcaudit {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A formula could not be split into tokens. `offset` is the byte offset of
/// the offending character in the formula text.
class LexError : public Error {
public:
    LexError(const std::string& what, std::size_t offset)
        : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// Malformed cell address or range text.
class AddressError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// The input is not a well-formed workbook package.
class FormatError : public Error {
public:
    using Error::Error;
};

/// A JSON document violates its schema. `pointer` locates the first
/// violation, e.g. "/sheets/0/cells/ZZZZ0".
class SchemaError : public Error {
public:
    SchemaError(const std::string& pointer, const std::string& what)
        : Error(what + " at " + (pointer.empty() ? std::string("/") : pointer)),
          pointer_(pointer) {}

    const std::string& pointer() const noexcept { return pointer_; }

private:
    std::string pointer_;
};

class EmptyBatch : public Error {
public:
    EmptyBatch() : Error("batch summary needs at least one workbook") {}
};

}  // namespace hcaudit
