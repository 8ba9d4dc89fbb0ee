#pragma once

#include <stdexcept>
#include <string>

namespace ttc {

// Base of every error thrown by the library. Subclasses map onto distinct CLI
// exit codes.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Shapes of two operands do not agree.
class DimensionError : public Error {
public:
  using Error::Error;
};

// A value violates an operation's precondition (range, normalization, ...).
class ValueError : public Error {
public:
  using Error::Error;
};

// Malformed or truncated file contents.
class FormatError : public Error {
public:
  using Error::Error;
};

// The file system refused a read or write.
class IoError : public Error {
public:
  using Error::Error;
};

}  // namespace ttc
