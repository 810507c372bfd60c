#pragma once

#include <stdexcept>
#include <string>

namespace airkit {

// Root of every exception the library throws on contract violations or I/O
// problems. Callers that only need to report can catch this.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
  public:
    using Error::Error;
};

class DomainError : public Error {
  public:
    using Error::Error;
};

class LengthMismatch : public Error {
  public:
    using Error::Error;
};

// Malformed input files or payloads (JSON schema violations, bad numbers).
class FormatError : public Error {
  public:
    using Error::Error;
};

}  // namespace airkit
