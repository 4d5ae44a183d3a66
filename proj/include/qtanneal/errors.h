#ifndef QTANNEAL_ERRORS_H_
#define QTANNEAL_ERRORS_H_

#include <stdexcept>
#include <string>

namespace qtanneal {

// Root of every error the library throws. Callers that only need to tell
// domain failures from programming errors can catch this one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed PGM/PPM/JFIF content.
class FormatError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

// Inputs for which a ratio has no defined value, e.g. every reference
// compression is already perfect so the error denominator is zero.
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

// Text parse failure; line and column are 1-based.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, int line, int column)
      : Error("line " + std::to_string(line) + ", column " +
              std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace qtanneal

#endif  // QTANNEAL_ERRORS_H_
