#pragma once

#include <stdexcept>
#include <string>

namespace subkb {

/// Base class for every error raised by the library. `module()` names the
/// component that raised it so command-line front ends can report a
/// one-line `module: message` diagnostic.
class Error : public std::runtime_error {
 public:
  Error(std::string module, const std::string& message)
      : std::runtime_error(message), module_(std::move(module)) {}

  const std::string& module() const noexcept { return module_; }

 private:
  std::string module_;
};

/// A documented precondition of an operation was violated by the caller.
class ContractError : public Error {
 public:
  using Error::Error;
};

/// A file could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// A file was readable but does not follow its format. `line()` is 1-based,
/// 0 when the problem is not tied to a line.
class FormatError : public Error {
 public:
  FormatError(std::string module, const std::string& message, std::size_t line = 0)
      : Error(std::move(module),
              line == 0 ? message : message + " (line " + std::to_string(line) + ")"),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

  /// The same error with the offending file named in the message.
  FormatError in_file(const std::string& file) const {
    FormatError e(module(), std::string(what()) + " in '" + file + "'");
    e.line_ = line_;
    return e;
  }

 private:
  std::size_t line_;
};

/// Optimization produced a non-finite parameter.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace subkb
