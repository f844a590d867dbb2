#pragma once

#include <stdexcept>
#include <string>

namespace avrg {

// Exit-code contract shared by every command-line entry point.
enum class ExitCode : int { Ok = 0, Usage = 1, Validation = 2, Internal = 3 };

/// Base class for all library errors; carries the process exit code the CLI reports.
class Error : public std::runtime_error {
public:
  Error(ExitCode code, const std::string &what) : std::runtime_error(what), code_(code) {}
  ExitCode code() const noexcept { return code_; }

private:
  ExitCode code_;
};

class UsageError : public Error {
public:
  explicit UsageError(const std::string &what) : Error(ExitCode::Usage, what) {}
};

/// Bad input data: unparsable files, schema violations, grammar closure failures.
class ValidationError : public Error {
public:
  explicit ValidationError(const std::string &what) : Error(ExitCode::Validation, what) {}
};

/// A broken internal invariant. Seeing one of these means a bug, not bad input.
class InternalError : public Error {
public:
  explicit InternalError(const std::string &what) : Error(ExitCode::Internal, what) {}
};

} // namespace avrg
