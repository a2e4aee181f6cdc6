#pragma once

#include <stdexcept>
#include <string>

namespace mimo_breath {

// Base of every error raised by the library. `kind()` is a stable
// snake_case tag that the CLI prints in its machine-readable error line.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error("config", what) {}
};

struct IndexError : Error {
  explicit IndexError(const std::string& what) : Error("index", what) {}
};

struct InvalidArgument : Error {
  explicit InvalidArgument(const std::string& what) : Error("invalid_argument", what) {}
};

// Constant or all-zero series where a ratio or normalization is undefined.
struct DegenerateSignal : Error {
  explicit DegenerateSignal(const std::string& what) : Error("degenerate_signal", what) {}
};

struct NoBreathDetected : Error {
  explicit NoBreathDetected(const std::string& what) : Error("no_breath_detected", what) {}
};

struct IoError : Error {
  explicit IoError(const std::string& what) : Error("io", what) {}
};

struct CorruptFile : Error {
  explicit CorruptFile(const std::string& what) : Error("corrupt_file", what) {}
};

struct SchemaError : Error {
  explicit SchemaError(const std::string& what) : Error("schema", what) {}
};

struct DurationMismatch : Error {
  explicit DurationMismatch(const std::string& what) : Error("duration_mismatch", what) {}
};

}  // namespace mimo_breath
