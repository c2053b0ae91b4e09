#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace benchpred {

/// Error classes map to CLI exit codes: config=1, data=2, runtime=3.
enum class ErrorClass { config = 1, data = 2, runtime = 3 };

/// Exception carrying a stable machine-readable code (e.g. "index-out-of-range")
/// next to the human-readable message.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message,
        ErrorClass cls = ErrorClass::runtime)
      : std::runtime_error(message), code_(std::move(code)), class_(cls) {}

  const std::string& code() const noexcept { return code_; }
  ErrorClass error_class() const noexcept { return class_; }

 private:
  std::string code_;
  ErrorClass class_;
};

inline Error config_error(std::string code, const std::string& message) {
  return Error(std::move(code), message, ErrorClass::config);
}

inline Error data_error(std::string code, const std::string& message) {
  return Error(std::move(code), message, ErrorClass::data);
}

}  // namespace benchpred
