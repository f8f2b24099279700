#pragma once

#include <stdexcept>
#include <string>

namespace texrad {

// Broad failure class; the CLI maps these onto exit codes 1/2/3.
enum class ErrorKind { usage, data, internal };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string code, const std::string& message)
      : std::runtime_error(message), kind_(kind), code_(std::move(code)) {}

  ErrorKind kind() const noexcept { return kind_; }
  // Short machine-readable tag, e.g. "missing-uv" or "non-triangle-face".
  const std::string& code() const noexcept { return code_; }

 private:
  ErrorKind kind_;
  std::string code_;
};

[[noreturn]] inline void fail_usage(std::string code, const std::string& message) {
  throw Error(ErrorKind::usage, std::move(code), message);
}
[[noreturn]] inline void fail_data(std::string code, const std::string& message) {
  throw Error(ErrorKind::data, std::move(code), message);
}

}  // namespace texrad
