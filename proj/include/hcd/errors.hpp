#pragma once

#include <stdexcept>
#include <string>

namespace hcd {

// Error categories map 1:1 onto the CLI exit codes (0 = success).
enum class ErrorKind : int {
  usage = 1,    // bad flags, bad config, inconsistent options
  data = 2,     // missing/corrupt files, shape or dimension mismatches
  numeric = 3,  // NaN/Inf, divergence
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const { return kind_; }
  int exit_code() const { return static_cast<int>(kind_); }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void throw_usage(const std::string& msg) {
  throw Error(ErrorKind::usage, msg);
}
[[noreturn]] inline void throw_data(const std::string& msg) {
  throw Error(ErrorKind::data, msg);
}
[[noreturn]] inline void throw_numeric(const std::string& msg) {
  throw Error(ErrorKind::numeric, msg);
}

}  // namespace hcd
