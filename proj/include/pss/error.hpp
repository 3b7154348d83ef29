#pragma once

#include <stdexcept>
#include <string>

namespace pss {

enum class ErrorKind {
  kInvalidInput,
  kParse,
  kDegenerate,
  kConfig,
};

// Single exception type for the library; `kind()` lets callers (the CLI in
// particular) map failures onto exit codes without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void throw_invalid(const std::string& what) {
  throw Error(ErrorKind::kInvalidInput, what);
}

[[noreturn]] inline void throw_degenerate(const std::string& what) {
  throw Error(ErrorKind::kDegenerate, what);
}

[[noreturn]] inline void throw_config(const std::string& what) {
  throw Error(ErrorKind::kConfig, what);
}

}  // namespace pss
