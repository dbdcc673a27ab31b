#pragma once

#include <stdexcept>
#include <string>

namespace radtext {

enum class ErrorKind {
  io,
  parse,
  validation,
  empty_overlap,
  undefined_kappa,
  empty_matrix,
  numeric,
  missing_class,
  divergence,
  degenerate_split,
  state,
  mode,
  not_found,
};

const char* to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries a kind so callers (CLI, service)
/// can map it to an exit status or HTTP code without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace radtext
