#include "radtext/error.hpp"

namespace radtext {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::io: return "io";
    case ErrorKind::parse: return "parse";
    case ErrorKind::validation: return "validation";
    case ErrorKind::empty_overlap: return "empty-overlap";
    case ErrorKind::undefined_kappa: return "undefined-kappa";
    case ErrorKind::empty_matrix: return "empty-matrix";
    case ErrorKind::numeric: return "numeric";
    case ErrorKind::missing_class: return "missing-class";
    case ErrorKind::divergence: return "divergence";
    case ErrorKind::degenerate_split: return "degenerate-split";
    case ErrorKind::state: return "state";
    case ErrorKind::mode: return "mode";
    case ErrorKind::not_found: return "not-found";
  }
  return "unknown";
}

}  // namespace radtext
