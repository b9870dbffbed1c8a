#include "ssc/errors.hpp"

namespace ssc {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kConfig:
      return "config error";
    case ErrorKind::kInput:
      return "input error";
    case ErrorKind::kDivergence:
      return "solver divergence";
    case ErrorKind::kIo:
      return "I/O error";
  }
  return "error";
}

}  // namespace ssc
