#pragma once

#include <stdexcept>

namespace evy {

// Bad or incomplete configuration (unknown keys, missing sections, values
// violating type invariants). CLI exit code 2.
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Unreadable/unwritable files or malformed data files. CLI exit code 4.
struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace evy
