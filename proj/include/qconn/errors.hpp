#pragma once

#include <stdexcept>
#include <string>

namespace qconn {

/// Thrown by log_group when the rotation angle lands within tolerance of the
/// pi branch cut. Callers typically reduce hbar and retry.
struct branch_cut_error : std::runtime_error {
  explicit branch_cut_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Thrown by kernel file I/O on bad magic, unsupported version, or a payload
/// whose length does not match the header.
struct format_error : std::runtime_error {
  explicit format_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace qconn
