#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dfd {

/// Distinct failure kinds. Each maps onto one of two coarse categories
/// (validation or I/O) that the command line turns into an exit code.
enum class Errc {
  invalid_argument,
  dimension_mismatch,
  out_of_range,
  empty_input,
  duplicate_id,
  missing_file,
  unsupported_bit_depth,
  bad_channel_layout,
  bad_format,
  io_failure,
};

inline std::string_view to_string(Errc e) noexcept {
  switch (e) {
    case Errc::invalid_argument: return "invalid argument";
    case Errc::dimension_mismatch: return "dimension mismatch";
    case Errc::out_of_range: return "value out of range";
    case Errc::empty_input: return "empty input";
    case Errc::duplicate_id: return "duplicate id";
    case Errc::missing_file: return "missing file";
    case Errc::unsupported_bit_depth: return "unsupported bit depth";
    case Errc::bad_channel_layout: return "unsupported channel layout";
    case Errc::bad_format: return "malformed file";
    case Errc::io_failure: return "i/o failure";
  }
  return "unknown error";
}

/// True for errors caused by the filesystem or file contents rather than
/// by argument values.
inline bool is_io_error(Errc e) noexcept {
  switch (e) {
    case Errc::missing_file:
    case Errc::unsupported_bit_depth:
    case Errc::bad_channel_layout:
    case Errc::bad_format:
    case Errc::io_failure:
      return true;
    default:
      return false;
  }
}

class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

private:
  Errc code_;
};

namespace detail {

inline void require(bool cond, Errc code, const std::string& what) {
  if (!cond) throw Error(code, what);
}

// Literal messages stay unallocated until a check actually fails.
inline void require(bool cond, Errc code, const char* what) {
  if (!cond) throw Error(code, what);
}

}  // namespace detail
}  // namespace dfd
