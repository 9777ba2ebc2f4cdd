#pragma once

#include <stdexcept>
#include <string>

namespace qleak {

// Failure classes. The CLI maps io/parse/empty_input/length_mismatch/
// unit_mismatch onto exit code 2 (bad data) and everything else onto
// exit code 1 (bad usage).
enum class errc {
  io,
  parse,
  empty_input,
  length_mismatch,
  unit_mismatch,
  invalid_level,
  invalid_block_length,
  empty_active_set,
  invalid_request,
  pilot_too_small,
  invalid_spec,
  invalid_config,
};

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& msg) : std::runtime_error(msg), code_(code) {}

  errc code() const noexcept { return code_; }

  // True for errors caused by unreadable or malformed input data.
  bool is_data_error() const noexcept {
    switch (code_) {
      case errc::io:
      case errc::parse:
      case errc::empty_input:
      case errc::length_mismatch:
      case errc::unit_mismatch:
        return true;
      default:
        return false;
    }
  }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& msg) { throw Error(code, msg); }

}  // namespace qleak
