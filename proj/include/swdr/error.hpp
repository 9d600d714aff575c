#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace swdr {

enum class ErrorCode {
  unsupported_format,
  corrupt_file,
  io_failure,
  non_finite_input,
  convergence_failure,
  rank_out_of_range,
  depth_too_large,
  shape_mismatch,
  all_zero_input,
  malformed_stream,
  dimension_mismatch,
  image_too_small,
  empty_corpus,
  external_tool_failure,
  invalid_config,
};

std::string_view to_string(ErrorCode code) noexcept;

// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

}  // namespace swdr
