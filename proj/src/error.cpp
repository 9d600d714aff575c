#include "swdr/error.hpp"

namespace swdr {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::unsupported_format: return "UnsupportedFormat";
    case ErrorCode::corrupt_file: return "CorruptFile";
    case ErrorCode::io_failure: return "IoFailure";
    case ErrorCode::non_finite_input: return "NonFiniteInput";
    case ErrorCode::convergence_failure: return "ConvergenceFailure";
    case ErrorCode::rank_out_of_range: return "RankOutOfRange";
    case ErrorCode::depth_too_large: return "DepthTooLarge";
    case ErrorCode::shape_mismatch: return "ShapeMismatch";
    case ErrorCode::all_zero_input: return "AllZeroInput";
    case ErrorCode::malformed_stream: return "MalformedStream";
    case ErrorCode::dimension_mismatch: return "DimensionMismatch";
    case ErrorCode::image_too_small: return "ImageTooSmall";
    case ErrorCode::empty_corpus: return "EmptyCorpus";
    case ErrorCode::external_tool_failure: return "ExternalToolFailure";
    case ErrorCode::invalid_config: return "InvalidConfig";
  }
  return "Unknown";
}

}  // namespace swdr
