#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace swdr {

// Wavelet Difference Reduction: an embedded bit-plane coder that sends the
// positions of newly significant coefficients as index gaps with their
// leading 1 bit removed, using the sign symbols as separators, followed by
// one refinement bit per previously significant coefficient.

enum class ThresholdRule : std::uint8_t {
  max = 0,       // T0 = max|w|
  pow2 = 1,      // T0 = smallest power of two >= max|w|
  explicit_ = 2, // T0 supplied by the caller
};

enum class Reconstruction : std::uint8_t {
  floor = 0,     // magnitude at the lower end of its interval
  midpoint = 1,  // lower end plus half the final threshold
};

std::string_view to_string(ThresholdRule rule) noexcept;
ThresholdRule parse_threshold_rule(std::string_view name);
std::string_view to_string(Reconstruction mode) noexcept;
Reconstruction parse_reconstruction(std::string_view name);

struct WdrParams {
  int passes = 9;
  ThresholdRule t0_rule = ThresholdRule::max;
  double explicit_t0 = 0.0;
  std::optional<std::size_t> budget_bytes;
  Reconstruction reconstruction = Reconstruction::floor;
  // When the budget cuts into a pass, keep the prefix of that pass that still
  // fits instead of stopping at the previous pass boundary.
  bool fill_budget = false;
};

enum class Sign : std::uint8_t { positive, negative };

// 1-based position into the coefficient vector.
struct SignificantEntry {
  std::size_t index = 0;
  Sign sign = Sign::positive;

  friend bool operator==(const SignificantEntry&, const SignificantEntry&) = default;
};

struct GapEntry {
  std::size_t gap = 1;
  Sign sign = Sign::positive;

  friend bool operator==(const GapEntry&, const GapEntry&) = default;
};

// The four-letter alphabet, two bits per symbol on the wire.
enum class Symbol : std::uint8_t { plus = 0, minus = 1, zero = 2, one = 3 };

struct PassRecord {
  double threshold = 0.0;
  std::vector<GapEntry> entries;
  // First pass only: magnitude of each new entry as a multiple of the
  // threshold (always >= 1; 1 unless T0 leaves room above 2T).
  std::vector<std::uint32_t> initial_multiples;
  std::vector<std::uint8_t> refinement_bits;

  friend bool operator==(const PassRecord&, const PassRecord&) = default;
};

struct WdrStream {
  double t0 = 0.0;
  std::size_t n_coeffs = 0;
  Reconstruction reconstruction = Reconstruction::floor;
  std::vector<PassRecord> passes;
  std::vector<std::uint8_t> serialized;
};

/// max|w| (or the rule's variant). Throws Error{all_zero_input} when every
/// coefficient is zero, Error{non_finite_input} on NaN/Inf.
double initial_threshold(std::span<const double> w, ThresholdRule rule = ThresholdRule::max,
                         double explicit_t0 = 0.0);

/// Coefficients not yet significant whose magnitude reaches T, in index order.
/// `significant` is indexed 0-based and may be empty (nothing significant yet).
std::vector<SignificantEntry> significance_pass(std::span<const double> w, double threshold,
                                                const std::vector<bool>& significant);

std::vector<Symbol> encode_gaps(std::span<const SignificantEntry> entries);

/// Throws Error{malformed_stream} for bits before the first sign or positions
/// beyond n_coeffs.
std::vector<SignificantEntry> decode_gaps(std::span<const Symbol> symbols, std::size_t n_coeffs);

/// sign(w) * floor(|w| / T) * T for each listed 1-based index.
std::vector<double> refine_values(std::span<const double> w, double threshold,
                                  std::span<const std::size_t> indices);

WdrStream wdr_encode(std::span<const double> w, const WdrParams& params);

std::vector<double> wdr_decode(const WdrStream& stream);

/// Parses a serialized stream back into pass records.
WdrStream parse_wdr_stream(std::span<const std::uint8_t> bytes);

/// Keeps the first `passes` passes and re-serializes.
WdrStream truncate_stream(const WdrStream& stream, std::size_t passes);

/// OR / CZ with CZ the serialized byte count.
double wdr_compression_ratio(std::size_t original_bytes, const WdrStream& stream);

/// "+ - -1 +1111" style rendering; a space precedes every sign but the first.
std::string symbols_to_string(std::span<const Symbol> symbols);

/// Serialized size of the stream header (no passes).
constexpr std::size_t kWdrHeaderBytes = 4 + 8 + 2 + 1;

}  // namespace swdr
