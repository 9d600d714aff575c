#include "swdr/wdr.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "byte_io.hpp"
#include "swdr/error.hpp"

namespace swdr {

std::string_view to_string(ThresholdRule rule) noexcept {
  switch (rule) {
    case ThresholdRule::max: return "max";
    case ThresholdRule::pow2: return "pow2";
    case ThresholdRule::explicit_: return "explicit";
  }
  return "unknown";
}

ThresholdRule parse_threshold_rule(std::string_view name) {
  if (name == "max") return ThresholdRule::max;
  if (name == "pow2") return ThresholdRule::pow2;
  if (name == "explicit") return ThresholdRule::explicit_;
  throw Error(ErrorCode::invalid_config, "unknown threshold rule '" + std::string(name) + "'");
}

std::string_view to_string(Reconstruction mode) noexcept {
  return mode == Reconstruction::midpoint ? "midpoint" : "floor";
}

Reconstruction parse_reconstruction(std::string_view name) {
  if (name == "floor") return Reconstruction::floor;
  if (name == "midpoint") return Reconstruction::midpoint;
  throw Error(ErrorCode::invalid_config, "unknown reconstruction '" + std::string(name) + "'");
}

namespace {

constexpr int kMaxPasses = 48;
constexpr std::size_t kPassHeaderBytes = 8 + 4 + 4 + 4;

char symbol_char(Symbol s) {
  switch (s) {
    case Symbol::plus: return '+';
    case Symbol::minus: return '-';
    case Symbol::zero: return '0';
    case Symbol::one: return '1';
  }
  return '?';
}

bool is_sign(Symbol s) { return s == Symbol::plus || s == Symbol::minus; }

Symbol sign_symbol(Sign s) { return s == Sign::negative ? Symbol::minus : Symbol::plus; }

// Binary expansion of v, most significant bit first, without the leading 1.
void append_reduced_binary(std::vector<Symbol>& out, std::size_t v) {
  const int width = std::bit_width(v);
  for (int b = width - 2; b >= 0; --b) out.push_back((v >> b) & 1 ? Symbol::one : Symbol::zero);
}

// Elias gamma: (bit_width - 1) zeros, then v in binary.
void append_gamma(std::vector<Symbol>& out, std::uint32_t v) {
  const int width = std::bit_width(v);
  for (int b = 0; b < width - 1; ++b) out.push_back(Symbol::zero);
  for (int b = width - 1; b >= 0; --b) out.push_back((v >> b) & 1 ? Symbol::one : Symbol::zero);
}

std::vector<Symbol> gap_symbols(const std::vector<GapEntry>& entries) {
  std::vector<Symbol> out;
  for (const auto& e : entries) {
    out.push_back(sign_symbol(e.sign));
    append_reduced_binary(out, e.gap);
  }
  return out;
}

std::vector<Symbol> pass_symbols(const PassRecord& rec, std::size_t& sig_count) {
  std::vector<Symbol> out = gap_symbols(rec.entries);
  sig_count = out.size();
  for (auto m : rec.initial_multiples) append_gamma(out, m);
  for (auto b : rec.refinement_bits) out.push_back(b ? Symbol::one : Symbol::zero);
  return out;
}

void pack_symbols(const std::vector<Symbol>& symbols, std::vector<std::uint8_t>& out) {
  const std::size_t start = out.size();
  out.resize(start + (symbols.size() + 3) / 4, 0);
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    const int shift = 6 - 2 * static_cast<int>(i % 4);
    out[start + i / 4] |= static_cast<std::uint8_t>(static_cast<unsigned>(symbols[i]) << shift);
  }
}

void serialize_pass(const PassRecord& rec, std::vector<std::uint8_t>& out) {
  std::size_t sig_count = 0;
  const auto symbols = pass_symbols(rec, sig_count);
  detail::ByteWriter w(out);
  w.f64(rec.threshold);
  w.u32(static_cast<std::uint32_t>(rec.entries.size()));
  w.u32(static_cast<std::uint32_t>(rec.refinement_bits.size()));
  w.u32(static_cast<std::uint32_t>(sig_count));
  pack_symbols(symbols, out);
}

std::size_t pass_size(const PassRecord& rec) {
  std::size_t sig_count = 0;
  return kPassHeaderBytes + (pass_symbols(rec, sig_count).size() + 3) / 4;
}

void serialize(WdrStream& s) {
  s.serialized.clear();
  detail::ByteWriter w(s.serialized);
  w.u32(static_cast<std::uint32_t>(s.n_coeffs));
  w.f64(s.t0);
  w.u16(static_cast<std::uint16_t>(s.passes.size()));
  w.u8(static_cast<std::uint8_t>(s.reconstruction));
  for (const auto& rec : s.passes) serialize_pass(rec, s.serialized);
}

// Reads 2-bit symbols MSB-first from a byte span.
class SymbolReader {
public:
  explicit SymbolReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  Symbol next() {
    if (pos_ / 4 >= bytes_.size()) throw Error(ErrorCode::malformed_stream, "symbols truncated");
    const int shift = 6 - 2 * static_cast<int>(pos_ % 4);
    const auto s = static_cast<Symbol>((bytes_[pos_ / 4] >> shift) & 3);
    ++pos_;
    return s;
  }
  std::size_t consumed_bytes() const { return (pos_ + 3) / 4; }
  bool padding_is_zero() const {
    if (pos_ % 4 == 0) return true;
    const int used = 2 * static_cast<int>(pos_ % 4);
    return (bytes_[pos_ / 4] & (0xFF >> used)) == 0;
  }

private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

std::uint32_t read_gamma(SymbolReader& r) {
  int zeros = 0;
  Symbol s = r.next();
  while (s == Symbol::zero) {
    if (++zeros > 31) throw Error(ErrorCode::malformed_stream, "gamma code too long");
    s = r.next();
  }
  if (s != Symbol::one) throw Error(ErrorCode::malformed_stream, "sign symbol inside gamma code");
  std::uint32_t v = 1;
  for (int i = 0; i < zeros; ++i) {
    const Symbol b = r.next();
    if (is_sign(b)) throw Error(ErrorCode::malformed_stream, "sign symbol inside gamma code");
    v = (v << 1) | (b == Symbol::one ? 1u : 0u);
  }
  return v;
}

std::vector<GapEntry> to_gaps(const std::vector<SignificantEntry>& entries) {
  std::vector<GapEntry> gaps;
  gaps.reserve(entries.size());
  std::size_t prev = 0;
  for (const auto& e : entries) {
    gaps.push_back({e.index - prev, e.sign});
    prev = e.index;
  }
  return gaps;
}

std::uint32_t threshold_multiple(double magnitude, double threshold) {
  const double q = std::floor(magnitude / threshold);
  if (q > static_cast<double>(std::numeric_limits<std::int32_t>::max())) {
    throw Error(ErrorCode::invalid_config, "initial threshold far below the coefficient range");
  }
  auto m = static_cast<std::uint32_t>(std::max(q, 1.0));
  while (static_cast<double>(m + 1) * threshold <= magnitude) ++m;
  while (m > 1 && static_cast<double>(m) * threshold > magnitude) --m;
  return m;
}

std::size_t entry_symbols(const GapEntry& e) {
  return static_cast<std::size_t>(std::bit_width(e.gap));  // sign + gap bits minus the leading 1
}

std::size_t gamma_symbols(std::uint32_t m) { return 2 * static_cast<std::size_t>(std::bit_width(m)) - 1; }

// Shrinks `rec` to the longest prefix (significance entries first, then
// refinement bits, matching the wire order) that fits in `room` bytes.
// Returns false when not even one symbol fits.
bool cut_pass(PassRecord& rec, std::size_t room) {
  if (room <= kPassHeaderBytes) return false;
  std::size_t budget = 4 * (room - kPassHeaderBytes);
  const bool first = !rec.initial_multiples.empty();
  std::size_t keep = 0;
  while (keep < rec.entries.size()) {
    const std::size_t need =
        entry_symbols(rec.entries[keep]) + (first ? gamma_symbols(rec.initial_multiples[keep]) : 0);
    if (need > budget) break;
    budget -= need;
    ++keep;
  }
  if (keep < rec.entries.size()) {
    rec.entries.resize(keep);
    if (first) rec.initial_multiples.resize(keep);
    rec.refinement_bits.clear();
  } else {
    rec.refinement_bits.resize(std::min(rec.refinement_bits.size(), budget));
  }
  return !rec.entries.empty() || !rec.refinement_bits.empty();
}

}  // namespace

double initial_threshold(std::span<const double> w, ThresholdRule rule, double explicit_t0) {
  if (w.empty()) throw Error(ErrorCode::all_zero_input, "empty coefficient vector");
  double peak = 0.0;
  for (double x : w) {
    if (!std::isfinite(x)) throw Error(ErrorCode::non_finite_input, "coefficient not finite");
    peak = std::max(peak, std::abs(x));
  }
  if (peak == 0.0) throw Error(ErrorCode::all_zero_input, "all coefficients are zero");
  switch (rule) {
    case ThresholdRule::max: return peak;
    case ThresholdRule::pow2: {
      int exp = 0;
      const double frac = std::frexp(peak, &exp);  // peak = frac * 2^exp, frac in [0.5, 1)
      return frac == 0.5 ? peak : std::ldexp(1.0, exp);
    }
    case ThresholdRule::explicit_:
      if (!(explicit_t0 > 0.0) || !std::isfinite(explicit_t0)) {
        throw Error(ErrorCode::invalid_config, "explicit T0 must be positive");
      }
      return explicit_t0;
  }
  return peak;
}

std::vector<SignificantEntry> significance_pass(std::span<const double> w, double threshold,
                                                const std::vector<bool>& significant) {
  if (!(threshold > 0.0)) throw Error(ErrorCode::invalid_config, "threshold must be positive");
  std::vector<SignificantEntry> out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i < significant.size() && significant[i]) continue;
    if (std::abs(w[i]) >= threshold) {
      out.push_back({i + 1, w[i] < 0.0 ? Sign::negative : Sign::positive});
    }
  }
  return out;
}

std::vector<Symbol> encode_gaps(std::span<const SignificantEntry> entries) {
  std::vector<Symbol> out;
  std::size_t prev = 0;
  for (const auto& e : entries) {
    if (e.index <= prev) {
      throw Error(ErrorCode::invalid_config, "significant indices must be strictly increasing");
    }
    out.push_back(sign_symbol(e.sign));
    append_reduced_binary(out, e.index - prev);
    prev = e.index;
  }
  return out;
}

std::vector<SignificantEntry> decode_gaps(std::span<const Symbol> symbols, std::size_t n_coeffs) {
  std::vector<SignificantEntry> out;
  std::size_t pos = 0;
  std::size_t i = 0;
  while (i < symbols.size()) {
    if (!is_sign(symbols[i])) throw Error(ErrorCode::malformed_stream, "gap bits before a sign");
    const Sign sign = symbols[i] == Symbol::minus ? Sign::negative : Sign::positive;
    ++i;
    std::size_t gap = 1;
    while (i < symbols.size() && !is_sign(symbols[i])) {
      if (gap > (n_coeffs >> 1) + 1) {
        throw Error(ErrorCode::malformed_stream, "index gap beyond the coefficient count");
      }
      gap = (gap << 1) | (symbols[i] == Symbol::one ? 1 : 0);
      ++i;
    }
    pos += gap;
    if (pos > n_coeffs) throw Error(ErrorCode::malformed_stream, "position beyond the coefficient count");
    out.push_back({pos, sign});
  }
  return out;
}

std::vector<double> refine_values(std::span<const double> w, double threshold,
                                  std::span<const std::size_t> indices) {
  if (!(threshold > 0.0)) throw Error(ErrorCode::invalid_config, "threshold must be positive");
  std::vector<double> out;
  out.reserve(indices.size());
  for (std::size_t idx : indices) {
    if (idx < 1 || idx > w.size()) throw Error(ErrorCode::shape_mismatch, "index out of range");
    const double x = w[idx - 1];
    const double q = std::floor(std::abs(x) / threshold) * threshold;
    out.push_back(x < 0.0 ? -q : q);
  }
  return out;
}

WdrStream wdr_encode(std::span<const double> w, const WdrParams& params) {
  if (params.passes < 1 || params.passes > kMaxPasses) {
    throw Error(ErrorCode::invalid_config, "pass count must be in [1, 48]");
  }
  if (w.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw Error(ErrorCode::invalid_config, "coefficient vector too long");
  }
  WdrStream s;
  s.n_coeffs = w.size();
  s.reconstruction = params.reconstruction;

  bool all_zero = true;
  for (double x : w) {
    if (!std::isfinite(x)) throw Error(ErrorCode::non_finite_input, "coefficient not finite");
    if (x != 0.0) all_zero = false;
  }
  if (all_zero) {
    serialize(s);
    return s;
  }
  s.t0 = initial_threshold(w, params.t0_rule, params.explicit_t0);

  const std::size_t n = w.size();
  std::vector<bool> significant(n, false);
  std::vector<double> magnitude(n, 0.0);
  std::vector<std::size_t> order;  // 0-based, in the order they became significant
  std::size_t total = kWdrHeaderBytes;

  for (int p = 1; p <= params.passes; ++p) {
    PassRecord rec;
    rec.threshold = std::ldexp(s.t0, -p);
    const double t = rec.threshold;

    rec.refinement_bits.reserve(order.size());
    std::vector<double> refined(order.size());
    for (std::size_t k = 0; k < order.size(); ++k) {
      const std::size_t i = order[k];
      const bool bit = std::abs(w[i]) >= magnitude[i] + t;
      rec.refinement_bits.push_back(bit ? 1 : 0);
      refined[k] = bit ? magnitude[i] + t : magnitude[i];
    }

    const auto fresh = significance_pass(w, t, significant);
    rec.entries = to_gaps(fresh);
    if (p == 1) {
      for (const auto& e : fresh) rec.initial_multiples.push_back(threshold_multiple(std::abs(w[e.index - 1]), t));
    }

    const std::size_t bytes = pass_size(rec);
    if (params.budget_bytes && total + bytes > *params.budget_bytes) {
      // The stream ends here; optionally spend what is left on a prefix of this pass.
      if (params.fill_budget && cut_pass(rec, *params.budget_bytes - total)) {
        s.passes.push_back(std::move(rec));
      }
      break;
    }
    total += bytes;

    for (std::size_t k = 0; k < order.size(); ++k) magnitude[order[k]] = refined[k];
    for (std::size_t k = 0; k < fresh.size(); ++k) {
      const std::size_t i = fresh[k].index - 1;
      significant[i] = true;
      magnitude[i] = p == 1 ? rec.initial_multiples[k] * t : t;
      order.push_back(i);
    }
    s.passes.push_back(std::move(rec));
  }
  serialize(s);
  return s;
}

std::vector<double> wdr_decode(const WdrStream& stream) {
  const std::size_t n = stream.n_coeffs;
  std::vector<double> magnitude(n, 0.0);
  std::vector<bool> negative(n, false);
  std::vector<bool> significant(n, false);
  std::vector<std::size_t> order;
  std::vector<double> width(n, 0.0);  // threshold of each coefficient's latest update

  for (std::size_t p = 0; p < stream.passes.size(); ++p) {
    const auto& rec = stream.passes[p];
    const double t = rec.threshold;
    if (!(t > 0.0) || !std::isfinite(t)) throw Error(ErrorCode::malformed_stream, "bad pass threshold");
    // Only the final pass may be cut short.
    const bool last = p + 1 == stream.passes.size();
    if (rec.refinement_bits.size() > order.size() ||
        (!last && rec.refinement_bits.size() != order.size())) {
      throw Error(ErrorCode::malformed_stream, "refinement bit count mismatch");
    }
    const bool first = p == 0;
    if (rec.initial_multiples.size() != (first ? rec.entries.size() : 0)) {
      throw Error(ErrorCode::malformed_stream, "initial multiples mismatch");
    }
    for (std::size_t k = 0; k < rec.refinement_bits.size(); ++k) {
      if (rec.refinement_bits[k]) magnitude[order[k]] += t;
      width[order[k]] = t;
    }
    std::size_t pos = 0;
    for (std::size_t k = 0; k < rec.entries.size(); ++k) {
      const auto& e = rec.entries[k];
      if (e.gap < 1) throw Error(ErrorCode::malformed_stream, "zero index gap");
      pos += e.gap;
      if (pos > n) throw Error(ErrorCode::malformed_stream, "position beyond the coefficient count");
      const std::size_t i = pos - 1;
      if (significant[i]) throw Error(ErrorCode::malformed_stream, "coefficient already significant");
      significant[i] = true;
      negative[i] = e.sign == Sign::negative;
      magnitude[i] = first ? rec.initial_multiples[k] * t : t;
      width[i] = t;
      order.push_back(i);
    }
  }

  const bool midpoint = stream.reconstruction == Reconstruction::midpoint;
  std::vector<double> out(n, 0.0);
  for (std::size_t i : order) {
    const double mag = magnitude[i] + (midpoint ? 0.5 * width[i] : 0.0);
    out[i] = negative[i] ? -mag : mag;
  }
  return out;
}

WdrStream parse_wdr_stream(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes, ErrorCode::malformed_stream);
  WdrStream s;
  s.n_coeffs = r.u32();
  s.t0 = r.f64();
  const std::uint16_t pass_count = r.u16();
  const std::uint8_t recon = r.u8();
  if (recon > 1) throw Error(ErrorCode::malformed_stream, "unknown reconstruction mode");
  s.reconstruction = static_cast<Reconstruction>(recon);
  if (pass_count > kMaxPasses) throw Error(ErrorCode::malformed_stream, "too many passes");

  for (std::uint16_t p = 0; p < pass_count; ++p) {
    PassRecord rec;
    rec.threshold = r.f64();
    const std::uint32_t entry_count = r.u32();
    const std::uint32_t refine_count = r.u32();
    const std::uint32_t sig_count = r.u32();
    if (sig_count > 4 * static_cast<std::uint64_t>(r.remaining()) ||
        refine_count > 4 * static_cast<std::uint64_t>(r.remaining())) {
      throw Error(ErrorCode::malformed_stream, "symbol counts exceed payload");
    }
    SymbolReader sym(r.rest());
    std::vector<Symbol> sig(sig_count);
    for (auto& x : sig) x = sym.next();
    const auto entries = decode_gaps(sig, s.n_coeffs);
    if (entries.size() != entry_count) throw Error(ErrorCode::malformed_stream, "entry count mismatch");
    rec.entries = to_gaps(entries);
    if (p == 0) {
      for (std::uint32_t k = 0; k < entry_count; ++k) rec.initial_multiples.push_back(read_gamma(sym));
    }
    rec.refinement_bits.reserve(refine_count);
    for (std::uint32_t k = 0; k < refine_count; ++k) {
      const Symbol b = sym.next();
      if (is_sign(b)) throw Error(ErrorCode::malformed_stream, "sign symbol among refinement bits");
      rec.refinement_bits.push_back(b == Symbol::one ? 1 : 0);
    }
    if (!sym.padding_is_zero()) throw Error(ErrorCode::malformed_stream, "nonzero padding");
    r.skip(sym.consumed_bytes());
    s.passes.push_back(std::move(rec));
  }
  if (r.remaining() != 0) throw Error(ErrorCode::malformed_stream, "trailing bytes after last pass");
  s.serialized.assign(bytes.begin(), bytes.end());
  return s;
}

WdrStream truncate_stream(const WdrStream& stream, std::size_t passes) {
  WdrStream out = stream;
  if (passes < out.passes.size()) out.passes.resize(passes);
  serialize(out);
  return out;
}

double wdr_compression_ratio(std::size_t original_bytes, const WdrStream& stream) {
  if (original_bytes == 0) throw Error(ErrorCode::invalid_config, "original size must be positive");
  return static_cast<double>(original_bytes) / static_cast<double>(stream.serialized.size());
}

std::string symbols_to_string(std::span<const Symbol> symbols) {
  std::string out;
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    if (i > 0 && is_sign(symbols[i])) out.push_back(' ');
    out.push_back(symbol_char(symbols[i]));
  }
  return out;
}

}  // namespace swdr
