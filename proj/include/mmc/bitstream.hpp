#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mmc/bits.hpp"
#include "mmc/layout.hpp"
#include "mmc/models.hpp"
#include "mmc/residual.hpp"

namespace mmc {

struct SearchResult;

// One coded window as it appears on the wire.
struct EncodedFrame {
  int model = kBypassId;
  int exponent = 0;
  int n_x = 0;
  BitVector params;  // n_x bits: the levels of each parameter, MSB first
  bool residual = false;
  ResidualMethod method = ResidualMethod::kDctBpc;
  int residual_exponent = 0;
  BitVector residual_bits;  // n_r bits

  int n_r() const noexcept { return static_cast<int>(residual_bits.size()); }
  friend bool operator==(const EncodedFrame&, const EncodedFrame&) = default;
};

// Number of parameters that sizes the n_x field of `model`; for
// ParameterPredictive it is taken from the channel state.
int frame_parameter_count(const ModelCatalog& catalog, int model, const CodecState* state);

EncodedFrame make_frame(const SearchResult& result, int exponent);

// Appends the frame to `out`. `k_params` sizes the n_x field. Throws
// kFieldOverflow when a value does not fit its field.
void pack_frame(const EncodedFrame& frame, int k_params, BitVector& out);
BitVector pack_frame(const EncodedFrame& frame, int k_params);

// Reads one frame. Throws kTruncatedStream, kReservedModel or kMissingState.
EncodedFrame unpack_frame(BitReader& in, const ModelCatalog& catalog, const CodecState* state);

// Number of bits pack_frame emits for this frame.
int frame_bits(const EncodedFrame& frame, int k_params);

// Reconstruction of one window in volts. Advances `state` (created on the
// first window of a channel).
std::vector<double> decode_window(const EncodedFrame& frame, const ModelCatalog& catalog,
                                  std::optional<CodecState>& state);

// State after a window coded with `model` and quantized parameters `theta_q`
// (in the window's scaled domain), whose volts reconstruction is `window`.
void advance_state(std::optional<CodecState>& state, const ModelContext& ctx, int model,
                   std::span<const double> theta_q, std::span<const double> window);

struct ChannelBlock {
  std::string name;
  std::uint32_t windows = 0;
  BitVector bits;
};

struct Container {
  std::uint32_t window_size = 0;
  double sample_rate = 0.0;
  double d_max = 0.0;
  std::uint64_t fingerprint = 0;
  std::vector<ChannelBlock> channels;
};

inline constexpr char kContainerMagic[4] = {'M', 'M', 'C', '1'};

void write_container(std::ostream& os, const Container& c);
Container read_container(std::istream& is);

}  // namespace mmc
