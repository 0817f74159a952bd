#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mmc/bitstream.hpp"
#include "mmc/search.hpp"
#include "mmc/signal.hpp"

namespace mmc {

struct WindowRecord {
  std::size_t index = 0;
  int model = kBypassId;
  ResidualMethod method = ResidualMethod::kDctBpc;
  int exponent = 0;
  int n_x = 0;
  int n_r = 0;
  int header_bits = 0;
  int total = 0;
  double mse = 0.0;  // volts^2, measured on the reconstruction
  double seconds = 0.0;  // search time
  SearchDiagnostics diagnostics;
};

// Codes the windows of one channel in order, keeping the state the decoder
// will rebuild.
class ChannelEncoder {
 public:
  ChannelEncoder(const ModelCatalog& catalog, double d_max, SearchOptions options);

  // Codes one window of window_size() volts samples and appends its frame.
  WindowRecord encode(std::span<const double> window, BitVector& out);

  const std::vector<double>& reconstruction() const noexcept { return reconstruction_; }
  const std::optional<CodecState>& state() const noexcept { return state_; }

 private:
  const ModelCatalog* catalog_;
  DistortionBudget budget_;
  SearchOptions options_;
  std::optional<CodecState> state_;
  std::vector<double> reconstruction_;
  std::size_t next_index_ = 0;
};

class ChannelDecoder {
 public:
  explicit ChannelDecoder(const ModelCatalog& catalog) : catalog_(&catalog) {}

  // Reads one frame and returns its window in volts.
  std::vector<double> decode(BitReader& in);

  const std::optional<CodecState>& state() const noexcept { return state_; }

 private:
  const ModelCatalog* catalog_;
  std::optional<CodecState> state_;
};

struct ChannelResult {
  ChannelBlock block;
  std::vector<WindowRecord> records;
  std::vector<double> reconstruction;  // volts, whole windows only
};

ChannelResult encode_channel(const ModelCatalog& catalog, std::span<const double> samples, double d_max,
                             const SearchOptions& options, std::string name = {});

std::vector<double> decode_channel(const ModelCatalog& catalog, const ChannelBlock& block);

}  // namespace mmc
