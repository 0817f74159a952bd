#include "mmc/codec.hpp"

#include <chrono>
#include <cmath>

#include "mmc/error.hpp"

namespace mmc {

ChannelEncoder::ChannelEncoder(const ModelCatalog& catalog, double d_max, SearchOptions options)
    : catalog_(&catalog), budget_(d_max), options_(std::move(options)) {}

WindowRecord ChannelEncoder::encode(std::span<const double> window, BitVector& out) {
  if (window.size() != catalog_->window_size()) {
    throw Error(ErrorCode::kLengthMismatch, "window length does not match the catalog");
  }
  const ScaledWindow scaled = scale_window(Window{{window.begin(), window.end()}, next_index_});
  const ModelContext ctx(*catalog_, scaled.exponent, state_ ? &*state_ : nullptr);

  const auto start = std::chrono::steady_clock::now();
  SearchResult result = search(scaled.samples, budget_.scaled(scaled.exponent), ctx, options_);
  const auto stop = std::chrono::steady_clock::now();

  const EncodedFrame frame = make_frame(result, scaled.exponent);
  pack_frame(frame, result.k_params, out);

  reconstruction_ = result.reconstruction;
  for (double& v : reconstruction_) v = std::ldexp(v, scaled.exponent);
  advance_state(state_, ctx, result.model, result.quantized.theta_q, reconstruction_);

  WindowRecord rec;
  rec.index = next_index_++;
  rec.model = result.model;
  rec.method = result.method;
  rec.exponent = scaled.exponent;
  rec.n_x = result.n_x;
  rec.n_r = result.n_r;
  rec.header_bits = result.header_bits;
  rec.total = result.total;
  rec.mse = mse(window, reconstruction_);
  rec.seconds = std::chrono::duration<double>(stop - start).count();
  rec.diagnostics = std::move(result.diagnostics);
  return rec;
}

std::vector<double> ChannelDecoder::decode(BitReader& in) {
  const EncodedFrame frame = unpack_frame(in, *catalog_, state_ ? &*state_ : nullptr);
  return decode_window(frame, *catalog_, state_);
}

ChannelResult encode_channel(const ModelCatalog& catalog, std::span<const double> samples, double d_max,
                             const SearchOptions& options, std::string name) {
  ChannelResult out;
  out.block.name = std::move(name);
  ChannelEncoder encoder(catalog, d_max, options);
  for (const auto& w : window_stream(samples, catalog.window_size())) {
    out.records.push_back(encoder.encode(w.samples, out.block.bits));
    const auto& rec = encoder.reconstruction();
    out.reconstruction.insert(out.reconstruction.end(), rec.begin(), rec.end());
  }
  out.block.windows = static_cast<std::uint32_t>(out.records.size());
  return out;
}

std::vector<double> decode_channel(const ModelCatalog& catalog, const ChannelBlock& block) {
  ChannelDecoder decoder(catalog);
  BitReader in(block.bits);
  std::vector<double> out;
  for (std::uint32_t i = 0; i < block.windows; ++i) {
    const auto w = decoder.decode(in);
    out.insert(out.end(), w.begin(), w.end());
  }
  return out;
}

}  // namespace mmc
