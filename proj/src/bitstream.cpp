#include "mmc/bitstream.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>

#include "mmc/error.hpp"
#include "mmc/quantization.hpp"
#include "mmc/search.hpp"
#include "mmc/signal.hpp"

namespace mmc {

int frame_parameter_count(const ModelCatalog& catalog, int model, const CodecState* state) {
  const ModelSpec& spec = catalog.spec(model);
  if (spec.family != ModelFamily::kParameterPredictive) return spec.k_params;
  if (state == nullptr || state->base_model == kBypassId || state->base_model == kParameterPredictiveId) {
    throw Error(ErrorCode::kMissingState, "parameter-predictive frame without a usable previous window");
  }
  return catalog.spec(state->base_model).k_params;
}

EncodedFrame make_frame(const SearchResult& result, int exponent) {
  EncodedFrame f;
  f.model = result.model;
  f.exponent = exponent;
  f.n_x = result.n_x;
  const auto& alloc = result.quantized.allocation;
  for (std::size_t k = 0; k < alloc.bits.size(); ++k) {
    f.params.append(result.quantized.levels[k], alloc.bits[k]);
  }
  f.residual = result.has_residual();
  if (f.residual) {
    f.method = result.method;
    f.residual_exponent = result.residual.exponent;
    f.residual_bits = result.residual.bits;
    f.residual_bits.truncate(static_cast<std::size_t>(result.n_r));
  }
  return f;
}

namespace {

void check_field(long long value, int width, const char* what) {
  if (value < 0 || (width < 63 && value >= (1LL << width))) {
    throw Error(ErrorCode::kFieldOverflow, std::string(what) + " does not fit its field");
  }
}

}  // namespace

int frame_bits(const EncodedFrame& frame, int k_params) {
  return header_bits(frame.model == kBypassId ? 0 : k_params, frame.residual) + frame.n_x + frame.n_r();
}

void pack_frame(const EncodedFrame& f, int k_params, BitVector& out) {
  check_field(f.model, kModelFieldBits, "model id");
  if (f.model >= kModelCount) throw Error(ErrorCode::kReservedModel, "model id is reserved");
  check_field(f.exponent, kExponentFieldBits, "signal exponent");
  if (f.exponent > kMaxSignalExponent) throw Error(ErrorCode::kFieldOverflow, "signal exponent out of range");
  if (f.residual) {
    check_field(f.residual_exponent, kResidualExponentFieldBits, "residual exponent");
    if (f.residual_exponent > kMaxResidualExponent) {
      throw Error(ErrorCode::kFieldOverflow, "residual exponent out of range");
    }
    check_field(f.n_r(), kResidualLengthFieldBits, "n_r");
  }
  if (f.model == kBypassId) k_params = 0;
  if (f.n_x > kMaxBitsPerParam * k_params) throw Error(ErrorCode::kFieldOverflow, "n_x exceeds the parameter budget");
  if (f.params.size() != static_cast<std::size_t>(f.n_x)) {
    throw Error(ErrorCode::kInvalidArgument, "parameter payload length differs from n_x");
  }
  out.append(static_cast<std::uint64_t>(f.model), kModelFieldBits);
  out.append(static_cast<std::uint64_t>(f.exponent), kExponentFieldBits);
  out.append(static_cast<std::uint64_t>(f.n_x), parameter_field_bits(k_params));
  out.append(f.params);
  out.push_back(f.residual);
  if (!f.residual) return;
  out.push_back(f.method == ResidualMethod::kDwtEzw);
  out.append(static_cast<std::uint64_t>(f.residual_exponent), kResidualExponentFieldBits);
  out.append(static_cast<std::uint64_t>(f.n_r()), kResidualLengthFieldBits);
  out.append(f.residual_bits);
}

BitVector pack_frame(const EncodedFrame& frame, int k_params) {
  BitVector out;
  pack_frame(frame, k_params, out);
  return out;
}

EncodedFrame unpack_frame(BitReader& in, const ModelCatalog& catalog, const CodecState* state) {
  EncodedFrame f;
  f.model = static_cast<int>(in.read(kModelFieldBits));
  if (f.model >= kModelCount) throw Error(ErrorCode::kReservedModel, "frame uses reserved model id");
  f.exponent = static_cast<int>(in.read(kExponentFieldBits));
  if (f.exponent > kMaxSignalExponent) throw Error(ErrorCode::kCorruptContainer, "signal exponent out of range");
  const int k_params = frame_parameter_count(catalog, f.model, state);
  f.n_x = static_cast<int>(in.read(parameter_field_bits(k_params)));
  if (f.n_x > kMaxBitsPerParam * k_params) throw Error(ErrorCode::kCorruptContainer, "n_x exceeds the parameter budget");
  f.params = in.read_bits(static_cast<std::size_t>(f.n_x));
  f.residual = in.read_bit();
  if (!f.residual) return f;
  f.method = in.read_bit() ? ResidualMethod::kDwtEzw : ResidualMethod::kDctBpc;
  f.residual_exponent = static_cast<int>(in.read(kResidualExponentFieldBits));
  if (f.residual_exponent > kMaxResidualExponent) {
    throw Error(ErrorCode::kCorruptContainer, "residual exponent out of range");
  }
  const auto n_r = static_cast<std::size_t>(in.read(kResidualLengthFieldBits));
  f.residual_bits = in.read_bits(n_r);
  return f;
}

void advance_state(std::optional<CodecState>& state, const ModelContext& ctx, int model,
                   std::span<const double> theta_q, std::span<const double> window) {
  constexpr std::size_t carry = kMaxPredictorOrder - 1;
  CodecState next;
  next.history.assign(carry, 0.0);
  if (state) {
    std::copy(state->history.end() - static_cast<std::ptrdiff_t>(carry), state->history.end(), next.history.begin());
  }
  next.history.insert(next.history.end(), window.begin(), window.end());
  next.selected_model = model;
  next.exponent = ctx.exponent();
  if (model == kParameterPredictiveId) {
    next.base_model = state->base_model;
    const auto base = ctx.base_params();
    next.base_params.assign(base.begin(), base.end());
    for (std::size_t k = 0; k < next.base_params.size(); ++k) next.base_params[k] += theta_q[k];
  } else {
    next.base_model = model;
    next.base_params.assign(theta_q.begin(), theta_q.end());
  }
  state = std::move(next);
}

std::vector<double> decode_window(const EncodedFrame& frame, const ModelCatalog& catalog,
                                  std::optional<CodecState>& state) {
  const ModelContext ctx(catalog, frame.exponent, state ? &*state : nullptr);
  const ModelSpec& spec = ctx.effective(frame.model);
  const BitAllocation alloc = allocate_bits(spec, frame.n_x, ctx);
  BitReader params(frame.params);
  std::vector<std::uint32_t> levels(alloc.bits.size());
  for (std::size_t k = 0; k < levels.size(); ++k) {
    levels[k] = static_cast<std::uint32_t>(params.read(alloc.bits[k]));
  }
  const auto theta_q = dequantize(levels, alloc, spec.prior);
  auto window = model_output(spec, theta_q, ctx);
  if (frame.residual) {
    EmbeddedStream s{frame.residual_bits, frame.method, frame.residual_exponent};
    window = reconstruct_with_residual(window, s, s.bits.size());
  }
  for (double& v : window) v = std::ldexp(v, frame.exponent);
  advance_state(state, ctx, frame.model, theta_q, window);
  return window;
}

// ---- container ----------------------------------------------------------------

namespace {

template <typename T>
void put(std::ostream& os, T value) {
  unsigned char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
  os.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
  unsigned char buf[sizeof(T)];
  if (!is.read(reinterpret_cast<char*>(buf), sizeof(T))) {
    throw Error(ErrorCode::kCorruptContainer, "container ends unexpectedly");
  }
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
  T value;
  std::memcpy(&value, buf, sizeof(T));
  return value;
}

}  // namespace

void write_container(std::ostream& os, const Container& c) {
  os.write(kContainerMagic, sizeof(kContainerMagic));
  put<std::uint32_t>(os, c.window_size);
  put<double>(os, c.sample_rate);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(c.channels.size()));
  put<double>(os, c.d_max);
  put<std::uint64_t>(os, c.fingerprint);
  for (const auto& ch : c.channels) {
    if (ch.name.size() > 0xFFFF) throw Error(ErrorCode::kFieldOverflow, "channel name too long");
    put<std::uint16_t>(os, static_cast<std::uint16_t>(ch.name.size()));
    os.write(ch.name.data(), static_cast<std::streamsize>(ch.name.size()));
    put<std::uint32_t>(os, ch.windows);
    put<std::uint64_t>(os, ch.bits.size());
    const auto bytes = ch.bits.bytes();
    os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  }
  if (!os) throw Error(ErrorCode::kIo, "failed to write container");
}

Container read_container(std::istream& is) {
  char magic[sizeof(kContainerMagic)];
  if (!is.read(magic, sizeof(magic)) || std::memcmp(magic, kContainerMagic, sizeof(magic)) != 0) {
    throw Error(ErrorCode::kCorruptContainer, "not an MMC1 container");
  }
  Container c;
  c.window_size = get<std::uint32_t>(is);
  c.sample_rate = get<double>(is);
  const auto channels = get<std::uint32_t>(is);
  c.d_max = get<double>(is);
  c.fingerprint = get<std::uint64_t>(is);
  if (c.window_size < 2 || !(c.sample_rate > 0) || !(c.d_max > 0)) {
    throw Error(ErrorCode::kCorruptContainer, "invalid global header");
  }
  for (std::uint32_t i = 0; i < channels; ++i) {
    ChannelBlock ch;
    ch.name.resize(get<std::uint16_t>(is));
    if (!is.read(ch.name.data(), static_cast<std::streamsize>(ch.name.size()))) {
      throw Error(ErrorCode::kCorruptContainer, "container ends unexpectedly");
    }
    ch.windows = get<std::uint32_t>(is);
    const auto bit_count = get<std::uint64_t>(is);
    std::vector<std::uint8_t> bytes((bit_count + 7) / 8);
    if (!is.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()))) {
      throw Error(ErrorCode::kCorruptContainer, "container ends unexpectedly");
    }
    ch.bits = BitVector::from_bytes(bytes, bit_count);
    c.channels.push_back(std::move(ch));
  }
  return c;
}

}  // namespace mmc
