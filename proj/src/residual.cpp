#include "mmc/residual.hpp"

#include <algorithm>
#include <cmath>

#include "mmc/error.hpp"
#include "mmc/signal.hpp"
#include "mmc/transforms.hpp"

namespace mmc {

namespace {

// Magnitude knowledge the decoder has about one coefficient: once significant,
// |c| lies in [lower, lower + width) and is reconstructed at `lower`. Placing
// the estimate at the bottom of the interval means no bit can move it away
// from the true value, so distortion never grows with the prefix length.
struct Coeff {
  bool significant = false;
  bool negative = false;
  double lower = 0.0;
  double width = 0.0;

  double value() const { return significant ? (negative ? -lower : lower) : 0.0; }
};

enum EzwSymbol : unsigned { kZeroTree = 0b00, kIsolatedZero = 0b01, kPositive = 0b10, kNegative = 0b11 };

class TraceSink {
 public:
  TraceSink(BitVector& bits, std::vector<double>& trace, double energy)
      : bits_(bits), trace_(trace), error_(energy) {}

  void emit(bool bit, double error_delta = 0.0) {
    bits_.push_back(bit);
    error_ += error_delta;
    trace_.push_back(std::max(error_, 0.0));
  }

 private:
  BitVector& bits_;
  std::vector<double>& trace_;
  double error_;
};

double square(double v) { return v * v; }

// Refinement of a significant coefficient by one bit.
void refine(Coeff& st, double magnitude, TraceSink& sink) {
  const double half = 0.5 * st.width;
  const bool upper = magnitude >= st.lower + half;
  const double before = square(magnitude - st.lower);
  if (upper) st.lower += half;
  st.width = half;
  sink.emit(upper, square(magnitude - st.lower) - before);
}

void make_significant(Coeff& st, double coefficient, double threshold) {
  st.significant = true;
  st.negative = coefficient < 0;
  st.lower = threshold;
  st.width = threshold;
}

std::size_t ezw_root_count(std::size_t n) { return n >> dwt_levels(n); }

// Children in the 1-D dyadic tree over the [a_J | d_J | ... | d_1] layout.
template <typename F>
void for_each_child(std::size_t i, std::size_t n, std::size_t roots, F&& f) {
  if (i < roots) {
    if (i + roots < n) f(i + roots);
  } else if (2 * i + 1 < n) {
    f(2 * i);
    f(2 * i + 1);
  }
}

int top_plane(std::span<const double> coeffs) {
  double peak = 0.0;
  for (double c : coeffs) peak = std::max(peak, std::abs(c));
  if (peak == 0.0) return 0;
  int e = 0;
  std::frexp(peak, &e);  // 2^(e-1) <= peak < 2^e
  const int top = e - 1;
  if (top >= (1 << kTopPlaneBits) - kTopPlaneBias) {
    throw Error(ErrorCode::kFieldOverflow, "residual coefficient too large for the embedded coder");
  }
  return std::max(top, -kTopPlaneBias);
}

void encode_bpc(std::span<const double> c, int top, int planes, TraceSink& sink) {
  const std::size_t n = c.size();
  std::vector<Coeff> st(n);
  std::vector<char> fresh(n);
  for (int p = 0; p < planes; ++p) {
    const double threshold = std::ldexp(1.0, top - p);
    std::fill(fresh.begin(), fresh.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      if (st[i].significant) continue;
      const double mag = std::abs(c[i]);
      const bool sig = mag >= threshold;
      sink.emit(sig);
      if (sig) {
        make_significant(st[i], c[i], threshold);
        fresh[i] = 1;
        sink.emit(st[i].negative, square(mag - threshold) - square(mag));
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (st[i].significant && !fresh[i]) refine(st[i], std::abs(c[i]), sink);
    }
  }
}

void encode_ezw(std::span<const double> c, int top, int planes, TraceSink& sink) {
  const std::size_t n = c.size();
  const std::size_t roots = ezw_root_count(n);
  std::vector<Coeff> st(n);
  std::vector<double> desc_max(n);
  std::vector<char> skip(n);
  std::vector<std::size_t> subordinate;
  for (int p = 0; p < planes; ++p) {
    const double threshold = std::ldexp(1.0, top - p);
    for (std::size_t i = n; i-- > 0;) {
      double m = 0.0;
      for_each_child(i, n, roots, [&](std::size_t ch) {
        m = std::max({m, st[ch].significant ? 0.0 : std::abs(c[ch]), desc_max[ch]});
      });
      desc_max[i] = m;
    }
    std::fill(skip.begin(), skip.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      if (skip[i]) {
        for_each_child(i, n, roots, [&](std::size_t ch) { skip[ch] = 1; });
        continue;
      }
      if (st[i].significant) continue;
      const double mag = std::abs(c[i]);
      if (mag >= threshold) {
        make_significant(st[i], c[i], threshold);
        sink.emit(true);
        sink.emit(st[i].negative, square(mag - threshold) - square(mag));
        subordinate.push_back(i);
      } else if (desc_max[i] < threshold) {
        sink.emit(false);
        sink.emit(false);
        for_each_child(i, n, roots, [&](std::size_t ch) { skip[ch] = 1; });
      } else {
        sink.emit(false);
        sink.emit(true);
      }
    }
    for (std::size_t i : subordinate) refine(st[i], std::abs(c[i]), sink);
  }
}

// Decoders stop at the first symbol that is not complete within the prefix.
std::vector<double> decode_bpc(BitReader& in, int top, std::size_t n) {
  std::vector<Coeff> st(n);
  std::vector<char> fresh(n);
  for (int p = 0; p < kMaxPlanes + 1; ++p) {
    const double threshold = std::ldexp(1.0, top - p);
    std::fill(fresh.begin(), fresh.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      if (st[i].significant) continue;
      if (in.remaining() == 0) goto done;
      if (in.read_bit()) {
        if (in.remaining() == 0) goto done;
        st[i].significant = true;
        st[i].negative = in.read_bit();
        st[i].lower = threshold;
        st[i].width = threshold;
        fresh[i] = 1;
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!st[i].significant || fresh[i]) continue;
      if (in.remaining() == 0) goto done;
      st[i].width *= 0.5;
      if (in.read_bit()) st[i].lower += st[i].width;
    }
  }
done:
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = st[i].value();
  return out;
}

std::vector<double> decode_ezw(BitReader& in, int top, std::size_t n) {
  const std::size_t roots = ezw_root_count(n);
  std::vector<Coeff> st(n);
  std::vector<char> skip(n);
  std::vector<std::size_t> subordinate;
  for (int p = 0; p < kMaxPlanes + 1; ++p) {
    const double threshold = std::ldexp(1.0, top - p);
    std::fill(skip.begin(), skip.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      if (skip[i]) {
        for_each_child(i, n, roots, [&](std::size_t ch) { skip[ch] = 1; });
        continue;
      }
      if (st[i].significant) continue;
      if (in.remaining() < 2) goto done;
      const auto symbol = static_cast<unsigned>(in.read(2));
      if (symbol == kPositive || symbol == kNegative) {
        st[i].significant = true;
        st[i].negative = symbol == kNegative;
        st[i].lower = threshold;
        st[i].width = threshold;
        subordinate.push_back(i);
      } else if (symbol == kZeroTree) {
        for_each_child(i, n, roots, [&](std::size_t ch) { skip[ch] = 1; });
      }
    }
    for (std::size_t i : subordinate) {
      if (in.remaining() == 0) goto done;
      st[i].width *= 0.5;
      if (in.read_bit()) st[i].lower += st[i].width;
    }
  }
done:
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = st[i].value();
  return out;
}

}  // namespace

int residual_exponent(std::span<const double> r) {
  double peak = 0.0;
  for (double v : r) peak = std::max(peak, std::abs(v));
  if (peak == 0.0) return kMinResidualExponent;
  int e = 0;
  std::frexp(peak, &e);
  return std::clamp(-e, kMinResidualExponent, kMaxResidualExponent);
}

std::vector<double> forward_transform(ResidualMethod method, std::span<const double> x) {
  return method == ResidualMethod::kDctBpc ? dct_forward(x) : dwt_forward(x);
}

std::vector<double> inverse_transform(ResidualMethod method, std::span<const double> coeffs) {
  return method == ResidualMethod::kDctBpc ? dct_inverse(coeffs) : dwt_inverse(coeffs);
}

TracedStream encode_embedded_traced(std::span<const double> r, ResidualMethod method, int planes) {
  if (planes < 1 || planes > kMaxPlanes) throw Error(ErrorCode::kInvalidArgument, "plane count out of range");
  TracedStream out;
  out.stream.method = method;
  out.stream.exponent = residual_exponent(r);
  std::vector<double> scaled(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) scaled[i] = std::ldexp(r[i], out.stream.exponent);
  const auto coeffs = forward_transform(method, scaled);

  double energy = 0.0;
  for (double c : coeffs) energy += c * c;
  out.trace.push_back(energy);
  if (energy == 0.0) return out;

  const int top = top_plane(coeffs);
  TraceSink sink(out.stream.bits, out.trace, energy);
  for (int b = kTopPlaneBits - 1; b >= 0; --b) sink.emit(((top + kTopPlaneBias) >> b) & 1);
  if (method == ResidualMethod::kDctBpc) encode_bpc(coeffs, top, planes, sink);
  else encode_ezw(coeffs, top, planes, sink);
  return out;
}

EmbeddedStream encode_embedded(std::span<const double> r, ResidualMethod method, int planes) {
  return encode_embedded_traced(r, method, planes).stream;
}

std::vector<double> decode_coefficients(const EmbeddedStream& s, std::size_t n_bits, std::size_t length) {
  if (n_bits > s.bits.size()) throw Error(ErrorCode::kTruncatedStream, "prefix longer than the stream");
  if (n_bits < static_cast<std::size_t>(kTopPlaneBits)) return std::vector<double>(length, 0.0);
  BitReader in(s.bits, 0, n_bits);
  const int top = static_cast<int>(in.read(kTopPlaneBits)) - kTopPlaneBias;
  return s.method == ResidualMethod::kDctBpc ? decode_bpc(in, top, length) : decode_ezw(in, top, length);
}

std::vector<double> decode_embedded(const EmbeddedStream& s, std::size_t n_bits, std::size_t length) {
  if (s.method == ResidualMethod::kDwtEzw && !is_power_of_two(length)) {
    throw Error(ErrorCode::kInvalidArgument, "wavelet coder needs a power-of-two length");
  }
  auto r = inverse_transform(s.method, decode_coefficients(s, n_bits, length));
  for (double& v : r) v = std::ldexp(v, -s.exponent);
  return r;
}

std::vector<double> reconstruct_with_residual(std::span<const double> base, const EmbeddedStream& s,
                                              std::size_t n_bits) {
  std::vector<double> out(base.begin(), base.end());
  if (n_bits == 0) return out;
  const auto r = decode_embedded(s, n_bits, base.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += r[i];
  return out;
}

ResidualPlan min_prefix_for_target(std::span<const double> r, ResidualMethod method, double target, int planes) {
  const std::vector<double> zeros(r.size(), 0.0);
  return min_prefix_for_target(r, zeros, method, target, planes);
}

ResidualPlan min_prefix_for_target(std::span<const double> x, std::span<const double> base,
                                   ResidualMethod method, double target, int planes) {
  if (x.size() != base.size()) throw Error(ErrorCode::kLengthMismatch, "signal and base differ in length");
  if (!(target >= 0)) throw Error(ErrorCode::kInvalidArgument, "target must be nonnegative");
  std::vector<double> r(x.size());
  double peak = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    r[i] = x[i] - base[i];
    peak = std::max(peak, std::abs(r[i]));
  }

  ResidualPlan plan;
  plan.stream.method = method;
  plan.distortion = mse(x, base);
  if (plan.distortion <= target) {
    plan.skip = peak < kSkipThreshold;
    return plan;
  }

  auto exact = [&](const EmbeddedStream& s, std::size_t n) { return mse(x, reconstruct_with_residual(base, s, n)); };

  for (int depth = planes;; depth = std::min(2 * depth, kMaxPlanes)) {
    TracedStream enc = encode_embedded_traced(r, method, depth);
    const auto& trace = enc.trace;
    const std::size_t len = enc.stream.bits.size();
    const double unit = std::ldexp(1.0, -2 * enc.stream.exponent) / static_cast<double>(x.size());

    // The transform-domain trace locates the candidate; the exact
    // reconstruction error decides. Distortion only changes at bits where the
    // trace changes, so the search moves between those positions.
    auto next_change = [&](std::size_t n) {
      for (std::size_t j = n + 1; j <= len; ++j) {
        if (trace[j] != trace[j - 1]) return j;
      }
      return len + 1;
    };
    auto change_at_or_before = [&](std::size_t n) {
      while (n > 0 && trace[n] == trace[n - 1]) --n;
      return n;
    };

    std::size_t cand = 0;
    while (cand <= len && trace[cand] * unit > target) ++cand;
    if (cand > len) cand = len;
    cand = change_at_or_before(cand);

    double d = exact(enc.stream, cand);
    while (d > target && cand < len) {
      cand = std::min(next_change(cand), len);
      d = exact(enc.stream, cand);
    }
    if (d <= target) {
      while (cand > 0) {
        const std::size_t prev = change_at_or_before(cand - 1);
        const double dp = exact(enc.stream, prev);
        if (dp > target) break;
        cand = prev;
        d = dp;
      }
      plan.n_r = cand;
      plan.distortion = d;
      plan.stream = std::move(enc.stream);
      plan.stream.bits.truncate(cand);
      return plan;
    }
    if (depth == kMaxPlanes) {
      plan.reached = false;
      plan.n_r = len;
      plan.distortion = d;
      plan.stream = std::move(enc.stream);
      return plan;
    }
  }
}

}  // namespace mmc
