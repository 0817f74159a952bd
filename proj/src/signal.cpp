#include "mmc/signal.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mmc/error.hpp"

namespace mmc {

DistortionBudget::DistortionBudget(double d_max) : d_max_(d_max) {
  if (!(d_max > 0.0) || !std::isfinite(d_max)) {
    throw Error(ErrorCode::kInvalidArgument, "d_max must be a positive finite value");
  }
}

double DistortionBudget::scaled(int exponent) const noexcept {
  return std::ldexp(d_max_, -2 * exponent);
}

int normalizing_exponent(std::span<const double> x, int lo, int hi) {
  double peak = 0.0;
  for (double v : x) peak = std::max(peak, std::abs(v));
  if (peak == 0.0) return lo;
  int e = 0;
  std::frexp(peak, &e);  // peak = m * 2^e, m in [0.5, 1)
  return std::clamp(e, lo, hi);
}

ScaledWindow scale_window(const Window& w) {
  for (double v : w.samples) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kInvalidArgument, "window contains a non-finite sample");
    }
    if (std::abs(v) > kMaxAmplitude) {
      throw Error(ErrorCode::kAmplitudeOverflow,
                  "sample magnitude " + std::to_string(v) + " exceeds the representable range");
    }
  }
  ScaledWindow out;
  out.exponent = normalizing_exponent(w.samples, kMinSignalExponent, kMaxSignalExponent);
  out.samples.resize(w.samples.size());
  std::transform(w.samples.begin(), w.samples.end(), out.samples.begin(),
                 [e = out.exponent](double v) { return std::ldexp(v, -e); });
  return out;
}

double mse(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kLengthMismatch, "mse: sequences differ in length");
  }
  if (a.empty()) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc / static_cast<double>(a.size());
}

std::vector<Window> window_stream(std::span<const double> channel, std::size_t n) {
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "window length must be positive");
  std::vector<Window> out;
  out.reserve(channel.size() / n);
  for (std::size_t start = 0; start + n <= channel.size(); start += n) {
    Window w;
    w.index = out.size();
    w.samples.assign(channel.begin() + static_cast<std::ptrdiff_t>(start),
                     channel.begin() + static_cast<std::ptrdiff_t>(start + n));
    out.push_back(std::move(w));
  }
  return out;
}

double scaled_mse_to_volts2(double scaled_mse, int exponent) {
  return std::ldexp(scaled_mse, 2 * exponent);
}

}  // namespace mmc
