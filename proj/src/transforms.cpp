#include "mmc/transforms.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "mmc/error.hpp"

namespace mmc {

namespace {

constexpr int kMaxDwtLevels = 5;

// Row-major N x N orthonormal DCT-II matrix, cached per length.
std::shared_ptr<const std::vector<double>> dct_matrix(std::size_t n) {
  static std::mutex mu;
  static std::map<std::size_t, std::shared_ptr<const std::vector<double>>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[n];
  if (!slot) {
    auto m = std::make_shared<std::vector<double>>(n * n);
    const double nn = static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
      const double scale = k == 0 ? std::sqrt(1.0 / nn) : std::sqrt(2.0 / nn);
      for (std::size_t i = 0; i < n; ++i) {
        (*m)[k * n + i] = scale * std::cos(std::numbers::pi * (2.0 * static_cast<double>(i) + 1.0) *
                                           static_cast<double>(k) / (2.0 * nn));
      }
    }
    slot = std::move(m);
  }
  return slot;
}

const double kSqrt3 = std::sqrt(3.0);
const double kNorm = 4.0 * std::sqrt(2.0);
const double kLow[4] = {(1 + kSqrt3) / kNorm, (3 + kSqrt3) / kNorm, (3 - kSqrt3) / kNorm, (1 - kSqrt3) / kNorm};
const double kHigh[4] = {kLow[3], -kLow[2], kLow[1], -kLow[0]};

void check_dwt_length(std::size_t n) {
  if (n < 2 || !is_power_of_two(n)) {
    throw Error(ErrorCode::kInvalidArgument, "wavelet transform needs a power-of-two length");
  }
}

}  // namespace

std::vector<double> dct_forward(std::span<const double> x) {
  const std::size_t n = x.size();
  const auto m = dct_matrix(n);
  std::vector<double> out(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double* row = m->data() + k * n;
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += row[i] * x[i];
    out[k] = acc;
  }
  return out;
}

std::vector<double> dct_inverse(std::span<const double> coeffs) {
  const std::size_t n = coeffs.size();
  const auto m = dct_matrix(n);
  std::vector<double> out(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double c = coeffs[k];
    if (c == 0.0) continue;
    const double* row = m->data() + k * n;
    for (std::size_t i = 0; i < n; ++i) out[i] += row[i] * c;
  }
  return out;
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

int dwt_levels(std::size_t n) {
  int levels = 0;
  while ((std::size_t{1} << (levels + 1)) <= n && levels < kMaxDwtLevels) ++levels;
  return levels;
}

std::vector<double> dwt_forward(std::span<const double> x) {
  check_dwt_length(x.size());
  std::vector<double> data(x.begin(), x.end());
  std::vector<double> tmp(data.size());
  std::size_t len = data.size();
  for (int level = 0; level < dwt_levels(x.size()); ++level, len /= 2) {
    const std::size_t half = len / 2;
    for (std::size_t i = 0; i < half; ++i) {
      double a = 0, d = 0;
      for (std::size_t k = 0; k < 4; ++k) {
        const double v = data[(2 * i + k) % len];
        a += kLow[k] * v;
        d += kHigh[k] * v;
      }
      tmp[i] = a;
      tmp[half + i] = d;
    }
    std::copy(tmp.begin(), tmp.begin() + static_cast<std::ptrdiff_t>(len), data.begin());
  }
  return data;
}

std::vector<double> dwt_inverse(std::span<const double> coeffs) {
  check_dwt_length(coeffs.size());
  std::vector<double> data(coeffs.begin(), coeffs.end());
  std::vector<double> tmp(data.size());
  const int levels = dwt_levels(coeffs.size());
  std::size_t len = coeffs.size() >> (levels - 1);
  for (int level = 0; level < levels; ++level, len *= 2) {
    const std::size_t half = len / 2;
    std::fill(tmp.begin(), tmp.begin() + static_cast<std::ptrdiff_t>(len), 0.0);
    for (std::size_t i = 0; i < half; ++i) {
      const double a = data[i], d = data[half + i];
      for (std::size_t k = 0; k < 4; ++k) tmp[(2 * i + k) % len] += kLow[k] * a + kHigh[k] * d;
    }
    std::copy(tmp.begin(), tmp.begin() + static_cast<std::ptrdiff_t>(len), data.begin());
  }
  return data;
}

}  // namespace mmc
