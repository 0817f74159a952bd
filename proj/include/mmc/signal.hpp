#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mmc {

// One block of N consecutive samples in volts.
struct Window {
  std::vector<double> samples;
  std::size_t index = 0;
};

// A window multiplied by 2^-exponent so that its peak lies in [0.5, 1).
// The original is recovered as 2^exponent * samples.
struct ScaledWindow {
  std::vector<double> samples;
  int exponent = 0;
};

inline constexpr int kMinSignalExponent = 0;
inline constexpr int kMaxSignalExponent = 19;
inline constexpr double kMaxAmplitude = 5e5;

class DistortionBudget {
 public:
  explicit DistortionBudget(double d_max);
  double volts2() const noexcept { return d_max_; }
  // The same budget expressed for a window scaled by 2^-exponent. Exact,
  // since only the binary exponent changes.
  double scaled(int exponent) const noexcept;

 private:
  double d_max_;
};

ScaledWindow scale_window(const Window& w);

// Returns (1/N) * sum (a_n - b_n)^2.
double mse(std::span<const double> a, std::span<const double> b);

// Splits a channel into non-overlapping windows of length n. A trailing
// partial window is dropped.
std::vector<Window> window_stream(std::span<const double> channel, std::size_t n);

// Maps an MSE measured on 2^-exponent scaled samples back to volts^2.
double scaled_mse_to_volts2(double scaled_mse, int exponent);

// Smallest e with max|x| * 2^-e in [0.5, 1), clamped to [lo, hi]. Zero input
// yields lo.
int normalizing_exponent(std::span<const double> x, int lo, int hi);

}  // namespace mmc
