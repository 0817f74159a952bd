#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mmc/bits.hpp"

namespace mmc {

enum class ResidualMethod : int { kDctBpc = 0, kDwtEzw = 1 };

inline constexpr int kResidualMethodCount = 2;
inline constexpr int kDefaultPlanes = 15;
inline constexpr int kMaxPlanes = 48;
inline constexpr int kMinResidualExponent = 0;
inline constexpr int kMaxResidualExponent = 9;
// Residuals whose peak (in the scaled signal domain) is below this are not
// coded, provided the target is already met without them.
inline constexpr double kSkipThreshold = 1e-3;

// Every stream starts with the exponent of its most significant bit plane,
// biased by kTopPlaneBias into kTopPlaneBits bits.
inline constexpr int kTopPlaneBits = 5;
inline constexpr int kTopPlaneBias = 16;

constexpr ResidualMethod residual_method(int id) { return static_cast<ResidualMethod>(id); }

struct EmbeddedStream {
  BitVector bits;
  ResidualMethod method = ResidualMethod::kDctBpc;
  // The coded signal is 2^exponent times the residual.
  int exponent = 0;
};

// A stream plus, for every prefix length n = 0..size, the squared error
// sum_k (c_k - c^_k)^2 the decoder reaches in the transform domain, in units
// of the 2^exponent scaled residual.
struct TracedStream {
  EmbeddedStream stream;
  std::vector<double> trace;
};

struct ResidualPlan {
  std::size_t n_r = 0;
  double distortion = 0.0;
  bool skip = false;
  // False when the target was not met even by the deepest stream.
  bool reached = true;
  EmbeddedStream stream;  // truncated to n_r bits
};

int residual_exponent(std::span<const double> r);

std::vector<double> forward_transform(ResidualMethod method, std::span<const double> x);
std::vector<double> inverse_transform(ResidualMethod method, std::span<const double> coeffs);

EmbeddedStream encode_embedded(std::span<const double> r, ResidualMethod method, int planes = kDefaultPlanes);
TracedStream encode_embedded_traced(std::span<const double> r, ResidualMethod method,
                                    int planes = kDefaultPlanes);

// Transform coefficients recovered from the first n_bits bits (of the
// 2^exponent scaled residual).
std::vector<double> decode_coefficients(const EmbeddedStream& s, std::size_t n_bits, std::size_t length);

// The residual estimate from the first n_bits bits, in the caller's units.
std::vector<double> decode_embedded(const EmbeddedStream& s, std::size_t n_bits, std::size_t length);

// base + decode_embedded(s, n_bits): the reconstruction the decoder forms.
std::vector<double> reconstruct_with_residual(std::span<const double> base, const EmbeddedStream& s,
                                              std::size_t n_bits);

// Smallest prefix n with mse(r, decode(n)) <= target.
ResidualPlan min_prefix_for_target(std::span<const double> r, ResidualMethod method, double target,
                                   int planes = kDefaultPlanes);

// Same, for the residual x - base, with the distortion measured on the actual
// reconstruction base + r^ against x.
ResidualPlan min_prefix_for_target(std::span<const double> x, std::span<const double> base,
                                   ResidualMethod method, double target, int planes = kDefaultPlanes);

}  // namespace mmc
