#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "mmc/models.hpp"

namespace mmc {

inline constexpr int kMaxBitsPerParam = 12;

struct BitAllocation {
  std::vector<int> bits;
  int total = 0;
};

struct QuantizedParams {
  std::vector<std::uint32_t> levels;
  BitAllocation allocation;
  std::vector<double> theta_q;
};

// Marginal prior of one parameter, for the high-rate constant c_k^2.
struct PriorMarginal {
  enum class Kind { kUniform, kGaussian, kOther };
  Kind kind = Kind::kUniform;
  double width = 1.0;     // uniform
  double variance = 1.0;  // gaussian
};

// c_k^2 such that E[eps_k^2] = c_k^2 * 2^(-2 n_k) at high rate.
double c_squared(const PriorMarginal& marginal);

// h_k * c_k^2 for every parameter of `spec`; the weights of the allocation.
std::vector<double> allocation_weights(const ModelSpec& spec, const ModelContext& ctx);

// Minimizes sum w_k 2^(-2 n_k) s.t. sum n_k = n_x, 0 <= n_k <= 12. Throws
// kBudgetOverflow when n_x exceeds 12 per parameter.
BitAllocation allocate_bits(std::span<const double> weights, int n_x);
BitAllocation allocate_bits(const ModelSpec& spec, int n_x, const ModelContext& ctx);

// Real-valued water-filling solution (before integer rounding).
std::vector<double> water_fill(std::span<const double> weights, int n_x);

// Predicted sum_k w_k 2^(-2 n_k).
double predicted_distortion(std::span<const double> weights, const BitAllocation& alloc);

QuantizedParams quantize(std::span<const double> theta, const BitAllocation& alloc, const PriorBox& prior);
std::vector<double> dequantize(std::span<const std::uint32_t> levels, const BitAllocation& alloc,
                               const PriorBox& prior);

// x^m(theta) - x^m(theta_q), evaluated exactly.
std::vector<double> quantization_output_error(const ModelSpec& spec, std::span<const double> theta,
                                              const QuantizedParams& q, const ModelContext& ctx);

// Allocation tables for offline reuse. Keys are (model id, n_x); rows for the
// parameter-predictive model are keyed by 100 * 14 + base id.
using AllocationTable = std::map<std::pair<int, int>, std::vector<int>>;

AllocationTable build_allocation_table(const ModelCatalog& catalog);
void write_allocation_table(std::ostream& os, const AllocationTable& table);
AllocationTable read_allocation_table(std::istream& is);

}  // namespace mmc
