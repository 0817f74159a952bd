#pragma once

#include <cstdint>

namespace mmc {

// Field widths of one coded window.
inline constexpr int kModelFieldBits = 4;
inline constexpr int kExponentFieldBits = 5;
inline constexpr int kResidualFlagBits = 1;
inline constexpr int kMethodFieldBits = 1;
inline constexpr int kResidualExponentFieldBits = 4;
inline constexpr int kResidualLengthFieldBits = 14;
inline constexpr int kMaxResidualBits = (1 << kResidualLengthFieldBits) - 1;

// ceil(log2(12 K)): width of the n_x field for a model with K parameters.
// Zero when the model has no parameters.
int parameter_field_bits(int k_params);

// n_h for a model with K parameters, with or without a coded residual.
int header_bits(int k_params, bool residual);

}  // namespace mmc
