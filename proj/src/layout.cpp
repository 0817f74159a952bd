#include "mmc/layout.hpp"

#include "mmc/quantization.hpp"

namespace mmc {

int parameter_field_bits(int k_params) {
  if (k_params <= 0) return 0;
  const int budget = kMaxBitsPerParam * k_params;
  int bits = 0;
  while ((1 << bits) < budget) ++bits;
  return bits;
}

int header_bits(int k_params, bool residual) {
  int bits = kModelFieldBits + kExponentFieldBits + parameter_field_bits(k_params) + kResidualFlagBits;
  if (residual) bits += kMethodFieldBits + kResidualExponentFieldBits + kResidualLengthFieldBits;
  return bits;
}

}  // namespace mmc
