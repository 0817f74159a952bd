#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mmc {

// Orthonormal type-II DCT and its inverse (type III).
std::vector<double> dct_forward(std::span<const double> x);
std::vector<double> dct_inverse(std::span<const double> coeffs);

// Orthogonal periodic Daubechies-4 wavelet transform. Output layout is
// [a_J | d_J | d_{J-1} | ... | d_1], coarsest first.
std::vector<double> dwt_forward(std::span<const double> x);
std::vector<double> dwt_inverse(std::span<const double> coeffs);

// Decomposition depth used for a length-n signal: min(5, log2 n).
int dwt_levels(std::size_t n);
bool is_power_of_two(std::size_t n);

}  // namespace mmc
