#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace qet::fft {

bool is_power_of_two(std::size_t n);

// In-place radix-2 transform, unnormalized:
//   forward:  y[k] = Σ_n x[n] e^{-2πi nk/N}
//   inverse:  y[n] = Σ_k x[k] e^{+2πi nk/N}
// Throws contract_error unless the length is a power of two ≥ 2.
void transform(std::vector<std::complex<double>>& data, bool inverse);

// Centered unitary transform on symmetric integer grids:
//   y[k] = (1/√N) Σ_n x[n] e^{∓2πi (n−N/2)(k−N/2)/N}
// (−, forward; +, inverse). Unitary for every power-of-two N ≥ 4.
void centered_unitary(std::vector<std::complex<double>>& data, bool inverse);

} // namespace qet::fft
