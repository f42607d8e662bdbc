#include "qet/fft.hpp"

#include "qet/errors.hpp"

#include <cmath>
#include <numbers>

namespace qet::fft {

bool is_power_of_two(std::size_t n) {
    return n >= 2 && (n & (n - 1)) == 0;
}

void transform(std::vector<std::complex<double>>& data, bool inverse) {
    const std::size_t n = data.size();
    if (!is_power_of_two(n)) {
        throw contract_error("fft: length " + std::to_string(n) +
                             " is not a power of two >= 2");
    }

    // bit-reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(data[i], data[j]);
    }

    const double sign = inverse ? 1.0 : -1.0;
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * std::numbers::pi / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = data[i + k];
                const std::complex<double> v = data[i + k + len / 2] * w;
                data[i + k] = u + v;
                data[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

void centered_unitary(std::vector<std::complex<double>>& data, bool inverse) {
    const std::size_t n = data.size();
    if (!is_power_of_two(n) || n < 4) {
        throw contract_error("centered transform: length " + std::to_string(n) +
                             " is not a power of two >= 4");
    }
    // (n−N/2)(k−N/2) = nk − (N/2)(n+k) + N²/4, so the centered kernel is the
    // plain one conjugated by (−1)^n phases; the constant e^{∓iπN/2} is 1 for
    // every N divisible by 4.
    for (std::size_t i = 1; i < n; i += 2) data[i] = -data[i];
    transform(data, inverse);
    for (std::size_t i = 1; i < n; i += 2) data[i] = -data[i];
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (auto& z : data) z *= scale;
}

} // namespace qet::fft
