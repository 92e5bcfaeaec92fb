#pragma once

// Spectral operations on uniformly sampled 2pi-periodic data.

#include <complex>
#include <span>
#include <vector>

namespace ovalspec::periodic {

/// Signed wavenumber of DFT bin j for length N. The Nyquist bin maps to +N/2.
inline int wavenumber(std::size_t j, std::size_t N) {
    return j <= N / 2 ? static_cast<int>(j) : static_cast<int>(j) - static_cast<int>(N);
}

/// d/ds of real samples on [0, 2pi). The Nyquist mode is dropped.
std::vector<double> derivative(std::span<const double> u);

/// Zero-mean antiderivative of complex samples on [0, 2pi); also returns the mean.
std::vector<std::complex<double>> antiderivative(std::span<const std::complex<double>> u,
                                                 std::complex<double>& mean);

} // namespace ovalspec::periodic
