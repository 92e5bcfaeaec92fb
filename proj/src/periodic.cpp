#include "periodic.hpp"

#include <unsupported/Eigen/FFT>

namespace ovalspec::periodic {

std::vector<double> derivative(std::span<const double> u) {
    const std::size_t N = u.size();
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> in(u.begin(), u.end());
    std::vector<std::complex<double>> spec;
    fft.fwd(spec, in);
    for (std::size_t j = 0; j < N; ++j) {
        const int k = wavenumber(j, N);
        if (N % 2 == 0 && j == N / 2) {
            spec[j] = 0.0;
        } else {
            spec[j] *= std::complex<double>(0.0, k);
        }
    }
    std::vector<std::complex<double>> out;
    fft.inv(out, spec);
    std::vector<double> du(N);
    for (std::size_t i = 0; i < N; ++i) du[i] = out[i].real();
    return du;
}

std::vector<std::complex<double>> antiderivative(std::span<const std::complex<double>> u,
                                                 std::complex<double>& mean) {
    const std::size_t N = u.size();
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> in(u.begin(), u.end());
    std::vector<std::complex<double>> spec;
    fft.fwd(spec, in);
    mean = spec[0] / static_cast<double>(N);
    spec[0] = 0.0;
    for (std::size_t j = 1; j < N; ++j) {
        const int k = wavenumber(j, N);
        if (N % 2 == 0 && j == N / 2) {
            spec[j] = 0.0;
        } else {
            spec[j] /= std::complex<double>(0.0, k);
        }
    }
    std::vector<std::complex<double>> out;
    fft.inv(out, spec);
    return out;
}

} // namespace ovalspec::periodic
