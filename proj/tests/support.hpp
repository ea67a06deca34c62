// SPDX-License-Identifier: Apache-2.0
//
// Test-only reference implementations, kept independent of the library's
// FFT path: brute-force uniform DFT and direct non-uniform DFT.
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

namespace testsupport {

/// O(N^2) DFT magnitudes of the given real series (no padding, no windowing).
inline Eigen::VectorXd direct_dft_mags(const Eigen::VectorXd& x) {
    const auto n = x.size();
    Eigen::VectorXd mags(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        std::complex<double> acc(0.0, 0.0);
        for (Eigen::Index j = 0; j < n; ++j) {
            const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) *
                                 static_cast<double>(j) / static_cast<double>(n);
            acc += x(j) * std::complex<double>(std::cos(angle), std::sin(angle));
        }
        mags(k) = std::abs(acc);
    }
    return mags;
}

/// Direct non-uniform DFT magnitude at one frequency: |sum_j x_j e^{-2pi i f t_j}|.
inline double nudft_mag(const Eigen::VectorXd& t, const Eigen::VectorXd& x, double freq_hz) {
    std::complex<double> acc(0.0, 0.0);
    for (Eigen::Index j = 0; j < t.size(); ++j) {
        const double angle = -2.0 * std::numbers::pi * freq_hz * t(j);
        acc += x(j) * std::complex<double>(std::cos(angle), std::sin(angle));
    }
    return std::abs(acc);
}

/// Band argmax of the direct non-uniform DFT evaluated on the given grid.
inline double nudft_band_argmax(const Eigen::VectorXd& t, const Eigen::VectorXd& x,
                                const Eigen::VectorXd& freqs_hz, double lo_hz, double hi_hz) {
    const Eigen::VectorXd centered = x.array() - x.mean();
    double best_mag = -1.0;
    double best_freq = 0.0;
    for (Eigen::Index k = 0; k < freqs_hz.size(); ++k) {
        const double f = freqs_hz(k);
        if (f < lo_hz || f > hi_hz) continue;
        const double mag = nudft_mag(t, centered, f);
        if (mag > best_mag) {
            best_mag = mag;
            best_freq = f;
        }
    }
    return best_freq;
}

/// Jittered sampling instants: nominal grid + exponential delay, sorted, with
/// a minimum spacing floor.
inline Eigen::VectorXd jittered_timestamps(std::mt19937_64& rng, double rate_hz,
                                           double duration_s, double jitter_mean_s,
                                           double min_spacing_s) {
    const auto n = static_cast<Eigen::Index>(duration_s * rate_hz);
    std::exponential_distribution<double> jitter(1.0 / jitter_mean_s);
    std::vector<double> t(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        t[static_cast<std::size_t>(i)] = static_cast<double>(i) / rate_hz + jitter(rng);
    }
    std::sort(t.begin(), t.end());
    for (std::size_t i = 1; i < t.size(); ++i) {
        t[i] = std::max(t[i], t[i - 1] + min_spacing_s);
    }
    return Eigen::Map<const Eigen::VectorXd>(t.data(), n);
}

}  // namespace testsupport
