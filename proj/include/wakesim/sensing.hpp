// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "wakesim/csi.hpp"

namespace wakesim {

/// Magnitude spectrum on a uniform ascending frequency grid starting at DC.
struct Spectrum {
    Eigen::VectorXd freqs_hz;
    Eigen::VectorXd mags;
};

inline constexpr double kNoBreathing = -1.0;

/// Per-window estimate: breaths/minute, or kNoBreathing when no frequency
/// gathers a majority of the vote weight.
struct BreathEstimate {
    double rate_bpm = kNoBreathing;
    double window_start_s = 0.0;
    double window_end_s = 0.0;
    double vote_weight = 0.0;  // winning share of the total vote weight
};

struct PipelineConfig {
    double window_s = 30.0;
    double stride_s = 1.0;
    double lowpass_cutoff_hz = 1.0;
    double band_lo_hz = 0.1;
    double band_hi_hz = 1.0;
    double majority_fraction = 0.5;
    int zero_pad_factor = 4;
    /// Subcarriers whose band peak-to-average power ratio stays below this
    /// floor abstain from voting (their peak is inside the noise floor).
    double min_par_for_vote = 20.0;
    /// exp() argument cap for the vote weight.
    double par_exponent_cap = 50.0;
    /// Cluster radius for the majority test; <= 0 picks one pre-padding
    /// resolution element (zero_pad_factor fine bins).
    double vote_cluster_hz = 0.0;
    double multi_threshold = 0.1;     // secondary vote-share threshold
    double multi_suppress_hz = 0.05;  // radius silenced around a reported peak

    /// Throws std::invalid_argument on inconsistent settings.
    void validate() const;
};

/// Zero-phase low-pass filter (4th-order Butterworth, applied forward and
/// backward) treating the series as uniform at its mean rate. Passband
/// (<= ~0.6 cutoff) gain within 1 +- 0.05, stopband (>= 2 cutoff) attenuated
/// well beyond 20 dB. Returns the filtered values on the same timestamps.
/// Throws std::invalid_argument with fewer than two samples.
Eigen::VectorXd lowpass(const Eigen::VectorXd& t_s, const Eigen::VectorXd& x, double cutoff_hz);

/// Gap-filling plan shared by every subcarrier of a window: d is the minimum
/// adjacent gap; every gap wider than d gets ceil(gap/d) - 1 evenly spaced,
/// linearly interpolated points, so no output gap exceeds d. Original samples
/// are preserved verbatim.
struct InterpolationGrid {
    Eigen::VectorXd t_out;
    std::vector<Eigen::Index> left;  // source sample feeding each output
    Eigen::VectorXd left_weight;     // 1.0 on original samples
    double min_gap_s = 0.0;

    Eigen::Index size() const { return t_out.size(); }
};

/// Throws std::invalid_argument on non-increasing timestamps or n < 2.
InterpolationGrid build_interpolation_grid(const Eigen::VectorXd& t_s);
Eigen::VectorXd apply_interpolation(const InterpolationGrid& grid, const Eigen::VectorXd& x);

struct UniformSeries {
    Eigen::VectorXd t_s;
    Eigen::VectorXd x;
};
UniformSeries interpolate_uniform(const Eigen::VectorXd& t_s, const Eigen::VectorXd& x);

/// Non-uniform FFT: fill gaps by linear interpolation, remove the mean,
/// zero-pad to zero_pad_factor times the next power of two, FFT, and return
/// magnitudes up to Nyquist on the resampled grid's mean spacing.
Spectrum nufft(const Eigen::VectorXd& t_s, const Eigen::VectorXd& x, const PipelineConfig& config);

/// Exponential peak-to-average-ratio soft vote across subcarrier spectra.
/// Each subcarrier backs its band argmax with weight exp(P_peak / P_ave)
/// (power ratio, capped); the winning bin takes the rate if its clustered
/// share reaches the majority fraction, otherwise the no-breathing sentinel.
/// Spectra must share one frequency grid. Throws std::invalid_argument on an
/// empty band.
BreathEstimate subcarrier_vote(const std::vector<Spectrum>& spectra, const PipelineConfig& config);

/// Windowed timeline: one estimate per stride, the first window ending
/// window_s into the trace. Throws std::invalid_argument when the trace is
/// shorter than one window.
std::vector<BreathEstimate> sliding_estimate(const CsiTrace& trace, const PipelineConfig& config);

/// Up to max_k (rate, vote share) pairs whose share clears multi_threshold,
/// suppressing the neighborhood of each reported peak.
std::vector<std::pair<double, double>> detect_multiple(const std::vector<Spectrum>& spectra,
                                                       const PipelineConfig& config, int max_k);

}  // namespace wakesim
