// SPDX-License-Identifier: Apache-2.0
#include "wakesim/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <unsupported/Eigen/FFT>

namespace wakesim {

void PipelineConfig::validate() const {
    if (!(window_s >= stride_s && stride_s > 0.0)) {
        throw std::invalid_argument("pipeline config: need window >= stride > 0");
    }
    if (!(band_lo_hz < band_hi_hz && band_hi_hz <= lowpass_cutoff_hz)) {
        throw std::invalid_argument("pipeline config: need band lo < hi <= lowpass cutoff");
    }
    if (zero_pad_factor < 1) {
        throw std::invalid_argument("pipeline config: zero_pad_factor must be >= 1");
    }
    if (majority_fraction <= 0.0 || majority_fraction > 1.0) {
        throw std::invalid_argument("pipeline config: majority fraction must lie in (0, 1]");
    }
}

namespace {

struct Biquad {
    double b0, b1, b2, a1, a2;
};

// Bilinear-transformed analog section 1 / (s^2 + alpha s + 1), prewarped.
Biquad butterworth_section(double alpha, double cutoff_hz, double fs_hz) {
    const double k = std::tan(std::numbers::pi * cutoff_hz / fs_hz);
    const double k2 = k * k;
    const double norm = 1.0 + alpha * k + k2;
    return Biquad{k2 / norm, 2.0 * k2 / norm, k2 / norm, 2.0 * (k2 - 1.0) / norm,
                  (1.0 - alpha * k + k2) / norm};
}

// Steady-state start (DC gain is exactly 1, so priming the state with the
// first sample makes constants pass through unchanged).
void filter_in_place(const Biquad& q, Eigen::VectorXd& x) {
    const double v = x.size() > 0 ? x(0) : 0.0;
    double x1 = v, x2 = v, y1 = v, y2 = v;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double in = x(i);
        const double out = q.b0 * in + q.b1 * x1 + q.b2 * x2 - q.a1 * y1 - q.a2 * y2;
        x2 = x1;
        x1 = in;
        y2 = y1;
        y1 = out;
        x(i) = out;
    }
}

}  // namespace

Eigen::VectorXd lowpass(const Eigen::VectorXd& t_s, const Eigen::VectorXd& x, double cutoff_hz) {
    const Eigen::Index n = x.size();
    if (n < 2 || t_s.size() != n) {
        throw std::invalid_argument("lowpass: need at least two samples with matching timestamps");
    }
    if (cutoff_hz <= 0.0) throw std::invalid_argument("lowpass: cutoff must be positive");
    const double span = t_s(n - 1) - t_s(0);
    if (span <= 0.0) throw std::invalid_argument("lowpass: timestamps must increase");
    const double fs = static_cast<double>(n - 1) / span;
    if (cutoff_hz >= 0.49 * fs) return x;  // nothing below Nyquist to remove

    // 4th-order Butterworth as two cascaded biquads.
    const Biquad s1 = butterworth_section(2.0 * std::sin(std::numbers::pi / 8.0), cutoff_hz, fs);
    const Biquad s2 =
        butterworth_section(2.0 * std::sin(3.0 * std::numbers::pi / 8.0), cutoff_hz, fs);

    // Odd-reflection padding, filter forward, then backward (zero phase).
    const Eigen::Index pad = std::min<Eigen::Index>(n - 1, 24);
    Eigen::VectorXd work(n + 2 * pad);
    for (Eigen::Index i = 0; i < pad; ++i) work(i) = 2.0 * x(0) - x(pad - i);
    work.segment(pad, n) = x;
    for (Eigen::Index i = 0; i < pad; ++i) work(pad + n + i) = 2.0 * x(n - 1) - x(n - 2 - i);

    filter_in_place(s1, work);
    filter_in_place(s2, work);
    work.reverseInPlace();
    filter_in_place(s1, work);
    filter_in_place(s2, work);
    work.reverseInPlace();
    return work.segment(pad, n);
}

InterpolationGrid build_interpolation_grid(const Eigen::VectorXd& t_s) {
    const Eigen::Index n = t_s.size();
    if (n < 2) throw std::invalid_argument("interpolation: need at least two samples");

    double d = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 1; i < n; ++i) {
        const double gap = t_s(i) - t_s(i - 1);
        if (gap <= 0.0) {
            throw std::invalid_argument("interpolation: timestamps not strictly increasing at " +
                                        std::to_string(t_s(i - 1)) + " -> " +
                                        std::to_string(t_s(i)));
        }
        d = std::min(d, gap);
    }

    std::vector<double> t_out;
    std::vector<Eigen::Index> left;
    std::vector<double> weight;
    t_out.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        t_out.push_back(t_s(i));
        left.push_back(i);
        weight.push_back(1.0);
        const double gap = t_s(i + 1) - t_s(i);
        const auto pieces = static_cast<Eigen::Index>(std::ceil(gap / d - 1e-9));
        for (Eigen::Index j = 1; j < pieces; ++j) {
            const double frac = static_cast<double>(j) / static_cast<double>(pieces);
            t_out.push_back(t_s(i) + frac * gap);
            left.push_back(i);
            weight.push_back(1.0 - frac);
        }
    }
    t_out.push_back(t_s(n - 1));
    left.push_back(n - 1);
    weight.push_back(1.0);

    InterpolationGrid grid;
    const auto m = static_cast<Eigen::Index>(t_out.size());
    grid.t_out = Eigen::Map<const Eigen::VectorXd>(t_out.data(), m);
    grid.left = std::move(left);
    grid.left_weight = Eigen::Map<const Eigen::VectorXd>(weight.data(), m);
    grid.min_gap_s = d;
    return grid;
}

Eigen::VectorXd apply_interpolation(const InterpolationGrid& grid, const Eigen::VectorXd& x) {
    Eigen::VectorXd out(grid.size());
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
        const Eigen::Index l = grid.left[static_cast<std::size_t>(i)];
        const double w = grid.left_weight(i);
        out(i) = w >= 1.0 ? x(l) : w * x(l) + (1.0 - w) * x(l + 1);
    }
    return out;
}

UniformSeries interpolate_uniform(const Eigen::VectorXd& t_s, const Eigen::VectorXd& x) {
    if (x.size() != t_s.size()) {
        throw std::invalid_argument("interpolate_uniform: size mismatch");
    }
    const InterpolationGrid grid = build_interpolation_grid(t_s);
    return UniformSeries{grid.t_out, apply_interpolation(grid, x)};
}

namespace {

Eigen::Index next_pow2(Eigen::Index n) {
    Eigen::Index p = 1;
    while (p < n) p <<= 1;
    return p;
}

Spectrum spectrum_of_uniform(const Eigen::VectorXd& xi, double dt_s, int pad_factor,
                             Eigen::FFT<double>& fft) {
    Eigen::VectorXd padded = Eigen::VectorXd::Zero(next_pow2(xi.size()) * pad_factor);
    padded.head(xi.size()) = xi.array() - xi.mean();

    std::vector<std::complex<double>> bins;
    std::vector<double> samples(padded.data(), padded.data() + padded.size());
    fft.fwd(bins, samples);

    const Eigen::Index n_out = padded.size() / 2 + 1;
    Spectrum spectrum;
    spectrum.freqs_hz.resize(n_out);
    spectrum.mags.resize(n_out);
    const double df = 1.0 / (static_cast<double>(padded.size()) * dt_s);
    for (Eigen::Index k = 0; k < n_out; ++k) {
        spectrum.freqs_hz(k) = static_cast<double>(k) * df;
        spectrum.mags(k) = std::abs(bins[static_cast<std::size_t>(k)]);
    }
    return spectrum;
}

}  // namespace

Spectrum nufft(const Eigen::VectorXd& t_s, const Eigen::VectorXd& x, const PipelineConfig& config) {
    const UniformSeries series = interpolate_uniform(t_s, x);
    const Eigen::Index n = series.x.size();
    // Mean spacing of the resampled grid; equals the min gap whenever every
    // input gap is an exact multiple of it (uniform input in particular).
    const double dt = (series.t_s(n - 1) - series.t_s(0)) / static_cast<double>(n - 1);
    Eigen::FFT<double> fft;
    return spectrum_of_uniform(series.x, dt, config.zero_pad_factor, fft);
}

namespace {

struct Vote {
    Eigen::Index bin;
    double freq_hz;
    double weight;
};

struct VoteTally {
    std::vector<Vote> votes;
    double total_weight = 0.0;
    double cluster_tol_hz = 0.0;
};

VoteTally tally_votes(const std::vector<Spectrum>& spectra, const PipelineConfig& config) {
    if (spectra.empty()) throw std::invalid_argument("vote: no spectra");
    const Spectrum& first = spectra.front();
    for (const auto& s : spectra) {
        if (s.freqs_hz.size() != first.freqs_hz.size()) {
            throw std::invalid_argument("vote: spectra do not share one frequency grid");
        }
    }

    std::vector<Eigen::Index> band;
    for (Eigen::Index k = 1; k < first.freqs_hz.size(); ++k) {  // DC excluded
        const double f = first.freqs_hz(k);
        if (f >= config.band_lo_hz && f <= config.band_hi_hz) band.push_back(k);
    }
    if (band.size() < 2) {
        throw std::invalid_argument("vote: frequency band holds fewer than two bins");
    }

    VoteTally tally;
    const double bin_width = first.freqs_hz(1) - first.freqs_hz(0);
    tally.cluster_tol_hz = config.vote_cluster_hz > 0.0
                               ? config.vote_cluster_hz
                               : bin_width * static_cast<double>(config.zero_pad_factor);

    for (const auto& s : spectra) {
        double peak = -1.0;
        Eigen::Index peak_bin = band.front();
        double power_sum = 0.0;
        for (const Eigen::Index k : band) {
            const double p = s.mags(k) * s.mags(k);
            power_sum += p;
            if (p > peak) {
                peak = p;
                peak_bin = k;
            }
        }
        const double rest = (power_sum - peak) / static_cast<double>(band.size() - 1);
        double par;
        if (rest > 0.0) {
            par = peak / rest;
        } else {
            par = peak > 0.0 ? config.par_exponent_cap : 0.0;
        }
        if (par < config.min_par_for_vote) continue;  // peak inside the noise floor
        const double weight = std::exp(std::min(par, config.par_exponent_cap));
        tally.votes.push_back(Vote{peak_bin, s.freqs_hz(peak_bin), weight});
        tally.total_weight += weight;
    }
    return tally;
}

double cluster_weight(const VoteTally& tally, double center_hz,
                      const std::vector<bool>* suppressed) {
    double sum = 0.0;
    for (std::size_t i = 0; i < tally.votes.size(); ++i) {
        if (suppressed && (*suppressed)[i]) continue;
        if (std::abs(tally.votes[i].freq_hz - center_hz) <= tally.cluster_tol_hz) {
            sum += tally.votes[i].weight;
        }
    }
    return sum;
}

}  // namespace

namespace {

/// Bin with the largest directly accumulated weight (ties to the lower
/// frequency). The cluster only widens the share test afterwards.
std::optional<Vote> winning_bin(const VoteTally& tally, const std::vector<bool>* suppressed) {
    std::map<Eigen::Index, double> by_bin;
    std::map<Eigen::Index, double> freq_of;
    for (std::size_t i = 0; i < tally.votes.size(); ++i) {
        if (suppressed && (*suppressed)[i]) continue;
        by_bin[tally.votes[i].bin] += tally.votes[i].weight;
        freq_of[tally.votes[i].bin] = tally.votes[i].freq_hz;
    }
    std::optional<Vote> best;
    for (const auto& [bin, weight] : by_bin) {
        if (!best || weight > best->weight) best = Vote{bin, freq_of[bin], weight};
    }
    return best;
}

}  // namespace

BreathEstimate subcarrier_vote(const std::vector<Spectrum>& spectra, const PipelineConfig& config) {
    const VoteTally tally = tally_votes(spectra, config);
    BreathEstimate estimate;
    if (tally.votes.empty()) return estimate;  // every subcarrier abstained

    const auto winner = winning_bin(tally, nullptr);
    const double share = cluster_weight(tally, winner->freq_hz, nullptr) / tally.total_weight;
    estimate.vote_weight = share;
    if (share >= config.majority_fraction) {
        estimate.rate_bpm = 60.0 * winner->freq_hz;
    }
    return estimate;
}

std::vector<std::pair<double, double>> detect_multiple(const std::vector<Spectrum>& spectra,
                                                       const PipelineConfig& config, int max_k) {
    const VoteTally tally = tally_votes(spectra, config);
    std::vector<std::pair<double, double>> found;
    if (tally.votes.empty() || tally.total_weight <= 0.0) return found;

    std::vector<bool> suppressed(tally.votes.size(), false);
    const double suppress_radius = std::max(config.multi_suppress_hz, tally.cluster_tol_hz);
    while (static_cast<int>(found.size()) < max_k) {
        const auto winner = winning_bin(tally, &suppressed);
        if (!winner) break;
        const double share =
            cluster_weight(tally, winner->freq_hz, &suppressed) / tally.total_weight;
        if (share < config.multi_threshold) break;
        found.emplace_back(60.0 * winner->freq_hz, share);
        for (std::size_t i = 0; i < tally.votes.size(); ++i) {
            if (std::abs(tally.votes[i].freq_hz - winner->freq_hz) <= suppress_radius) {
                suppressed[i] = true;
            }
        }
    }
    return found;
}

std::vector<BreathEstimate> sliding_estimate(const CsiTrace& trace, const PipelineConfig& config) {
    config.validate();
    const Eigen::Index n = trace.sample_count();
    const double span = trace.duration_s();
    if (n < 2 || span < config.window_s) {
        throw std::invalid_argument("sliding_estimate: trace spans " + std::to_string(span) +
                                    " s, need at least one full window of " +
                                    std::to_string(config.window_s) + " s");
    }

    const auto windows =
        static_cast<Eigen::Index>(std::floor((span - config.window_s) / config.stride_s + 1e-9)) + 1;
    std::vector<BreathEstimate> timeline;
    timeline.reserve(static_cast<std::size_t>(windows));

    Eigen::FFT<double> fft;
    const double* t_begin = trace.t_s.data();
    const double* t_end = t_begin + n;

    for (Eigen::Index w = 0; w < windows; ++w) {
        const double start = trace.t_s(0) + static_cast<double>(w) * config.stride_s;
        const double end = start + config.window_s;
        const auto i0 = static_cast<Eigen::Index>(std::lower_bound(t_begin, t_end, start) - t_begin);
        const auto i1 = static_cast<Eigen::Index>(std::lower_bound(t_begin, t_end, end) - t_begin);

        BreathEstimate estimate;
        estimate.window_start_s = start;
        estimate.window_end_s = end;
        const Eigen::Index count = i1 - i0;
        if (count >= 4) {
            const Eigen::VectorXd t_w = trace.t_s.segment(i0, count);
            const InterpolationGrid grid = build_interpolation_grid(t_w);
            const double dt = (grid.t_out(grid.size() - 1) - grid.t_out(0)) /
                              static_cast<double>(grid.size() - 1);
            std::vector<Spectrum> spectra;
            spectra.reserve(kSubcarriers);
            for (int k = 0; k < kSubcarriers; ++k) {
                const Eigen::VectorXd filtered =
                    lowpass(t_w, trace.amplitudes.col(k).segment(i0, count),
                            config.lowpass_cutoff_hz);
                spectra.push_back(spectrum_of_uniform(apply_interpolation(grid, filtered), dt,
                                                      config.zero_pad_factor, fft));
            }
            const BreathEstimate vote = subcarrier_vote(spectra, config);
            estimate.rate_bpm = vote.rate_bpm;
            estimate.vote_weight = vote.vote_weight;
        }
        timeline.push_back(estimate);
    }
    return timeline;
}

}  // namespace wakesim
