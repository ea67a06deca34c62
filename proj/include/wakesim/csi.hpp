// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace wakesim {

inline constexpr int kSubcarriers = 52;

/// Time-stamped sequence of 52-subcarrier amplitude vectors. Timestamps are
/// strictly increasing but not uniformly spaced.
struct CsiTrace {
    Eigen::VectorXd t_s;         // N
    Eigen::MatrixXd amplitudes;  // N x 52, non-negative

    Eigen::Index sample_count() const { return t_s.size(); }
    double duration_s() const {
        return sample_count() > 1 ? t_s(t_s.size() - 1) - t_s(0) : 0.0;
    }
};

struct PersonSpec {
    double rate_bpm = 15.0;
    double distance_m = 0.5;
    /// Spans (start_s, end_s) during which the person is near the device;
    /// empty means the whole trace.
    std::vector<std::pair<double, double>> presence_s;
};

struct BreathScenario {
    std::vector<PersonSpec> persons;
    double nominal_packet_rate_hz = 10.0;
    double jitter_mean_s = 0.020;    // per-sample exponential delay
    double min_spacing_s = 0.005;    // receiver-side CSI extraction floor
    double noise_sigma = 0.05;
    double baseline_mean = 10.0;     // per-subcarrier DC level
    double modulation_amplitude = 1.0;
    double distance_cutoff_m = 1.4;  // breathing depth hits the noise floor here
    Eigen::VectorXd sensitivity;     // 52 per-subcarrier gains; empty -> seeded default
    double duration_s = 60.0;
    std::uint64_t seed = 1;
};

/// Random positive gain vector with a handful of dominant subcarriers.
Eigen::VectorXd default_sensitivity(std::uint64_t seed);

/// Linear distance envelope: A0 * max(0, 1 - d / cutoff).
double distance_envelope(double distance_m, double cutoff_m, double amplitude);

/// Generates a breathing-modulated trace: per subcarrier k,
/// amp_k(t) = baseline_k + sum_persons g_k * A(distance) * sin(2*pi*rate/60*t + phi_k) + noise,
/// on a nominal grid shifted by positive exponential jitter and re-sorted.
/// Deterministic under a fixed seed. Throws std::invalid_argument on invalid
/// scenarios (rate outside (0, 120) bpm, non-positive packet rate/duration).
CsiTrace synthesize_trace(const BreathScenario& scenario);

struct CsiParseError : std::runtime_error {
    std::size_t line;
    CsiParseError(std::size_t line_number, const std::string& message)
        : std::runtime_error("line " + std::to_string(line_number) + ": " + message),
          line(line_number) {}
};

/// CSV with header "t_s,sub_0,...,sub_51", one row per packet, 15 significant
/// digits. read throws CsiParseError (wrong column count, non-monotone
/// timestamps, negative amplitudes) with the offending line number.
CsiTrace read_trace_csv(std::istream& in);
CsiTrace read_trace_csv_file(const std::string& path);
void write_trace_csv(const CsiTrace& trace, std::ostream& out);
void write_trace_csv_file(const CsiTrace& trace, const std::string& path);

}  // namespace wakesim
