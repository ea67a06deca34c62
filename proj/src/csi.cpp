// SPDX-License-Identifier: Apache-2.0
#include "wakesim/csi.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

namespace wakesim {

Eigen::VectorXd default_sensitivity(std::uint64_t seed) {
    std::mt19937_64 rng(seed ^ 0x5e5e5e5e5e5e5e5eULL);
    std::uniform_real_distribution<double> base(0.1, 0.3);
    std::uniform_real_distribution<double> boost(4.0, 8.0);
    Eigen::VectorXd gains(kSubcarriers);
    for (int k = 0; k < kSubcarriers; ++k) gains(k) = base(rng);
    // A few dominant subcarriers carry most of the chest-motion response.
    std::uniform_int_distribution<int> pick(0, kSubcarriers - 1);
    for (int i = 0; i < 6; ++i) gains(pick(rng)) *= boost(rng);
    return gains;
}

double distance_envelope(double distance_m, double cutoff_m, double amplitude) {
    if (cutoff_m <= 0.0) return 0.0;
    return amplitude * std::max(0.0, 1.0 - distance_m / cutoff_m);
}

namespace {

void validate(const BreathScenario& scenario) {
    if (scenario.duration_s <= 0.0) {
        throw std::invalid_argument("breath scenario: duration must be positive");
    }
    if (scenario.nominal_packet_rate_hz <= 0.0) {
        throw std::invalid_argument("breath scenario: packet rate must be positive");
    }
    for (const auto& person : scenario.persons) {
        if (person.rate_bpm <= 0.0 || person.rate_bpm >= 120.0) {
            throw std::invalid_argument("breath scenario: rate " +
                                        std::to_string(person.rate_bpm) +
                                        " bpm outside (0, 120)");
        }
        if (person.distance_m < 0.0) {
            throw std::invalid_argument("breath scenario: negative person distance");
        }
    }
    if (scenario.sensitivity.size() != 0 && scenario.sensitivity.size() != kSubcarriers) {
        throw std::invalid_argument("breath scenario: sensitivity must have 52 entries");
    }
}

bool present_at(const PersonSpec& person, double t) {
    if (person.presence_s.empty()) return true;
    for (const auto& [start, end] : person.presence_s) {
        if (t >= start && t < end) return true;
    }
    return false;
}

}  // namespace

CsiTrace synthesize_trace(const BreathScenario& scenario) {
    validate(scenario);
    std::mt19937_64 rng(scenario.seed);

    const auto n = static_cast<Eigen::Index>(
        std::floor(scenario.duration_s * scenario.nominal_packet_rate_hz));
    if (n < 2) {
        throw std::invalid_argument("breath scenario: fewer than two packets in the duration");
    }

    // Nominal grid plus positive exponential delay (medium access + OS
    // scheduling), re-sorted, then floored to the extraction rate limit.
    std::vector<double> t(static_cast<std::size_t>(n));
    std::exponential_distribution<double> jitter(1.0 / std::max(scenario.jitter_mean_s, 1e-12));
    const double step = 1.0 / scenario.nominal_packet_rate_hz;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double delay = scenario.jitter_mean_s > 0.0 ? jitter(rng) : 0.0;
        t[static_cast<std::size_t>(i)] = static_cast<double>(i) * step + delay;
    }
    std::sort(t.begin(), t.end());
    if (scenario.min_spacing_s > 0.0) {
        for (std::size_t i = 1; i < t.size(); ++i) {
            t[i] = std::max(t[i], t[i - 1] + scenario.min_spacing_s);
        }
    } else {
        for (std::size_t i = 1; i < t.size(); ++i) {
            if (t[i] <= t[i - 1]) t[i] = std::nextafter(t[i - 1], 1e300);
        }
    }

    const Eigen::VectorXd gains = scenario.sensitivity.size() == kSubcarriers
                                      ? scenario.sensitivity
                                      : default_sensitivity(scenario.seed);

    std::uniform_real_distribution<double> phase_dist(0.0, 2.0 * std::numbers::pi);
    std::uniform_real_distribution<double> baseline_dist(0.5, 1.5);
    Eigen::VectorXd baseline(kSubcarriers);
    for (int k = 0; k < kSubcarriers; ++k) {
        baseline(k) = scenario.baseline_mean * baseline_dist(rng);
    }
    // One phase and one gain factor per (person, subcarrier): people sit at
    // different spots, so their chest motion rides on different multipath and
    // excites each subcarrier differently.
    const auto person_count = static_cast<Eigen::Index>(scenario.persons.size());
    Eigen::MatrixXd phases(person_count, kSubcarriers);
    Eigen::MatrixXd person_gain(person_count, kSubcarriers);
    std::uniform_real_distribution<double> gain_jitter(0.25, 1.75);
    for (Eigen::Index p = 0; p < person_count; ++p) {
        for (int k = 0; k < kSubcarriers; ++k) {
            phases(p, k) = phase_dist(rng);
            person_gain(p, k) = gain_jitter(rng);
        }
    }

    CsiTrace trace;
    trace.t_s = Eigen::Map<const Eigen::VectorXd>(t.data(), n);
    trace.amplitudes.resize(n, kSubcarriers);

    std::normal_distribution<double> noise(0.0, scenario.noise_sigma);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double now = trace.t_s(i);
        for (int k = 0; k < kSubcarriers; ++k) {
            double value = baseline(k);
            for (std::size_t p = 0; p < scenario.persons.size(); ++p) {
                const auto& person = scenario.persons[p];
                if (!present_at(person, now)) continue;
                const double depth = distance_envelope(person.distance_m,
                                                       scenario.distance_cutoff_m,
                                                       scenario.modulation_amplitude);
                const double omega = 2.0 * std::numbers::pi * person.rate_bpm / 60.0;
                const auto pi = static_cast<Eigen::Index>(p);
                value += gains(k) * person_gain(pi, k) * depth *
                         std::sin(omega * now + phases(pi, k));
            }
            if (scenario.noise_sigma > 0.0) value += noise(rng);
            trace.amplitudes(i, k) = std::max(0.0, value);
        }
    }
    return trace;
}

void write_trace_csv(const CsiTrace& trace, std::ostream& out) {
    out << "t_s";
    for (int k = 0; k < kSubcarriers; ++k) out << ",sub_" << k;
    out << "\n";
    char buf[32];
    for (Eigen::Index i = 0; i < trace.sample_count(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.15g", trace.t_s(i));
        out << buf;
        for (int k = 0; k < kSubcarriers; ++k) {
            std::snprintf(buf, sizeof(buf), "%.15g", trace.amplitudes(i, k));
            out << ',' << buf;
        }
        out << "\n";
    }
}

void write_trace_csv_file(const CsiTrace& trace, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    write_trace_csv(trace, out);
}

CsiTrace read_trace_csv(std::istream& in) {
    std::string line;
    std::size_t line_number = 0;
    if (!std::getline(in, line)) throw CsiParseError(1, "empty file");
    ++line_number;

    std::vector<double> times;
    std::vector<double> values;
    std::vector<std::string> fields;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty()) continue;
        if (!line.empty() && line.back() == '\r') line.pop_back();

        fields.clear();
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = line.find(',', start);
            fields.push_back(line.substr(start, comma - start));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (fields.size() != kSubcarriers + 1) {
            throw CsiParseError(line_number, "expected " + std::to_string(kSubcarriers + 1) +
                                                 " columns, got " + std::to_string(fields.size()));
        }
        double row[kSubcarriers + 1];
        for (std::size_t i = 0; i < fields.size(); ++i) {
            char* end = nullptr;
            row[i] = std::strtod(fields[i].c_str(), &end);
            if (end == fields[i].c_str() || *end != '\0') {
                throw CsiParseError(line_number, "cannot parse '" + fields[i] + "' as a number");
            }
        }
        if (!times.empty() && row[0] <= times.back()) {
            std::ostringstream msg;
            msg.precision(15);
            msg << "timestamp " << row[0] << " does not increase past " << times.back();
            throw CsiParseError(line_number, msg.str());
        }
        for (int k = 1; k <= kSubcarriers; ++k) {
            if (row[k] < 0.0) {
                throw CsiParseError(line_number,
                                    "negative amplitude in column sub_" + std::to_string(k - 1));
            }
        }
        times.push_back(row[0]);
        values.insert(values.end(), row + 1, row + 1 + kSubcarriers);
    }

    CsiTrace trace;
    const auto n = static_cast<Eigen::Index>(times.size());
    trace.t_s = Eigen::Map<const Eigen::VectorXd>(times.data(), n);
    trace.amplitudes =
        Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
            values.data(), n, kSubcarriers);
    return trace;
}

CsiTrace read_trace_csv_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    return read_trace_csv(in);
}

}  // namespace wakesim
