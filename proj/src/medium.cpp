// SPDX-License-Identifier: Apache-2.0
#include "wakesim/medium.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <utility>

namespace wakesim {

void EventQueue::schedule_at(SimTime t, Handler handler) {
    if (t < now_) {
        throw std::invalid_argument("EventQueue: event at " + std::to_string(t) +
                                    " ns is before the clock (" + std::to_string(now_) + " ns)");
    }
    heap_.push(Entry{t, next_seq_++, std::move(handler)});
}

std::size_t EventQueue::run_until(SimTime t_end) {
    if (t_end < now_) {
        throw std::invalid_argument("EventQueue: run_until horizon precedes the clock");
    }
    std::size_t dispatched = 0;
    while (!heap_.empty() && heap_.top().t <= t_end) {
        Entry entry = heap_.top();
        heap_.pop();
        now_ = entry.t;
        entry.handler();
        ++dispatched;
    }
    now_ = t_end;
    return dispatched;
}

ReplyRateTable::ReplyRateTable(std::vector<Point> points) : points_(std::move(points)) {
    if (points_.empty()) {
        throw std::invalid_argument("ReplyRateTable: at least one breakpoint required");
    }
    for (std::size_t i = 0; i < points_.size(); ++i) {
        const auto& p = points_[i];
        if (p.probability < 0.0 || p.probability > 1.0) {
            throw std::invalid_argument("ReplyRateTable: probability " +
                                        std::to_string(p.probability) + " outside [0, 1]");
        }
        if (i > 0 && points_[i - 1].distance_m >= p.distance_m) {
            throw std::invalid_argument("ReplyRateTable: distances must strictly increase");
        }
    }
}

double ReplyRateTable::probability_at(double distance_m) const {
    if (distance_m <= points_.front().distance_m) return points_.front().probability;
    if (distance_m >= points_.back().distance_m) return points_.back().probability;
    for (std::size_t i = 1; i < points_.size(); ++i) {
        if (distance_m <= points_[i].distance_m) {
            const auto& a = points_[i - 1];
            const auto& b = points_[i];
            const double w = (distance_m - a.distance_m) / (b.distance_m - a.distance_m);
            return a.probability + w * (b.probability - a.probability);
        }
    }
    return points_.back().probability;
}

ReplyRateTable ReplyRateTable::default_table() {
    return ReplyRateTable({{5.0, 0.97}, {100.0, 0.99}, {150.0, 0.73}});
}

bool deliver(double distance_m, const ReplyRateTable& table, Rng& rng) {
    if (distance_m < 0.0) {
        throw std::invalid_argument("deliver: distance must be non-negative");
    }
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    return uniform(rng) < table.probability_at(distance_m);
}

double response_bitrate_mbps(FrameKind query, double query_bitrate_mbps,
                             std::span<const double> basic_rates_mbps) {
    const auto response = response_kind_for(query);
    if (!response) {
        throw std::invalid_argument(std::string("response_bitrate_mbps: ") +
                                    frame_type_name(query.type) + " elicits no response");
    }
    if (response->type != FrameType::Ack) {
        return query_bitrate_mbps;  // CTS/BA answer at the query's rate
    }
    double best = 0.0;
    double lowest = 0.0;
    for (const double rate : basic_rates_mbps) {
        if (lowest == 0.0 || rate < lowest) lowest = rate;
        if (rate <= query_bitrate_mbps && rate > best) best = rate;
    }
    if (best == 0.0) best = lowest;  // below every basic rate
    return best > 0.0 ? best : query_bitrate_mbps;
}

double exchange_cycle_us(FrameKind query, double bitrate_mbps, const PhyTiming& phy) {
    const auto response = response_kind_for(query);
    if (!response) {
        throw std::invalid_argument(std::string("exchange_cycle_us: ") +
                                    frame_type_name(query.type) + " elicits no response");
    }
    const double backoff_us = phy.cw_min / 2.0 * phy.slot_us;
    const double response_rate = response_bitrate_mbps(query, bitrate_mbps);
    return phy.difs_us + backoff_us + airtime_us(query, bitrate_mbps, phy) + phy.sifs_us +
           airtime_us(*response, response_rate, phy);
}

}  // namespace wakesim
