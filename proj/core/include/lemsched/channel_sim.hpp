#pragma once

// Network layouts, channel realizations and the sum-rate objective.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "lemsched/matrix.hpp"

namespace lemsched {

enum class PathlossModel { itu1411, powerlaw };

struct SimConfig {
    std::size_t K = 10;
    double field_length = 500.0;   // m
    double d_min = 2.0;            // m
    double d_max = 65.0;           // m
    double carrier_freq = 2.4e9;   // Hz
    double bandwidth = 5e6;        // Hz
    double tx_power_dbm = 40.0;
    double antenna_height = 1.5;   // m, both ends
    double antenna_gain_db = 2.5;  // per end
    double noise_psd_dbm_hz = -169.0;
    PathlossModel pathloss = PathlossModel::itu1411;
    double alpha = 3.0;            // powerlaw exponent
    std::uint64_t seed = 0;

    void validate() const;
    double tx_power_watts() const;
    double noise_power_watts() const;
};

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

double distance(const Point& a, const Point& b);

struct Layout {
    SimConfig config;
    std::size_t index = 0;
    std::vector<Point> tx;
    std::vector<Point> rx;

    std::size_t pair_count() const noexcept { return tx.size(); }
    /// Distance from transmitter i to receiver q.
    double link_distance(std::size_t i, std::size_t q) const { return distance(tx.at(i), rx.at(q)); }
    void validate() const;
};

/// gains(i, q): linear power gain from transmitter i to receiver q.
struct ChannelRealization {
    Matrix gains;
    double noise_power = 0.0;  // W

    std::size_t pair_count() const noexcept { return gains.rows(); }
    void validate() const;
};

struct ScheduleDecision {
    std::vector<std::uint8_t> d;

    std::size_t size() const noexcept { return d.size(); }
    std::size_t active_count() const noexcept;
    bool active(std::size_t q) const { return d.at(q) != 0; }

    friend bool operator==(const ScheduleDecision&, const ScheduleDecision&) = default;
};

enum class FadingMode { rayleigh, none };

/// Seed used for layout `layout_index` under `cfg`.
std::uint64_t layout_seed(const SimConfig& cfg, std::size_t layout_index);

/// Transmitters uniform on the square. Each receiver sits at a uniform
/// radius in [d_min, d_max] around its transmitter; the angle is redrawn
/// until the receiver lands inside the field.
Layout generate_layout(const SimConfig& cfg, std::size_t layout_index);

/// Line-of-sight ITU-R P.1411 two-slope model with breakpoint 4 h_t h_r / lambda.
double pathloss_itu1411_db(double dist, const SimConfig& cfg);
double itu1411_breakpoint_distance(const SimConfig& cfg);
double itu1411_breakpoint_loss_db(const SimConfig& cfg);

/// dist^-alpha.
double pathloss_powerlaw_linear(double dist, double alpha);

/// Path loss (either model) combined with both antenna gains, as a linear factor.
double large_scale_gain(double dist, const SimConfig& cfg);

ChannelRealization realize_channel(const Layout& layout, std::uint64_t fading_seed,
                                   FadingMode fading = FadingMode::rayleigh);

/// Rate of link q under decision d (bits/s). Zero when q is inactive.
double link_rate(const ChannelRealization& ch, const ScheduleDecision& d, std::size_t q, const SimConfig& cfg);

/// Sum over links of B log2(1 + SINR_q).
double sum_rate(const ChannelRealization& ch, const ScheduleDecision& d, const SimConfig& cfg);

std::string to_string(PathlossModel m);
PathlossModel pathloss_from_string(const std::string& s);

}  // namespace lemsched
