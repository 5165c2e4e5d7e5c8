#include "lemsched/channel_sim.hpp"

#include <cmath>
#include <numbers>

#include "lemsched/error.hpp"
#include "lemsched/rng.hpp"

namespace lemsched {

namespace {

constexpr double kSpeedOfLight = 299792458.0;
// Angle draws per radius before the radius itself is redrawn. Only reachable
// when the field is too small for some radii.
constexpr int kAngleAttempts = 64;

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

bool inside(const Point& p, double L) { return p.x >= 0.0 && p.x <= L && p.y >= 0.0 && p.y <= L; }

}  // namespace

void SimConfig::validate() const {
    if (K < 1) throw ValidationError("SimConfig: K must be >= 1");
    if (!(d_min > 0.0 && d_min < d_max && d_max < field_length))
        throw ValidationError("SimConfig: need 0 < d_min < d_max < field_length");
    if (!(bandwidth > 0.0)) throw ValidationError("SimConfig: bandwidth must be positive");
    if (!(carrier_freq > 0.0)) throw ValidationError("SimConfig: carrier_freq must be positive");
    if (!(antenna_height > 0.0)) throw ValidationError("SimConfig: antenna_height must be positive");
    if (pathloss == PathlossModel::powerlaw && !(alpha > 0.0))
        throw ValidationError("SimConfig: alpha must be positive");
}

double SimConfig::tx_power_watts() const { return dbm_to_watts(tx_power_dbm); }

double SimConfig::noise_power_watts() const { return dbm_to_watts(noise_psd_dbm_hz) * bandwidth; }

double distance(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); }

void Layout::validate() const {
    if (tx.size() != rx.size()) throw ValidationError("Layout: tx/rx count mismatch");
    if (tx.size() != config.K) throw ValidationError("Layout: point count does not match K");
    const double L = config.field_length;
    // Tolerance absorbs decimal round trips of stored coordinates.
    const double eps = 1e-9 * std::max(1.0, config.d_max);
    for (std::size_t q = 0; q < tx.size(); ++q) {
        if (!inside(tx[q], L) || !inside(rx[q], L)) throw ValidationError("Layout: point outside the field");
        const double d = distance(tx[q], rx[q]);
        if (d < config.d_min - eps || d > config.d_max + eps)
            throw ValidationError("Layout: pair distance outside [d_min, d_max]");
    }
}

void ChannelRealization::validate() const {
    if (!gains.square()) throw ValidationError("ChannelRealization: gain matrix must be square");
    for (double g : gains.data())
        if (!std::isfinite(g) || g < 0.0) throw ValidationError("ChannelRealization: gains must be finite and >= 0");
    if (!(noise_power > 0.0)) throw ValidationError("ChannelRealization: noise power must be positive");
}

std::size_t ScheduleDecision::active_count() const noexcept {
    std::size_t n = 0;
    for (auto v : d) n += v != 0;
    return n;
}

std::uint64_t layout_seed(const SimConfig& cfg, std::size_t layout_index) {
    return derive_seed(cfg.seed, static_cast<std::uint64_t>(layout_index));
}

Layout generate_layout(const SimConfig& cfg, std::size_t layout_index) {
    cfg.validate();
    Rng rng(layout_seed(cfg, layout_index));
    const double L = cfg.field_length;

    Layout out{cfg, layout_index, {}, {}};
    out.tx.reserve(cfg.K);
    out.rx.reserve(cfg.K);
    for (std::size_t q = 0; q < cfg.K; ++q) {
        Point t{rng.uniform(0.0, L), rng.uniform(0.0, L)};
        Point r;
        for (bool placed = false; !placed;) {
            const double radius = rng.uniform(cfg.d_min, cfg.d_max);
            for (int attempt = 0; attempt < kAngleAttempts; ++attempt) {
                const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
                r = {t.x + radius * std::cos(angle), t.y + radius * std::sin(angle)};
                if (inside(r, L)) {
                    placed = true;
                    break;
                }
            }
        }
        out.tx.push_back(t);
        out.rx.push_back(r);
    }
    return out;
}

double itu1411_breakpoint_distance(const SimConfig& cfg) {
    const double lambda = kSpeedOfLight / cfg.carrier_freq;
    return 4.0 * cfg.antenna_height * cfg.antenna_height / lambda;
}

double itu1411_breakpoint_loss_db(const SimConfig& cfg) {
    const double lambda = kSpeedOfLight / cfg.carrier_freq;
    const double h2 = cfg.antenna_height * cfg.antenna_height;
    return std::abs(20.0 * std::log10(lambda * lambda / (8.0 * std::numbers::pi * h2)));
}

double pathloss_itu1411_db(double dist, const SimConfig& cfg) {
    if (!(dist > 0.0)) throw ValidationError("pathloss_itu1411_db: distance must be positive");
    const double r_bp = itu1411_breakpoint_distance(cfg);
    const double l_bp = itu1411_breakpoint_loss_db(cfg);
    const double slope = dist <= r_bp ? 20.0 : 40.0;
    return l_bp + slope * std::log10(dist / r_bp);
}

double pathloss_powerlaw_linear(double dist, double alpha) {
    if (!(dist > 0.0)) throw ValidationError("pathloss_powerlaw_linear: distance must be positive");
    if (!(alpha > 0.0)) throw ValidationError("pathloss_powerlaw_linear: alpha must be positive");
    return std::pow(dist, -alpha);
}

double large_scale_gain(double dist, const SimConfig& cfg) {
    const double antenna = std::pow(10.0, 2.0 * cfg.antenna_gain_db / 10.0);
    if (cfg.pathloss == PathlossModel::powerlaw) return antenna * pathloss_powerlaw_linear(dist, cfg.alpha);
    return std::pow(10.0, (-pathloss_itu1411_db(dist, cfg) + 2.0 * cfg.antenna_gain_db) / 10.0);
}

ChannelRealization realize_channel(const Layout& layout, std::uint64_t fading_seed, FadingMode fading) {
    const std::size_t K = layout.pair_count();
    Rng rng(fading_seed);
    ChannelRealization ch{Matrix(K, K), layout.config.noise_power_watts()};
    for (std::size_t i = 0; i < K; ++i)
        for (std::size_t q = 0; q < K; ++q) {
            const double f = fading == FadingMode::rayleigh ? rng.exponential() : 1.0;
            ch.gains(i, q) = large_scale_gain(layout.link_distance(i, q), layout.config) * f;
        }
    return ch;
}

double link_rate(const ChannelRealization& ch, const ScheduleDecision& d, std::size_t q, const SimConfig& cfg) {
    if (!d.active(q)) return 0.0;
    const double p = cfg.tx_power_watts();
    double interference = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i)
        if (i != q && d.d[i]) interference += p * ch.gains(i, q);
    return cfg.bandwidth * std::log2(1.0 + p * ch.gains(q, q) / (interference + ch.noise_power));
}

double sum_rate(const ChannelRealization& ch, const ScheduleDecision& d, const SimConfig& cfg) {
    if (d.size() != ch.pair_count())
        throw ValidationError("sum_rate: decision length does not match channel size");
    double total = 0.0;
    for (std::size_t q = 0; q < d.size(); ++q) total += link_rate(ch, d, q, cfg);
    return total;
}

std::string to_string(PathlossModel m) { return m == PathlossModel::itu1411 ? "itu1411" : "powerlaw"; }

PathlossModel pathloss_from_string(const std::string& s) {
    if (s == "itu1411") return PathlossModel::itu1411;
    if (s == "powerlaw") return PathlossModel::powerlaw;
    throw ValidationError("unknown pathloss model '" + s + "'");
}

}  // namespace lemsched
