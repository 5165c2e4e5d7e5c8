#include "lemsched/baseline_schedulers.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <string>

#include "lemsched/error.hpp"
#include "lemsched/rng.hpp"

namespace lemsched {

namespace {

ScheduleDecision from_mask(std::uint64_t mask, std::size_t K) {
    ScheduleDecision d{std::vector<std::uint8_t>(K)};
    for (std::size_t q = 0; q < K; ++q) d.d[q] = static_cast<std::uint8_t>((mask >> q) & 1U);
    return d;
}

// Tie order: fewer active links first, then lexicographically smaller d
// (d[0] compared first).
bool preferred_on_tie(std::uint64_t a, std::uint64_t b, std::size_t K) {
    const int pa = std::popcount(a), pb = std::popcount(b);
    if (pa != pb) return pa < pb;
    for (std::size_t q = 0; q < K; ++q) {
        const auto ba = (a >> q) & 1U, bb = (b >> q) & 1U;
        if (ba != bb) return ba < bb;
    }
    return false;
}

}  // namespace

OptimalSchedule exhaustive_optimal(const ChannelRealization& ch, const SimConfig& cfg) {
    const std::size_t K = ch.pair_count();
    if (K > kExhaustiveMaxPairs)
        throw CapacityError("exhaustive_optimal: K=" + std::to_string(K) + " exceeds the enumeration limit of " +
                            std::to_string(kExhaustiveMaxPairs) + "; use greedy instead");

    std::uint64_t best_mask = 0;
    double best_rate = 0.0;  // rate of the empty schedule
    ScheduleDecision d{std::vector<std::uint8_t>(K)};
    const std::uint64_t n = std::uint64_t{1} << K;
    for (std::uint64_t mask = 1; mask < n; ++mask) {
        for (std::size_t q = 0; q < K; ++q) d.d[q] = static_cast<std::uint8_t>((mask >> q) & 1U);
        const double r = sum_rate(ch, d, cfg);
        if (r > best_rate || (r == best_rate && preferred_on_tie(mask, best_mask, K))) {
            best_rate = r;
            best_mask = mask;
        }
    }
    return {from_mask(best_mask, K), best_rate};
}

std::vector<double> direct_snr(const ChannelRealization& ch, const SimConfig& cfg) {
    const double p = cfg.tx_power_watts();
    std::vector<double> snr(ch.pair_count());
    for (std::size_t q = 0; q < snr.size(); ++q) snr[q] = p * ch.gains(q, q) / ch.noise_power;
    return snr;
}

ScheduleDecision greedy(const ChannelRealization& ch, const SimConfig& cfg, std::vector<double>* trace) {
    const std::size_t K = ch.pair_count();
    ScheduleDecision d{std::vector<std::uint8_t>(K)};
    if (K == 0) return d;

    const auto snr = direct_snr(ch, cfg);
    std::vector<std::size_t> order(K);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return snr[a] > snr[b]; });

    d.d[order[0]] = 1;
    double current = sum_rate(ch, d, cfg);
    if (trace) trace->assign(1, current);
    for (std::size_t k = 1; k < K; ++k) {
        d.d[order[k]] = 1;
        const double candidate = sum_rate(ch, d, cfg);
        if (candidate >= current) {
            current = candidate;
            if (trace) trace->push_back(current);
        } else {
            d.d[order[k]] = 0;
        }
    }
    return d;
}

ScheduleDecision strongest_link(const ChannelRealization& ch, const SimConfig& cfg) {
    const std::size_t K = ch.pair_count();
    ScheduleDecision d{std::vector<std::uint8_t>(K)};
    if (K == 0) return d;
    const auto snr = direct_snr(ch, cfg);
    std::size_t best = 0;
    for (std::size_t q = 1; q < K; ++q)
        if (snr[q] > snr[best]) best = q;
    d.d[best] = 1;
    return d;
}

ScheduleDecision random_schedule(std::size_t K, std::uint64_t seed) {
    Rng rng(seed);
    ScheduleDecision d{std::vector<std::uint8_t>(K)};
    for (auto& v : d.d) v = rng.bernoulli_half() ? 1 : 0;
    return d;
}

ScheduleDecision all_active(std::size_t K) { return {std::vector<std::uint8_t>(K, 1)}; }

}  // namespace lemsched
