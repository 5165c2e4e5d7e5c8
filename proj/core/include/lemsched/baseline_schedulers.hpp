#pragma once

// Reference schedulers. All take the channel realization; none of them
// look at the graph embeddings.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "lemsched/channel_sim.hpp"

namespace lemsched {

/// Largest K accepted by exhaustive_optimal (2^K sum-rate evaluations).
inline constexpr std::size_t kExhaustiveMaxPairs = 25;

struct OptimalSchedule {
    ScheduleDecision decision;
    double rate = 0.0;
};

/// Exact maximizer of sum_rate over all 2^K decisions. Ties go to fewer
/// active links, then to the lexicographically smallest decision vector.
/// Throws CapacityError for K > kExhaustiveMaxPairs.
OptimalSchedule exhaustive_optimal(const ChannelRealization& ch, const SimConfig& cfg);

/// Direct-link SNR p g_qq / sigma^2 per link.
std::vector<double> direct_snr(const ChannelRealization& ch, const SimConfig& cfg);

/// Visits links by descending direct SNR, starting with the strongest one
/// active, and keeps each further link if the sum rate does not drop.
/// If `trace` is given it receives the running sum rate after every
/// accepted link.
ScheduleDecision greedy(const ChannelRealization& ch, const SimConfig& cfg, std::vector<double>* trace = nullptr);

/// Only the link with maximum direct SNR (smallest index on ties).
ScheduleDecision strongest_link(const ChannelRealization& ch, const SimConfig& cfg);

/// Each link on independently with probability 1/2.
ScheduleDecision random_schedule(std::size_t K, std::uint64_t seed);

ScheduleDecision all_active(std::size_t K);

}  // namespace lemsched
