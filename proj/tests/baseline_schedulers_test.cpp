#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <vector>

#include "lemsched/baseline_schedulers.hpp"
#include "lemsched/error.hpp"
#include "lemsched/rng.hpp"

namespace lemsched {
namespace {

SimConfig config(std::size_t K) {
    SimConfig cfg;
    cfg.K = K;
    return cfg;
}

ChannelRealization random_channel(std::uint64_t seed, std::size_t idx) {
    SimConfig cfg;
    cfg.seed = seed;
    return realize_channel(generate_layout(cfg, idx), derive_seed(seed, idx));
}

// Independent brute force: decisions as bit strings, no tie handling.
double brute_force_best(const ChannelRealization& ch, const SimConfig& cfg) {
    const std::size_t K = ch.pair_count();
    double best = 0.0;
    for (std::uint32_t m = 0; m < (1u << K); ++m) {
        ScheduleDecision d{std::vector<std::uint8_t>(K)};
        for (std::size_t q = 0; q < K; ++q) d.d[q] = (m >> (K - 1 - q)) & 1u;
        best = std::max(best, sum_rate(ch, d, cfg));
    }
    return best;
}

TEST(Exhaustive, SingleLinkAlwaysActive) {
    const ChannelRealization ch{Matrix{{1e-12}}, 1e-13};
    const auto opt = exhaustive_optimal(ch, config(1));
    EXPECT_EQ(opt.decision.d, (std::vector<std::uint8_t>{1}));
    EXPECT_GT(opt.rate, 0.0);
    EXPECT_EQ(greedy(ch, config(1)).d, (std::vector<std::uint8_t>{1}));
    EXPECT_EQ(strongest_link(ch, config(1)).d, (std::vector<std::uint8_t>{1}));
}

TEST(Exhaustive, StrongCrossGainsPickOneLink) {
    const ChannelRealization ch{Matrix{{1e-10, 1e-8}, {1e-8, 2e-10}}, 6.29e-14};
    const auto opt = exhaustive_optimal(ch, config(2));
    EXPECT_EQ(opt.decision.d, (std::vector<std::uint8_t>{0, 1}));
    EXPECT_EQ(opt.rate, sum_rate(ch, opt.decision, config(2)));
}

TEST(Exhaustive, ZeroCrossGainsActivateAll) {
    const ChannelRealization ch{Matrix{{1e-10, 0.0}, {0.0, 3e-11}}, 6.29e-14};
    EXPECT_EQ(exhaustive_optimal(ch, config(2)).decision.d, (std::vector<std::uint8_t>{1, 1}));
    EXPECT_EQ(greedy(ch, config(2)).d, (std::vector<std::uint8_t>{1, 1}));
}

TEST(Exhaustive, TieBreaks) {
    // Identical links with overwhelming interference: [1,0] and [0,1] tie.
    const ChannelRealization ch{Matrix{{1e-10, 1e-6}, {1e-6, 1e-10}}, 6.29e-14};
    EXPECT_EQ(exhaustive_optimal(ch, config(2)).decision.d, (std::vector<std::uint8_t>{0, 1}));
    // All-zero direct gains: every schedule rates 0, so the empty one wins.
    const ChannelRealization dead{Matrix(3, 3), 1e-13};
    const auto opt = exhaustive_optimal(dead, config(3));
    EXPECT_EQ(opt.decision.active_count(), 0u);
    EXPECT_EQ(opt.rate, 0.0);
}

TEST(Exhaustive, CapacityGuard) {
    const ChannelRealization ch{Matrix(26, 26, 1e-10), 1e-13};
    EXPECT_THROW(exhaustive_optimal(ch, config(26)), CapacityError);
    EXPECT_NO_THROW(greedy(ch, config(26)));
}

TEST(Exhaustive, MatchesBruteForce) {
    const SimConfig cfg;
    for (std::size_t idx = 0; idx < 10; ++idx) {
        const auto ch = random_channel(21, idx);
        EXPECT_EQ(exhaustive_optimal(ch, cfg).rate, brute_force_best(ch, cfg));
    }
}

TEST(Exhaustive, DominatesBaselines) {
    const SimConfig cfg;
    for (std::size_t idx = 0; idx < 100; ++idx) {
        const auto ch = random_channel(22, idx);
        const double best = exhaustive_optimal(ch, cfg).rate;
        EXPECT_GE(best, sum_rate(ch, greedy(ch, cfg), cfg));
        EXPECT_GE(best, sum_rate(ch, strongest_link(ch, cfg), cfg));
        EXPECT_GE(best, sum_rate(ch, random_schedule(10, idx), cfg));
        EXPECT_GE(best, sum_rate(ch, all_active(10), cfg));
    }
}

TEST(Exhaustive, PermutationEquivariant) {
    const SimConfig cfg;
    Rng rng(5);
    for (std::size_t idx = 0; idx < 10; ++idx) {
        const auto ch = random_channel(23, idx);
        std::vector<std::size_t> perm(10);
        std::iota(perm.begin(), perm.end(), 0);
        for (std::size_t i = 9; i > 0; --i) std::swap(perm[i], perm[static_cast<std::size_t>(rng.uniform() * (i + 1))]);
        ChannelRealization pch{Matrix(10, 10), ch.noise_power};
        for (std::size_t i = 0; i < 10; ++i)
            for (std::size_t q = 0; q < 10; ++q) pch.gains(i, q) = ch.gains(perm[i], perm[q]);
        const auto a = exhaustive_optimal(ch, cfg).decision;
        const auto b = exhaustive_optimal(pch, cfg).decision;
        for (std::size_t i = 0; i < 10; ++i) EXPECT_EQ(b.d[i], a.d[perm[i]]);
    }
}

TEST(Greedy, TraceIsNondecreasingAndEndsAtResult) {
    const SimConfig cfg;
    for (std::size_t idx = 0; idx < 50; ++idx) {
        const auto ch = random_channel(24, idx);
        std::vector<double> trace;
        const auto d = greedy(ch, cfg, &trace);
        ASSERT_FALSE(trace.empty());
        for (std::size_t k = 1; k < trace.size(); ++k) EXPECT_GE(trace[k], trace[k - 1]);
        EXPECT_EQ(trace.back(), sum_rate(ch, d, cfg));
        EXPECT_EQ(trace.size(), d.active_count());
    }
}

TEST(Greedy, StartsFromStrongestLink) {
    const SimConfig cfg;
    for (std::size_t idx = 0; idx < 50; ++idx) {
        const auto ch = random_channel(25, idx);
        const auto strongest = strongest_link(ch, cfg);
        const auto d = greedy(ch, cfg);
        for (std::size_t q = 0; q < 10; ++q)
            if (strongest.active(q)) EXPECT_TRUE(d.active(q));
    }
}

TEST(StrongestLink, MatchesDirectArgmax) {
    const SimConfig cfg;
    for (std::size_t idx = 0; idx < 50; ++idx) {
        const auto ch = random_channel(26, idx);
        std::size_t arg = 0;
        for (std::size_t q = 1; q < 10; ++q)
            if (ch.gains(q, q) > ch.gains(arg, arg)) arg = q;
        const auto d = strongest_link(ch, cfg);
        EXPECT_EQ(d.active_count(), 1u);
        EXPECT_TRUE(d.active(arg));
    }
}

TEST(StrongestLink, TieGoesToSmallestIndex) {
    const ChannelRealization ch{Matrix{{1e-10, 1e-12}, {1e-12, 1e-10}}, 1e-13};
    EXPECT_EQ(strongest_link(ch, config(2)).d, (std::vector<std::uint8_t>{1, 0}));
}

TEST(RandomSchedule, DeterministicAndFair) {
    EXPECT_EQ(random_schedule(10, 77), random_schedule(10, 77));
    EXPECT_TRUE(random_schedule(0, 1).d.empty());
    std::size_t on = 0;
    for (std::uint64_t s = 0; s < 10000; ++s) on += random_schedule(1, s).active_count();
    EXPECT_NEAR(on / 10000.0, 0.5, 0.02);
}

TEST(AllActive, Basic) {
    EXPECT_EQ(all_active(3).d, (std::vector<std::uint8_t>{1, 1, 1}));
    EXPECT_EQ(all_active(10).active_count(), 10u);
}

}  // namespace
}  // namespace lemsched
