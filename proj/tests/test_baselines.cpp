#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "oracles.hpp"
#include "vmc/baselines.hpp"

using namespace vmc;

namespace {

PmState active_pm(PmId id, std::vector<std::pair<VmId, CpuUnits>> vms) {
    PmState pm(PmSpec{id, 400, 110, 205, 0}, PowerMode::Active);
    for (auto [v, d] : vms) pm.host(v, d);
    return pm;
}

PmState sleeping_pm(PmId id) { return PmState(PmSpec{id, 400, 110, 205, 0}, PowerMode::Sleeping); }

}  // namespace

TEST(EcoCloudAssign, Endpoints) {
    const EcoCloudParams p{};
    EXPECT_EQ(ecocloud_assign_prob(0.0, p), 0.0);
    EXPECT_EQ(ecocloud_assign_prob(p.t, p), 0.0);
    EXPECT_EQ(ecocloud_assign_prob(p.t + 0.01, p), 0.0);
    EXPECT_NEAR(p.m_p(), 0.069198046875, 1e-15);
    EXPECT_NEAR(ecocloud_assign_prob(0.5, p), 0.722563746493025535, 1e-14);
}

TEST(EcoCloudAssign, PeakIsOneAtPTOverPPlusOne) {
    for (double pe : {0.5, 1.0, 2.0, 3.0, 4.0}) {
        for (double t : {0.8, 0.9, 1.0}) {
            EcoCloudParams p;
            p.p = pe;
            p.t = t;
            EXPECT_NEAR(ecocloud_assign_prob(p.peak(), p), 1.0, 1e-12);
            // Dense-grid argmax lands next to the analytic peak.
            double best_x = 0, best = -1;
            for (int i = 0; i <= 100000; ++i) {
                const double x = t * i / 100000.0;
                const double v = std::pow(x, pe) * (t - x);
                if (v > best) best = v, best_x = x;
            }
            EXPECT_NEAR(best_x, pe * t / (pe + 1), 1e-4);
        }
    }
}

TEST(EcoCloudAssign, WithinUnitIntervalOnGrid) {
    for (double pe : {1.0, 2.0, 3.0, 4.0}) {
        for (double t : {0.8, 0.9, 1.0}) {
            EcoCloudParams p;
            p.p = pe;
            p.t = t;
            for (int i = 0; i <= 1000; ++i) {
                const double v = ecocloud_assign_prob(t * i / 1000.0, p);
                EXPECT_GE(v, 0.0);
                EXPECT_LE(v, 1.0);
            }
        }
    }
}

TEST(EcoCloudMigrate, Boundaries) {
    const EcoCloudParams p{};
    EXPECT_EQ(ecocloud_migrate_prob(0.0, p), 1.0);
    EXPECT_EQ(ecocloud_migrate_prob(p.t_l, p), 0.0);
    EXPECT_EQ(ecocloud_migrate_prob(1.0, p), 1.0);
    EXPECT_NEAR(ecocloud_migrate_prob(0.1, p), 4.0 / 9.0, 1e-15);
    EXPECT_NEAR(ecocloud_migrate_prob(0.9, p), 0.25, 1e-12);
    for (int i = 1; i < 100; ++i) {
        const double x = p.t_l + (p.t_h - p.t_l) * i / 100.0;
        EXPECT_EQ(ecocloud_migrate_prob(x, p), 0.0);
    }
    EcoCloudParams q = p;
    q.beta = 5;
    EXPECT_EQ(ecocloud_migrate_prob(1.0, q), 1.0);
}

TEST(EcoCloudAllocate, PeakPmAlwaysAccepts) {
    EcoCloudParams p;
    p.t = 1.0;
    p.p = 3.0;  // peak at 0.75 = 300/400
    std::vector<PmState> fleet{active_pm(0, {{1, 300}}), sleeping_pm(1)};
    Rng rng(1);
    for (int k = 0; k < 100; ++k) {
        const auto got = ecocloud_allocate(VmRequest{9, 0, 1, 1}, fleet, p, rng);
        ASSERT_TRUE(got);
        EXPECT_EQ(got->pm_index, 0u);
        EXPECT_FALSE(got->woke);
    }
}

TEST(EcoCloudAllocate, ColdFleetFallsBackToLowestId) {
    std::vector<PmState> fleet{active_pm(0, {}), active_pm(1, {}), active_pm(2, {})};
    Rng rng(1);
    const auto got = ecocloud_allocate(VmRequest{9, 0, 1, 1}, fleet, EcoCloudParams{}, rng);
    ASSERT_TRUE(got);
    EXPECT_EQ(got->pm_index, 0u);
}

TEST(EcoCloudAllocate, RefusalWakesASleepingPm) {
    std::vector<PmState> fleet{active_pm(0, {{1, 1}}), sleeping_pm(1)};
    Rng rng(1);
    const auto got = ecocloud_allocate(VmRequest{9, 0, 1, 1}, fleet, EcoCloudParams{}, rng);
    ASSERT_TRUE(got);
    EXPECT_EQ(got->pm_index, 1u);
    EXPECT_TRUE(got->woke);
}

TEST(EcoCloudAllocate, NoCapacity) {
    std::vector<PmState> fleet{active_pm(0, {{1, 399}})};
    Rng rng(1);
    EXPECT_FALSE(ecocloud_allocate(VmRequest{9, 0, 1, 5}, fleet, EcoCloudParams{}, rng));
}

TEST(EcoCloudMigrate, SeveralPmsMayMigrateInOneRound) {
    std::vector<PmState> fleet{active_pm(0, {{1, 4}}), active_pm(1, {{2, 6}}), active_pm(2, {{3, 200}})};
    PolicyConfig cfg;
    cfg.policy = PolicyKind::EcoCloud;
    Rng rng(1);
    const auto plan = ecocloud_migrate_round(fleet, cfg, rng, [](double) { return true; });
    EXPECT_EQ(plan.sources().size(), 2u);
    EXPECT_EQ(plan.parked.size(), 2u);
}

TEST(DrsAllocate, LeastLoadedFits) {
    std::vector<PmState> fleet{active_pm(0, {{1, 280}}), active_pm(1, {{2, 80}})};
    PolicyConfig cfg;
    const auto got = drs_allocate(VmRequest{9, 0, 1, 1}, fleet, cfg);
    ASSERT_TRUE(got);
    EXPECT_EQ(got->pm_index, 1u);
}

TEST(DrsAllocate, WakesOnlyWhenNothingActiveFits) {
    std::vector<PmState> fleet{active_pm(0, {{1, 399}}), sleeping_pm(1)};
    PolicyConfig cfg;
    const auto got = drs_allocate(VmRequest{9, 0, 1, 2}, fleet, cfg);
    ASSERT_TRUE(got);
    EXPECT_EQ(got->pm_index, 1u);
    EXPECT_TRUE(got->woke);
    std::vector<PmState> full{active_pm(0, {{1, 399}})};
    EXPECT_FALSE(drs_allocate(VmRequest{9, 0, 1, 2}, full, cfg));
}

// Placing on the least-loaded fitting PM never widens the utilization spread
// more than any other fitting choice would.
TEST(DrsAllocate, MinimizesSpreadAgainstEveryAlternative) {
    std::mt19937_64 gen(5);
    PolicyConfig cfg;
    auto spread = [](const std::vector<PmState>& f) {
        double lo = 2, hi = -1;
        for (const auto& pm : f) {
            if (!pm.active()) continue;
            lo = std::min(lo, utilization(pm));
            hi = std::max(hi, utilization(pm));
        }
        return hi - lo;
    };
    for (int trial = 0; trial < 500; ++trial) {
        const auto fleet = oracle::random_fleet(gen, 12);
        const CpuUnits d = 1 + static_cast<CpuUnits>(gen() % 40);
        const auto got = drs_allocate(VmRequest{100000, 0, 1, d}, fleet, cfg);
        if (!got || got->woke) continue;
        auto chosen = fleet;
        chosen[got->pm_index].host(100000, d);
        for (std::size_t i = 0; i < fleet.size(); ++i) {
            if (!fleet[i].active() || !fleet[i].fits(d)) continue;
            auto alt = fleet;
            alt[i].host(100000, d);
            EXPECT_LE(spread(chosen), spread(alt) + 1e-12);
            EXPECT_LE(utilization(fleet[got->pm_index]), utilization(fleet[i]));
        }
    }
}

TEST(DrsMigrate, NothingBelowThreshold) {
    std::vector<PmState> fleet{active_pm(0, {{1, 300}}), active_pm(1, {{2, 20}})};
    PolicyConfig cfg;
    EXPECT_TRUE(drs_migrate_round(fleet, cfg).moves.empty());
}

TEST(DrsMigrate, OneOverloadedPmMovesOneVmToLeastLoaded) {
    std::vector<PmState> fleet{active_pm(0, {{1, 100}, {2, 20}, {3, 30}, {4, 190}}), active_pm(1, {{5, 200}}),
                               active_pm(2, {{6, 10}})};
    PolicyConfig cfg;
    const auto plan = drs_migrate_round(fleet, cfg);
    ASSERT_EQ(plan.moves.size(), 1u);
    EXPECT_EQ(plan.moves[0].vm, 2);  // 340 - 20 = 320 -> exactly 0.8
    EXPECT_EQ(plan.moves[0].dst, 2);
    EXPECT_EQ(oracle::victim(fleet[0], cfg.t_h, false), std::optional<VmId>(2));
}

TEST(DrsMigrate, TwoOverloadedPmsInIdOrder) {
    std::vector<PmState> fleet{active_pm(0, {{1, 300}, {2, 40}}), active_pm(1, {{3, 300}, {4, 60}}),
                               active_pm(2, {}), active_pm(3, {{5, 10}})};
    PolicyConfig cfg;
    const auto plan = drs_migrate_round(fleet, cfg);
    ASSERT_EQ(plan.moves.size(), 2u);
    EXPECT_EQ(plan.moves[0].src, 0);
    EXPECT_EQ(plan.moves[1].src, 1);
    auto after = fleet;
    for (const auto& m : plan.moves) after[index_of(after, m.dst)].host(m.vm, after[index_of(after, m.src)].evict(m.vm));
    for (const auto& pm : after) EXPECT_LE(utilization(pm), cfg.t_h);
}

// PM 0 is emptied into PM 2, then PM 1 sheds a VM; the lowest sleeping PM is
// PM 0 again, so it must not be both parked and a destination.
TEST(EcoCloudMigrate, EmptiedPmReusedInSameRoundIsNotParked) {
    std::vector<PmState> fleet{active_pm(0, {{1, 4}}), active_pm(1, {{2, 300}, {3, 60}}),
                               active_pm(2, {{4, 270}})};
    PolicyConfig cfg;
    cfg.policy = PolicyKind::EcoCloud;
    Rng rng(1);
    const auto plan = ecocloud_migrate_round(fleet, cfg, rng, [](double) { return true; });
    ASSERT_EQ(plan.moves.size(), 2u);
    EXPECT_EQ(plan.moves[0].dst, 2);
    EXPECT_EQ(plan.moves[1].src, 1);
    EXPECT_EQ(plan.moves[1].dst, 0);
    EXPECT_FALSE(plan.moves[1].woke_dst);
    EXPECT_TRUE(plan.parked.empty());
}
