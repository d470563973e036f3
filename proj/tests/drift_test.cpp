#include <greenllm/trial_store.hpp>

#include "synthetic.hpp"
#include "test_util.hpp"

using namespace greenllm;

TEST(Drift, TwoRecordsPassThenFail)
{
    std::vector<TrialRecord> log(2);
    log[0].run_index = 10;
    log[0].passed = true;
    log[1].run_index = 20;
    log[1].passed = false;
    auto d = drift_test(log, 100, 1);
    EXPECT_DOUBLE_EQ(d.slope, -1.0);
}

TEST(Drift, IdenticalRunIndexIsInsufficientVariation)
{
    std::vector<TrialRecord> log(3);
    EXPECT_ERROR_KIND(drift_test(log), ErrorKind::InsufficientVariation);
    EXPECT_ERROR_KIND(drift_test({}), ErrorKind::InsufficientData);
}

TEST(Drift, NullLogHasFlatSlope)
{
    auto log = test::drifting_log(200000, 0.26, 0.26, 4242);
    auto d = drift_test(log, 2000, 1);
    EXPECT_LT(std::abs(d.slope), 0.01);
    EXPECT_GT(d.p_value, 0.05);
}

TEST(Drift, RecoversDecliningPassRate)
{
    auto log = test::drifting_log(200000, 0.30, 0.22, 777);
    auto d = drift_test(log, 2000, 1);
    EXPECT_LT(d.slope, 0.0);
    EXPECT_NEAR(d.slope, -0.08, 0.2 * 0.08);
    EXPECT_LT(d.p_value, 0.01);
}

TEST(Drift, DeterministicGivenSeedAndIgnoresFileOrder)
{
    auto log = test::drifting_log(5000, 0.3, 0.25, 5);
    auto a = drift_test(log, 500, 99);
    auto b = drift_test(log, 500, 99);
    EXPECT_EQ(a.slope, b.slope);
    EXPECT_EQ(a.p_value, b.p_value);
    std::reverse(log.begin(), log.end());
    auto c = drift_test(log, 500, 99);
    EXPECT_NEAR(c.slope, a.slope, 1e-12);
}

TEST(Drift, AllPassOrAllFailHasUnitPValue)
{
    auto log = test::drifting_log(100, 1.0, 1.0, 1);
    auto d = drift_test(log, 100, 1);
    EXPECT_EQ(d.slope, 0.0);
    EXPECT_EQ(d.p_value, 1.0);
}
