#include <greenllm/carbon.hpp>

#include "test_util.hpp"

#include <random>

using namespace greenllm;

TEST(Carbon, UnitConversion)
{
    EXPECT_EQ(joules_to_kwh(3.6e6), 1.0);
    EXPECT_EQ(joules_to_kwh(0), 0.0);
    EXPECT_EQ(joules_to_kwh(1.8e6), 0.5);
    EXPECT_ERROR_KIND(joules_to_kwh(-1), ErrorKind::Validation);
}

TEST(Carbon, Emissions)
{
    EXPECT_DOUBLE_EQ(co2_for_energy(3.6e6, { "r", 500 }), 500.0);
    EXPECT_EQ(co2_for_energy(0, { "r", 500 }), 0.0);
    EXPECT_DOUBLE_EQ(co2_for_energy(7.2e6, { "r", 475 }), 950.0);
    EXPECT_ERROR_KIND(co2_for_energy(1, { "r", 0 }), ErrorKind::Validation);
}

TEST(Carbon, LinearInEnergy)
{
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0, 1e7);
    CarbonIntensity ci { "r", 321 };
    for (int i = 0; i < 500; ++i) {
        double a = u(rng);
        double b = u(rng);
        EXPECT_NEAR(co2_for_energy(a + b, ci), co2_for_energy(a, ci) + co2_for_energy(b, ci), 1e-9 * co2_for_energy(a + b, ci));
    }
}

TEST(Carbon, TableLookup)
{
    auto t = CarbonTable::from_config(ConfigDocument::parse("[carbon.eu]\ngrams_per_kwh = 250\n[carbon.us]\ngrams_per_kwh = 390\n"));
    EXPECT_EQ(t.size(), 2u);
    EXPECT_EQ(t.at("eu").grams_per_kwh, 250);
    EXPECT_ERROR_KIND(t.at("mars"), ErrorKind::NotFound);
    EXPECT_ERROR_KIND(CarbonTable::from_config(ConfigDocument::parse("[carbon.x]\ngrams_per_kwh = -5\n")), ErrorKind::Validation);
}
