#pragma once

// Seeded synthetic trial logs shared by unit and acceptance tests.

#include <greenllm/trial_store.hpp>

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace greenllm::test {

inline auto unit_uniform(std::mt19937_64& rng) -> double
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline auto random_records(std::size_t n, std::uint64_t seed) -> std::vector<TrialRecord>
{
    std::mt19937_64 rng(seed);
    static constexpr double ratios[] = { 1.0, 0.7, 0.5, 0.3 };
    static char const* const models[] = { "gpt-4o-mini", "deepseek-chat", "tiny, \"quoted\" model" };
    static char const* const providers[] = { "OpenAI", "DeepSeek", "Mistral" };
    std::vector<TrialRecord> out;
    for (std::size_t i = 0; i < n; ++i) {
        auto m = rng() % 3;
        TrialRecord r;
        r.provider = providers[m];
        r.model = models[m];
        r.benchmark = i % 2 ? "humaneval" : "gsm8k";
        r.compression_ratio = ratios[rng() % 4];
        r.input_tokens = rng() % 4000;
        r.output_tokens = rng() % 900;
        r.passed = rng() % 4 == 0;
        r.cost_usd = unit_uniform(rng) * 1e-4;
        r.run_index = i * 3 + 1;
        if (rng() % 5 != 0) {
            r.energy_j = unit_uniform(rng) * 3;
        }
        if (rng() % 3 == 0) {
            r.quality_score = unit_uniform(rng);
        }
        out.push_back(std::move(r));
    }
    return out;
}

// passes/n at a single (model, ratio), outcomes in shuffled run order.
inline auto fixed_rate_log(std::size_t n, std::size_t passes, std::uint64_t seed, double ratio = 1.0) -> std::vector<TrialRecord>
{
    std::mt19937_64 rng(seed);
    std::vector<bool> outcomes(n, false);
    std::fill(outcomes.begin(), outcomes.begin() + static_cast<std::ptrdiff_t>(passes), true);
    std::shuffle(outcomes.begin(), outcomes.end(), rng);
    std::vector<TrialRecord> out;
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back({ "DeepSeek", "deepseek-chat", "humaneval", ratio, 180, 21, static_cast<bool>(outcomes[i]), 0.000088, i,
            0.05 + 0.1 * unit_uniform(rng), std::nullopt });
    }
    return out;
}

// Pass probability falls linearly from p_start to p_end over run order.
inline auto drifting_log(std::size_t n, double p_start, double p_end, std::uint64_t seed) -> std::vector<TrialRecord>
{
    std::mt19937_64 rng(seed);
    std::vector<TrialRecord> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        double x = static_cast<double>(i) / static_cast<double>(n - 1);
        double p = p_start + (p_end - p_start) * x;
        out.push_back({ "OpenAI", "gpt-4o-mini", "mbpp", 1.0, 200, 20, unit_uniform(rng) < p, 0.00002, i, 0.0066, std::nullopt });
    }
    return out;
}

} // namespace greenllm::test
