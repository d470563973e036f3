#pragma once

// Weighted selection over discrete routing configurations:
//   argmin  l_cost * C_hat + l_energy * E_hat + l_quality * (1 - Q)
// with cost and energy min-max normalized over the candidate set.

#include "error.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <tuple>
#include <vector>

namespace greenllm {

class ObjectiveWeights {
public:
    ObjectiveWeights(double cost, double energy, double quality)
    {
        auto ok = [](double w) { return std::isfinite(w) && w >= 0; };
        detail::require(ok(cost) && ok(energy) && ok(quality), ErrorKind::InvalidParameter, "objective weights must be finite and >= 0");
        auto const sum = cost + energy + quality;
        detail::require(sum > 0, ErrorKind::InvalidParameter, "at least one objective weight must be > 0");
        cost_ = cost / sum;
        energy_ = energy / sum;
        quality_ = quality / sum;
    }

    [[nodiscard]] auto cost() const -> double { return cost_; }
    [[nodiscard]] auto energy() const -> double { return energy_; }
    [[nodiscard]] auto quality() const -> double { return quality_; }

private:
    double cost_ {};
    double energy_ {};
    double quality_ {};
};

struct CandidateConfig {
    std::string model;
    double compression_ratio { 1.0 };
    double cost_usd {};
    double energy_j {};
    double quality {};

    void validate() const
    {
        detail::require(std::isfinite(cost_usd) && cost_usd >= 0, ErrorKind::Validation, "candidate '" + model + "': cost must be >= 0");
        detail::require(std::isfinite(energy_j) && energy_j >= 0, ErrorKind::Validation, "candidate '" + model + "': energy must be >= 0");
        detail::require(quality >= 0 && quality <= 1, ErrorKind::Validation, "candidate '" + model + "': quality must be in [0, 1]");
    }

    friend auto operator==(CandidateConfig const&, CandidateConfig const&) -> bool = default;
};

struct Selection {
    std::size_t index {};
    CandidateConfig candidate;
    double objective {};
};

// Normalized objective for every candidate, in input order.
inline auto objective_values(std::vector<CandidateConfig> const& candidates, ObjectiveWeights const& weights) -> std::vector<double>
{
    detail::require(!candidates.empty(), ErrorKind::EmptyInput, "optimizer needs at least one candidate");
    for (auto const& c : candidates) {
        c.validate();
    }
    auto [cmin, cmax] = std::minmax_element(candidates.begin(), candidates.end(),
        [](auto const& a, auto const& b) { return a.cost_usd < b.cost_usd; });
    auto [emin, emax] = std::minmax_element(candidates.begin(), candidates.end(),
        [](auto const& a, auto const& b) { return a.energy_j < b.energy_j; });
    auto normalize = [](double v, double lo, double hi) { return hi > lo ? (v - lo) / (hi - lo) : 0.0; };

    std::vector<double> values;
    values.reserve(candidates.size());
    for (auto const& c : candidates) {
        values.push_back(weights.cost() * normalize(c.cost_usd, cmin->cost_usd, cmax->cost_usd)
            + weights.energy() * normalize(c.energy_j, emin->energy_j, emax->energy_j)
            + weights.quality() * (1.0 - c.quality));
    }
    return values;
}

// Ties on the objective go to the lexicographically smallest (model, ratio).
inline auto optimize(std::vector<CandidateConfig> const& candidates, ObjectiveWeights const& weights) -> Selection
{
    auto values = objective_values(candidates, weights);
    std::size_t best = 0;
    for (std::size_t i = 1; i < candidates.size(); ++i) {
        auto const& a = candidates[i];
        auto const& b = candidates[best];
        if (std::tie(values[i], a.model, a.compression_ratio) < std::tie(values[best], b.model, b.compression_ratio)) {
            best = i;
        }
    }
    return { best, candidates[best], values[best] };
}

struct SweepCell {
    double lambda_cost {};
    double lambda_energy {};
    double lambda_quality {};
    Selection selection;
};

// Simplex grid with (resolution - 1) steps per axis: every (i, j, k) with
// i + j + k = resolution - 1, in lexicographic (i, j) order. The three corner
// weightings are always included.
inline auto weight_sweep(std::vector<CandidateConfig> const& candidates, std::size_t resolution) -> std::vector<SweepCell>
{
    detail::require(resolution >= 2, ErrorKind::InvalidParameter, "grid resolution must be >= 2");
    detail::require(!candidates.empty(), ErrorKind::EmptyInput, "optimizer needs at least one candidate");
    auto const steps = resolution - 1;
    std::vector<SweepCell> cells;
    for (std::size_t i = 0; i <= steps; ++i) {
        for (std::size_t j = 0; i + j <= steps; ++j) {
            auto const k = steps - i - j;
            auto const s = static_cast<double>(steps);
            auto lc = static_cast<double>(i) / s;
            auto le = static_cast<double>(j) / s;
            auto lq = static_cast<double>(k) / s;
            cells.push_back({ lc, le, lq, optimize(candidates, ObjectiveWeights(lc, le, lq)) });
        }
    }
    return cells;
}

} // namespace greenllm
