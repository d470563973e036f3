#pragma once

// Green AI Scores and the quality-energy Pareto frontier.

#include "error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace greenllm {

struct ModelOutcome {
    std::string model;
    double pass_rate {};
    double energy_per_trial_j {};
    std::optional<double> energy_per_success_j; // nullopt when pass_rate == 0

    // Derives energy per success from the trial energy and pass rate.
    static auto from_trial(std::string model, double pass_rate, double energy_per_trial_j) -> ModelOutcome
    {
        ModelOutcome o { std::move(model), pass_rate, energy_per_trial_j, std::nullopt };
        if (pass_rate > 0) {
            o.energy_per_success_j = energy_per_trial_j / pass_rate;
        }
        o.validate();
        return o;
    }

    // Checks a supplied energy per success against trial energy / pass rate.
    static auto checked(std::string model, double pass_rate, double energy_per_trial_j, double energy_per_success_j,
        double rel_tol = 1e-9) -> ModelOutcome
    {
        auto o = from_trial(std::move(model), pass_rate, energy_per_trial_j);
        detail::require(o.energy_per_success_j.has_value(), ErrorKind::Validation,
            "model '" + o.model + "': energy per success given with zero pass rate");
        detail::require(std::abs(*o.energy_per_success_j - energy_per_success_j) <= rel_tol * std::abs(energy_per_success_j),
            ErrorKind::Validation, "model '" + o.model + "': energy_per_success != energy_per_trial / pass_rate");
        return o;
    }

    void validate() const
    {
        detail::require(!model.empty(), ErrorKind::Validation, "model name must be nonempty");
        detail::require(pass_rate >= 0 && pass_rate <= 1, ErrorKind::Validation, "model '" + model + "': pass rate must be in [0, 1]");
        detail::require(std::isfinite(energy_per_trial_j) && energy_per_trial_j > 0, ErrorKind::Validation,
            "model '" + model + "': energy per trial must be > 0");
    }
};

struct GasScore {
    std::string model;
    double gas_trial {};
    std::optional<double> gas_success;
    std::optional<double> gas_quality_gated;
};

struct GasExclusion {
    std::string model;
    std::string reason;
};

// The gate compares each pass rate with that of the model holding the minimum
// energy per success (the same model that anchors GAS_success).
inline constexpr std::string_view kQualityGateRule
    = "gas_quality_gated = gas_success * min(1, pass_rate / pass_rate_ref), ref = model with minimum energy per success";

struct GasReport {
    std::vector<GasScore> scores;
    std::vector<GasExclusion> exclusions;
    std::string trial_reference;
    std::string success_reference;
    double success_reference_pass_rate {};
};

inline auto gas_scores(std::vector<ModelOutcome> const& outcomes) -> GasReport
{
    detail::require(!outcomes.empty(), ErrorKind::EmptyInput, "GAS needs at least one model outcome");
    for (auto const& o : outcomes) {
        o.validate();
    }

    GasReport report;
    auto best_trial = std::min_element(outcomes.begin(), outcomes.end(), [](auto const& a, auto const& b) {
        return std::tie(a.energy_per_trial_j, a.model) < std::tie(b.energy_per_trial_j, b.model);
    });
    report.trial_reference = best_trial->model;

    ModelOutcome const* best_success = nullptr;
    for (auto const& o : outcomes) {
        if (!o.energy_per_success_j) {
            report.exclusions.push_back({ o.model, "pass rate is 0; excluded from success-based scores" });
            continue;
        }
        if (best_success == nullptr
            || std::tie(*o.energy_per_success_j, o.model) < std::tie(*best_success->energy_per_success_j, best_success->model)) {
            best_success = &o;
        }
    }
    if (best_success != nullptr) {
        report.success_reference = best_success->model;
        report.success_reference_pass_rate = best_success->pass_rate;
    }

    for (auto const& o : outcomes) {
        GasScore s { o.model, 100.0 * (best_trial->energy_per_trial_j / o.energy_per_trial_j), std::nullopt, std::nullopt };
        if (o.energy_per_success_j && best_success != nullptr) {
            auto success = 100.0 * (*best_success->energy_per_success_j / *o.energy_per_success_j);
            s.gas_success = success;
            s.gas_quality_gated = success * std::min(1.0, o.pass_rate / best_success->pass_rate);
        }
        report.scores.push_back(std::move(s));
    }
    return report;
}

// One decimal, as in published score tables.
inline auto round1(double v) -> double
{
    return std::round(v * 10.0) / 10.0;
}

// ---------------------------------------------------------------------------
// Pareto frontier (minimize energy, maximize quality)

struct ParetoPoint {
    std::string model;
    double compression_ratio {};
    double energy_j {};
    double quality {};

    friend auto operator==(ParetoPoint const&, ParetoPoint const&) -> bool = default;
};

// True when a is no worse on both axes and strictly better on one.
inline auto dominates(ParetoPoint const& a, ParetoPoint const& b) -> bool
{
    return a.energy_j <= b.energy_j && a.quality >= b.quality && (a.energy_j < b.energy_j || a.quality > b.quality);
}

// Non-dominated subset, ordered by energy then (model, ratio). Points equal on
// both axes are all kept.
inline auto pareto_frontier(std::vector<ParetoPoint> points) -> std::vector<ParetoPoint>
{
    for (auto const& p : points) {
        detail::require(std::isfinite(p.energy_j) && std::isfinite(p.quality), ErrorKind::InvalidParameter,
            "pareto inputs must be finite");
    }
    std::sort(points.begin(), points.end(), [](auto const& a, auto const& b) {
        return std::tie(a.energy_j, b.quality, a.model, a.compression_ratio) < std::tie(b.energy_j, a.quality, b.model, b.compression_ratio);
    });

    std::vector<ParetoPoint> frontier;
    auto best_quality_below = -std::numeric_limits<double>::infinity();
    std::size_t i = 0;
    while (i < points.size()) {
        // Block of equal energy; its first element holds the block's top quality.
        auto j = i;
        while (j < points.size() && points[j].energy_j == points[i].energy_j) {
            ++j;
        }
        auto const top = points[i].quality;
        if (top > best_quality_below) {
            for (auto k = i; k < j && points[k].quality == top; ++k) {
                frontier.push_back(points[k]);
            }
            best_quality_below = top;
        }
        i = j;
    }
    std::sort(frontier.begin(), frontier.end(), [](auto const& a, auto const& b) {
        return std::tie(a.energy_j, a.model, a.compression_ratio) < std::tie(b.energy_j, b.model, b.compression_ratio);
    });
    return frontier;
}

} // namespace greenllm
