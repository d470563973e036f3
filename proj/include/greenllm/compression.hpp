#pragma once

// Energy bookkeeping for prompt compression: what the compressor costs, what
// the shorter prompt saves on the target model, and the resulting ROI.

#include "energy_model.hpp"
#include "error.hpp"

#include <cmath>
#include <cstdint>
#include <string_view>

namespace greenllm {

struct CompressionPlan {
    double ratio { 1.0 };
    std::uint64_t original_tokens {};
    double compressor_params_b { 0.35 };

    void validate() const
    {
        detail::require(std::isfinite(ratio) && ratio > 0 && ratio <= 1, ErrorKind::InvalidParameter,
            "compression ratio must be in (0, 1]");
        detail::require(std::isfinite(compressor_params_b) && compressor_params_b > 0, ErrorKind::InvalidParameter,
            "compressor_params_b must be > 0");
    }
};

// Attached to every report that prints compression_energy.
inline constexpr std::string_view kCompressionEnergyNote
    = "compression_energy = epsilon_comp * T_original * sqrt(compressor_params_b); with epsilon_comp = 0.15 and a "
      "0.35B compressor this is ~88.7 J per 1000 tokens, ~49x the frequently quoted ~1.8 J figure for the same "
      "case. The formula is authoritative here; set epsilon_comp explicitly for absolute results.";

inline auto compression_energy(CompressionPlan const& plan, CalibrationConstants const& calib) -> double
{
    plan.validate();
    return calib.epsilon_comp * static_cast<double>(plan.original_tokens) * std::sqrt(plan.compressor_params_b);
}

// (1 - r) * T_original * eps * sqrt(N_target) * PUE
inline auto energy_saved(CompressionPlan const& plan, ModelProfile const& target, CalibrationConstants const& calib, double pue)
    -> double
{
    plan.validate();
    target.validate();
    detail::require_pue(pue);
    return (1.0 - plan.ratio) * static_cast<double>(plan.original_tokens) * calib.epsilon * std::sqrt(target.param_count_b) * pue;
}

// Saved / spent with the same constant and PUE on both sides, so T_original,
// epsilon and PUE cancel: (1 - r) * sqrt(N_target) / sqrt(N_compressor).
inline auto energy_roi(CompressionPlan const& plan, ModelProfile const& target) -> double
{
    plan.validate();
    target.validate();
    return (1.0 - plan.ratio) * std::sqrt(target.param_count_b) / std::sqrt(plan.compressor_params_b);
}

// Same ratio with distinct inference/compression constants and the target's
// PUE applied on the savings side only.
inline auto energy_roi_general(CompressionPlan const& plan, ModelProfile const& target, CalibrationConstants const& calib, double pue)
    -> double
{
    plan.validate();
    detail::require(plan.original_tokens > 0, ErrorKind::UndefinedResult, "generalized ROI needs original_tokens > 0");
    return energy_saved(plan, target, calib, pue) / compression_energy(plan, calib);
}

// Queries needed before the compressor's energy is recovered.
inline auto break_even_queries(double roi) -> double
{
    detail::require(roi > 0, ErrorKind::UndefinedResult, "break-even is undefined when ROI <= 0");
    return 1.0 / roi;
}

// [E(compressed) + E_compress] - E(baseline), both via the simplified proxy on
// the observed token counts. Positive means compression cost energy overall.
inline auto net_energy_delta(CompressionPlan const& plan, ModelProfile const& target, TokenCounts baseline, TokenCounts compressed,
    CalibrationConstants const& calib, double pue) -> double
{
    auto const with = estimate_energy_simplified(compressed, target, calib, pue).total_j + compression_energy(plan, calib);
    auto const without = estimate_energy_simplified(baseline, target, calib, pue).total_j;
    return with - without;
}

} // namespace greenllm
