#pragma once

#include "config.hpp"
#include "error.hpp"

#include <cmath>
#include <map>
#include <string>

namespace greenllm {

inline constexpr double kJoulesPerKwh = 3.6e6;

struct CarbonIntensity {
    std::string region;
    double grams_per_kwh {};

    void validate() const
    {
        detail::require(std::isfinite(grams_per_kwh) && grams_per_kwh > 0, ErrorKind::Validation,
            "carbon intensity for '" + region + "' must be > 0 gCO2/kWh");
    }
};

inline auto joules_to_kwh(double joules) -> double
{
    detail::require(std::isfinite(joules) && joules >= 0, ErrorKind::Validation, "energy must be >= 0 J");
    return joules / kJoulesPerKwh;
}

inline auto co2_for_energy(double joules, CarbonIntensity const& intensity) -> double
{
    intensity.validate();
    return joules_to_kwh(joules) * intensity.grams_per_kwh;
}

// Region-keyed intensities from [carbon.<region>] grams_per_kwh = ...
// There is deliberately no fallback region.
class CarbonTable {
public:
    static auto from_config(ConfigDocument const& doc) -> CarbonTable
    {
        CarbonTable table;
        for (auto const& [region, section] : doc.entities("carbon")) {
            CarbonIntensity ci { region, section->require_double("grams_per_kwh") };
            ci.validate();
            if (!table.regions_.emplace(region, ci).second) {
                throw Error(ErrorKind::Conflict, "duplicate carbon region '" + region + "'");
            }
        }
        return table;
    }

    [[nodiscard]] auto at(std::string const& region) const -> CarbonIntensity const&
    {
        auto it = regions_.find(region);
        if (it == regions_.end()) {
            throw Error(ErrorKind::NotFound, "unknown carbon region '" + region + "'");
        }
        return it->second;
    }

    [[nodiscard]] auto size() const -> std::size_t { return regions_.size(); }

private:
    std::map<std::string, CarbonIntensity> regions_;
};

} // namespace greenllm
