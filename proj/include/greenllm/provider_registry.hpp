#pragma once

#include "config.hpp"
#include "energy_model.hpp"
#include "error.hpp"

#include <cmath>
#include <map>
#include <string>
#include <vector>

namespace greenllm {

struct ProviderProfile {
    std::string name;
    double est_pue { 1.0 };
    std::string hardware;
    double efficiency_factor { 1.0 };

    void validate() const
    {
        detail::require(!name.empty(), ErrorKind::Validation, "provider name must be nonempty");
        detail::require(std::isfinite(est_pue) && est_pue >= 1.0, ErrorKind::Validation,
            "provider '" + name + "': est_pue must be >= 1");
        detail::require(std::isfinite(efficiency_factor) && efficiency_factor > 0, ErrorKind::Validation,
            "provider '" + name + "': efficiency_factor must be > 0");
    }
};

// Immutable after construction; reloading produces a new registry.
class ProviderRegistry {
public:
    ProviderRegistry() = default;

    explicit ProviderRegistry(std::vector<ProviderProfile> profiles, std::string source = "<memory>")
        : source_(std::move(source))
    {
        for (auto& p : profiles) {
            p.validate();
            auto name = p.name;
            if (!providers_.emplace(name, std::move(p)).second) {
                throw Error(ErrorKind::Conflict, "duplicate provider '" + name + "'");
            }
        }
    }

    // One [provider.<name>] section per provider with est_pue,
    // efficiency_factor and an optional hardware label.
    static auto from_config(ConfigDocument const& doc) -> ProviderRegistry
    {
        std::vector<ProviderProfile> profiles;
        for (auto const& [name, section] : doc.entities("provider")) {
            profiles.push_back({ name, section->require_double("est_pue"), section->find("hardware").value_or(""),
                section->require_double("efficiency_factor") });
        }
        return ProviderRegistry(std::move(profiles), doc.source());
    }

    static auto load(std::string const& path) -> ProviderRegistry { return from_config(ConfigDocument::load(path)); }

    [[nodiscard]] auto find(std::string const& name) const -> ProviderProfile const*
    {
        auto it = providers_.find(name);
        return it == providers_.end() ? nullptr : &it->second;
    }

    [[nodiscard]] auto at(std::string const& name) const -> ProviderProfile const&
    {
        if (auto const* p = find(name)) {
            return *p;
        }
        throw Error(ErrorKind::NotFound, "unknown provider '" + name + "' in registry " + source_);
    }

    [[nodiscard]] auto size() const -> std::size_t { return providers_.size(); }
    [[nodiscard]] auto empty() const -> bool { return providers_.empty(); }
    [[nodiscard]] auto source() const -> std::string const& { return source_; }
    [[nodiscard]] auto profiles() const -> std::map<std::string, ProviderProfile> const& { return providers_; }

private:
    std::string source_ = "<memory>";
    std::map<std::string, ProviderProfile> providers_;
};

// Scales every joule component by the provider's efficiency factor. The
// provider's PUE is expected to have entered upstream as the formula's PUE
// argument and is not applied again.
inline auto apply_provider_adjustment(EnergyEstimate estimate, ProviderProfile const& provider) -> EnergyEstimate
{
    provider.validate();
    auto const k = provider.efficiency_factor;
    detail::require(estimate.total_j >= 0, ErrorKind::InvalidParameter, "energy estimate must be >= 0");
    if (estimate.attributed()) {
        detail::require(*estimate.prefill_j >= 0 && *estimate.decode_j >= 0, ErrorKind::InvalidParameter,
            "energy estimate components must be >= 0");
        auto adjusted = EnergyEstimate::computed(*estimate.prefill_j * k, *estimate.decode_j * k, estimate.formula);
        return adjusted;
    }
    estimate.total_j *= k;
    return estimate;
}

inline auto apply_provider_adjustment(EnergyEstimate const& estimate, ProviderRegistry const& registry, std::string const& provider)
    -> EnergyEstimate
{
    return apply_provider_adjustment(estimate, registry.at(provider));
}

} // namespace greenllm
