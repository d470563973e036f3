#pragma once

// Token-count energy proxies for LLM inference, power-trace integration and
// server/datacenter overhead multipliers. Energies are joules throughout;
// parameter counts are billions.

#include "config.hpp"
#include "error.hpp"

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace greenllm {

struct ModelProfile {
    std::string name;
    double param_count_b {};
    std::string provider;

    void validate() const
    {
        detail::require(!name.empty(), ErrorKind::Validation, "model name must be nonempty");
        detail::require(std::isfinite(param_count_b) && param_count_b > 0, ErrorKind::Validation,
            "model '" + name + "': param_count_b must be > 0");
    }
};

struct TokenCounts {
    std::uint64_t input_tokens {};
    std::uint64_t output_tokens {};
};

struct CalibrationConstants {
    double alpha {};
    double delta {};
    double beta { 0.75 };
    double epsilon { 0.15 };
    double omega { 4.0 };
    double n_ref_b { 7.0 };
    double epsilon_comp { 0.15 };

    // No published value exists for alpha. The default makes the full proxy
    // agree with the simplified one at N = n_ref_b when beta = 0.5 and f = 1;
    // delta follows the decode/prefill ratio of 4.
    static auto defaults() -> CalibrationConstants
    {
        CalibrationConstants c;
        c.alpha = c.epsilon * std::sqrt(c.n_ref_b);
        c.delta = 4.0 * c.alpha;
        return c;
    }

    void validate() const
    {
        auto positive = [](double v) { return std::isfinite(v) && v > 0; };
        detail::require(positive(alpha) && positive(delta) && positive(epsilon) && positive(n_ref_b)
                && positive(epsilon_comp),
            ErrorKind::InvalidParameter, "calibration constants must be strictly positive");
        detail::require(beta > 0 && beta <= 1, ErrorKind::InvalidParameter, "calibration beta must satisfy 0 < beta <= 1");
        detail::require(std::isfinite(omega) && omega >= 1, ErrorKind::InvalidParameter, "calibration omega must be >= 1");
    }

    // Reads [calibration]; absent keys keep their defaults. When only alpha is
    // given, delta tracks 4*alpha.
    static auto from_config(ConfigDocument const& doc) -> CalibrationConstants
    {
        auto c = defaults();
        auto const* s = doc.find("calibration");
        if (s == nullptr) {
            return c;
        }
        c.epsilon = s->get_double("epsilon").value_or(c.epsilon);
        c.omega = s->get_double("omega").value_or(c.omega);
        c.beta = s->get_double("beta").value_or(c.beta);
        c.n_ref_b = s->get_double("n_ref_b").value_or(c.n_ref_b);
        c.epsilon_comp = s->get_double("epsilon_comp").value_or(c.epsilon_comp);
        c.alpha = s->get_double("alpha").value_or(c.epsilon * std::sqrt(c.n_ref_b));
        c.delta = s->get_double("delta").value_or(4.0 * c.alpha);
        c.validate();
        return c;
    }
};

// Attention-scaling multiplier f(T_in) on prefill energy. constant_one is the
// default; piecewise_linear interpolates between (threshold, multiplier)
// breakpoints and clamps to the end multipliers outside them.
class AttentionScaling {
public:
    enum class Kind { ConstantOne, PiecewiseLinear };

    AttentionScaling() = default;

    static auto constant_one() -> AttentionScaling { return {}; }

    static auto piecewise_linear(std::vector<std::pair<double, double>> breakpoints) -> AttentionScaling
    {
        AttentionScaling f;
        f.kind_ = Kind::PiecewiseLinear;
        f.breakpoints_ = std::move(breakpoints);
        f.validate();
        return f;
    }

    // "constant_one" or "T1:m1, T2:m2, ..."
    static auto parse(std::string_view text) -> AttentionScaling
    {
        auto t = detail::trim(text);
        if (t.empty() || t == "constant_one") {
            return constant_one();
        }
        std::vector<std::pair<double, double>> points;
        std::size_t pos = 0;
        while (pos <= t.size()) {
            auto comma = t.find(',', pos);
            auto item = detail::trim(t.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
            pos = comma == std::string_view::npos ? t.size() + 1 : comma + 1;
            auto colon = item.find(':');
            if (colon == std::string_view::npos) {
                throw Error(ErrorKind::InvalidParameter, "attention breakpoint must be 'tokens:multiplier', got '" + std::string(item) + "'");
            }
            points.emplace_back(detail::parse_double(item.substr(0, colon), "attention threshold"),
                detail::parse_double(item.substr(colon + 1), "attention multiplier"));
        }
        return piecewise_linear(std::move(points));
    }

    void validate() const
    {
        if (kind_ == Kind::ConstantOne) {
            return;
        }
        detail::require(!breakpoints_.empty(), ErrorKind::InvalidParameter, "piecewise attention scaling needs at least one breakpoint");
        for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
            auto [threshold, mult] = breakpoints_[i];
            detail::require(std::isfinite(threshold) && threshold >= 0, ErrorKind::InvalidParameter, "attention thresholds must be >= 0");
            detail::require(std::isfinite(mult) && mult >= 1.0, ErrorKind::InvalidParameter, "attention multipliers must be >= 1");
            if (i > 0) {
                detail::require(threshold > breakpoints_[i - 1].first, ErrorKind::InvalidParameter,
                    "attention thresholds must be strictly increasing");
            }
        }
    }

    [[nodiscard]] auto operator()(double input_tokens) const -> double
    {
        if (kind_ == Kind::ConstantOne) {
            return 1.0;
        }
        if (input_tokens <= breakpoints_.front().first) {
            return breakpoints_.front().second;
        }
        for (std::size_t i = 1; i < breakpoints_.size(); ++i) {
            auto [t1, m1] = breakpoints_[i];
            if (input_tokens <= t1) {
                auto [t0, m0] = breakpoints_[i - 1];
                return m0 + (m1 - m0) * (input_tokens - t0) / (t1 - t0);
            }
        }
        return breakpoints_.back().second;
    }

    [[nodiscard]] auto kind() const -> Kind { return kind_; }
    [[nodiscard]] auto breakpoints() const -> std::vector<std::pair<double, double>> const& { return breakpoints_; }

    [[nodiscard]] auto describe() const -> std::string
    {
        if (kind_ == Kind::ConstantOne) {
            return "constant_one";
        }
        std::string out;
        for (auto const& [t, m] : breakpoints_) {
            if (!out.empty()) {
                out += ", ";
            }
            out += std::to_string(t) + ":" + std::to_string(m);
        }
        return out;
    }

private:
    Kind kind_ { Kind::ConstantOne };
    std::vector<std::pair<double, double>> breakpoints_;
};

struct ServerOverheads {
    double alpha_cpu { 0.15 };
    double alpha_dram { 0.08 };
    double alpha_io { 0.02 };
    double pue { 1.2 };

    void validate() const
    {
        detail::require(alpha_cpu >= 0 && alpha_dram >= 0 && alpha_io >= 0, ErrorKind::InvalidParameter,
            "server overhead fractions must be >= 0");
        detail::require(pue >= 1.0, ErrorKind::InvalidParameter, "pue must be >= 1");
    }

    static auto from_config(ConfigDocument const& doc) -> ServerOverheads
    {
        ServerOverheads o;
        if (auto const* s = doc.find("server")) {
            o.alpha_cpu = s->get_double("alpha_cpu").value_or(o.alpha_cpu);
            o.alpha_dram = s->get_double("alpha_dram").value_or(o.alpha_dram);
            o.alpha_io = s->get_double("alpha_io").value_or(o.alpha_io);
            o.pue = s->get_double("pue").value_or(o.pue);
        }
        o.validate();
        return o;
    }
};

struct PowerSample {
    double timestamp_s {};
    double power_w {};
};

struct PowerTrace {
    std::vector<PowerSample> samples;

    // Two-column CSV with header "timestamp_s,power_w".
    static auto parse_csv(std::string_view text) -> PowerTrace
    {
        PowerTrace trace;
        std::size_t pos = 0;
        std::size_t line_no = 0;
        bool header_seen = false;
        while (pos < text.size()) {
            auto eol = text.find('\n', pos);
            auto line = detail::trim(text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos));
            pos = eol == std::string_view::npos ? text.size() : eol + 1;
            ++line_no;
            if (line.empty()) {
                continue;
            }
            auto comma = line.find(',');
            if (comma == std::string_view::npos || line.find(',', comma + 1) != std::string_view::npos) {
                throw Error(ErrorKind::MalformedTrace, "line " + std::to_string(line_no) + ": expected two columns");
            }
            auto first = detail::trim(line.substr(0, comma));
            auto second = detail::trim(line.substr(comma + 1));
            if (!header_seen) {
                if (first != "timestamp_s" || second != "power_w") {
                    throw Error(ErrorKind::Schema, "power trace header must be 'timestamp_s,power_w'");
                }
                header_seen = true;
                continue;
            }
            auto where = "trace line " + std::to_string(line_no);
            trace.samples.push_back({ detail::parse_double(first, where), detail::parse_double(second, where) });
        }
        if (!header_seen) {
            throw Error(ErrorKind::Schema, "power trace header must be 'timestamp_s,power_w'");
        }
        return trace;
    }
};

struct EnergyEstimate {
    enum class Formula { FullProxy, Simplified, MeasuredTrace };

    // nullopt marks a phase that a measured trace cannot attribute.
    std::optional<double> prefill_j;
    std::optional<double> decode_j;
    double total_j {};
    Formula formula { Formula::Simplified };

    [[nodiscard]] auto attributed() const -> bool { return prefill_j.has_value() && decode_j.has_value(); }

    static auto computed(double prefill, double decode, Formula formula) -> EnergyEstimate
    {
        return { prefill, decode, prefill + decode, formula };
    }

    static auto measured(double total) -> EnergyEstimate
    {
        return { std::nullopt, std::nullopt, total, Formula::MeasuredTrace };
    }
};

inline auto to_string(EnergyEstimate::Formula f) -> std::string_view
{
    switch (f) {
    case EnergyEstimate::Formula::FullProxy: return "full_proxy";
    case EnergyEstimate::Formula::Simplified: return "simplified";
    case EnergyEstimate::Formula::MeasuredTrace: return "measured_trace";
    }
    return "unknown";
}

struct HardwareProfile {
    double tdp_w {};
    double peak_flops {};
    double utilization {};

    void validate() const
    {
        detail::require(std::isfinite(tdp_w) && tdp_w > 0, ErrorKind::InvalidParameter, "tdp_w must be > 0");
        detail::require(std::isfinite(peak_flops) && peak_flops > 0, ErrorKind::InvalidParameter, "peak_flops must be > 0");
        detail::require(utilization > 0 && utilization <= 1, ErrorKind::InvalidParameter, "utilization must be in (0, 1]");
    }

    static auto from_section(ConfigSection const& s) -> HardwareProfile
    {
        HardwareProfile hw { s.require_double("tdp_w"), s.require_double("peak_flops"), s.require_double("utilization") };
        hw.validate();
        return hw;
    }
};

namespace detail {
    inline void require_pue(double pue)
    {
        require(std::isfinite(pue) && pue >= 1.0, ErrorKind::InvalidParameter, "pue must be >= 1, got " + std::to_string(pue));
    }
} // namespace detail

// eps * (T_in + omega * T_out) * sqrt(N) * PUE
inline auto estimate_energy_simplified(TokenCounts tokens, ModelProfile const& model, CalibrationConstants const& calib, double pue)
    -> EnergyEstimate
{
    detail::require_pue(pue);
    model.validate();
    calib.validate();
    auto const scale = calib.epsilon * std::sqrt(model.param_count_b) * pue;
    auto const prefill = scale * static_cast<double>(tokens.input_tokens);
    auto const decode = scale * calib.omega * static_cast<double>(tokens.output_tokens);
    return EnergyEstimate::computed(prefill, decode, EnergyEstimate::Formula::Simplified);
}

// PUE * [alpha * T_in * (N/N_ref)^beta * f(T_in) + delta * T_out * (N/N_ref)^beta]
inline auto estimate_energy_full(TokenCounts tokens, ModelProfile const& model, CalibrationConstants const& calib,
    AttentionScaling const& f, double pue) -> EnergyEstimate
{
    detail::require_pue(pue);
    model.validate();
    calib.validate();
    f.validate();
    auto const size_factor = std::pow(model.param_count_b / calib.n_ref_b, calib.beta);
    auto const t_in = static_cast<double>(tokens.input_tokens);
    auto const prefill = pue * calib.alpha * t_in * size_factor * f(t_in);
    auto const decode = pue * calib.delta * static_cast<double>(tokens.output_tokens) * size_factor;
    return EnergyEstimate::computed(prefill, decode, EnergyEstimate::Formula::FullProxy);
}

// Trapezoidal integral of power over time.
inline auto integrate_power_trace(std::span<PowerSample const> samples) -> double
{
    detail::require(samples.size() >= 2, ErrorKind::InsufficientData, "power trace needs at least 2 samples");
    double joules = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        auto const& s = samples[i];
        detail::require(std::isfinite(s.timestamp_s) && std::isfinite(s.power_w) && s.power_w >= 0, ErrorKind::MalformedTrace,
            "sample " + std::to_string(i) + ": power must be finite and >= 0");
        if (i == 0) {
            continue;
        }
        auto const& prev = samples[i - 1];
        detail::require(s.timestamp_s > prev.timestamp_s, ErrorKind::MalformedTrace,
            "sample " + std::to_string(i) + ": timestamps must be strictly increasing");
        joules += 0.5 * (prev.power_w + s.power_w) * (s.timestamp_s - prev.timestamp_s);
    }
    return joules;
}

inline auto integrate_power_trace(PowerTrace const& trace) -> double
{
    return integrate_power_trace(std::span<PowerSample const>(trace.samples));
}

// E_gpu * (1 + a_cpu + a_dram + a_io) * PUE
inline auto server_energy(double gpu_j, ServerOverheads const& overheads = {}) -> double
{
    detail::require(std::isfinite(gpu_j) && gpu_j >= 0, ErrorKind::InvalidParameter, "gpu energy must be >= 0");
    overheads.validate();
    return gpu_j * (1.0 + overheads.alpha_cpu + overheads.alpha_dram + overheads.alpha_io) * overheads.pue;
}

// Joules per FLOP: P_TDP / (F_max * utilization).
inline auto flop_energy(HardwareProfile const& hw) -> double
{
    hw.validate();
    return hw.tdp_w / (hw.peak_flops * hw.utilization);
}

// Name-keyed model profiles loaded from [model.<name>] sections.
class ModelCatalog {
public:
    ModelCatalog() = default;

    static auto from_config(ConfigDocument const& doc) -> ModelCatalog
    {
        ModelCatalog catalog;
        for (auto const& [name, section] : doc.entities("model")) {
            ModelProfile m { name, section->require_double("params_b"), section->find("provider").value_or("") };
            catalog.add(std::move(m));
        }
        return catalog;
    }

    void add(ModelProfile model)
    {
        model.validate();
        auto name = model.name;
        if (!models_.emplace(name, std::move(model)).second) {
            throw Error(ErrorKind::Conflict, "duplicate model '" + name + "'");
        }
    }

    [[nodiscard]] auto find(std::string const& name) const -> ModelProfile const*
    {
        auto it = models_.find(name);
        return it == models_.end() ? nullptr : &it->second;
    }

    [[nodiscard]] auto at(std::string const& name) const -> ModelProfile const&
    {
        if (auto const* m = find(name)) {
            return *m;
        }
        throw Error(ErrorKind::NotFound, "model '" + name + "' has no configured profile (set [model." + name + "] params_b)");
    }

    [[nodiscard]] auto size() const -> std::size_t { return models_.size(); }

private:
    std::map<std::string, ModelProfile> models_;
};

} // namespace greenllm
