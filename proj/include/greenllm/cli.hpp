#pragma once

// Command-line front end. Every subcommand builds a Report and renders it in
// the selected format; run() maps errors onto documented exit codes.
//
// Exit codes:
//   0  success
//   2  usage error (bad flags, unknown subcommand)
//   3  schema or I/O error (unreadable file, malformed config/log/trace)
//   4  missing entity (unknown model/provider/region, missing baseline row)
//   5  computation precondition failed (invalid parameter, zero pass rate,
//      empty log, insufficient variation, ...)
//   6  report written but the log had rejected rows and --allow-rejects
//      was not given

#include "carbon.hpp"
#include "compression.hpp"
#include "config.hpp"
#include "energy_model.hpp"
#include "error.hpp"
#include "optimizer.hpp"
#include "provider_registry.hpp"
#include "report.hpp"
#include "scoring.hpp"
#include "trial_store.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#ifndef GREENLLM_DATA_DIR
#define GREENLLM_DATA_DIR "data"
#endif

namespace greenllm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitSchema = 3;
inline constexpr int kExitMissing = 4;
inline constexpr int kExitPrecondition = 5;
inline constexpr int kExitRejects = 6;

inline auto exit_code_for(ErrorKind kind) -> int
{
    switch (kind) {
    case ErrorKind::Schema:
    case ErrorKind::Io:
    case ErrorKind::Conflict:
    case ErrorKind::MalformedTrace:
        return kExitSchema;
    case ErrorKind::NotFound:
    case ErrorKind::MissingBaseline:
        return kExitMissing;
    default:
        return kExitPrecondition;
    }
}

inline auto default_registry_path() -> std::string
{
    return std::string(GREENLLM_DATA_DIR) + "/providers.ini";
}

// Absolute magnitudes from default constants are far above published
// per-trial API proxy values; only relative comparisons are meaningful.
inline constexpr std::string_view kMagnitudeNote
    = "Absolute joules depend entirely on the calibration constants. With defaults (epsilon=0.15, omega=4) a "
      "100-in/20-out query on a 7B model is ~86 J, about four orders of magnitude above published per-trial API "
      "proxy values (~0.0066 J); compare estimates relatively or calibrate.";

struct RunConfig {
    std::optional<std::string> config_path;
    std::string registry_path = default_registry_path();
    std::optional<std::string> carbon_path;
    OutputFormat format { OutputFormat::Table };
    std::uint64_t seed { kDefaultSeed };
    bool allow_rejects {};
    std::optional<std::string> output_path;
};

// Everything loaded from the files named in RunConfig.
struct Context {
    RunConfig run;
    ConfigDocument config;
    CalibrationConstants calibration = CalibrationConstants::defaults();
    AttentionScaling attention;
    ServerOverheads overheads;
    ModelCatalog models;
    ProviderRegistry registry;
    CarbonTable carbon;

    static auto load(RunConfig run) -> Context
    {
        Context ctx;
        auto require_file = [](std::string const& path, char const* what) {
            if (!std::filesystem::exists(path)) {
                throw Error(ErrorKind::Io, std::string(what) + " file '" + path + "' does not exist");
            }
        };
        if (run.config_path) {
            require_file(*run.config_path, "config");
            ctx.config = ConfigDocument::load(*run.config_path);
        }
        ctx.calibration = CalibrationConstants::from_config(ctx.config);
        if (auto const* s = ctx.config.find("calibration"); s != nullptr && s->find("attention")) {
            ctx.attention = AttentionScaling::parse(*s->find("attention"));
        }
        ctx.overheads = ServerOverheads::from_config(ctx.config);
        ctx.models = ModelCatalog::from_config(ctx.config);

        require_file(run.registry_path, "provider registry");
        ctx.registry = ProviderRegistry::load(run.registry_path);

        if (run.carbon_path) {
            require_file(*run.carbon_path, "carbon table");
            ctx.carbon = CarbonTable::from_config(ConfigDocument::load(*run.carbon_path));
        } else {
            ctx.carbon = CarbonTable::from_config(ctx.config);
        }
        ctx.run = std::move(run);
        return ctx;
    }

    [[nodiscard]] auto calibration_json() const -> Report::Json
    {
        return {
            { "alpha", calibration.alpha },
            { "delta", calibration.delta },
            { "beta", calibration.beta },
            { "epsilon", calibration.epsilon },
            { "omega", calibration.omega },
            { "n_ref_b", calibration.n_ref_b },
            { "epsilon_comp", calibration.epsilon_comp },
            { "attention", attention.describe() },
        };
    }

    [[nodiscard]] auto provenance() const -> Report::Json
    {
        return {
            { "config", run.config_path.value_or("<defaults>") },
            { "registry", registry.source() },
            { "registry_providers", registry.size() },
        };
    }

    [[nodiscard]] auto resolver() const -> EnergyResolver { return { &models, &registry, calibration }; }
};

namespace detail {
    // Outcome of ingesting --log for the log-driven subcommands.
    struct LoadedLog {
        IngestResult ingest;
        Report::Json summary;
    };

    inline auto load_log(std::string const& path) -> LoadedLog
    {
        if (!std::filesystem::exists(path)) {
            throw Error(ErrorKind::Io, "log file '" + path + "' does not exist");
        }
        auto result = ingest_file(path);
        Report::Json summary = {
            { "log", path },
            { "total_rows", result.total_rows },
            { "accepted", result.records.size() },
            { "rejected", result.rejections.size() },
        };
        return { std::move(result), std::move(summary) };
    }

    inline auto aggregate_columns() -> std::vector<Column>
    {
        return { { "model" }, { "compression_ratio", 2 }, { "n" }, { "passes" }, { "pass_rate" }, { "pass_rate_pct", 1 },
            { "mean_output_tokens", 1 }, { "mean_energy_j" }, { "mean_cost_usd" }, { "energy_source" } };
    }

    inline auto aggregate_row_json(AggregateRow const& row) -> Report::Json
    {
        return {
            { "model", row.model ? Report::Json(*row.model) : Report::Json(nullptr) },
            { "compression_ratio", row.compression_ratio ? Report::Json(*row.compression_ratio) : Report::Json(nullptr) },
            { "n", row.n },
            { "passes", row.passes },
            { "pass_rate", row.pass_rate() },
            { "pass_rate_pct", 100.0 * row.pass_rate() },
            { "mean_output_tokens", row.mean_output_tokens },
            { "mean_energy_j", row.mean_energy_j },
            { "mean_cost_usd", row.mean_cost_usd },
            { "energy_source", std::string(to_string(row.energy_source)) },
        };
    }

    // Candidates from an aggregate report (JSON) emitted by `aggregate`.
    inline auto load_candidates(std::string const& path) -> std::vector<CandidateConfig>
    {
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(greenllm::detail::read_file(path));
        } catch (nlohmann::json::exception const& e) {
            throw Error(ErrorKind::Schema, "candidate file '" + path + "' is not valid JSON: " + e.what());
        }
        if (!doc.is_object() || !doc.contains("rows") || !doc.at("rows").is_array()) {
            throw Error(ErrorKind::Schema, "candidate file '" + path + "' is not an aggregate report");
        }
        std::vector<CandidateConfig> out;
        for (auto const& row : doc.at("rows")) {
            try {
                CandidateConfig c;
                c.model = row.at("model").is_null() ? "*" : row.at("model").get<std::string>();
                c.compression_ratio = row.at("compression_ratio").is_null() ? 1.0 : row.at("compression_ratio").get<double>();
                c.cost_usd = row.at("mean_cost_usd").get<double>();
                c.energy_j = row.at("mean_energy_j").get<double>();
                c.quality = row.at("pass_rate").get<double>();
                c.validate();
                out.push_back(std::move(c));
            } catch (nlohmann::json::exception const& e) {
                throw Error(ErrorKind::Schema, "candidate file '" + path + "': " + e.what());
            }
        }
        return out;
    }

    inline auto candidates_from_rows(std::vector<AggregateRow> const& rows) -> std::vector<CandidateConfig>
    {
        std::vector<CandidateConfig> out;
        for (auto const& r : rows) {
            out.push_back({ r.model.value_or("*"), r.compression_ratio.value_or(1.0), r.mean_cost_usd, r.mean_energy_j, r.pass_rate() });
        }
        return out;
    }

    inline auto parse_weights(std::string const& text) -> ObjectiveWeights
    {
        std::vector<double> w;
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ',')) {
            try {
                w.push_back(greenllm::detail::parse_double(item, "--weights"));
            } catch (Error const& e) {
                throw Error(ErrorKind::InvalidParameter, e.what());
            }
        }
        if (w.size() != 3) {
            throw Error(ErrorKind::InvalidParameter, "--weights needs three comma-separated values (cost,energy,quality)");
        }
        return { w[0], w[1], w[2] };
    }

    inline auto candidate_json(CandidateConfig const& c) -> Report::Json
    {
        return { { "model", c.model }, { "compression_ratio", c.compression_ratio }, { "cost_usd", c.cost_usd },
            { "energy_j", c.energy_j }, { "quality", c.quality } };
    }
} // namespace detail

// ---------------------------------------------------------------------------
// Subcommand implementations. Each returns the report; log-driven ones also
// report whether rows were rejected through `rejected`.

struct EstimateArgs {
    std::optional<std::uint64_t> tokens_in;
    std::optional<std::uint64_t> tokens_out;
    std::optional<std::string> model;
    std::optional<std::string> provider;
    std::string formula = "simplified";
    std::optional<double> params_b;
    std::optional<double> pue;
    std::optional<std::string> trace;
    bool server_overheads {};
    std::optional<std::string> hardware;
};

inline auto cmd_estimate(Context const& ctx, EstimateArgs const& a) -> Report
{
    Report report;
    report.name = "estimate";
    report.columns = { { "formula" }, { "prefill_j" }, { "decode_j" }, { "total_j" } };
    report.meta["provenance"] = ctx.provenance();

    std::optional<ProviderProfile> provider;
    auto provider_name = a.provider;

    if (a.trace) {
        if (!std::filesystem::exists(*a.trace)) {
            throw Error(ErrorKind::Io, "trace file '" + *a.trace + "' does not exist");
        }
        auto trace = PowerTrace::parse_csv(greenllm::detail::read_file(*a.trace));
        auto gpu_j = integrate_power_trace(trace);
        auto total = a.server_overheads ? server_energy(gpu_j, ctx.overheads) : gpu_j;
        auto estimate = EnergyEstimate::measured(total);
        if (provider_name) {
            provider = ctx.registry.at(*provider_name);
            estimate = apply_provider_adjustment(estimate, *provider);
        }
        report.meta["trace"] = *a.trace;
        report.meta["samples"] = trace.samples.size();
        report.meta["gpu_j"] = gpu_j;
        report.meta["server_overheads"] = a.server_overheads
            ? Report::Json { { "alpha_cpu", ctx.overheads.alpha_cpu }, { "alpha_dram", ctx.overheads.alpha_dram },
                  { "alpha_io", ctx.overheads.alpha_io }, { "pue", ctx.overheads.pue } }
            : Report::Json(nullptr);
        report.meta["provider"] = provider ? Report::Json(provider->name) : Report::Json(nullptr);
        report.meta["efficiency_factor"] = provider ? provider->efficiency_factor : 1.0;
        report.add_row({ { "formula", std::string(to_string(estimate.formula)) }, { "prefill_j", "unattributed" },
            { "decode_j", "unattributed" }, { "total_j", estimate.total_j } });
        return report;
    }

    if (!a.tokens_in || !a.tokens_out) {
        throw Error(ErrorKind::InvalidParameter, "estimate needs --in and --out (or --trace)");
    }

    ModelProfile model;
    if (a.params_b) {
        model = { a.model.value_or("unnamed"), *a.params_b, "" };
        if (a.model) {
            if (auto const* known = ctx.models.find(*a.model)) {
                model.provider = known->provider;
            }
        }
    } else if (a.model) {
        if (ctx.models.find(*a.model) == nullptr) {
            throw Error(ErrorKind::NotFound,
                "model '" + *a.model + "' is not configured; pass --params-b or add [model." + *a.model + "] params_b to --config");
        }
        model = ctx.models.at(*a.model);
    } else {
        throw Error(ErrorKind::InvalidParameter, "estimate needs --params-b or a configured --model");
    }
    if (!provider_name && !model.provider.empty()) {
        provider_name = model.provider;
    }
    if (provider_name) {
        provider = ctx.registry.at(*provider_name);
    }

    double pue = 1.0;
    std::string pue_source = "default";
    if (a.pue) {
        pue = *a.pue;
        pue_source = "flag";
    } else if (provider) {
        pue = provider->est_pue;
        pue_source = "provider:" + provider->name;
    }

    TokenCounts tokens { *a.tokens_in, *a.tokens_out };
    EnergyEstimate estimate;
    if (a.formula == "simplified") {
        estimate = estimate_energy_simplified(tokens, model, ctx.calibration, pue);
    } else if (a.formula == "full") {
        estimate = estimate_energy_full(tokens, model, ctx.calibration, ctx.attention, pue);
    } else {
        throw Error(ErrorKind::InvalidParameter, "unknown formula '" + a.formula + "' (simplified|full)");
    }
    if (provider) {
        estimate = apply_provider_adjustment(estimate, *provider);
    }

    report.meta["model"] = model.name;
    report.meta["params_b"] = model.param_count_b;
    report.meta["input_tokens"] = tokens.input_tokens;
    report.meta["output_tokens"] = tokens.output_tokens;
    report.meta["pue"] = pue;
    report.meta["pue_source"] = pue_source;
    report.meta["provider"] = provider ? Report::Json(provider->name) : Report::Json(nullptr);
    report.meta["efficiency_factor"] = provider ? provider->efficiency_factor : 1.0;
    report.meta["constants"] = ctx.calibration_json();
    report.meta["note"] = std::string(kMagnitudeNote);
    if (a.hardware) {
        auto const* section = ctx.config.find("hardware." + *a.hardware);
        if (section == nullptr) {
            throw Error(ErrorKind::NotFound, "hardware profile '" + *a.hardware + "' is not configured");
        }
        report.meta["joules_per_flop"] = flop_energy(HardwareProfile::from_section(*section));
    }
    report.add_row({ { "formula", std::string(to_string(estimate.formula)) }, { "prefill_j", *estimate.prefill_j },
        { "decode_j", *estimate.decode_j }, { "total_j", estimate.total_j } });
    return report;
}

struct RoiArgs {
    double ratio {};
    std::uint64_t tokens { 1000 };
    std::optional<double> target_params_b;
    std::optional<std::string> target_model;
    double compressor_params_b { 0.35 };
    double pue { 1.0 };
    bool generalized {};
    std::optional<std::uint64_t> baseline_output_tokens;
    std::optional<std::uint64_t> compressed_output_tokens;
};

inline auto cmd_roi(Context const& ctx, RoiArgs const& a) -> Report
{
    ModelProfile target;
    if (a.target_params_b) {
        target = { a.target_model.value_or("target"), *a.target_params_b, "" };
    } else if (a.target_model) {
        target = ctx.models.at(*a.target_model);
    } else {
        throw Error(ErrorKind::InvalidParameter, "roi needs --target-params-b or a configured --target-model");
    }
    CompressionPlan plan { a.ratio, a.tokens, a.compressor_params_b };
    plan.validate();

    auto spent = compression_energy(plan, ctx.calibration);
    auto saved = energy_saved(plan, target, ctx.calibration, a.pue);
    auto roi = a.generalized ? energy_roi_general(plan, target, ctx.calibration, a.pue) : energy_roi(plan, target);

    Report report;
    report.name = "roi";
    report.columns = { { "compression_energy_j" }, { "energy_saved_j" }, { "roi" }, { "break_even_queries" } };
    report.meta["provenance"] = ctx.provenance();
    report.meta["ratio"] = a.ratio;
    report.meta["original_tokens"] = a.tokens;
    report.meta["target_params_b"] = target.param_count_b;
    report.meta["compressor_params_b"] = a.compressor_params_b;
    report.meta["pue"] = a.pue;
    report.meta["roi_form"] = a.generalized ? "generalized (saved / spent with configured constants)"
                                            : "(1 - r) * sqrt(N_target) / sqrt(N_compressor)";
    report.meta["constants"] = ctx.calibration_json();
    report.meta["compression_energy_note"] = std::string(kCompressionEnergyNote);

    Report::Json row = { { "compression_energy_j", spent }, { "energy_saved_j", saved }, { "roi", roi },
        { "break_even_queries", roi > 0 ? Report::Json(break_even_queries(roi)) : Report::Json(nullptr) } };
    if (a.baseline_output_tokens || a.compressed_output_tokens) {
        if (!a.baseline_output_tokens || !a.compressed_output_tokens) {
            throw Error(ErrorKind::InvalidParameter, "net delta needs both --baseline-out and --compressed-out");
        }
        auto compressed_in = static_cast<std::uint64_t>(std::llround(a.ratio * static_cast<double>(a.tokens)));
        TokenCounts baseline { a.tokens, *a.baseline_output_tokens };
        TokenCounts compressed { compressed_in, *a.compressed_output_tokens };
        row["net_energy_delta_j"] = net_energy_delta(plan, target, baseline, compressed, ctx.calibration, a.pue);
        report.columns.push_back({ "net_energy_delta_j" });
    }
    report.add_row(std::move(row));
    return report;
}

struct CarbonArgs {
    double energy_j {};
    std::optional<std::string> region;
    std::optional<double> grams_per_kwh;
};

inline auto cmd_carbon(Context const& ctx, CarbonArgs const& a) -> Report
{
    CarbonIntensity intensity;
    if (a.grams_per_kwh) {
        intensity = { a.region.value_or("custom"), *a.grams_per_kwh };
    } else if (a.region) {
        intensity = ctx.carbon.at(*a.region);
    } else {
        throw Error(ErrorKind::InvalidParameter, "carbon needs --region (from a carbon table) or --grams-per-kwh");
    }
    Report report;
    report.name = "carbon";
    report.columns = { { "region" }, { "grams_per_kwh" }, { "energy_j" }, { "energy_kwh" }, { "grams_co2" } };
    report.add_row({ { "region", intensity.region }, { "grams_per_kwh", intensity.grams_per_kwh }, { "energy_j", a.energy_j },
        { "energy_kwh", joules_to_kwh(a.energy_j) }, { "grams_co2", co2_for_energy(a.energy_j, intensity) } });
    return report;
}

inline auto cmd_ingest(Context const& ctx, detail::LoadedLog const& log, bool emit_records) -> Report
{
    Report report;
    report.name = "ingest";
    report.meta = log.summary;
    report.meta["provenance"] = ctx.provenance();
    if (emit_records) {
        report.columns = { { "provider" }, { "model" }, { "benchmark" }, { "compression_ratio" }, { "input_tokens" },
            { "output_tokens" }, { "passed" }, { "cost_usd" }, { "run_index" }, { "energy_j" }, { "quality_score" } };
        for (auto const& r : log.ingest.records) {
            auto j = to_json(r);
            Report::Json row;
            for (auto const& c : report.columns) {
                row[c.name] = j.contains(c.name) ? Report::Json::parse(j.at(c.name).dump()) : Report::Json(nullptr);
            }
            report.add_row(std::move(row));
        }
    } else {
        report.columns = { { "row" }, { "reason" } };
        for (auto const& rej : log.ingest.rejections) {
            report.add_row({ { "row", rej.row }, { "reason", rej.reason } });
        }
    }
    return report;
}

inline auto parse_group_by(std::string const& text) -> GroupBy
{
    GroupBy g { false, false };
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto t = std::string(greenllm::detail::trim(item));
        if (t == "model") {
            g.model = true;
        } else if (t == "ratio") {
            g.ratio = true;
        } else if (t == "none" || t.empty()) {
        } else {
            throw Error(ErrorKind::InvalidParameter, "unknown group-by key '" + t + "' (model, ratio)");
        }
    }
    return g;
}

inline auto cmd_aggregate(Context const& ctx, detail::LoadedLog const& log, GroupBy group_by) -> Report
{
    auto resolver = ctx.resolver();
    auto rows = aggregate(log.ingest.records, group_by, &resolver);
    Report report;
    report.name = "aggregate";
    report.meta = log.summary;
    report.meta["group_by"] = { { "model", group_by.model }, { "ratio", group_by.ratio } };
    report.meta["provenance"] = ctx.provenance();
    report.meta["constants"] = ctx.calibration_json();
    report.columns = detail::aggregate_columns();
    for (auto const& r : rows) {
        report.add_row(detail::aggregate_row_json(r));
    }
    return report;
}

inline auto cmd_deltas(Context const& ctx, detail::LoadedLog const& log) -> Report
{
    auto resolver = ctx.resolver();
    auto rows = aggregate(log.ingest.records, { true, true }, &resolver);
    auto deltas = energy_delta_vs_baseline(rows);
    Report report;
    report.name = "deltas";
    report.meta = log.summary;
    report.meta["provenance"] = ctx.provenance();
    report.meta["baseline_ratio"] = 1.0;
    report.columns = { { "model" }, { "compression_ratio", 2 }, { "delta_energy_pct", 1 }, { "baseline_ratio", 1 } };
    for (auto const& d : deltas) {
        report.add_row({ { "model", d.model }, { "compression_ratio", d.compression_ratio }, { "delta_energy_pct", d.delta_energy_pct },
            { "baseline_ratio", d.baseline_ratio } });
    }
    return report;
}

inline auto cmd_gas(Context const& ctx, detail::LoadedLog const& log) -> Report
{
    auto resolver = ctx.resolver();
    auto rows = aggregate(log.ingest.records, { true, false }, &resolver);
    std::vector<ModelOutcome> outcomes;
    std::vector<GasExclusion> skipped;
    for (auto const& r : rows) {
        if (!(r.mean_energy_j > 0)) {
            skipped.push_back({ *r.model, "mean energy per trial is 0; not scored" });
            continue;
        }
        outcomes.push_back(ModelOutcome::from_trial(*r.model, r.pass_rate(), r.mean_energy_j));
    }
    Report report;
    report.name = "gas";
    report.meta = log.summary;
    report.meta["provenance"] = ctx.provenance();
    report.meta["quality_gate_rule"] = std::string(kQualityGateRule);
    report.columns = { { "model" }, { "pass_rate_pct", 2 }, { "energy_per_trial_j" }, { "energy_per_success_j" }, { "gas_trial", 1 },
        { "gas_success", 1 }, { "gas_quality_gated", 1 } };

    Report::Json exclusions = Report::Json::array();
    for (auto const& e : skipped) {
        exclusions.push_back({ { "model", e.model }, { "reason", e.reason } });
    }
    if (!outcomes.empty()) {
        auto gas = gas_scores(outcomes);
        report.meta["trial_reference"] = gas.trial_reference;
        report.meta["success_reference"] = gas.success_reference.empty() ? Report::Json(nullptr) : Report::Json(gas.success_reference);
        for (std::size_t i = 0; i < outcomes.size(); ++i) {
            auto const& o = outcomes[i];
            auto const& s = gas.scores[i];
            auto opt = [](std::optional<double> v) { return v ? Report::Json(*v) : Report::Json(nullptr); };
            report.add_row({ { "model", o.model }, { "pass_rate_pct", 100.0 * o.pass_rate }, { "energy_per_trial_j", o.energy_per_trial_j },
                { "energy_per_success_j", opt(o.energy_per_success_j) }, { "gas_trial", s.gas_trial }, { "gas_success", opt(s.gas_success) },
                { "gas_quality_gated", opt(s.gas_quality_gated) } });
        }
        for (auto const& e : gas.exclusions) {
            exclusions.push_back({ { "model", e.model }, { "reason", e.reason } });
        }
    }
    report.extra["exclusions"] = exclusions;
    return report;
}

inline auto cmd_pareto(Context const& ctx, std::vector<CandidateConfig> const& candidates, Report::Json source) -> Report
{
    std::vector<ParetoPoint> points;
    for (auto const& c : candidates) {
        points.push_back({ c.model, c.compression_ratio, c.energy_j, c.quality });
    }
    Report report;
    report.name = "pareto";
    report.meta = std::move(source);
    report.meta["provenance"] = ctx.provenance();
    report.meta["axes"] = "minimize energy_j, maximize quality (pass rate)";
    report.meta["candidates"] = points.size();
    report.columns = { { "model" }, { "compression_ratio", 2 }, { "energy_j" }, { "quality" } };
    if (!points.empty()) {
        for (auto const& p : pareto_frontier(points)) {
            report.add_row({ { "model", p.model }, { "compression_ratio", p.compression_ratio }, { "energy_j", p.energy_j }, { "quality", p.quality } });
        }
    }
    return report;
}

inline auto cmd_optimize(Context const& ctx, std::vector<CandidateConfig> const& candidates, std::string const& weights_text,
    std::optional<std::size_t> sweep, Report::Json source) -> Report
{
    Report report;
    report.meta = std::move(source);
    report.meta["provenance"] = ctx.provenance();
    report.meta["normalization"] = "cost and energy min-max over the candidate set; quality raw";
    report.meta["tie_break"] = "lexicographic (model, compression_ratio)";
    report.meta["candidates"] = candidates.size();
    if (sweep) {
        report.name = "optimize-sweep";
        report.columns = { { "lambda_cost", 3 }, { "lambda_energy", 3 }, { "lambda_quality", 3 }, { "model" }, { "compression_ratio", 2 },
            { "cost_usd" }, { "energy_j" }, { "quality" }, { "objective" } };
        if (!candidates.empty()) {
            for (auto const& cell : weight_sweep(candidates, *sweep)) {
                auto const& c = cell.selection.candidate;
                report.add_row({ { "lambda_cost", cell.lambda_cost }, { "lambda_energy", cell.lambda_energy },
                    { "lambda_quality", cell.lambda_quality }, { "model", c.model }, { "compression_ratio", c.compression_ratio },
                    { "cost_usd", c.cost_usd }, { "energy_j", c.energy_j }, { "quality", c.quality }, { "objective", cell.selection.objective } });
            }
        }
        return report;
    }
    auto weights = detail::parse_weights(weights_text);
    report.name = "optimize";
    report.meta["weights"] = { { "cost", weights.cost() }, { "energy", weights.energy() }, { "quality", weights.quality() } };
    report.columns = { { "model" }, { "compression_ratio", 2 }, { "cost_usd" }, { "energy_j" }, { "quality" }, { "objective" } };
    if (!candidates.empty()) {
        auto sel = optimize(candidates, weights);
        auto row = detail::candidate_json(sel.candidate);
        row["objective"] = sel.objective;
        report.add_row(std::move(row));
    }
    return report;
}

inline auto cmd_drift(Context const& ctx, detail::LoadedLog const& log, std::size_t permutations) -> Report
{
    Report report;
    report.name = "drift";
    report.meta = log.summary;
    report.meta["provenance"] = ctx.provenance();
    report.meta["regressor"] = "run_index rescaled to [0, 1]";
    report.meta["test"] = "two-sided permutation test on the OLS slope";
    report.columns = { { "n" }, { "slope" }, { "p_value" }, { "permutations" }, { "seed" } };
    if (!log.ingest.records.empty()) {
        auto d = drift_test(log.ingest.records, permutations, ctx.run.seed);
        report.add_row({ { "n", d.n }, { "slope", d.slope }, { "p_value", d.p_value }, { "permutations", d.permutations }, { "seed", d.seed } });
    }
    return report;
}

// ---------------------------------------------------------------------------

inline auto run(std::vector<std::string> const& args, std::ostream& out, std::ostream& err) -> int
{
    CLI::App app { "Token-based LLM inference energy, compression accounting, carbon, scoring and routing." };
    app.name("greenllm");
    app.require_subcommand(1);
    app.fallthrough();

    RunConfig run_cfg;
    std::string format = "table";
    app.add_option("--config", run_cfg.config_path, "Calibration / model / server / hardware / carbon configuration file");
    app.add_option("--registry", run_cfg.registry_path, "Provider registry file")->capture_default_str();
    app.add_option("--carbon-table", run_cfg.carbon_path, "Carbon intensity table ([carbon.<region>] sections)");
    app.add_option("--format", format, "Output format: table, csv (delimited) or json (structured)")->capture_default_str();
    app.add_option("--seed", run_cfg.seed, "Random seed for the drift permutation test")->capture_default_str();
    app.add_flag("--allow-rejects", run_cfg.allow_rejects, "Exit 0 even when log rows were rejected");
    app.add_option("--output", run_cfg.output_path, "Write the report to this file instead of stdout");

    EstimateArgs est;
    auto* estimate = app.add_subcommand("estimate", "Estimate inference energy from token counts or a power trace");
    estimate->add_option("--in", est.tokens_in, "Input tokens");
    estimate->add_option("--out", est.tokens_out, "Output tokens");
    estimate->add_option("--model", est.model, "Model name (resolved from [model.<name>] in --config)");
    estimate->add_option("--provider", est.provider, "Provider name from the registry");
    estimate->add_option("--formula", est.formula, "simplified or full")->capture_default_str();
    estimate->add_option("--params-b", est.params_b, "Parameter count in billions");
    estimate->add_option("--pue", est.pue, "PUE override");
    estimate->add_option("--trace", est.trace, "Power trace CSV (timestamp_s,power_w) to integrate instead");
    estimate->add_flag("--server-overheads", est.server_overheads, "Apply CPU/DRAM/IO overheads and PUE to a trace");
    estimate->add_option("--hardware", est.hardware, "Also report J/FLOP for [hardware.<name>]");

    RoiArgs roi;
    auto* roi_cmd = app.add_subcommand("roi", "Compression energy, savings, ROI and break-even");
    roi_cmd->add_option("--ratio", roi.ratio, "Compression ratio r in (0, 1]")->required();
    roi_cmd->add_option("--tokens", roi.tokens, "Original prompt tokens")->capture_default_str();
    roi_cmd->add_option("--target-params-b", roi.target_params_b, "Target model size in billions");
    roi_cmd->add_option("--target-model", roi.target_model, "Configured target model");
    roi_cmd->add_option("--compressor-params-b", roi.compressor_params_b, "Compressor size in billions")->capture_default_str();
    roi_cmd->add_option("--pue", roi.pue, "PUE on the savings side")->capture_default_str();
    roi_cmd->add_flag("--generalized", roi.generalized, "Use configured epsilon/epsilon_comp/PUE instead of the cancelled form");
    roi_cmd->add_option("--baseline-out", roi.baseline_output_tokens, "Observed output tokens without compression");
    roi_cmd->add_option("--compressed-out", roi.compressed_output_tokens, "Observed output tokens with compression");

    CarbonArgs carbon;
    auto* carbon_cmd = app.add_subcommand("carbon", "Convert joules to grams of CO2");
    carbon_cmd->add_option("--energy-j", carbon.energy_j, "Energy in joules")->required();
    carbon_cmd->add_option("--region", carbon.region, "Region from the carbon table");
    carbon_cmd->add_option("--grams-per-kwh", carbon.grams_per_kwh, "Explicit intensity");

    std::string log_path;
    std::string group_by = "model,ratio";
    bool emit_records = false;
    std::size_t permutations = kDefaultPermutations;
    std::optional<std::string> candidates_path;
    std::string weights = "0.4,0.4,0.2";
    std::optional<std::size_t> sweep;

    auto* ingest_cmd = app.add_subcommand("ingest", "Validate a trial log and list rejected rows");
    ingest_cmd->add_option("--log", log_path, "Trial log (CSV or JSON)")->required();
    ingest_cmd->add_flag("--records", emit_records, "Emit accepted records instead of rejections");

    auto* aggregate_cmd = app.add_subcommand("aggregate", "Pass rates and mean tokens/energy/cost per group");
    aggregate_cmd->add_option("--log", log_path, "Trial log")->required();
    aggregate_cmd->add_option("--group-by", group_by, "Comma list of model, ratio")->capture_default_str();

    auto* deltas_cmd = app.add_subcommand("deltas", "Energy change vs. the r = 1.0 baseline per model");
    deltas_cmd->add_option("--log", log_path, "Trial log")->required();

    auto* gas_cmd = app.add_subcommand("gas", "Green AI Scores per model");
    gas_cmd->add_option("--log", log_path, "Trial log")->required();

    auto* pareto_cmd = app.add_subcommand("pareto", "Quality-energy Pareto frontier over (model, ratio)");
    pareto_cmd->add_option("--log", log_path, "Trial log");
    pareto_cmd->add_option("--candidates", candidates_path, "Aggregate report (JSON) to use instead of a log");

    auto* optimize_cmd = app.add_subcommand("optimize", "Pick the configuration minimizing the weighted objective");
    optimize_cmd->add_option("--log", log_path, "Trial log");
    optimize_cmd->add_option("--candidates", candidates_path, "Aggregate report (JSON) to use instead of a log");
    optimize_cmd->add_option("--weights", weights, "cost,energy,quality weights")->capture_default_str();
    optimize_cmd->add_option("--sweep", sweep, "Sweep a simplex weight grid with this resolution instead");

    auto* drift_cmd = app.add_subcommand("drift", "Run-order pass-rate drift with a permutation p-value");
    drift_cmd->add_option("--log", log_path, "Trial log")->required();
    drift_cmd->add_option("--permutations", permutations, "Permutation count")->capture_default_str();

    std::vector<char const*> argv { "greenllm" };
    for (auto const& a : args) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (CLI::CallForHelp const& e) {
        out << app.help();
        return kExitOk;
    } catch (CLI::CallForAllHelp const& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (CLI::ParseError const& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    Report report;
    bool rejected = false;
    bool empty_log = false;
    try {
        run_cfg.format = parse_output_format(format);
        auto ctx = Context::load(run_cfg);

        auto with_log = [&](auto&& fn) {
            auto log = detail::load_log(log_path);
            rejected = !log.ingest.rejections.empty();
            // An empty log still renders a schema-valid report; the exit code flags it.
            empty_log = log.ingest.records.empty();
            return fn(log);
        };
        auto candidates_from = [&](Report::Json& source) -> std::vector<CandidateConfig> {
            if (candidates_path) {
                source = { { "candidates_file", *candidates_path } };
                return detail::load_candidates(*candidates_path);
            }
            if (log_path.empty()) {
                throw Error(ErrorKind::InvalidParameter, "need --log or --candidates");
            }
            auto log = detail::load_log(log_path);
            rejected = !log.ingest.rejections.empty();
            empty_log = log.ingest.records.empty();
            source = log.summary;
            auto resolver = ctx.resolver();
            return detail::candidates_from_rows(aggregate(log.ingest.records, { true, true }, &resolver));
        };

        if (estimate->parsed()) {
            report = cmd_estimate(ctx, est);
        } else if (roi_cmd->parsed()) {
            report = cmd_roi(ctx, roi);
        } else if (carbon_cmd->parsed()) {
            report = cmd_carbon(ctx, carbon);
        } else if (ingest_cmd->parsed()) {
            report = with_log([&](auto const& log) { return cmd_ingest(ctx, log, emit_records); });
            empty_log = false; // an ingest report of an empty log is still a complete answer
        } else if (aggregate_cmd->parsed()) {
            auto g = parse_group_by(group_by);
            report = with_log([&](auto const& log) { return cmd_aggregate(ctx, log, g); });
        } else if (deltas_cmd->parsed()) {
            report = with_log([&](auto const& log) { return cmd_deltas(ctx, log); });
        } else if (gas_cmd->parsed()) {
            report = with_log([&](auto const& log) { return cmd_gas(ctx, log); });
        } else if (pareto_cmd->parsed()) {
            Report::Json source;
            auto candidates = candidates_from(source);
            report = cmd_pareto(ctx, candidates, source);
        } else if (optimize_cmd->parsed()) {
            Report::Json source;
            auto candidates = candidates_from(source);
            report = cmd_optimize(ctx, candidates, weights, sweep, source);
        } else if (drift_cmd->parsed()) {
            report = with_log([&](auto const& log) { return cmd_drift(ctx, log, permutations); });
        }
    } catch (Error const& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e.kind());
    }

    if (run_cfg.output_path) {
        std::ofstream file(*run_cfg.output_path, std::ios::binary);
        if (!file) {
            err << "error: io: cannot write '" << *run_cfg.output_path << "'\n";
            return kExitSchema;
        }
        render(report, run_cfg.format, file);
    } else {
        render(report, run_cfg.format, out);
    }

    if (empty_log) {
        err << "error: empty-input: log has no accepted records\n";
        return kExitPrecondition;
    }
    if (rejected && !run_cfg.allow_rejects) {
        err << "error: log contains rejected rows (use --allow-rejects to accept)\n";
        return kExitRejects;
    }
    return kExitOk;
}

inline auto run(int argc, char** argv) -> int
{
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, std::cout, std::cerr);
}

} // namespace greenllm::cli
