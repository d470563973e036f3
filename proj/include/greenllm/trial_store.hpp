#pragma once

// Trial-log ingestion and the aggregates built on it: per-group pass rates and
// means, energy deltas against the uncompressed baseline, energy per success,
// and a run-order drift test.
//
// Log schema (CSV, header required, columns matched by name):
//   provider,model,benchmark,compression_ratio,input_tokens,output_tokens,
//   passed,cost_usd,run_index[,energy_j][,quality_score]
// A JSON array of objects with the same field names is also accepted.

#include "config.hpp"
#include "energy_model.hpp"
#include "error.hpp"
#include "provider_registry.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace greenllm {

struct TrialRecord {
    std::string provider;
    std::string model;
    std::string benchmark;
    double compression_ratio { 1.0 };
    std::uint64_t input_tokens {};
    std::uint64_t output_tokens {};
    bool passed {};
    double cost_usd {};
    std::uint64_t run_index {};
    std::optional<double> energy_j;
    // Opaque; carried through, never computed.
    std::optional<double> quality_score;

    friend auto operator==(TrialRecord const&, TrialRecord const&) -> bool = default;
};

struct Rejection {
    std::size_t row {}; // 1-based data row (header excluded)
    std::string reason;
};

struct IngestResult {
    std::vector<TrialRecord> records;
    std::vector<Rejection> rejections;
    std::size_t total_rows {};
};

inline constexpr std::array<std::string_view, 9> kRequiredColumns {
    "provider", "model", "benchmark", "compression_ratio", "input_tokens", "output_tokens", "passed", "cost_usd", "run_index"
};
inline constexpr std::array<std::string_view, 2> kOptionalColumns { "energy_j", "quality_score" };

namespace detail {
    // Shortest representation that round-trips.
    inline auto format_double(double v) -> std::string
    {
        std::array<char, 64> buf {};
        auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
        return std::string(buf.data(), ptr);
    }

    // RFC 4180 style: commas split fields, double quotes group, "" escapes.
    inline auto split_csv_line(std::string_view line) -> std::vector<std::string>
    {
        std::vector<std::string> fields(1);
        bool quoted = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            char c = line[i];
            if (quoted) {
                if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                    fields.back() += '"';
                    ++i;
                } else if (c == '"') {
                    quoted = false;
                } else {
                    fields.back() += c;
                }
            } else if (c == '"') {
                quoted = true;
            } else if (c == ',') {
                fields.emplace_back();
            } else {
                fields.back() += c;
            }
        }
        if (quoted) {
            throw Error(ErrorKind::Schema, "unterminated quoted field");
        }
        return fields;
    }

    inline auto csv_escape(std::string const& s) -> std::string
    {
        if (s.find_first_of(",\"\n") == std::string::npos) {
            return s;
        }
        std::string out = "\"";
        for (char c : s) {
            out += c;
            if (c == '"') {
                out += '"';
            }
        }
        return out + "\"";
    }

    // Range checks shared by CSV and JSON ingestion; returns a reason or "".
    inline auto record_problem(TrialRecord const& r) -> std::string
    {
        if (r.provider.empty()) {
            return "provider is empty";
        }
        if (r.model.empty()) {
            return "model is empty";
        }
        if (!(r.compression_ratio > 0 && r.compression_ratio <= 1)) {
            return "compression_ratio out of range (0, 1]: " + format_double(r.compression_ratio);
        }
        if (!(r.cost_usd >= 0)) {
            return "cost_usd must be >= 0";
        }
        if (r.energy_j && !(*r.energy_j >= 0)) {
            return "energy_j must be >= 0";
        }
        return {};
    }

    inline auto parse_bool(std::string_view text) -> bool
    {
        auto t = trim(text);
        if (t == "true") {
            return true;
        }
        if (t == "false") {
            return false;
        }
        throw Error(ErrorKind::Validation, "passed must be 'true' or 'false', got '" + std::string(t) + "'");
    }

    inline auto parse_signed_count(std::string_view text, std::string const& what) -> std::uint64_t
    {
        auto t = trim(text);
        if (!t.empty() && t.front() == '-') {
            throw Error(ErrorKind::Validation, what + " must be >= 0");
        }
        try {
            return parse_uint(t, what);
        } catch (Error const& e) {
            throw Error(ErrorKind::Validation, e.what());
        }
    }

    inline auto parse_field_double(std::string_view text, std::string const& what) -> double
    {
        try {
            return parse_double(text, what);
        } catch (Error const& e) {
            throw Error(ErrorKind::Validation, e.what());
        }
    }

    // Rejects later rows that reuse a run_index.
    inline void accept_or_reject(IngestResult& result, std::set<std::uint64_t>& seen, TrialRecord record, std::size_t row)
    {
        if (auto problem = record_problem(record); !problem.empty()) {
            result.rejections.push_back({ row, problem });
            return;
        }
        if (!seen.insert(record.run_index).second) {
            result.rejections.push_back({ row, "duplicate run_index " + std::to_string(record.run_index) });
            return;
        }
        result.records.push_back(std::move(record));
    }
} // namespace detail

inline auto ingest_csv(std::string_view text) -> IngestResult
{
    IngestResult result;
    std::vector<std::string> header;
    std::map<std::string, std::size_t> column;
    std::set<std::uint64_t> seen;
    bool header_seen = false;
    std::size_t pos = 0;
    std::size_t data_row = 0;

    while (pos < text.size()) {
        auto eol = text.find('\n', pos);
        auto line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() : eol + 1;
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        if (detail::trim(line).empty()) {
            continue;
        }
        if (!header_seen) {
            header = detail::split_csv_line(line);
            for (std::size_t i = 0; i < header.size(); ++i) {
                auto name = std::string(detail::trim(header[i]));
                bool known = std::find(kRequiredColumns.begin(), kRequiredColumns.end(), name) != kRequiredColumns.end()
                    || std::find(kOptionalColumns.begin(), kOptionalColumns.end(), name) != kOptionalColumns.end();
                if (!known) {
                    throw Error(ErrorKind::Schema, "unknown column '" + name + "'");
                }
                if (!column.emplace(name, i).second) {
                    throw Error(ErrorKind::Schema, "duplicate column '" + name + "'");
                }
            }
            for (auto required : kRequiredColumns) {
                if (!column.contains(std::string(required))) {
                    throw Error(ErrorKind::Schema, "missing required column '" + std::string(required) + "'");
                }
            }
            header_seen = true;
            continue;
        }

        ++data_row;
        ++result.total_rows;
        try {
            auto fields = detail::split_csv_line(line);
            if (fields.size() != header.size()) {
                throw Error(ErrorKind::Validation,
                    "expected " + std::to_string(header.size()) + " fields, found " + std::to_string(fields.size()));
            }
            auto field = [&](std::string const& name) -> std::string_view { return detail::trim(fields[column.at(name)]); };
            auto optional_number = [&](std::string const& name) -> std::optional<double> {
                auto it = column.find(name);
                if (it == column.end() || detail::trim(fields[it->second]).empty()) {
                    return std::nullopt;
                }
                return detail::parse_field_double(fields[it->second], name);
            };
            TrialRecord r;
            r.provider = std::string(field("provider"));
            r.model = std::string(field("model"));
            r.benchmark = std::string(field("benchmark"));
            r.compression_ratio = detail::parse_field_double(field("compression_ratio"), "compression_ratio");
            r.input_tokens = detail::parse_signed_count(field("input_tokens"), "input_tokens");
            r.output_tokens = detail::parse_signed_count(field("output_tokens"), "output_tokens");
            r.passed = detail::parse_bool(field("passed"));
            r.cost_usd = detail::parse_field_double(field("cost_usd"), "cost_usd");
            r.run_index = detail::parse_signed_count(field("run_index"), "run_index");
            r.energy_j = optional_number("energy_j");
            r.quality_score = optional_number("quality_score");
            detail::accept_or_reject(result, seen, std::move(r), data_row);
        } catch (Error const& e) {
            result.rejections.push_back({ data_row, e.what() });
        }
    }
    if (!header_seen) {
        throw Error(ErrorKind::Schema, "trial log has no header row");
    }
    return result;
}

inline auto ingest_json(std::string_view text) -> IngestResult
{
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (nlohmann::json::exception const& e) {
        throw Error(ErrorKind::Schema, std::string("trial log is not valid JSON: ") + e.what());
    }
    if (doc.is_object() && doc.contains("records")) {
        doc = doc.at("records");
    }
    if (!doc.is_array()) {
        throw Error(ErrorKind::Schema, "structured trial log must be an array of records");
    }

    IngestResult result;
    std::set<std::uint64_t> seen;
    std::size_t row = 0;
    for (auto const& item : doc) {
        ++row;
        ++result.total_rows;
        try {
            if (!item.is_object()) {
                throw Error(ErrorKind::Validation, "record is not an object");
            }
            for (auto required : kRequiredColumns) {
                if (!item.contains(std::string(required))) {
                    throw Error(ErrorKind::Schema, "missing required field '" + std::string(required) + "'");
                }
            }
            auto number = [&](char const* key) -> double {
                auto const& v = item.at(key);
                if (!v.is_number()) {
                    throw Error(ErrorKind::Validation, std::string(key) + " must be a number");
                }
                return v.get<double>();
            };
            auto count = [&](char const* key) -> std::uint64_t {
                auto const& v = item.at(key);
                if (!v.is_number_unsigned()) {
                    throw Error(ErrorKind::Validation, std::string(key) + " must be a nonnegative integer");
                }
                return v.get<std::uint64_t>();
            };
            auto text_field = [&](char const* key) -> std::string {
                auto const& v = item.at(key);
                if (!v.is_string()) {
                    throw Error(ErrorKind::Validation, std::string(key) + " must be a string");
                }
                return v.get<std::string>();
            };
            TrialRecord r;
            r.provider = text_field("provider");
            r.model = text_field("model");
            r.benchmark = text_field("benchmark");
            r.compression_ratio = number("compression_ratio");
            r.input_tokens = count("input_tokens");
            r.output_tokens = count("output_tokens");
            auto const& passed = item.at("passed");
            if (passed.is_boolean()) {
                r.passed = passed.get<bool>();
            } else if (passed.is_string()) {
                r.passed = detail::parse_bool(passed.get<std::string>());
            } else {
                throw Error(ErrorKind::Validation, "passed must be a boolean");
            }
            r.cost_usd = number("cost_usd");
            r.run_index = count("run_index");
            if (item.contains("energy_j") && !item.at("energy_j").is_null()) {
                r.energy_j = number("energy_j");
            }
            if (item.contains("quality_score") && !item.at("quality_score").is_null()) {
                r.quality_score = number("quality_score");
            }
            detail::accept_or_reject(result, seen, std::move(r), row);
        } catch (Error const& e) {
            result.rejections.push_back({ row, e.what() });
        }
    }
    return result;
}

// JSON when the document starts with '[' or '{', CSV otherwise.
inline auto ingest(std::string_view text) -> IngestResult
{
    auto t = detail::trim(text);
    if (!t.empty() && (t.front() == '[' || t.front() == '{')) {
        return ingest_json(t);
    }
    return ingest_csv(text);
}

inline auto ingest_file(std::string const& path) -> IngestResult
{
    return ingest(detail::read_file(path));
}

// Writes energy_j / quality_score columns only when some record carries them.
inline auto serialize_csv(std::vector<TrialRecord> const& records) -> std::string
{
    bool with_energy = std::any_of(records.begin(), records.end(), [](auto const& r) { return r.energy_j.has_value(); });
    bool with_quality = std::any_of(records.begin(), records.end(), [](auto const& r) { return r.quality_score.has_value(); });
    std::string out = "provider,model,benchmark,compression_ratio,input_tokens,output_tokens,passed,cost_usd,run_index";
    if (with_energy) {
        out += ",energy_j";
    }
    if (with_quality) {
        out += ",quality_score";
    }
    out += '\n';
    for (auto const& r : records) {
        out += detail::csv_escape(r.provider) + ',' + detail::csv_escape(r.model) + ',' + detail::csv_escape(r.benchmark) + ','
            + detail::format_double(r.compression_ratio) + ',' + std::to_string(r.input_tokens) + ','
            + std::to_string(r.output_tokens) + ',' + (r.passed ? "true" : "false") + ',' + detail::format_double(r.cost_usd)
            + ',' + std::to_string(r.run_index);
        if (with_energy) {
            out += ',' + (r.energy_j ? detail::format_double(*r.energy_j) : std::string());
        }
        if (with_quality) {
            out += ',' + (r.quality_score ? detail::format_double(*r.quality_score) : std::string());
        }
        out += '\n';
    }
    return out;
}

inline auto to_json(TrialRecord const& r) -> nlohmann::json
{
    nlohmann::json j {
        { "provider", r.provider },
        { "model", r.model },
        { "benchmark", r.benchmark },
        { "compression_ratio", r.compression_ratio },
        { "input_tokens", r.input_tokens },
        { "output_tokens", r.output_tokens },
        { "passed", r.passed },
        { "cost_usd", r.cost_usd },
        { "run_index", r.run_index },
    };
    if (r.energy_j) {
        j["energy_j"] = *r.energy_j;
    }
    if (r.quality_score) {
        j["quality_score"] = *r.quality_score;
    }
    return j;
}

// ---------------------------------------------------------------------------
// Aggregation

enum class EnergySource { Logged, SimplifiedProxy, Mixed };

inline auto to_string(EnergySource s) -> std::string_view
{
    switch (s) {
    case EnergySource::Logged: return "logged";
    case EnergySource::SimplifiedProxy: return "simplified_proxy";
    case EnergySource::Mixed: return "mixed";
    }
    return "unknown";
}

// Supplies energy for records logged without energy_j: simplified proxy with
// the provider's PUE, then the provider's efficiency factor.
struct EnergyResolver {
    ModelCatalog const* models {};
    ProviderRegistry const* providers {};
    CalibrationConstants calibration = CalibrationConstants::defaults();

    [[nodiscard]] auto operator()(TrialRecord const& r) const -> double
    {
        detail::require(models != nullptr && providers != nullptr, ErrorKind::InvalidParameter,
            "record run_index " + std::to_string(r.run_index) + " has no energy_j and no model/provider configuration was supplied");
        auto const& model = models->at(r.model);
        auto const& provider = providers->at(r.provider);
        auto estimate = estimate_energy_simplified({ r.input_tokens, r.output_tokens }, model, calibration, provider.est_pue);
        return apply_provider_adjustment(estimate, provider).total_j;
    }
};

struct GroupBy {
    bool model { true };
    bool ratio { true };
};

struct AggregateRow {
    std::optional<std::string> model; // nullopt when not grouped by model
    std::optional<double> compression_ratio; // nullopt when not grouped by ratio
    std::uint64_t n {};
    std::uint64_t passes {};
    double mean_output_tokens {};
    double mean_energy_j {};
    double mean_cost_usd {};
    EnergySource energy_source { EnergySource::Logged };

    // passes / n, exact up to the final division.
    [[nodiscard]] auto pass_rate() const -> double { return static_cast<double>(passes) / static_cast<double>(n); }
};

namespace detail {
    // Sorted before summing so the result is independent of record order.
    inline auto order_free_mean(std::vector<double> values) -> double
    {
        std::sort(values.begin(), values.end());
        double sum = 0.0;
        for (double v : values) {
            sum += v;
        }
        return sum / static_cast<double>(values.size());
    }
} // namespace detail

inline auto aggregate(std::vector<TrialRecord> const& records, GroupBy group_by = {}, EnergyResolver const* resolver = nullptr)
    -> std::vector<AggregateRow>
{
    using Key = std::pair<std::string, double>;
    struct Acc {
        std::uint64_t n {};
        std::uint64_t passes {};
        std::uint64_t output_tokens {};
        std::vector<double> energy;
        std::vector<double> cost;
        bool any_logged {};
        bool any_computed {};
    };
    std::map<Key, Acc> groups;
    for (auto const& r : records) {
        Key key { group_by.model ? r.model : std::string(), group_by.ratio ? r.compression_ratio : 0.0 };
        auto& acc = groups[key];
        ++acc.n;
        acc.passes += r.passed ? 1 : 0;
        acc.output_tokens += r.output_tokens;
        acc.cost.push_back(r.cost_usd);
        if (r.energy_j) {
            acc.energy.push_back(*r.energy_j);
            acc.any_logged = true;
        } else {
            if (resolver == nullptr) {
                throw Error(ErrorKind::InvalidParameter, "record run_index " + std::to_string(r.run_index)
                        + " has no energy_j and no energy resolver was supplied");
            }
            acc.energy.push_back((*resolver)(r));
            acc.any_computed = true;
        }
    }

    std::vector<AggregateRow> rows;
    rows.reserve(groups.size());
    for (auto& [key, acc] : groups) {
        AggregateRow row;
        if (group_by.model) {
            row.model = key.first;
        }
        if (group_by.ratio) {
            row.compression_ratio = key.second;
        }
        row.n = acc.n;
        row.passes = acc.passes;
        row.mean_output_tokens = static_cast<double>(acc.output_tokens) / static_cast<double>(acc.n);
        row.mean_energy_j = detail::order_free_mean(std::move(acc.energy));
        row.mean_cost_usd = detail::order_free_mean(std::move(acc.cost));
        row.energy_source = acc.any_logged && acc.any_computed ? EnergySource::Mixed
            : acc.any_computed                                 ? EnergySource::SimplifiedProxy
                                                               : EnergySource::Logged;
        rows.push_back(std::move(row));
    }
    return rows;
}

struct RatioDelta {
    std::string model;
    double compression_ratio {};
    double delta_energy_pct {};
    double baseline_ratio { 1.0 };
};

// Percent change of mean energy against the model's r = 1.0 row. Rows must be
// grouped by model and ratio.
inline auto energy_delta_vs_baseline(std::vector<AggregateRow> const& rows) -> std::vector<RatioDelta>
{
    std::map<std::string, double> baseline;
    for (auto const& row : rows) {
        detail::require(row.model.has_value() && row.compression_ratio.has_value(), ErrorKind::InvalidParameter,
            "energy deltas need rows grouped by model and ratio");
        if (*row.compression_ratio == 1.0) {
            baseline[*row.model] = row.mean_energy_j;
        }
    }
    std::vector<RatioDelta> out;
    for (auto const& row : rows) {
        auto it = baseline.find(*row.model);
        if (it == baseline.end()) {
            throw Error(ErrorKind::MissingBaseline, "model '" + *row.model + "' has no baseline row at compression_ratio 1.0");
        }
        detail::require(it->second > 0, ErrorKind::UndefinedResult, "model '" + *row.model + "' has zero baseline energy");
        out.push_back({ *row.model, *row.compression_ratio, 100.0 * (row.mean_energy_j - it->second) / it->second, 1.0 });
    }
    std::sort(out.begin(), out.end(), [](auto const& a, auto const& b) {
        return std::tie(a.model, a.compression_ratio) < std::tie(b.model, b.compression_ratio);
    });
    return out;
}

inline auto energy_per_success(double mean_energy_j, double pass_rate) -> double
{
    detail::require(pass_rate > 0, ErrorKind::UndefinedResult, "energy per success is undefined at pass rate 0");
    return mean_energy_j / pass_rate;
}

inline auto energy_per_success(AggregateRow const& row) -> double
{
    return energy_per_success(row.mean_energy_j, row.pass_rate());
}

// ---------------------------------------------------------------------------
// Run-order drift

struct DriftResult {
    double slope {};
    double p_value {};
    std::size_t n {};
    std::size_t permutations {};
    std::uint64_t seed {};
};

inline constexpr std::uint64_t kDefaultSeed = 20240601;
inline constexpr std::size_t kDefaultPermutations = 10000;

namespace detail {
    // Unbiased draw in [0, bound) from a 64-bit engine; defined independently
    // of the standard library's distributions so results match across
    // toolchains.
    inline auto bounded(std::mt19937_64& rng, std::uint64_t bound) -> std::uint64_t
    {
        auto x = rng();
        auto m = static_cast<unsigned __int128>(x) * bound;
        auto low = static_cast<std::uint64_t>(m);
        if (low < bound) {
            auto threshold = (0 - bound) % bound;
            while (low < threshold) {
                x = rng();
                m = static_cast<unsigned __int128>(x) * bound;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }
} // namespace detail

// Least-squares slope of the pass indicator on run_index rescaled to [0, 1],
// with a two-sided permutation p-value (+1 smoothed) over shuffled run order.
inline auto drift_test(std::vector<TrialRecord> const& records, std::size_t permutations = kDefaultPermutations,
    std::uint64_t seed = kDefaultSeed) -> DriftResult
{
    detail::require(!records.empty(), ErrorKind::InsufficientData, "drift test needs records");
    detail::require(permutations > 0, ErrorKind::InvalidParameter, "drift test needs at least one permutation");
    auto [lo, hi] = std::minmax_element(records.begin(), records.end(),
        [](auto const& a, auto const& b) { return a.run_index < b.run_index; });
    if (lo->run_index == hi->run_index) {
        throw Error(ErrorKind::InsufficientVariation, "all records share run_index " + std::to_string(lo->run_index));
    }
    auto const span = static_cast<double>(hi->run_index - lo->run_index);
    auto const n = records.size();

    std::vector<double> x(n);
    double sum_x = 0.0;
    double sum_xy = 0.0;
    std::size_t passes = 0;
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = static_cast<double>(records[i].run_index - lo->run_index) / span;
        sum_x += x[i];
        if (records[i].passed) {
            sum_xy += x[i];
            ++passes;
        }
    }
    auto const mean_x = sum_x / static_cast<double>(n);
    double sxx = 0.0;
    for (double v : x) {
        sxx += (v - mean_x) * (v - mean_x);
    }
    // slope = (sum over passing x - k * mean_x) / Sxx
    auto const k = static_cast<double>(passes);
    auto slope_of = [&](double pass_sum) { return (pass_sum - k * mean_x) / sxx; };
    auto const observed = slope_of(sum_xy);

    DriftResult result { observed, 1.0, n, permutations, seed };
    if (passes == 0 || passes == n) {
        result.slope = 0.0;
        return result;
    }

    // Shuffling outcomes over fixed positions is equivalent to drawing a
    // uniform k-subset of positions; a partial Fisher-Yates over x does that.
    std::mt19937_64 rng(seed);
    auto const threshold = std::abs(observed) * (1.0 - 1e-12);
    std::size_t extreme = 0;
    auto pool = x;
    for (std::size_t p = 0; p < permutations; ++p) {
        double pass_sum = 0.0;
        for (std::size_t i = 0; i < passes; ++i) {
            auto j = i + detail::bounded(rng, n - i);
            std::swap(pool[i], pool[j]);
            pass_sum += pool[i];
        }
        if (std::abs(slope_of(pass_sum)) >= threshold) {
            ++extreme;
        }
    }
    result.p_value = static_cast<double>(extreme + 1) / static_cast<double>(permutations + 1);
    return result;
}

} // namespace greenllm
