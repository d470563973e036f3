#pragma once

// Tabular reports rendered as an aligned text table, CSV, or JSON. JSON keeps
// key order as built, so identical inputs give byte-identical output.

#include "error.hpp"

#include <json.hpp>

#include <cstdio>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace greenllm {

enum class OutputFormat { Table, Csv, Json };

inline auto parse_output_format(std::string_view s) -> OutputFormat
{
    if (s == "table") {
        return OutputFormat::Table;
    }
    if (s == "csv" || s == "delimited") {
        return OutputFormat::Csv;
    }
    if (s == "json" || s == "structured") {
        return OutputFormat::Json;
    }
    throw Error(ErrorKind::InvalidParameter, "unknown output format '" + std::string(s) + "'");
}

struct Column {
    std::string name;
    int decimals { -1 }; // table display only; -1 prints 6 significant digits
};

struct Report {
    using Json = nlohmann::ordered_json;

    std::string name;
    Json meta = Json::object();
    std::vector<Column> columns;
    std::vector<Json> rows;
    Json extra = Json::object(); // additional top-level JSON members

    void add_row(Json row) { rows.push_back(std::move(row)); }

    [[nodiscard]] auto to_json() const -> Json
    {
        Json doc = Json::object();
        doc["report"] = name;
        doc["meta"] = meta;
        doc["columns"] = Json::array();
        for (auto const& c : columns) {
            doc["columns"].push_back(c.name);
        }
        doc["rows"] = Json::array();
        for (auto const& r : rows) {
            doc["rows"].push_back(r);
        }
        for (auto const& [k, v] : extra.items()) {
            doc[k] = v;
        }
        return doc;
    }
};

namespace detail {
    inline auto cell_text(nlohmann::ordered_json const& v, int decimals) -> std::string
    {
        if (v.is_null()) {
            return "-";
        }
        if (v.is_string()) {
            return v.get<std::string>();
        }
        if (v.is_boolean()) {
            return v.get<bool>() ? "true" : "false";
        }
        if (v.is_number_integer() || v.is_number_unsigned()) {
            return v.dump();
        }
        if (v.is_number_float()) {
            char buf[64];
            if (decimals >= 0) {
                std::snprintf(buf, sizeof buf, "%.*f", decimals, v.get<double>());
            } else {
                std::snprintf(buf, sizeof buf, "%.6g", v.get<double>());
            }
            return buf;
        }
        return v.dump();
    }

    inline auto csv_cell(nlohmann::ordered_json const& v) -> std::string
    {
        if (v.is_null()) {
            return "";
        }
        if (v.is_string()) {
            auto s = v.get<std::string>();
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
        return v.dump();
    }
} // namespace detail

inline void render(Report const& report, OutputFormat format, std::ostream& out)
{
    switch (format) {
    case OutputFormat::Json:
        out << report.to_json().dump(2) << '\n';
        return;
    case OutputFormat::Csv: {
        for (std::size_t i = 0; i < report.columns.size(); ++i) {
            out << (i ? "," : "") << report.columns[i].name;
        }
        out << '\n';
        for (auto const& row : report.rows) {
            for (std::size_t i = 0; i < report.columns.size(); ++i) {
                auto const& key = report.columns[i].name;
                out << (i ? "," : "") << (row.contains(key) ? detail::csv_cell(row.at(key)) : "");
            }
            out << '\n';
        }
        return;
    }
    case OutputFormat::Table: {
        out << "# " << report.name << '\n';
        for (auto const& [k, v] : report.meta.items()) {
            out << "#   " << k << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
        }
        std::vector<std::vector<std::string>> cells;
        std::vector<std::size_t> width;
        for (auto const& c : report.columns) {
            width.push_back(c.name.size());
        }
        for (auto const& row : report.rows) {
            auto& line = cells.emplace_back();
            for (std::size_t i = 0; i < report.columns.size(); ++i) {
                auto const& c = report.columns[i];
                line.push_back(row.contains(c.name) ? detail::cell_text(row.at(c.name), c.decimals) : "-");
                width[i] = std::max(width[i], line.back().size());
            }
        }
        auto emit = [&](auto const& values) {
            for (std::size_t i = 0; i < values.size(); ++i) {
                std::string v = values[i];
                out << (i ? "  " : "") << v << std::string(width[i] - v.size(), ' ');
            }
            out << '\n';
        };
        std::vector<std::string> header;
        for (auto const& c : report.columns) {
            header.push_back(c.name);
        }
        emit(header);
        for (auto const& line : cells) {
            emit(line);
        }
        if (report.rows.empty()) {
            out << "(no rows)\n";
        }
        return;
    }
    }
}

inline auto render_to_string(Report const& report, OutputFormat format) -> std::string
{
    std::ostringstream os;
    render(report, format, os);
    return os.str();
}

} // namespace greenllm
