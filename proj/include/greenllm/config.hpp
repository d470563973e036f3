#pragma once

// Human-editable key-value configuration shared by calibration constants,
// provider registries, model catalogs, hardware profiles and carbon tables.
//
//   # comment            ; also a comment
//   [calibration]
//   epsilon = 0.15
//   [provider.OpenAI]
//   est_pue = 1.20
//
// Section names are free text; dotted names ("provider.OpenAI") group
// entities by kind. Keys outside any section belong to the unnamed section.
// A repeated section or a repeated key within a section is a conflict.

#include "error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace greenllm {

namespace detail {
    inline auto trim(std::string_view s) -> std::string_view
    {
        auto const ws = " \t\r\n";
        auto first = s.find_first_not_of(ws);
        if (first == std::string_view::npos) {
            return {};
        }
        auto last = s.find_last_not_of(ws);
        return s.substr(first, last - first + 1);
    }

    inline auto parse_double(std::string_view text, std::string const& what) -> double
    {
        auto t = trim(text);
        double value {};
        auto const* end = t.data() + t.size();
        auto [ptr, ec] = std::from_chars(t.data(), end, value);
        if (t.empty() || ec != std::errc {} || ptr != end || !std::isfinite(value)) {
            throw Error(ErrorKind::Schema, what + ": not a finite number: '" + std::string(t) + "'");
        }
        return value;
    }

    inline auto parse_uint(std::string_view text, std::string const& what) -> std::uint64_t
    {
        auto t = trim(text);
        std::uint64_t value {};
        auto const* end = t.data() + t.size();
        auto [ptr, ec] = std::from_chars(t.data(), end, value);
        if (t.empty() || ec != std::errc {} || ptr != end) {
            throw Error(ErrorKind::Schema, what + ": not a nonnegative integer: '" + std::string(t) + "'");
        }
        return value;
    }

    inline auto read_file(std::string const& path) -> std::string
    {
        std::ifstream in(path, std::ios::binary);
        if (!in) {
            throw Error(ErrorKind::Io, "cannot open '" + path + "'");
        }
        std::ostringstream buffer;
        buffer << in.rdbuf();
        if (in.bad()) {
            throw Error(ErrorKind::Io, "failed reading '" + path + "'");
        }
        return buffer.str();
    }
} // namespace detail

struct ConfigSection {
    std::string name;
    std::vector<std::pair<std::string, std::string>> entries;

    [[nodiscard]] auto find(std::string_view key) const -> std::optional<std::string>
    {
        auto it = std::find_if(entries.begin(), entries.end(), [&](auto const& kv) { return kv.first == key; });
        if (it == entries.end()) {
            return std::nullopt;
        }
        return it->second;
    }

    [[nodiscard]] auto get_double(std::string_view key) const -> std::optional<double>
    {
        auto v = find(key);
        if (!v) {
            return std::nullopt;
        }
        return detail::parse_double(*v, "[" + name + "] " + std::string(key));
    }

    [[nodiscard]] auto require_double(std::string_view key) const -> double
    {
        auto v = get_double(key);
        if (!v) {
            throw Error(ErrorKind::Schema, "[" + name + "] missing key '" + std::string(key) + "'");
        }
        return *v;
    }

    // Section name with the given "kind." prefix stripped, if it has one.
    [[nodiscard]] auto entity(std::string_view kind) const -> std::optional<std::string>
    {
        auto prefix = std::string(kind) + ".";
        if (name.size() <= prefix.size() || name.compare(0, prefix.size(), prefix) != 0) {
            return std::nullopt;
        }
        return name.substr(prefix.size());
    }
};

class ConfigDocument {
public:
    ConfigDocument() = default;

    static auto parse(std::string_view text, std::string source = "<memory>") -> ConfigDocument
    {
        ConfigDocument doc;
        doc.source_ = std::move(source);
        bool have_section = false;
        std::size_t line_no = 0;
        std::size_t pos = 0;
        while (pos <= text.size()) {
            auto eol = text.find('\n', pos);
            auto raw = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
            pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
            ++line_no;

            auto line = detail::trim(raw);
            if (line.empty() || line.front() == '#' || line.front() == ';') {
                continue;
            }
            auto where = doc.source_ + ":" + std::to_string(line_no);
            if (line.front() == '[') {
                if (line.back() != ']') {
                    throw Error(ErrorKind::Schema, where + ": unterminated section header");
                }
                auto name = std::string(detail::trim(line.substr(1, line.size() - 2)));
                if (name.empty()) {
                    throw Error(ErrorKind::Schema, where + ": empty section name");
                }
                if (doc.find(name) != nullptr) {
                    throw Error(ErrorKind::Conflict, where + ": duplicate section [" + name + "]");
                }
                doc.sections_.push_back({ name, {} });
                have_section = true;
                continue;
            }
            auto eq = line.find('=');
            if (eq == std::string_view::npos) {
                throw Error(ErrorKind::Schema, where + ": expected 'key = value'");
            }
            auto key = std::string(detail::trim(line.substr(0, eq)));
            auto value = std::string(detail::trim(line.substr(eq + 1)));
            if (key.empty()) {
                throw Error(ErrorKind::Schema, where + ": empty key");
            }
            if (!have_section) {
                doc.sections_.push_back({ "", {} });
                have_section = true;
            }
            auto& current = doc.sections_.back();
            if (current.find(key)) {
                throw Error(ErrorKind::Conflict, where + ": duplicate key '" + key + "'");
            }
            current.entries.emplace_back(std::move(key), std::move(value));
        }
        return doc;
    }

    static auto load(std::string const& path) -> ConfigDocument
    {
        return parse(detail::read_file(path), path);
    }

    [[nodiscard]] auto find(std::string_view name) const -> ConfigSection const*
    {
        for (auto const& s : sections_) {
            if (s.name == name) {
                return &s;
            }
        }
        return nullptr;
    }

    [[nodiscard]] auto sections() const -> std::vector<ConfigSection> const& { return sections_; }
    [[nodiscard]] auto source() const -> std::string const& { return source_; }

    // All sections named "<kind>.<entity>", in file order.
    [[nodiscard]] auto entities(std::string_view kind) const -> std::vector<std::pair<std::string, ConfigSection const*>>
    {
        std::vector<std::pair<std::string, ConfigSection const*>> out;
        for (auto const& s : sections_) {
            if (auto e = s.entity(kind)) {
                out.emplace_back(*e, &s);
            }
        }
        return out;
    }

private:
    std::string source_ = "<memory>";
    std::vector<ConfigSection> sections_;
};

} // namespace greenllm
