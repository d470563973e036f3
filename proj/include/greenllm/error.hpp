#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace greenllm {

enum class ErrorKind {
    InvalidParameter,
    Validation,
    InsufficientData,
    MalformedTrace,
    Conflict,
    NotFound,
    Schema,
    Io,
    MissingBaseline,
    UndefinedResult,
    InsufficientVariation,
    EmptyInput,
};

inline auto to_string(ErrorKind kind) -> std::string_view
{
    switch (kind) {
    case ErrorKind::InvalidParameter: return "invalid-parameter";
    case ErrorKind::Validation: return "validation";
    case ErrorKind::InsufficientData: return "insufficient-data";
    case ErrorKind::MalformedTrace: return "malformed-trace";
    case ErrorKind::Conflict: return "conflict";
    case ErrorKind::NotFound: return "not-found";
    case ErrorKind::Schema: return "schema";
    case ErrorKind::Io: return "io";
    case ErrorKind::MissingBaseline: return "missing-baseline";
    case ErrorKind::UndefinedResult: return "undefined-result";
    case ErrorKind::InsufficientVariation: return "insufficient-variation";
    case ErrorKind::EmptyInput: return "empty-input";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string const& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message)
        , kind_(kind)
    {
    }

    [[nodiscard]] auto kind() const noexcept -> ErrorKind { return kind_; }

private:
    ErrorKind kind_;
};

namespace detail {
    inline void require(bool condition, ErrorKind kind, std::string const& message)
    {
        if (!condition) {
            throw Error(kind, message);
        }
    }
} // namespace detail

} // namespace greenllm
