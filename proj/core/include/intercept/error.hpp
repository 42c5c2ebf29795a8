#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace intercept {

enum class ErrorCode {
    InvalidArgument,
    FileNotFound,
    MalformedFile,
    UnsupportedCodec,
    IoFailure,
    Clipping,
    NoContent,
    DegeneratePair,
    DegenerateData,
    NoData,
    Configuration,
    NotFound,
    Sequencing,
    Conflict,
    CorruptLog,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Domain error raised by every library operation. The code is stable and
/// machine-checkable; the message is for humans.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    Error(ErrorCode code, const std::string& message, std::size_t item_index)
        : std::runtime_error(message), code_(code), item_index_(item_index) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

    /// Set when the error was raised while processing one element of a batch.
    [[nodiscard]] std::optional<std::size_t> item_index() const noexcept { return item_index_; }

private:
    ErrorCode code_;
    std::optional<std::size_t> item_index_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace intercept
