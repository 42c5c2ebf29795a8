#include "intercept/error.hpp"

namespace intercept {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument: return "invalid_argument";
        case ErrorCode::FileNotFound: return "file_not_found";
        case ErrorCode::MalformedFile: return "malformed_file";
        case ErrorCode::UnsupportedCodec: return "unsupported_codec";
        case ErrorCode::IoFailure: return "io_failure";
        case ErrorCode::Clipping: return "clipping";
        case ErrorCode::NoContent: return "no_content";
        case ErrorCode::DegeneratePair: return "degenerate_pair";
        case ErrorCode::DegenerateData: return "degenerate_data";
        case ErrorCode::NoData: return "no_data";
        case ErrorCode::Configuration: return "configuration";
        case ErrorCode::NotFound: return "not_found";
        case ErrorCode::Sequencing: return "sequencing";
        case ErrorCode::Conflict: return "conflict";
        case ErrorCode::CorruptLog: return "corrupt_log";
    }
    return "unknown";
}

}  // namespace intercept
