#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ontomap {

enum class Errc {
    ParseError,
    IoError,
    InvalidArgument,
    DuplicateClass,
    DanglingParent,
    CyclicOntology,
    EmptyOntology,
    UnknownClass,
    UnknownPathId,
    UnknownTask,
    TokenOverflow,
    StepOutOfRange,
    EmptyInstance,
    EmptyTargetSpace,
    TranslatorError,
    PrecisionUndefined,
    RecallUndefined,
    IncompleteScores,
    NoCases,
};

inline std::string_view errc_name(Errc code) {
    switch (code) {
        case Errc::ParseError: return "ParseError";
        case Errc::IoError: return "IoError";
        case Errc::InvalidArgument: return "InvalidArgument";
        case Errc::DuplicateClass: return "DuplicateClass";
        case Errc::DanglingParent: return "DanglingParent";
        case Errc::CyclicOntology: return "CyclicOntology";
        case Errc::EmptyOntology: return "EmptyOntology";
        case Errc::UnknownClass: return "UnknownClass";
        case Errc::UnknownPathId: return "UnknownPathId";
        case Errc::UnknownTask: return "UnknownTask";
        case Errc::TokenOverflow: return "TokenOverflow";
        case Errc::StepOutOfRange: return "StepOutOfRange";
        case Errc::EmptyInstance: return "EmptyInstance";
        case Errc::EmptyTargetSpace: return "EmptyTargetSpace";
        case Errc::TranslatorError: return "TranslatorError";
        case Errc::PrecisionUndefined: return "PrecisionUndefined";
        case Errc::RecallUndefined: return "RecallUndefined";
        case Errc::IncompleteScores: return "IncompleteScores";
        case Errc::NoCases: return "NoCases";
    }
    return "Unknown";
}

// Process exit status for a failure of this kind:
// 1 I/O or parse, 2 data invariant violation, 3 translator/protocol failure.
inline int exit_code(Errc code) {
    switch (code) {
        case Errc::ParseError:
        case Errc::IoError:
        case Errc::InvalidArgument:
            return 1;
        case Errc::TranslatorError:
            return 3;
        default:
            return 2;
    }
}

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code), message_(message) {}

    Errc code() const noexcept { return code_; }
    // The text without the code prefix.
    const std::string& message() const noexcept { return message_; }

private:
    Errc code_;
    std::string message_;
};

} // namespace ontomap
