#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace aerostack {

enum class ErrorKind {
    MissingFile,
    SchemaMismatch,
    BadTimestamp,
    MixedSensors,
    EmptyInput,
    EmptySchema,
    UnknownColumn,
    InvalidConfig,
    InvalidArgument,
    DegenerateMatrix,
    NonFinite,
    TooFewRows,
    MaxIterations,
    LengthMismatch,
    ZeroVariance,
    EmptyTest,
    LeakageDetected,
    IoError,
};

constexpr std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::MissingFile: return "MissingFile";
        case ErrorKind::SchemaMismatch: return "SchemaMismatch";
        case ErrorKind::BadTimestamp: return "BadTimestamp";
        case ErrorKind::MixedSensors: return "MixedSensors";
        case ErrorKind::EmptyInput: return "EmptyInput";
        case ErrorKind::EmptySchema: return "EmptySchema";
        case ErrorKind::UnknownColumn: return "UnknownColumn";
        case ErrorKind::InvalidConfig: return "InvalidConfig";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::DegenerateMatrix: return "DegenerateMatrix";
        case ErrorKind::NonFinite: return "NonFinite";
        case ErrorKind::TooFewRows: return "TooFewRows";
        case ErrorKind::MaxIterations: return "MaxIterations";
        case ErrorKind::LengthMismatch: return "LengthMismatch";
        case ErrorKind::ZeroVariance: return "ZeroVariance";
        case ErrorKind::EmptyTest: return "EmptyTest";
        case ErrorKind::LeakageDetected: return "LeakageDetected";
        case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

/// True for errors caused by what the user handed us (files, config, flags)
/// rather than by the numerical work itself.
constexpr bool is_input_error(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::MissingFile:
        case ErrorKind::SchemaMismatch:
        case ErrorKind::BadTimestamp:
        case ErrorKind::MixedSensors:
        case ErrorKind::EmptyInput:
        case ErrorKind::EmptySchema:
        case ErrorKind::UnknownColumn:
        case ErrorKind::InvalidConfig:
        case ErrorKind::InvalidArgument:
            return true;
        default:
            return false;
    }
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

}  // namespace aerostack
