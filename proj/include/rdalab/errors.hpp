#pragma once

#include <stdexcept>
#include <string>

namespace rdalab {

// Exit codes surfaced by the CLI.
enum class AlarmCode : int { config = 2, numerical = 3, structural = 4 };

class Error : public std::runtime_error {
public:
    Error(AlarmCode code, std::string kind, const std::string& what)
        : std::runtime_error(what), code_(code), kind_(std::move(kind)) {}
    AlarmCode code() const { return code_; }
    const std::string& kind() const { return kind_; }

private:
    AlarmCode code_;
    std::string kind_;
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& what) : Error(AlarmCode::config, "config", what) {}
};

struct TruncationError : Error {
    explicit TruncationError(const std::string& what) : Error(AlarmCode::config, "truncation", what) {}
};

struct PreconditionError : Error {
    explicit PreconditionError(const std::string& what) : Error(AlarmCode::config, "precondition", what) {}
};

struct DivergenceError : Error {
    DivergenceError(const std::string& what, double t, double residual = 0.0)
        : Error(AlarmCode::numerical, "divergence", what), time(t), last_residual(residual) {}
    double time;
    double last_residual;
};

struct ResolutionError : Error {
    explicit ResolutionError(const std::string& what) : Error(AlarmCode::numerical, "resolution", what) {}
};

struct ContractionError : Error {
    ContractionError(const std::string& what, double ratio)
        : Error(AlarmCode::numerical, "k_too_small", what), factor(ratio) {}
    double factor;
};

struct StructuralAlarm : Error {
    explicit StructuralAlarm(const std::string& what) : Error(AlarmCode::structural, "structure", what) {}
};

}  // namespace rdalab
