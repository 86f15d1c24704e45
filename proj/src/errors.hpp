#pragma once

#include <stdexcept>
#include <string>

namespace emdtn {

// Base for all library errors so callers can catch one type at the CLI
// boundary and map it to an exit code.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct ZeroLeadingCoefficient : Error {
    explicit ZeroLeadingCoefficient(const std::string& msg) : Error(msg) {}
};

struct NonPositiveLeadingCoefficient : Error {
    explicit NonPositiveLeadingCoefficient(const std::string& msg) : Error(msg) {}
};

struct JetOrderExhausted : Error {
    explicit JetOrderExhausted(const std::string& msg) : Error(msg) {}
};

struct NonPositiveDefinite : Error {
    explicit NonPositiveDefinite(const std::string& msg) : Error(msg) {}
};

struct NonPositiveParameter : Error {
    explicit NonPositiveParameter(const std::string& msg) : Error(msg) {}
};

struct CoincidentPoints : Error {
    explicit CoincidentPoints(const std::string& msg) : Error(msg) {}
};

struct ShapeMismatch : Error {
    explicit ShapeMismatch(const std::string& msg) : Error(msg) {}
};

struct ScenarioMismatch : Error {
    explicit ScenarioMismatch(const std::string& msg) : Error(msg) {}
};

struct ZeroCovector : Error {
    explicit ZeroCovector(const std::string& msg) : Error(msg) {}
};

struct InsufficientDepth : Error {
    explicit InsufficientDepth(const std::string& msg) : Error(msg) {}
};

struct DepthUnavailable : Error {
    explicit DepthUnavailable(const std::string& msg) : Error(msg) {}
};

struct DegenerateDesignSet : Error {
    explicit DegenerateDesignSet(const std::string& msg) : Error(msg) {}
};

struct InconsistentSamples : Error {
    explicit InconsistentSamples(const std::string& msg) : Error(msg) {}
};

struct ForwardMismatch : Error {
    explicit ForwardMismatch(const std::string& msg) : Error(msg) {}
};

struct DesignSingular : Error {
    explicit DesignSingular(const std::string& msg) : Error(msg) {}
};

struct NearDegenerateCovector : Error {
    explicit NearDegenerateCovector(const std::string& msg) : Error(msg) {}
};

struct ParseError : Error {
    explicit ParseError(const std::string& msg) : Error(msg) {}
};

}  // namespace emdtn
