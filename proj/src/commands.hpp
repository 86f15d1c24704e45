#pragma once

// The CLI front end as library functions: each command takes its options,
// writes a line-oriented key=value report to the stream, and returns the
// process exit code (0 ok, 1 identity/tolerance failure, 2 input error).

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace emdtn {

struct VerifyOptions {
    std::string scenario_path;
    std::optional<int> depth;
    double tol = 1e-9;
    int jobs = 1;
    std::string json_path;
};

struct SymbolsOptions {
    std::string scenario_path;
    std::optional<int> depth;
    std::string out_path;
};

struct ApplyOptions {
    std::string scenario_path;
    std::string field_in;
    std::string field_out;
    std::optional<int> depth;
    std::string frame = "pnu";  // "pnu": data are p(nu x E); "e": tangential E components
    int jobs = 1;
};

struct ReconstructOptions {
    std::string symbols_path;
    std::string mode;  // "metric" | "parameter"
    std::string known_path;
    std::string out_path;
    double tol = 1e-6;
    int jobs = 1;
    std::string json_path;
};

struct RoundtripOptions {
    std::uint64_t seed = 1;
    int order = 6;
    int depth = 4;
    double tol = 1e-7;
    int jobs = 1;
    std::string json_path;
};

int cmd_verify(const VerifyOptions& opt, std::ostream& out);
int cmd_symbols(const SymbolsOptions& opt, std::ostream& out);
int cmd_apply(const ApplyOptions& opt, std::ostream& out);
int cmd_reconstruct(const ReconstructOptions& opt, std::ostream& out);
int cmd_roundtrip(const RoundtripOptions& opt, std::ostream& out);

// EMDTN_TOL environment override applied by the CLI entry point.
double default_tolerance(double fallback);

}  // namespace emdtn
