#ifndef CPDCERT_JOB_HPP
#define CPDCERT_JOB_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cpdcert/combinatorics.hpp"

namespace cpdcert {

enum class Backend { Auto, Exact, Float };
enum class OutputFormat { Json, Text };

/// One CLI invocation. Input files are JSON ({"A": [[...]], "B": ...,
/// "C": ...}, entries as numbers or "p/q" strings) or per-matrix CSV
/// files given as a comma-separated path list. With Backend::Auto, any
/// string entry selects the exact backend, otherwise floats.
struct JobSpec {
    std::vector<std::string> inputs;
    std::string command; // analyze, certify-third, certify-overall, compound, krank, hprofile, match
    Backend backend = Backend::Auto;
    double tolerance = 1e-10;
    std::uint64_t seed = 0;
    std::optional<int> m_override;
    int target = 3;
    OutputFormat format = OutputFormat::Json;
    std::optional<std::string> replay_path;
    std::int64_t cap = kDefaultCap;
};

/// Exit codes: 0 = analysis completed (whatever the conclusion),
/// 1 = input or validation error, 2 = combinatorial cap refusal.
struct RunResult {
    int exit_code = 0;
    std::string output;
};

RunResult run(const JobSpec& job);

} // namespace cpdcert

#endif
