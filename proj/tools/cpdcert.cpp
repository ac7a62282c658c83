// Command line front end: certify CPD uniqueness properties of a factor
// triple directly from its matrices.

#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cpdcert/job.hpp"
#include "cpdcert/version.hpp"

namespace {

std::vector<std::string> split_paths(const std::string& joined) {
    std::vector<std::string> out;
    std::stringstream ss(joined);
    std::string part;
    while (std::getline(ss, part, ','))
        if (!part.empty()) out.push_back(part);
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"CPD uniqueness certification from factor matrices"};
    app.set_version_flag("--version", std::string(cpdcert::kVersion));

    std::string input;
    std::string command;
    std::string backend = "auto";
    std::string format = "json";
    std::string replay;
    double tol = 1e-10;
    std::uint64_t seed = 0;
    int target = 3;
    int m_override = -1;
    long long cap = cpdcert::kDefaultCap;
    if (const char* env = std::getenv("CPDCERT_CAP")) {
        try {
            cap = std::stoll(env);
        } catch (const std::exception&) {
            std::cerr << "warning: ignoring malformed CPDCERT_CAP='" << env << "'\n";
        }
    }

    app.add_option("--input", input,
                   "input file: a JSON file with matrices A, B, C, or a comma-separated "
                   "list of per-matrix CSV files (A,B,C); match takes two JSON files");
    app.add_option("--command", command,
                   "analyze | certify-third | certify-overall | compound | krank | hprofile | match")
        ->check(CLI::IsMember({"analyze", "certify-third", "certify-overall", "compound", "krank",
                               "hprofile", "match"}));
    app.add_option("--backend", backend, "scalar backend (default: auto)")
        ->check(CLI::IsMember({"auto", "exact", "float"}));
    app.add_option("--tol", tol, "float-backend tolerance (default 1e-10)");
    app.add_option("--seed", seed, "seed for the randomized counterexample search (default 0)");
    app.add_option("--m", m_override, "condition order m (overrides m = R - r_C + 2)");
    app.add_option("--target", target, "which factor plays the third role / is selected (1|2|3)")
        ->check(CLI::IsMember({1, 2, 3}));
    app.add_option("--format", format, "output format (default json)")
        ->check(CLI::IsMember({"json", "text"}));
    app.add_option("--replay", replay, "re-run a previously emitted report and compare conclusions");
    app.add_option("--cap", cap, "combinatorial cap on C(n,k) sizes (env CPDCERT_CAP, default 1e7)");

    CLI11_PARSE(app, argc, argv);

    cpdcert::JobSpec job;
    job.inputs = split_paths(input);
    job.command = command;
    job.backend = backend == "exact"  ? cpdcert::Backend::Exact
                  : backend == "float" ? cpdcert::Backend::Float
                                       : cpdcert::Backend::Auto;
    job.tolerance = tol;
    job.seed = seed;
    if (m_override > 0) job.m_override = m_override;
    job.target = target;
    job.format = format == "text" ? cpdcert::OutputFormat::Text : cpdcert::OutputFormat::Json;
    if (!replay.empty()) job.replay_path = replay;
    job.cap = cap;

    if (!job.replay_path && job.command.empty()) {
        std::cerr << "error: --command is required (or --replay)\n";
        return 1;
    }
    if (!job.replay_path && job.inputs.empty()) {
        std::cerr << "error: --input is required\n";
        return 1;
    }

    const cpdcert::RunResult result = cpdcert::run(job);
    std::cout << result.output;
    return result.exit_code;
}
