#pragma once

// Run configuration, command drivers and report rendering for the CLI.

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "overlapq/exactfield.hpp"
#include "overlapq/ifs.hpp"

namespace overlapq {

struct Depths {
    unsigned window = 16;         // window-measure table
    unsigned measure = 20;        // direct measure enclosures
    std::size_t discretize = 12;  // atoms at f_s(0), |s| = depth
    std::size_t pressure = 12;    // letters per pressure path
    std::size_t verify = 6;       // oracle comparisons up to this order
};

struct RunConfig {
    std::string preset;  // empty for systems read from a file
    IfsSpec spec;
    std::vector<Rational> r{Rational(2)};
    Depths depths;
    std::size_t k_max = 64;
    std::size_t lambda_k = 4;  // threshold sets for k = 1..lambda_k
    double tolerance = 0.02;
    std::size_t type_cap = 10000;
    std::size_t state_cap = 100000;
    std::string format = "json";
};

RunConfig preset_config(const std::string& name);

/// Reads a JSON configuration. Exact numbers are strings ("1/3",
/// "(-1+sqrt(5))/2"); the system is either a preset name or an "ifs" object
/// with rho, offsets (normalized) or translations (rescaled), and probs.
RunConfig parse_config(const std::string& text);

struct Report {
    nlohmann::ordered_json body;
    std::vector<std::string> csv_header;
    std::vector<std::vector<std::string>> csv_rows;
    bool failed = false;  // verify: some oracle disagreed
};

/// "json" (two-space indent, trailing newline) or "csv".
std::string render(const Report& report, const std::string& format);

Report run_analyze(const RunConfig& config);
Report run_dimension(const RunConfig& config);
Report run_quantize(const RunConfig& config);

/// Test seams for the oracle suite.
struct VerifyHooks {
    std::function<std::vector<Segment>(const IfsSpec&, std::size_t)> brute_net_intervals;
};

Report run_verify(const RunConfig& config, const VerifyHooks& hooks = {});

/// Full command line handling; returns the process exit code
/// (0 ok, 2 validation, 3 cap, 4 oracle mismatch, 5 internal).
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
                const VerifyHooks& hooks = {});

}  // namespace overlapq
