#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace droc {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitSoftFail = 2;

struct GlobalOptions {
    std::string config;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    bool quiet = false;
};

struct Streams {
    std::ostream& out;
    std::ostream& err;
};

// Full pipeline: multistart, penalty solve, worst-case distribution at u*,
// certificate. Writes solution.csv, worstcase.csv, kkt.txt, trace.csv and
// manifest.json. 0 converged, 2 soft failure (best iterate written), 1 error.
int cmd_solve(const GlobalOptions& g, Streams io);

// ISP and Dual-ISP at a given control.
int cmd_inner(const GlobalOptions& g, const std::string& control_file, Streams io);

// Certificate and gradient cross-checks for a solution file; 0 iff all
// residuals are within the configured tolerances, 2 otherwise.
int cmd_check(const GlobalOptions& g, const std::string& solution_file, Streams io);

// Density discretization at m and 2m cells with moment residuals.
int cmd_discretize(const GlobalOptions& g, Streams io);

// Fed-batch reproduction table; 0 iff every row passes.
int cmd_bench(const GlobalOptions& g, const std::optional<std::string>& reference, Streams io);

}  // namespace droc
