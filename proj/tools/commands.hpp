#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "config.hpp"

namespace dynpolar::cli {

enum ExitCode { kOk = 0, kVerifyFailed = 1, kConfigFailed = 2, kRuntimeFailed = 3 };

struct Check {
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;
    bool below = true; // pass when value < tolerance; otherwise value > tolerance

    bool pass() const { return below ? value < tolerance : value > tolerance; }
};

struct Report {
    std::vector<Check> checks;
    bool all_pass() const;
    // One line per check: name value tolerance PASS|FAIL.
    std::string text() const;
};

// Fixed-format double for CSV cells.
std::string format_double(double x);

// angles.csv and factors.csv in cfg.out.
void run_decompose(const RunConfig& cfg);
// nu.csv in cfg.out; returns the largest |nu - omega/2|.
double run_fiber_average(const RunConfig& cfg, std::ostream& out);
// suite: all, dpd, polar, angles, fibers, frames. Also writes report.txt.
Report run_verify(const std::string& suite, const RunConfig& cfg);

// Whole command line; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace dynpolar::cli
