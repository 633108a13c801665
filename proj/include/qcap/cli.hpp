#pragma once

// Command-line front end: single-point capacity, sweeps, limit-relation
// residuals and pulse-derived channels, all emitted as CSV.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qcap/capacity.hpp"
#include "qcap/pulse.hpp"

namespace qcap::cli {

inline constexpr std::string_view kCsvHeader =
    "mu,zeta,alpha,nu_t,basis,m_phi,m_psi,p1,p2,p3,p4,capacity_bits,status";
inline constexpr std::string_view kLimitsHeader =
    "case,relation,p,nu_t,lhs_bits,rhs_bits,f_term,residual_bits";
inline constexpr std::string_view kTrajectoryHeader = "t,r11,r12,r21,r22";

enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 2,
    kExitDomain = 3,
    kExitNumerical = 4,
    kExitIo = 5,
};

struct PulseConfig {
    std::string envelope = "gaussian";
    double width = 1.0;
    /// Width of the second pulse; 0 means same as `width`.
    double width2 = 0.0;
    /// Delay of the second pulse behind the first.
    double delay = 0.0;
    /// Amplitude of the second pulse (the first has amplitude 1).
    double amp2 = 1.0;
    double chirp = 0.0;
    double carrier = 0.0;
    std::string corr = "exponential";
    double t_c = 1.0;
    double scale = 1.0;
    double bias = 1.0;
    /// Channel-use duration; 0 means until both pulses have passed.
    double duration = 0.0;
    int steps = 200;
    std::string trajectory_out;
};

struct RunConfig {
    std::string command;
    double nu1 = 1.0;
    double alpha = 0.0;
    double zeta = 0.0;
    double mu = 0.0;
    double nu_t = 0.1;
    /// "axis:start:stop:step", at most two.
    std::vector<std::string> axes;
    /// opt | fac | bell | com
    std::vector<std::string> bases;
    std::optional<double> m_phi;
    std::optional<double> m_psi;
    /// p grid of the limits command, "start:stop:step".
    std::string limit_grid = "0:1:0.25";
    std::vector<std::string> limit_cases;
    PulseConfig pulse;
    std::string output = "-";
    /// Recorded for reproducibility; the optimizer has no random component.
    std::uint64_t seed = 0;
    /// 0 = QCAP_THREADS or hardware concurrency.
    unsigned threads = 0;
};

/// "%.17e"
std::string format_number(double x);

void write_csv(std::ostream& os, const std::vector<SweepRow>& rows);
/// Writes to `path`, or stdout for "-". Throws IoError if the file cannot be written.
void emit_csv(const std::vector<SweepRow>& rows, const std::string& path);

/// Parses argv, merging `--config file` key=value entries under the flags.
/// Throws UsageError on malformed input; returns nullopt after --help.
std::optional<RunConfig> parse_args(const std::vector<std::string>& args, std::ostream& out);

/// Executes a parsed config. Errors propagate as qcap::Error subclasses.
void run(const RunConfig& config, std::ostream& diag);

/// parse_args + run with errors mapped to exit codes and one-line diagnostics.
int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qcap::cli
