/// @file cli_support.hpp
/// @brief Configuration and command implementations behind the advectflow
///        command-line tool.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "advectflow/field.hpp"

namespace advectflow {

/// Exit codes: 0 success/verified, 1 verification failure, 2 usage or
/// configuration error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitUsage = 2;

struct RunConfig {
    Extents extents{16, 16, 16};
    std::uint64_t seed = 1;

    // Exactly one source per field: a generator spec or an input file.
    // Empty generator and file fall back to seeded defaults (seed, seed+1,
    // seed+2 over [-1, 1]).
    std::string gen_u, gen_v, gen_w;
    std::string file_u, file_v, file_w;
    std::string coeffs_file;

    int chunk_width = 16;
    int num_kernels = 1;
    int channel_capacity = 64;
    bool sequential = false;
    double stall_timeout = 10.0;
    bool inject_fault = false;
    int max_threads = 0;  // from ADVECTFLOW_THREADS; 0 = uncapped

    double clock_hz = 300e6;
    double pcie_in_bw = 8e9;
    double pcie_out_bw = 8e9;
    double mem_efficiency = 1.0;
    int n_transfer_chunks = 4;
    bool overlap = true;
    std::optional<double> achieved_gflops;

    std::string report_format = "json";  // json | csv
    std::string out_dir = ".";
    std::string config_file;

    std::vector<int> bench_chunk_widths;  // defaults to {chunk_width}
    std::vector<int> bench_kernels;       // defaults to {num_kernels}

    void validate() const;  // throws std::invalid_argument on bad combinations
};

/// Applies a flat key=value config file (keys named like the long flags,
/// e.g. "chunk-width=8") on top of the current values. Command-line flags
/// parsed afterwards override the file.
void load_run_config_file(const std::string& path, RunConfig& config);

/// Parses a flat key=value coefficients file (tcx, tcy, tzc1, tzc2; list
/// values comma-separated, single values broadcast over the column).
AdvectionCoeffs load_coeffs(const std::string& path, int nz);

int cmd_verify(const RunConfig& config, std::ostream& out);
int cmd_run(const RunConfig& config, std::ostream& out);
int cmd_perfmodel(const RunConfig& config, std::ostream& out);
int cmd_bench(const RunConfig& config, std::ostream& out);

}  // namespace advectflow
