/// @file perf_model.hpp
/// @brief Analytic throughput ceilings, host/device transfer volumes, and a
///        deterministic event-driven transfer/compute overlap scheduler.

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "advectflow/field.hpp"

namespace advectflow {

struct PerfParams {
    double clock_hz = 300e6;
    int column_height = 64;  // nz
    int num_kernels = 1;
    double pcie_bw_h2d = 8e9;  // bytes/second, host to device
    double pcie_bw_d2h = 8e9;  // bytes/second, device to host
    // Operations issued per cycle by one kernel: every grid cell costs the
    // interior figure except the column top.
    double flops_per_cycle_interior = 63.0;
    double flops_per_cycle_top = 55.0;
    // End-to-end throughput derating for the external memory technology
    // (1.0 = ideal; lower for slower memory).
    double mem_efficiency = 1.0;

    void validate() const;
};

/// Average operations per cycle over one column: the k-loop covers nz - 1
/// cells, one of which is the reduced column top.
double ops_per_cycle(const PerfParams& p);

/// Peak deliverable FLOP/s: clock * ops-per-cycle * kernels.
double theoretical_flops(const PerfParams& p);

/// 100 * achieved / theoretical. Throws for nonpositive theoretical.
double efficiency_pct(double achieved_flops, double theoretical_flops);

struct TransferBytes {
    std::int64_t bytes_in = 0;   // three input fields, 8 bytes per cell
    std::int64_t bytes_out = 0;  // three source-term fields back
    std::int64_t total() const { return bytes_in + bytes_out; }
};

/// 24 bytes each way per grid cell.
TransferBytes transfer_bytes(std::int64_t total_cells);

/// Modeled kernel execution time: one cell consumed per cycle per kernel,
/// plus the chunk-halo re-reads and the per-chunk shift-buffer warm-up,
/// divided by the memory-efficiency derating. Kernels split the domain
/// along X; the slowest (widest) slab sets the time.
double modeled_kernel_seconds(const Extents& extents, int chunk_width,
                              const PerfParams& p);

/// Host <-> device traffic plan, chunked along X for overlap.
struct TransferPlan {
    std::int64_t total_cells = 0;
    int n_chunks = 1;
    TransferBytes bytes;
    std::vector<std::int64_t> chunk_cells;  // near-equal split, sums to total
};

TransferPlan build_transfer_plan(std::int64_t total_cells, int n_chunks);

/// Per-chunk task durations for the three schedule resources.
struct ChunkTaskTimes {
    double t_in = 0.0;
    double t_compute = 0.0;
    double t_out = 0.0;
};

/// Event-driven makespan over three resources (H2D link, kernel, D2H
/// link). Each chunk is in -> compute -> out; overlapped mode lets
/// different chunks occupy different resources simultaneously, serial mode
/// runs every transfer and compute back to back.
double schedule_makespan(const std::vector<ChunkTaskTimes>& chunks, bool overlapped);

/// Closed form for equal chunks: sum of one chunk's three task times plus
/// (n - 1) times the largest single task time.
double analytic_overlapped_makespan(double t_in, double t_compute, double t_out,
                                    int n_chunks);

struct PerfReport {
    double theoretical_gflops = 0.0;  // FLOP/s for the configured kernels
    double modeled_kernel_seconds = 0.0;
    double serial_makespan_seconds = 0.0;
    double overlapped_makespan_seconds = 0.0;
    std::optional<double> efficiency_pct;  // set when an achieved figure is given
    TransferBytes transfer;
};

/// Assembles the full report for a scenario: splits kernel time and
/// transfer volume across the plan's chunks and schedules both modes.
PerfReport schedule_overlap(const TransferPlan& plan, double kernel_seconds,
                            const PerfParams& p,
                            std::optional<double> achieved_flops = std::nullopt);

}  // namespace advectflow
