#include "advectflow/perf_model.hpp"

#include <algorithm>
#include <stdexcept>

#include "advectflow/chunk.hpp"
#include "advectflow/shift_buffer.hpp"

namespace advectflow {

void PerfParams::validate() const {
    if (clock_hz <= 0) throw std::invalid_argument("clock_hz must be positive");
    if (column_height < 2) throw std::invalid_argument("column_height must be >= 2");
    if (num_kernels < 1) throw std::invalid_argument("num_kernels must be >= 1");
    if (pcie_bw_h2d <= 0 || pcie_bw_d2h <= 0) {
        throw std::invalid_argument("PCIe bandwidths must be positive");
    }
    if (flops_per_cycle_interior <= 0 || flops_per_cycle_top <= 0) {
        throw std::invalid_argument("per-cycle operation counts must be positive");
    }
    if (!(mem_efficiency > 0.0 && mem_efficiency <= 1.0)) {
        throw std::invalid_argument("mem_efficiency must be in (0, 1]");
    }
}

double ops_per_cycle(const PerfParams& p) {
    p.validate();
    const double nz = static_cast<double>(p.column_height);
    return (p.flops_per_cycle_interior * (nz - 2.0) + p.flops_per_cycle_top) /
           (nz - 1.0);
}

double theoretical_flops(const PerfParams& p) {
    return p.clock_hz * ops_per_cycle(p) * p.num_kernels;
}

double efficiency_pct(double achieved_flops, double theoretical) {
    if (!(theoretical > 0.0)) {
        throw std::invalid_argument("theoretical performance must be positive");
    }
    return 100.0 * achieved_flops / theoretical;
}

TransferBytes transfer_bytes(std::int64_t total_cells) {
    if (total_cells <= 0) throw std::invalid_argument("cell count must be positive");
    TransferBytes t;
    t.bytes_in = 3 * 8 * total_cells;
    t.bytes_out = 3 * 8 * total_cells;
    return t;
}

double modeled_kernel_seconds(const Extents& extents, int chunk_width,
                              const PerfParams& p) {
    p.validate();
    if (!extents.valid()) throw std::invalid_argument("invalid extents");
    if (p.num_kernels > extents.nx) {
        throw std::invalid_argument("num_kernels must not exceed nx");
    }

    const ChunkPlan plan = plan_chunks(extents.ny, chunk_width);

    // Widest X slab dominates; slabs differ by at most one plane.
    const int widest_slab =
        extents.nx / p.num_kernels + (extents.nx % p.num_kernels != 0 ? 1 : 0);

    std::int64_t cycles = 0;
    for (const Chunk& c : plan.chunks) {
        const int zc = std::max(extents.nz, 3);
        cycles += static_cast<std::int64_t>(widest_slab + 2) * c.y_total * zc;
        cycles += ShiftBuffer::warm_up(c.y_total, zc);
    }
    return static_cast<double>(cycles) / p.clock_hz / p.mem_efficiency;
}

TransferPlan build_transfer_plan(std::int64_t total_cells, int n_chunks) {
    if (n_chunks < 1) throw std::invalid_argument("n_chunks must be >= 1");
    TransferPlan plan;
    plan.total_cells = total_cells;
    plan.n_chunks = n_chunks;
    plan.bytes = transfer_bytes(total_cells);
    const std::int64_t base = total_cells / n_chunks;
    const std::int64_t extra = total_cells % n_chunks;
    for (int c = 0; c < n_chunks; ++c) {
        plan.chunk_cells.push_back(base + (c < extra ? 1 : 0));
    }
    return plan;
}

double schedule_makespan(const std::vector<ChunkTaskTimes>& chunks, bool overlapped) {
    if (chunks.empty()) throw std::invalid_argument("schedule needs at least one chunk");

    if (!overlapped) {
        // Global ordering in_1..in_n, c_1..c_n, out_1..out_n.
        double t = 0.0;
        for (const auto& c : chunks) t += c.t_in;
        for (const auto& c : chunks) t += c.t_compute;
        for (const auto& c : chunks) t += c.t_out;
        return t;
    }

    // Each resource finishes a chunk's task as soon as both the resource
    // and the chunk's previous task are done.
    double in_done = 0.0, compute_done = 0.0, out_done = 0.0;
    for (const auto& c : chunks) {
        in_done = in_done + c.t_in;
        compute_done = std::max(in_done, compute_done) + c.t_compute;
        out_done = std::max(compute_done, out_done) + c.t_out;
    }
    return out_done;
}

double analytic_overlapped_makespan(double t_in, double t_compute, double t_out,
                                    int n_chunks) {
    if (n_chunks < 1) throw std::invalid_argument("n_chunks must be >= 1");
    const double bottleneck = std::max(t_in, std::max(t_compute, t_out));
    return (t_in + t_compute + t_out) + (n_chunks - 1) * bottleneck;
}

PerfReport schedule_overlap(const TransferPlan& plan, double kernel_seconds,
                            const PerfParams& p, std::optional<double> achieved_flops) {
    p.validate();
    if (plan.n_chunks < 1 || plan.chunk_cells.empty()) {
        throw std::invalid_argument("transfer plan must carry at least one chunk");
    }

    std::vector<ChunkTaskTimes> tasks;
    const double cells = static_cast<double>(plan.total_cells);
    for (std::int64_t chunk_cells : plan.chunk_cells) {
        ChunkTaskTimes t;
        t.t_in = static_cast<double>(24 * chunk_cells) / p.pcie_bw_h2d;
        t.t_out = static_cast<double>(24 * chunk_cells) / p.pcie_bw_d2h;
        t.t_compute = kernel_seconds * (static_cast<double>(chunk_cells) / cells);
        tasks.push_back(t);
    }

    PerfReport report;
    report.theoretical_gflops = theoretical_flops(p);
    report.modeled_kernel_seconds = kernel_seconds;
    report.serial_makespan_seconds = schedule_makespan(tasks, false);
    report.overlapped_makespan_seconds = schedule_makespan(tasks, true);
    report.transfer = plan.bytes;
    if (achieved_flops) {
        report.efficiency_pct = efficiency_pct(*achieved_flops, report.theoretical_gflops);
    }
    return report;
}

}  // namespace advectflow
