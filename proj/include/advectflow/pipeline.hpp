/// @file pipeline.hpp
/// @brief The dataflow machine: read -> shift buffer -> replicate -> advect
///        -> write, as concurrently executing stages over bounded streams,
///        bit-identical to the plain-loop reference for every configuration.

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>

#include "advectflow/field.hpp"
#include "advectflow/reference.hpp"

namespace advectflow {

enum class ExecutionMode {
    concurrent,  // one thread per stage
    sequential   // degenerate single-threaded stepping, identical bits
};

struct PipelineConfig {
    int channel_capacity = 64;  // elements per inter-stage stream
    int chunk_width = 16;       // interior Y cells per chunk
    int num_kernels = 1;        // parallel pipeline instances (X split)
    bool record_cycle_stats = true;
    ExecutionMode mode = ExecutionMode::concurrent;
    double stall_timeout_seconds = 10.0;  // no-progress watchdog
    int max_threads = 0;                  // 0 = uncapped
    bool inject_fault = false;  // test hook: flips one output bit

    void validate() const;
};

struct StageStalls {
    std::int64_t send_blocks = 0;
    std::int64_t recv_blocks = 0;
};

/// Logical cycle statistics for one run. Element and window counts cover a
/// single field's stream (the three field streams are identical in shape),
/// summed over chunks and kernel instances.
struct CycleStats {
    std::int64_t elements_streamed = 0;  // values pushed per field, minus drain
    std::int64_t windows_emitted = 0;    // interior-center windows per field
    double achieved_ii = 0.0;  // pushes per structural window once emitting
    std::map<std::string, StageStalls> stage_stall_counts;
};

/// Runs one pipeline instance over the whole domain (num_kernels ignored).
std::pair<SourceTerms, CycleStats> run_pipeline(const Field3D& u, const Field3D& v,
                                                const Field3D& w,
                                                const AdvectionCoeffs& coeffs,
                                                const PipelineConfig& config);

/// Splits the domain into num_kernels contiguous X slabs (one-cell halo
/// overlap), runs one pipeline instance per slab, and merges the results.
/// Bitwise identical to num_kernels = 1. Throws if num_kernels > nx.
std::pair<SourceTerms, CycleStats> run_multi_kernel(const Field3D& u,
                                                    const Field3D& v,
                                                    const Field3D& w,
                                                    const AdvectionCoeffs& coeffs,
                                                    const PipelineConfig& config);

}  // namespace advectflow
