/// @file reference.hpp
/// @brief Plain triple-loop PW advection: the bit-exact oracle for the
///        dataflow engine, plus floating-point operation accounting.

#pragma once

#include <array>
#include <cstdint>

#include "advectflow/field.hpp"

namespace advectflow {

/// The three advection source terms. Same extents and halos as the inputs;
/// halo cells and the k = 0 plane are zero (the k-loop starts at the second
/// plane and never writes them).
struct SourceTerms {
    Field3D su;
    Field3D sv;
    Field3D sw;
};

/// Floating-point operation counts, derived by evaluating the implemented
/// expressions with a counting scalar type (each +, -, * counts one).
struct FlopCount {
    std::int64_t per_interior_cell = 0;  // all three stages, k below the top
    std::int64_t per_top_cell = 0;       // all three stages at the column top
    std::array<std::int64_t, 3> per_stage_interior{};  // u, v, w
    std::array<std::int64_t, 3> per_stage_top{};
    std::int64_t total = 0;  // columns * ((nz-2) * interior + top)
};

Field3D advect_u(const Field3D& u, const Field3D& v, const Field3D& w,
                 const AdvectionCoeffs& coeffs);
Field3D advect_v(const Field3D& u, const Field3D& v, const Field3D& w,
                 const AdvectionCoeffs& coeffs);
Field3D advect_w(const Field3D& u, const Field3D& v, const Field3D& w,
                 const AdvectionCoeffs& coeffs);

/// All three stages over the shared loop nest of the original kernel.
SourceTerms advect_all(const Field3D& u, const Field3D& v, const Field3D& w,
                       const AdvectionCoeffs& coeffs);

/// Static operation counts for the implemented expressions at the given
/// extents. Throws for invalid extents.
FlopCount count_flops(const Extents& extents);

/// Executes the full loop nest with a counting scalar and returns the total
/// number of +,-,* evaluated. Independent aggregation path from
/// count_flops' closed formula (loop accumulation vs. cell-count
/// arithmetic).
std::int64_t counted_execution_flops(const Extents& extents);

}  // namespace advectflow
