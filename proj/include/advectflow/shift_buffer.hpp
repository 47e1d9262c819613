/// @file shift_buffer.hpp
/// @brief 3D shift buffer: one value in per cycle, one complete 27-point
///        stencil window out per cycle once warm.
///
/// Values are streamed plane by plane (X outer), column by column (Y),
/// bottom to top (Z fastest). The buffer is a cascade of three tiers:
///
///   1. three Y x Z slices. The incoming value lands in the first slice at
///      the current (y, k) cell, displacing the value that arrived one
///      plane earlier; that one cascades into the second slice, displacing
///      the value from two planes back, which lands in the third. Each
///      slice does at most one read and one write per cycle.
///   2. three Z x 3 rectangles, one per slice. Rectangle r holds the last
///      three Y-columns of its plane-delayed stream; per cycle its row k
///      shifts one lane (one row read, one row write), yielding the values
///      delayed by one and two whole columns.
///   3. three 3 x 3 register blocks. Block r shifts in Z each cycle and
///      ingests the rectangle taps, holding the lane's 3 x 3 window face.
///
/// After the push of stream position p, the register blocks hold the full
/// 27-point window of the cell at position p - W, where
///
///   W = yc * zc + zc + 1
///
/// (one plane + one column + one cell: the structural lag from a cell to
/// its (+1,+1,+1) neighbor). A window is emitted per push as soon as every
/// slot holds a real streamed value, i.e. from push 2W + 1 onward, and the
/// emitted center advances in the same X-outer/Y-middle/Z-inner order as
/// the input. Window contents are defined purely by stream position: slot
/// (dx, dy, dz) holds the value pushed at center + dx*yc*zc + dy*zc + dz.
/// Whether a center is geometrically meaningful (interior to the streamed
/// block) is the caller's concern.
///
/// Port accounting: each slice is one dual-ported memory (the 3-deep X
/// dimension is fully partitioned), and each rectangle's accesses are
/// counted at row granularity (its 3-wide dimension is partitioned into
/// lanes addressed by the same row). The 3 x 3 blocks live in registers
/// and are exempt. Under this accounting the buffer never exceeds two
/// accesses per memory per cycle, by construction; the counters verify it.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

namespace advectflow {

/// One 27-point neighborhood, centered on chunk-local cell (cx, cy, ck).
struct StencilWindow {
    std::array<double, 27> values{};
    int cx = 0;
    int cy = 0;
    int ck = 0;

    static constexpr int slot(int dx, int dy, int dz) {
        return (dx + 1) * 9 + (dy + 1) * 3 + (dz + 1);
    }
    double value(int dx, int dy, int dz) const {
        return values[static_cast<std::size_t>(slot(dx, dy, dz))];
    }

    /// Accessor usable with the per-cell advection expressions.
    double operator()(int dx, int dy, int dz) const { return value(dx, dy, dz); }
};

/// Maximum reads+writes observed in any single cycle, per memory.
struct PortPressure {
    std::array<int, 3> slice{};  // per slice, element accesses
    std::array<int, 3> rect{};   // per rectangle, row accesses

    int max_any() const;
};

class ShiftBuffer {
  public:
    /// yc, zc >= 3 (a 27-point window cannot form below that). When
    /// x_planes > 0 the stream length is declared and pushes past
    /// x_planes * yc * zc plus one drain allowance of W throw.
    ShiftBuffer(int yc, int zc, int x_planes = -1);

    /// Consumes one value; returns the completed window, if any.
    std::optional<StencilWindow> push(double value);

    std::int64_t pushed() const { return pushed_; }
    std::int64_t windows_emitted() const { return windows_; }

    int yc() const { return yc_; }
    int zc() const { return zc_; }

    /// Structural lag from a cell to the push that completes its window.
    static std::int64_t warm_up(int yc, int zc) {
        return static_cast<std::int64_t>(yc) * zc + zc + 1;
    }
    std::int64_t warm_up() const { return warm_up(yc_, zc_); }

    /// Scalar slots across all three tiers: 3*yc*zc + 3*(zc*3) + 27.
    std::int64_t memory_footprint_values() const;

    /// Zeroes before the first push.
    PortPressure max_port_pressure() const { return pressure_; }

  private:
    int yc_;
    int zc_;
    std::int64_t plane_cells_;  // yc * zc
    std::int64_t push_limit_;   // -1 = unbounded
    std::int64_t pushed_ = 0;
    std::int64_t windows_ = 0;

    // tier 1: slices_[s][y * zc + k]
    std::array<std::vector<double>, 3> slices_;
    // tier 2: rects_[r][k][lane], lane 0 newest
    std::array<std::vector<std::array<double, 3>>, 3> rects_;
    // tier 3: regs_[r][tap][age], age 0 newest
    std::array<std::array<std::array<double, 3>, 3>, 3> regs_{};

    PortPressure pressure_{};
};

}  // namespace advectflow
