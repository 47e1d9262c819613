#include "advectflow/shift_buffer.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace advectflow {

int PortPressure::max_any() const {
    int m = 0;
    for (int s : slice) m = std::max(m, s);
    for (int r : rect) m = std::max(m, r);
    return m;
}

ShiftBuffer::ShiftBuffer(int yc, int zc, int x_planes) : yc_(yc), zc_(zc) {
    if (yc < 3 || zc < 3) {
        throw std::invalid_argument("shift buffer needs yc >= 3 and zc >= 3");
    }
    plane_cells_ = static_cast<std::int64_t>(yc_) * zc_;
    push_limit_ = x_planes > 0 ? x_planes * plane_cells_ + warm_up() : -1;
    for (auto& s : slices_) s.assign(static_cast<std::size_t>(plane_cells_), 0.0);
    for (auto& r : rects_) r.assign(static_cast<std::size_t>(zc_), {0.0, 0.0, 0.0});
}

std::optional<StencilWindow> ShiftBuffer::push(double value) {
    if (push_limit_ >= 0 && pushed_ >= push_limit_) {
        throw std::out_of_range("push beyond the declared stream end (" +
                                std::to_string(push_limit_) + " values)");
    }
    const std::int64_t p = pushed_++;
    const std::size_t cell = static_cast<std::size_t>(p % plane_cells_);
    const std::size_t k = static_cast<std::size_t>(p % zc_);

    // Per-cycle access tally; folded into the running maxima at the end.
    std::array<int, 3> slice_acc{};
    std::array<int, 3> rect_acc{};

    // Tier 1: cascade through the slices. displaced0/1 are the values that
    // entered one and two planes ago at this (y, k).
    const double displaced0 = slices_[0][cell];  // read
    slices_[0][cell] = value;                    // write
    slice_acc[0] = 2;
    const double displaced1 = slices_[1][cell];
    slices_[1][cell] = displaced0;
    slice_acc[1] = 2;
    slices_[2][cell] = displaced1;
    slice_acc[2] = 1;

    const std::array<double, 3> lane_in{value, displaced0, displaced1};

    // Tier 2: each rectangle shifts its row k by one lane. The outgoing row
    // supplies the taps one and two columns behind the lane input.
    // Tier 3: register blocks shift in Z and ingest the three taps.
    for (std::size_t r = 0; r < 3; ++r) {
        const std::array<double, 3> row = rects_[r][k];          // row read
        rects_[r][k] = {lane_in[r], row[0], row[1]};             // row write
        rect_acc[r] = 2;

        const std::array<double, 3> taps{lane_in[r], row[0], row[1]};
        for (std::size_t t = 0; t < 3; ++t) {
            auto& col = regs_[r][t];
            col[2] = col[1];
            col[1] = col[0];
            col[0] = taps[t];
        }
    }

    for (std::size_t s = 0; s < 3; ++s) {
        pressure_.slice[s] = std::max(pressure_.slice[s], slice_acc[s]);
        pressure_.rect[s] = std::max(pressure_.rect[s], rect_acc[s]);
    }

    // regs_[r][t][a] now holds the value delayed by r planes + t columns
    // + a cells; the full window of the cell at p - W is present once
    // every slot is backed by a real push, i.e. p >= 2W.
    const std::int64_t lag = warm_up();
    if (p < 2 * lag) {
        return std::nullopt;
    }

    const std::int64_t center = p - lag;
    StencilWindow win;
    win.cx = static_cast<int>(center / plane_cells_);
    win.cy = static_cast<int>((center % plane_cells_) / zc_);
    win.ck = static_cast<int>(center % zc_);
    for (int dx = -1; dx <= 1; ++dx) {
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dz = -1; dz <= 1; ++dz) {
                const auto r = static_cast<std::size_t>(1 - dx);
                const auto t = static_cast<std::size_t>(1 - dy);
                const auto a = static_cast<std::size_t>(1 - dz);
                win.values[static_cast<std::size_t>(StencilWindow::slot(dx, dy, dz))] =
                    regs_[r][t][a];
            }
        }
    }
    ++windows_;
    return win;
}

std::int64_t ShiftBuffer::memory_footprint_values() const {
    return 3 * plane_cells_ + 3 * (static_cast<std::int64_t>(zc_) * 3) + 27;
}

}  // namespace advectflow
