#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <optional>
#include <random>
#include <vector>

#include "advectflow/shift_buffer.hpp"

using namespace advectflow;

namespace {

/// Brute-force oracle: gather the window of a center directly from the
/// retained stream by position arithmetic.
StencilWindow gather(const std::vector<double>& stream, int yc, int zc,
                     std::int64_t center) {
    StencilWindow win;
    const std::int64_t plane = static_cast<std::int64_t>(yc) * zc;
    win.cx = static_cast<int>(center / plane);
    win.cy = static_cast<int>((center % plane) / zc);
    win.ck = static_cast<int>(center % zc);
    for (int dx = -1; dx <= 1; ++dx) {
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dz = -1; dz <= 1; ++dz) {
                const std::int64_t p = center + dx * plane + dy * zc + dz;
                win.values[static_cast<std::size_t>(StencilWindow::slot(dx, dy, dz))] =
                    stream[static_cast<std::size_t>(p)];
            }
        }
    }
    return win;
}

}  // namespace

TEST_CASE("construction bounds") {
    CHECK_NOTHROW(ShiftBuffer(3, 3));
    CHECK_THROWS_AS(ShiftBuffer(2, 8), std::invalid_argument);
    CHECK_THROWS_AS(ShiftBuffer(8, 2), std::invalid_argument);
}

TEST_CASE("memory footprint is the three-tier total") {
    const ShiftBuffer buf(66, 64);
    CHECK(buf.memory_footprint_values() == 3 * 66 * 64 + 3 * 64 * 3 + 27);
}

TEST_CASE("warm-up lag is one plane plus one column plus one cell") {
    CHECK(ShiftBuffer::warm_up(4, 4) == 21);
    CHECK(ShiftBuffer::warm_up(18, 64) == 18 * 64 + 64 + 1);
}

TEST_CASE("no window emerges before the buffer is structurally full") {
    const int yc = 4, zc = 4;
    const std::int64_t w = ShiftBuffer::warm_up(yc, zc);
    ShiftBuffer buf(yc, zc);
    for (std::int64_t n = 0; n < 2 * w; ++n) {
        CHECK(!buf.push(static_cast<double>(n)).has_value());
    }
    const auto first = buf.push(static_cast<double>(2 * w));
    REQUIRE(first.has_value());
    // first complete window is centered on the first fully-surrounded cell
    CHECK(first->cx == 1);
    CHECK(first->cy == 1);
    CHECK(first->ck == 1);
}

TEST_CASE("ramp stream windows equal the brute-force gather") {
    const int yc = 4, zc = 4, planes = 4;
    std::vector<double> stream;
    for (int n = 0; n < planes * yc * zc; ++n) stream.push_back(n);

    ShiftBuffer buf(yc, zc);
    std::int64_t expected_center = ShiftBuffer::warm_up(yc, zc);
    for (std::size_t n = 0; n < stream.size(); ++n) {
        const auto win = buf.push(stream[n]);
        if (!win) continue;
        const StencilWindow want = gather(stream, yc, zc, expected_center);
        CHECK(win->cx == want.cx);
        CHECK(win->cy == want.cy);
        CHECK(win->ck == want.ck);
        for (int s = 0; s < 27; ++s) {
            CHECK(win->values[static_cast<std::size_t>(s)] ==
                  want.values[static_cast<std::size_t>(s)]);
        }
        ++expected_center;
    }
    CHECK(expected_center > ShiftBuffer::warm_up(yc, zc));
}

TEST_CASE("constant stream emits constant windows") {
    ShiftBuffer buf(5, 3);
    for (int n = 0; n < 200; ++n) {
        const auto win = buf.push(7.25);
        if (win) {
            for (double v : win->values) CHECK(v == 7.25);
        }
    }
    CHECK(buf.windows_emitted() > 0);
}

TEST_CASE("window centers lag the input by exactly the warm-up") {
    const int yc = 6, zc = 5;
    const std::int64_t w = ShiftBuffer::warm_up(yc, zc);
    ShiftBuffer buf(yc, zc);
    const std::int64_t plane = static_cast<std::int64_t>(yc) * zc;
    for (std::int64_t n = 0; n < 4 * plane; ++n) {
        const auto win = buf.push(static_cast<double>(n));
        if (win) {
            const std::int64_t center =
                (static_cast<std::int64_t>(win->cx) * yc + win->cy) * zc + win->ck;
            CHECK(n - center == w);
        }
    }
}

TEST_CASE("randomized streams: gather oracle, initiation interval, pressure") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 40; ++trial) {
        const int yc = 3 + static_cast<int>(rng() % 18);
        const int zc = 3 + static_cast<int>(rng() % 18);
        const int planes = 3 + static_cast<int>(rng() % 4);
        const std::int64_t w = ShiftBuffer::warm_up(yc, zc);

        std::vector<double> stream;
        for (int n = 0; n < planes * yc * zc; ++n) {
            stream.push_back(static_cast<double>(rng() >> 11) * 0x1.0p-53);
        }

        ShiftBuffer buf(yc, zc);
        std::int64_t windows = 0;
        for (std::size_t n = 0; n < stream.size(); ++n) {
            const auto win = buf.push(stream[n]);
            const bool warm = static_cast<std::int64_t>(n) >= 2 * w;
            // one window per push once warm, none before
            CHECK(win.has_value() == warm);
            if (!win) continue;
            ++windows;
            const std::int64_t center = static_cast<std::int64_t>(n) - w;
            const StencilWindow want = gather(stream, yc, zc, center);
            CHECK(win->cx == want.cx);
            CHECK(win->cy == want.cy);
            CHECK(win->ck == want.ck);
            bool all_equal = true;
            for (int s = 0; s < 27; ++s) {
                all_equal = all_equal && win->values[static_cast<std::size_t>(s)] ==
                                             want.values[static_cast<std::size_t>(s)];
            }
            CHECK(all_equal);
            // the window center carries the field value at the center slot
            CHECK(win->value(0, 0, 0) == stream[static_cast<std::size_t>(center)]);
        }

        // conservation: every push past the fill point emits exactly once
        CHECK(windows == static_cast<std::int64_t>(stream.size()) - 2 * w);
        CHECK(windows == buf.windows_emitted());

        // dual-port bound on every multi-cell memory
        const PortPressure pp = buf.max_port_pressure();
        for (int s = 0; s < 3; ++s) {
            CHECK(pp.slice[static_cast<std::size_t>(s)] <= 2);
            CHECK(pp.rect[static_cast<std::size_t>(s)] <= 2);
        }
        CHECK(pp.max_any() == 2);
    }
}

TEST_CASE("port pressure reads zero before any push") {
    const ShiftBuffer buf(4, 4);
    CHECK(buf.max_port_pressure().max_any() == 0);
}

TEST_CASE("pushes past a declared stream end throw") {
    const int yc = 3, zc = 3, planes = 3;
    ShiftBuffer buf(yc, zc, planes);
    const std::int64_t budget = planes * yc * zc + ShiftBuffer::warm_up(yc, zc);
    for (std::int64_t n = 0; n < budget; ++n) {
        CHECK_NOTHROW(buf.push(0.0));
    }
    CHECK_THROWS_AS(buf.push(0.0), std::out_of_range);
}
