#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "advectflow/chunk.hpp"

using namespace advectflow;

TEST_CASE("single chunk covers the whole dimension") {
    const ChunkPlan p = plan_chunks(64, 64);
    REQUIRE(p.chunks.size() == 1);
    CHECK(p.chunks[0].y_start == 0);
    CHECK(p.chunks[0].y_interior == 64);
    CHECK(p.chunks[0].y_total == 66);
}

TEST_CASE("even split with two-cell overlaps") {
    const ChunkPlan p = plan_chunks(64, 16);
    REQUIRE(p.chunks.size() == 4);
    for (int c = 0; c < 4; ++c) {
        CHECK(p.chunks[static_cast<std::size_t>(c)].y_start == 16 * c);
        CHECK(p.chunks[static_cast<std::size_t>(c)].y_interior == 16);
    }
    for (std::size_t c = 0; c + 1 < p.chunks.size(); ++c) {
        // halo-inclusive spans [start-1, start+interior] overlap by 2
        const int left_end = p.chunks[c].y_start + p.chunks[c].y_interior;
        const int right_begin = p.chunks[c + 1].y_start - 1;
        CHECK(left_end - right_begin + 1 == 2);
    }
}

TEST_CASE("remainder chunk is shortened") {
    const ChunkPlan p = plan_chunks(10, 4);
    REQUIRE(p.chunks.size() == 3);
    CHECK(p.chunks[0].y_interior == 4);
    CHECK(p.chunks[1].y_interior == 4);
    CHECK(p.chunks[2].y_interior == 2);
}

TEST_CASE("degenerate widths clamp") {
    CHECK(plan_chunks(8, 100).chunks.size() == 1);
    CHECK(plan_chunks(8, 0).chunks.size() == 8);
    CHECK(plan_chunks(8, -3).chunks.size() == 8);
    CHECK_THROWS_AS(plan_chunks(0, 4), std::invalid_argument);
}

TEST_CASE("tiling and overlap invariants hold for randomized inputs") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 1000; ++trial) {
        const int ny = 1 + static_cast<int>(rng() % 200);
        const int width = 1 + static_cast<int>(rng() % 64);
        const ChunkPlan p = plan_chunks(ny, width);

        int cursor = 0;
        for (std::size_t c = 0; c < p.chunks.size(); ++c) {
            const Chunk& ch = p.chunks[c];
            CHECK(ch.y_start == cursor);
            CHECK(ch.y_interior >= 1);
            CHECK(ch.y_total == ch.y_interior + 2);
            if (c + 1 < p.chunks.size()) {
                const int left_end = ch.y_start + ch.y_interior;  // halo-inclusive end
                const int right_begin = p.chunks[c + 1].y_start - 1;
                CHECK(left_end - right_begin + 1 == 2);
            }
            cursor += ch.y_interior;
        }
        CHECK(cursor == ny);
        CHECK(p.chunks.size() == static_cast<std::size_t>((ny + std::min(width, ny) - 1) /
                                                          std::min(width, ny)));
    }
}
