/// @file chunk.hpp
/// @brief Y-dimension decomposition with a two-cell overlap between
///        adjacent chunks (one halo column from each side).

#pragma once

#include <vector>

namespace advectflow {

struct Chunk {
    int y_start = 0;     // first interior Y index of the chunk
    int y_interior = 0;  // interior cells
    int y_total = 0;     // always y_interior + 2 (one halo column each side)
};

struct ChunkPlan {
    std::vector<Chunk> chunks;
};

/// Tiles [0, ny) into ceil(ny / chunk_width) chunks; all but possibly the
/// last have chunk_width interior cells and the remainder chunk is
/// shortened, never padded. chunk_width is clamped to [1, ny].
ChunkPlan plan_chunks(int ny, int chunk_width);

}  // namespace advectflow
