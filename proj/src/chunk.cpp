#include "advectflow/chunk.hpp"

#include <algorithm>
#include <stdexcept>

namespace advectflow {

ChunkPlan plan_chunks(int ny, int chunk_width) {
    if (ny < 1) {
        throw std::invalid_argument("ny must be >= 1");
    }
    chunk_width = std::clamp(chunk_width, 1, ny);

    ChunkPlan plan;
    for (int start = 0; start < ny; start += chunk_width) {
        Chunk c;
        c.y_start = start;
        c.y_interior = std::min(chunk_width, ny - start);
        c.y_total = c.y_interior + 2;
        plan.chunks.push_back(c);
    }
    return plan;
}

}  // namespace advectflow
