#pragma once

#include <functional>

#include "mvsc/common.hpp"

namespace mvsc::detail {

/// Column-chunk width used by every data-parallel kernel. The chunk grid
/// depends only on the problem size, never on the worker count, so chunked
/// reductions combined in index order give bit-identical results for any
/// thread cap.
inline constexpr Index kColumnChunk = 1024;

inline Index chunk_count(Index count, Index chunk_size) {
  return count <= 0 ? 0 : (count + chunk_size - 1) / chunk_size;
}

/// Runs fn(chunk, begin, end) for every chunk of [0, count). Chunks execute
/// on up to thread_cap() workers; each invocation must write only to storage
/// owned by its chunk index. Exceptions are rethrown on the calling thread.
void run_chunks(Index count, Index chunk_size,
                const std::function<void(Index, Index, Index)>& fn);

}  // namespace mvsc::detail
