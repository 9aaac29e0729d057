#pragma once

#include <cstddef>

// Process-wide heap accounting for the scaling benchmark. Linking
// alloc_tracker.cpp into a binary interposes the C allocation entry points,
// so every allocation (including the linear algebra library's aligned
// buffers) is counted. Overhead is two relaxed atomics per call.
namespace memtrack {

/// Restarts the peak watermark at the currently live byte count.
void reset_peak();

/// Highest live byte count observed since the last reset.
std::size_t peak_bytes();

/// Currently live heap bytes.
std::size_t live_bytes();

}  // namespace memtrack
