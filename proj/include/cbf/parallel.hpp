#pragma once

#include <cstdint>
#include <functional>

// Data-parallel helpers with deterministic semantics:
//  - parallel_for partitions [0,n) into contiguous ranges with disjoint
//    writes, so scheduling order cannot affect results.
//  - Reductions are the caller's job: split into chunks whose boundaries
//    depend only on the data size (see mesh_ops), evaluate chunks in any
//    order, combine in chunk-index order. Results are then independent of
//    the thread count.

namespace cbf::par {

using std::int64_t;

int threads();
void set_threads(int n);  // clamped to >= 1

// fn(first, last) over a partition of [0, n).
void parallel_for(int64_t n, const std::function<void(int64_t, int64_t)>& fn);

// Evaluates chunk_fn(c) for c in [0, nchunks), possibly concurrently, and
// returns the results summed in increasing c (fixed combine order).
double ordered_sum(int64_t nchunks, const std::function<double(int64_t)>& fn);

// Same but combines with max.
double ordered_max(int64_t nchunks, const std::function<double(int64_t)>& fn);

}  // namespace cbf::par
