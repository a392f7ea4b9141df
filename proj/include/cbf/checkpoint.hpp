#pragma once

#include <string>

#include "cbf/flow.hpp"

// Binary trajectory checkpoints. Fixed layout, little-endian throughout:
//
//   magic   8 bytes  "CBFCHKPT"
//   u32     format version (currently 1)
//   u32     n (dimension)
//   u64[n]  axis sizes
//   f64[n]  periods
//   f64     s0
//   u32     flow-variant tag
//   f64     t
//   i64     step
//   f64[]   metric components, index pairs i <= j in row-major pair order,
//           each component a full plane in grid linear order
//   f64[]   pressure plane (all zeros when the state carries no pressure)
//   u64     FNV-1a checksum of every preceding byte
//
// Round-trips are bit-exact: resuming from a checkpoint continues the
// trajectory with the identical floating-point stream.

namespace cbf {

inline constexpr char kCheckpointMagic[8] = {'C', 'B', 'F', 'C',
                                             'H', 'K', 'P', 'T'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

// Write `state` (metric, optional pressure, time, step, s0, variant).
// Throws CheckpointError on I/O failure.
void save_checkpoint(const std::string& path, const FlowState& state);

// Read a checkpoint written by save_checkpoint. Validates magic, version,
// and checksum; throws CheckpointError on mismatch or malformed input.
// An all-zero pressure plane loads as an empty pressure field (the flow
// re-solves it), since no genuine solve returns an exact-zero field.
FlowState load_checkpoint(const std::string& path);

}  // namespace cbf
