#pragma once
// Serialization of WalkBatch tables.
//
// CSV columns: replicate, checkpoint, S_1..S_d, T_1..T_d, C_1..C_d and,
// for urn batches, W and N_A. Reals use %.17g so values round-trip.
//
// Binary layout (little-endian):
//   char[4]  magic "ERWB"
//   u32      version (1)
//   u32      d
//   u64      replicates
//   u64      checkpoint count K
//   u8       has_W
//   u64[K]   checkpoint times
//   per replicate, per checkpoint: i64 S[d], f64 T[d], f64 C[d]
//                                  and, when has_W, i64 W, i64 N_A

#include <iosfwd>
#include <string>

#include "erw/walkers.hpp"

namespace erw {

void write_batch_csv(std::ostream& out, const WalkBatch& batch);
void write_batch_binary(std::ostream& out, const WalkBatch& batch);
/// Throws std::runtime_error on a bad magic, version or truncated stream.
WalkBatch read_batch_binary(std::istream& in);

}  // namespace erw
