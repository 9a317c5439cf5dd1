// Copyright 2026 clusterps Contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CLUSTERPS_RNG_H
#define CLUSTERPS_RNG_H

#include <cstdint>

namespace clusterps {

/// SplitMix64 finalizer. Bijective 64-bit mix with full avalanche.
inline uint64_t mix64(uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Keyed SplitMix64 substream. Stream (seed, stream_id) is derived by hashing
/// the pair, so the values drawn for shot i do not depend on the total shot
/// count or on which thread runs the shot.
class ShotRng {
   public:
    ShotRng(uint64_t seed, uint64_t stream_id)
        : state_(mix64(seed) ^ mix64(~stream_id * 0x6c8e9cf570932bd5ULL)) {}

    uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1).
    double next_double() { return (double)(next_u64() >> 11) * 0x1.0p-53; }

   private:
    uint64_t state_;
};

}  // namespace clusterps

#endif
