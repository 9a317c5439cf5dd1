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

#ifndef CLUSTERPS_BITS_H
#define CLUSTERPS_BITS_H

#include <charconv>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace clusterps {

/// One byte per bit. Values are always 0 or 1.
using BitVec = std::vector<uint8_t>;

inline size_t bit_weight(const BitVec &v) {
    size_t w = 0;
    for (uint8_t b : v) {
        w += b;
    }
    return w;
}

inline bool is_zero(const BitVec &v) {
    for (uint8_t b : v) {
        if (b) {
            return false;
        }
    }
    return true;
}

inline void xor_into(BitVec &dst, const BitVec &src) {
    for (size_t i = 0; i < dst.size(); i++) {
        dst[i] ^= src[i];
    }
}

/// Shortest decimal form that parses back to the identical double.
inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace clusterps

#endif
