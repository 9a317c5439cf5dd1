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

#ifndef CLUSTERPS_SPARSE_H
#define CLUSTERPS_SPARSE_H

#include <cstdint>
#include <vector>

#include "clusterps/bits.h"

namespace clusterps {

/// Binary matrix stored as sorted adjacency lists in both directions.
class SparseBinaryMatrix {
   public:
    SparseBinaryMatrix() = default;
    SparseBinaryMatrix(size_t num_rows, size_t num_cols);

    /// Builds from per-column row supports. Duplicate entries are an error.
    static SparseBinaryMatrix from_columns(size_t num_rows, std::vector<std::vector<uint32_t>> columns);
    /// Builds from per-row column supports.
    static SparseBinaryMatrix from_rows(std::vector<std::vector<uint32_t>> rows, size_t num_cols);

    size_t num_rows() const { return rows_.size(); }
    size_t num_cols() const { return cols_.size(); }
    size_t num_entries() const { return num_entries_; }

    const std::vector<uint32_t> &row(size_t i) const { return rows_[i]; }
    const std::vector<uint32_t> &col(size_t j) const { return cols_[j]; }

    bool get(size_t i, size_t j) const;

    /// out = M * x over GF(2). x has num_cols entries, out num_rows.
    void mul_vec(const BitVec &x, BitVec &out) const;
    BitVec mul_vec(const BitVec &x) const;

    /// acc ^= column j.
    void xor_col_into(size_t j, BitVec &acc) const;

    bool operator==(const SparseBinaryMatrix &other) const;

   private:
    std::vector<std::vector<uint32_t>> rows_;
    std::vector<std::vector<uint32_t>> cols_;
    size_t num_entries_ = 0;
};

}  // namespace clusterps

#endif
