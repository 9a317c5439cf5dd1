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

#ifndef CLUSTERPS_GF2_H
#define CLUSTERPS_GF2_H

#include <cstdint>
#include <vector>

#include "clusterps/bits.h"
#include "clusterps/sparse.h"

namespace clusterps {

/// Dense GF(2) matrix with bit-packed rows.
class Gf2Matrix {
   public:
    Gf2Matrix() = default;
    Gf2Matrix(size_t num_rows, size_t num_cols);

    static Gf2Matrix from_sparse(const SparseBinaryMatrix &m);
    static Gf2Matrix from_bit_rows(const std::vector<BitVec> &rows);

    size_t num_rows() const { return num_rows_; }
    size_t num_cols() const { return num_cols_; }

    bool get(size_t i, size_t j) const;
    void set(size_t i, size_t j, bool v);
    void xor_row_into(size_t src, size_t dst);

    BitVec row_bits(size_t i) const;

   private:
    friend size_t gf2_rank(const Gf2Matrix &);
    friend std::vector<BitVec> gf2_kernel_basis(const Gf2Matrix &);
    size_t num_rows_ = 0;
    size_t num_cols_ = 0;
    size_t words_per_row_ = 0;
    std::vector<uint64_t> words_;
};

size_t gf2_rank(const Gf2Matrix &m);

/// Basis of {x : M x = 0}.
std::vector<BitVec> gf2_kernel_basis(const Gf2Matrix &m);

/// Incremental row-space reducer. Rows are kept in echelon form keyed by
/// their leading column.
class Gf2RowSpace {
   public:
    explicit Gf2RowSpace(size_t num_cols);

    /// Reduces the row against the current space. Returns true if the row was
    /// independent (and is now part of the space).
    bool add(const BitVec &row);

    /// True if the row lies in the current span.
    bool contains(const BitVec &row) const;

    size_t rank() const { return pivots_.size(); }

   private:
    size_t num_cols_ = 0;
    size_t words_ = 0;
    std::vector<std::pair<size_t, std::vector<uint64_t>>> pivots_;  // (lead col, packed row)
    std::vector<uint64_t> reduce(const BitVec &row) const;
};

/// Basis of Z logical operators of a CSS code: representatives of
/// ker(hx) / rowspace(hz).
std::vector<BitVec> css_logical_z(const SparseBinaryMatrix &hx, const SparseBinaryMatrix &hz);

}  // namespace clusterps

#endif
