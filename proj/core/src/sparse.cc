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

#include "clusterps/sparse.h"

#include <algorithm>
#include <stdexcept>

namespace clusterps {

SparseBinaryMatrix::SparseBinaryMatrix(size_t num_rows, size_t num_cols) : rows_(num_rows), cols_(num_cols) {}

SparseBinaryMatrix SparseBinaryMatrix::from_columns(size_t num_rows, std::vector<std::vector<uint32_t>> columns) {
    SparseBinaryMatrix m(num_rows, columns.size());
    for (size_t j = 0; j < columns.size(); j++) {
        auto &col = columns[j];
        std::sort(col.begin(), col.end());
        if (std::adjacent_find(col.begin(), col.end()) != col.end()) {
            throw std::invalid_argument("duplicate entry in sparse column");
        }
        if (!col.empty() && col.back() >= num_rows) {
            throw std::invalid_argument("row index out of range in sparse column");
        }
        for (uint32_t i : col) {
            m.rows_[i].push_back((uint32_t)j);
        }
        m.num_entries_ += col.size();
        m.cols_[j] = std::move(col);
    }
    return m;
}

SparseBinaryMatrix SparseBinaryMatrix::from_rows(std::vector<std::vector<uint32_t>> rows, size_t num_cols) {
    SparseBinaryMatrix m(rows.size(), num_cols);
    for (size_t i = 0; i < rows.size(); i++) {
        auto &row = rows[i];
        std::sort(row.begin(), row.end());
        if (std::adjacent_find(row.begin(), row.end()) != row.end()) {
            throw std::invalid_argument("duplicate entry in sparse row");
        }
        if (!row.empty() && row.back() >= num_cols) {
            throw std::invalid_argument("column index out of range in sparse row");
        }
        for (uint32_t j : row) {
            m.cols_[j].push_back((uint32_t)i);
        }
        m.num_entries_ += row.size();
        m.rows_[i] = std::move(row);
    }
    return m;
}

bool SparseBinaryMatrix::get(size_t i, size_t j) const {
    const auto &r = rows_[i];
    return std::binary_search(r.begin(), r.end(), (uint32_t)j);
}

void SparseBinaryMatrix::mul_vec(const BitVec &x, BitVec &out) const {
    if (x.size() != num_cols()) {
        throw std::invalid_argument("mul_vec: size mismatch");
    }
    out.assign(num_rows(), 0);
    for (size_t j = 0; j < x.size(); j++) {
        if (x[j]) {
            for (uint32_t i : cols_[j]) {
                out[i] ^= 1;
            }
        }
    }
}

BitVec SparseBinaryMatrix::mul_vec(const BitVec &x) const {
    BitVec out;
    mul_vec(x, out);
    return out;
}

void SparseBinaryMatrix::xor_col_into(size_t j, BitVec &acc) const {
    for (uint32_t i : cols_[j]) {
        acc[i] ^= 1;
    }
}

bool SparseBinaryMatrix::operator==(const SparseBinaryMatrix &other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
}

}  // namespace clusterps
