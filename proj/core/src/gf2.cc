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

#include "clusterps/gf2.h"

#include <bit>
#include <stdexcept>

namespace clusterps {

Gf2Matrix::Gf2Matrix(size_t num_rows, size_t num_cols)
    : num_rows_(num_rows), num_cols_(num_cols), words_per_row_((num_cols + 63) / 64), words_(num_rows * words_per_row_, 0) {}

Gf2Matrix Gf2Matrix::from_sparse(const SparseBinaryMatrix &m) {
    Gf2Matrix out(m.num_rows(), m.num_cols());
    for (size_t i = 0; i < m.num_rows(); i++) {
        for (uint32_t j : m.row(i)) {
            out.set(i, j, true);
        }
    }
    return out;
}

Gf2Matrix Gf2Matrix::from_bit_rows(const std::vector<BitVec> &rows) {
    size_t cols = rows.empty() ? 0 : rows[0].size();
    Gf2Matrix out(rows.size(), cols);
    for (size_t i = 0; i < rows.size(); i++) {
        if (rows[i].size() != cols) {
            throw std::invalid_argument("ragged rows");
        }
        for (size_t j = 0; j < cols; j++) {
            if (rows[i][j]) {
                out.set(i, j, true);
            }
        }
    }
    return out;
}

bool Gf2Matrix::get(size_t i, size_t j) const {
    return (words_[i * words_per_row_ + j / 64] >> (j % 64)) & 1;
}

void Gf2Matrix::set(size_t i, size_t j, bool v) {
    uint64_t &w = words_[i * words_per_row_ + j / 64];
    uint64_t bit = 1ULL << (j % 64);
    if (v) {
        w |= bit;
    } else {
        w &= ~bit;
    }
}

void Gf2Matrix::xor_row_into(size_t src, size_t dst) {
    const uint64_t *s = &words_[src * words_per_row_];
    uint64_t *d = &words_[dst * words_per_row_];
    for (size_t w = 0; w < words_per_row_; w++) {
        d[w] ^= s[w];
    }
}

BitVec Gf2Matrix::row_bits(size_t i) const {
    BitVec out(num_cols_, 0);
    for (size_t j = 0; j < num_cols_; j++) {
        out[j] = get(i, j);
    }
    return out;
}

size_t gf2_rank(const Gf2Matrix &m) {
    Gf2Matrix a = m;
    size_t rank = 0;
    for (size_t col = 0; col < a.num_cols() && rank < a.num_rows(); col++) {
        size_t pivot = rank;
        while (pivot < a.num_rows() && !a.get(pivot, col)) {
            pivot++;
        }
        if (pivot == a.num_rows()) {
            continue;
        }
        if (pivot != rank) {
            for (size_t w = 0; w < a.words_per_row_; w++) {
                std::swap(a.words_[pivot * a.words_per_row_ + w], a.words_[rank * a.words_per_row_ + w]);
            }
        }
        for (size_t i = pivot + 1; i < a.num_rows(); i++) {
            if (a.get(i, col)) {
                a.xor_row_into(rank, i);
            }
        }
        rank++;
    }
    return rank;
}

std::vector<BitVec> gf2_kernel_basis(const Gf2Matrix &m) {
    // Column-eliminate a copy while mirroring the operations on an identity
    // matrix; columns that vanish yield kernel basis vectors.
    size_t n = m.num_cols();
    Gf2Matrix a(n, m.num_rows());  // transpose: rows of a are columns of m
    for (size_t i = 0; i < m.num_rows(); i++) {
        for (size_t j = 0; j < n; j++) {
            if (m.get(i, j)) {
                a.set(j, i, true);
            }
        }
    }
    Gf2Matrix id(n, n);
    for (size_t j = 0; j < n; j++) {
        id.set(j, j, true);
    }
    size_t rank = 0;
    for (size_t col = 0; col < m.num_rows() && rank < n; col++) {
        size_t pivot = rank;
        while (pivot < n && !a.get(pivot, col)) {
            pivot++;
        }
        if (pivot == n) {
            continue;
        }
        if (pivot != rank) {
            for (size_t c = 0; c < m.num_rows(); c++) {
                bool t = a.get(pivot, c);
                a.set(pivot, c, a.get(rank, c));
                a.set(rank, c, t);
            }
            for (size_t c = 0; c < n; c++) {
                bool t = id.get(pivot, c);
                id.set(pivot, c, id.get(rank, c));
                id.set(rank, c, t);
            }
        }
        for (size_t i = rank + 1; i < n; i++) {
            if (a.get(i, col)) {
                a.xor_row_into(rank, i);
                id.xor_row_into(rank, i);
            }
        }
        rank++;
    }
    std::vector<BitVec> basis;
    for (size_t i = rank; i < n; i++) {
        basis.push_back(id.row_bits(i));
    }
    return basis;
}

Gf2RowSpace::Gf2RowSpace(size_t num_cols) : num_cols_(num_cols), words_((num_cols + 63) / 64) {}

std::vector<uint64_t> Gf2RowSpace::reduce(const BitVec &row) const {
    if (row.size() != num_cols_) {
        throw std::invalid_argument("row size mismatch");
    }
    std::vector<uint64_t> r(words_, 0);
    for (size_t j = 0; j < num_cols_; j++) {
        if (row[j]) {
            r[j / 64] |= 1ULL << (j % 64);
        }
    }
    for (const auto &[lead, packed] : pivots_) {
        if ((r[lead / 64] >> (lead % 64)) & 1) {
            for (size_t w = 0; w < words_; w++) {
                r[w] ^= packed[w];
            }
        }
    }
    return r;
}

bool Gf2RowSpace::add(const BitVec &row) {
    auto r = reduce(row);
    size_t lead = num_cols_;
    for (size_t w = 0; w < words_; w++) {
        if (r[w]) {
            lead = w * 64 + (size_t)std::countr_zero(r[w]);
            break;
        }
    }
    if (lead == num_cols_) {
        return false;
    }
    // Keep pivots ordered by leading column so reduce() is a single pass.
    auto it = pivots_.begin();
    while (it != pivots_.end() && it->first < lead) {
        ++it;
    }
    pivots_.insert(it, {lead, std::move(r)});
    return true;
}

bool Gf2RowSpace::contains(const BitVec &row) const {
    auto r = reduce(row);
    for (uint64_t w : r) {
        if (w) {
            return false;
        }
    }
    return true;
}

std::vector<BitVec> css_logical_z(const SparseBinaryMatrix &hx, const SparseBinaryMatrix &hz) {
    if (hx.num_cols() != hz.num_cols()) {
        throw std::invalid_argument("hx and hz disagree on qubit count");
    }
    size_t n = hx.num_cols();
    auto kernel = gf2_kernel_basis(Gf2Matrix::from_sparse(hx));
    Gf2RowSpace span(n);
    for (size_t i = 0; i < hz.num_rows(); i++) {
        BitVec row(n, 0);
        for (uint32_t j : hz.row(i)) {
            row[j] = 1;
        }
        span.add(row);
    }
    std::vector<BitVec> logicals;
    for (const auto &v : kernel) {
        if (span.add(v)) {
            logicals.push_back(v);
        }
    }
    return logicals;
}

}  // namespace clusterps
