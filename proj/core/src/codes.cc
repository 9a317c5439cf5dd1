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

#include "clusterps/codes.h"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "clusterps/gf2.h"

namespace clusterps {

void CssCodeSpec::validate() const {
    if (hx.num_cols() != num_qubits || hz.num_cols() != num_qubits || logical_z.num_cols() != num_qubits) {
        throw std::invalid_argument(name + ": matrix width mismatch");
    }
    for (size_t i = 0; i < hx.num_rows(); i++) {
        for (size_t l = 0; l < hz.num_rows(); l++) {
            size_t overlap = 0;
            const auto &a = hx.row(i);
            const auto &b = hz.row(l);
            size_t ai = 0, bi = 0;
            while (ai < a.size() && bi < b.size()) {
                if (a[ai] == b[bi]) {
                    overlap++;
                    ai++;
                    bi++;
                } else if (a[ai] < b[bi]) {
                    ai++;
                } else {
                    bi++;
                }
            }
            if (overlap % 2) {
                throw std::invalid_argument(name + ": hx and hz anticommute");
            }
        }
    }
    Gf2RowSpace hz_span(num_qubits);
    for (size_t i = 0; i < hz.num_rows(); i++) {
        BitVec row(num_qubits, 0);
        for (uint32_t j : hz.row(i)) {
            row[j] = 1;
        }
        hz_span.add(row);
    }
    size_t rank_hz = hz_span.rank();
    for (size_t l = 0; l < logical_z.num_rows(); l++) {
        BitVec row(num_qubits, 0);
        for (uint32_t j : logical_z.row(l)) {
            row[j] = 1;
        }
        for (size_t i = 0; i < hx.num_rows(); i++) {
            size_t overlap = 0;
            for (uint32_t j : hx.row(i)) {
                overlap += row[j];
            }
            if (overlap % 2) {
                throw std::invalid_argument(name + ": logical anticommutes with hx");
            }
        }
        if (!hz_span.add(row)) {
            throw std::invalid_argument(name + ": logical dependent on hz row space");
        }
    }
    size_t rank_hx = gf2_rank(Gf2Matrix::from_sparse(hx));
    size_t k = num_qubits - rank_hx - rank_hz;
    if (logical_z.num_rows() != k) {
        throw std::invalid_argument(name + ": logical count " + std::to_string(logical_z.num_rows()) +
                                    " does not match k = " + std::to_string(k));
    }
}

CssCodeSpec repetition_code(size_t distance) {
    if (distance < 2) {
        throw std::invalid_argument("repetition code needs distance >= 2");
    }
    CssCodeSpec c;
    c.name = "rep_d" + std::to_string(distance);
    c.num_qubits = distance;
    std::vector<std::vector<uint32_t>> z_rows(distance - 1);
    for (uint32_t i = 0; i + 1 < distance; i++) {
        z_rows[i] = {i, i + 1};
    }
    c.hz = SparseBinaryMatrix::from_rows(std::move(z_rows), distance);
    c.hx = SparseBinaryMatrix(0, distance);
    std::vector<uint32_t> all(distance);
    for (uint32_t i = 0; i < distance; i++) {
        all[i] = i;
    }
    c.logical_z = SparseBinaryMatrix::from_rows({all}, distance);
    c.validate();
    return c;
}

CssCodeSpec rotated_surface_code(size_t distance) {
    if (distance < 2 || distance % 2 == 0) {
        throw std::invalid_argument("rotated surface code needs odd distance >= 3");
    }
    size_t d = distance;
    auto qubit = [d](size_t r, size_t c) { return (uint32_t)(r * d + c); };
    std::vector<std::vector<uint32_t>> z_rows;
    std::vector<std::vector<uint32_t>> x_rows;
    // Faces at (r + 1/2, c + 1/2) for r, c in [-1, d-1]. Even r+c parity is a
    // Z face, odd is an X face. On the left/right boundary only Z faces
    // survive, on the top/bottom boundary only X faces.
    for (long r = -1; r < (long)d; r++) {
        for (long c = -1; c < (long)d; c++) {
            bool z_face = ((r + c) % 2 + 2) % 2 == 0;
            bool interior = r >= 0 && r < (long)d - 1 && c >= 0 && c < (long)d - 1;
            if (!interior) {
                bool left_right = (c == -1 || c == (long)d - 1) && r >= 0 && r < (long)d - 1;
                bool top_bottom = (r == -1 || r == (long)d - 1) && c >= 0 && c < (long)d - 1;
                if (left_right && !z_face) {
                    continue;
                }
                if (top_bottom && z_face) {
                    continue;
                }
                if (!left_right && !top_bottom) {
                    continue;
                }
            }
            std::vector<uint32_t> support;
            for (long dr = 0; dr <= 1; dr++) {
                for (long dc = 0; dc <= 1; dc++) {
                    long qr = r + dr, qc = c + dc;
                    if (qr >= 0 && qr < (long)d && qc >= 0 && qc < (long)d) {
                        support.push_back(qubit((size_t)qr, (size_t)qc));
                    }
                }
            }
            if (z_face) {
                z_rows.push_back(std::move(support));
            } else {
                x_rows.push_back(std::move(support));
            }
        }
    }
    CssCodeSpec c;
    c.name = "surface_d" + std::to_string(d);
    c.num_qubits = d * d;
    c.hz = SparseBinaryMatrix::from_rows(std::move(z_rows), d * d);
    c.hx = SparseBinaryMatrix::from_rows(std::move(x_rows), d * d);
    std::vector<uint32_t> top_row(d);
    for (uint32_t j = 0; j < d; j++) {
        top_row[j] = j;
    }
    c.logical_z = SparseBinaryMatrix::from_rows({top_row}, d * d);
    c.validate();
    return c;
}

namespace {

// Sparse support of sum of shift monomials x^a y^b acting on Z_l x Z_m,
// as an lm x lm matrix: row (u, v) has a 1 at ((u+a) mod l, (v+b) mod m).
std::vector<std::vector<uint32_t>> monomial_rows(size_t l, size_t m, const std::vector<Monomial> &terms) {
    std::set<std::pair<uint32_t, uint32_t>> reduced;
    for (auto [a, b] : terms) {
        auto key = std::make_pair((uint32_t)(a % l), (uint32_t)(b % m));
        if (!reduced.insert(key).second) {
            throw std::invalid_argument("repeated monomial after exponent reduction");
        }
    }
    std::vector<std::vector<uint32_t>> rows(l * m);
    for (size_t u = 0; u < l; u++) {
        for (size_t v = 0; v < m; v++) {
            auto &row = rows[u * m + v];
            for (auto [a, b] : reduced) {
                row.push_back((uint32_t)(((u + a) % l) * m + ((v + b) % m)));
            }
        }
    }
    return rows;
}

SparseBinaryMatrix sparse_from_logicals(const std::vector<BitVec> &logicals, size_t n) {
    std::vector<std::vector<uint32_t>> rows;
    for (const auto &v : logicals) {
        std::vector<uint32_t> row;
        for (uint32_t j = 0; j < v.size(); j++) {
            if (v[j]) {
                row.push_back(j);
            }
        }
        rows.push_back(std::move(row));
    }
    return SparseBinaryMatrix::from_rows(std::move(rows), n);
}

}  // namespace

CssCodeSpec bivariate_bicycle_code(size_t l, size_t m, std::vector<Monomial> a, std::vector<Monomial> b) {
    if (l == 0 || m == 0 || a.empty() || b.empty()) {
        throw std::invalid_argument("bivariate bicycle code needs l, m >= 1 and nonempty polynomials");
    }
    size_t half = l * m;
    auto a_rows = monomial_rows(l, m, a);
    auto b_rows = monomial_rows(l, m, b);

    std::vector<std::vector<uint32_t>> hx_rows(half);
    for (size_t i = 0; i < half; i++) {
        hx_rows[i] = a_rows[i];
        for (uint32_t j : b_rows[i]) {
            hx_rows[i].push_back(j + (uint32_t)half);
        }
    }
    // hz = [B^T | A^T]: row i has a 1 in the left block at column j when
    // B[j, i] = 1, i.e. when j's B-row contains i.
    std::vector<std::vector<uint32_t>> hz_rows(half);
    for (size_t j = 0; j < half; j++) {
        for (uint32_t i : b_rows[j]) {
            hz_rows[i].push_back((uint32_t)j);
        }
        for (uint32_t i : a_rows[j]) {
            hz_rows[i].push_back((uint32_t)j + (uint32_t)half);
        }
    }

    CssCodeSpec c;
    c.name = "bb_l" + std::to_string(l) + "_m" + std::to_string(m);
    c.num_qubits = 2 * half;
    c.hx = SparseBinaryMatrix::from_rows(std::move(hx_rows), c.num_qubits);
    c.hz = SparseBinaryMatrix::from_rows(std::move(hz_rows), c.num_qubits);
    c.logical_z = sparse_from_logicals(css_logical_z(c.hx, c.hz), c.num_qubits);
    c.validate();
    return c;
}

CssCodeSpec hgp_code(const SparseBinaryMatrix &h1, const SparseBinaryMatrix &h2) {
    size_t m1 = h1.num_rows(), n1 = h1.num_cols();
    size_t m2 = h2.num_rows(), n2 = h2.num_cols();
    if (n1 == 0 || n2 == 0) {
        throw std::invalid_argument("hgp factors must be nonempty");
    }
    size_t n = n1 * n2 + m1 * m2;
    // Qubit layout: (bit, bit) sector first, indexed a*n2 + b; then the
    // (check, check) sector, indexed n1*n2 + c*m2 + d.
    auto vv = [n2](size_t a, size_t b) { return (uint32_t)(a * n2 + b); };
    auto cc = [n1, n2, m2](size_t c, size_t d) { return (uint32_t)(n1 * n2 + c * m2 + d); };

    // hx = [h1 (x) I_n2 | I_m1 (x) h2^T], rows indexed by (c in m1, b in n2).
    std::vector<std::vector<uint32_t>> hx_rows(m1 * n2);
    for (size_t c = 0; c < m1; c++) {
        for (size_t b = 0; b < n2; b++) {
            auto &row = hx_rows[c * n2 + b];
            for (uint32_t a : h1.row(c)) {
                row.push_back(vv(a, b));
            }
            for (uint32_t d : h2.col(b)) {
                row.push_back(cc(c, d));
            }
        }
    }
    // hz = [I_n1 (x) h2 | h1^T (x) I_m2], rows indexed by (a in n1, d in m2).
    std::vector<std::vector<uint32_t>> hz_rows(n1 * m2);
    for (size_t a = 0; a < n1; a++) {
        for (size_t d = 0; d < m2; d++) {
            auto &row = hz_rows[a * m2 + d];
            for (uint32_t b : h2.row(d)) {
                row.push_back(vv(a, b));
            }
            for (uint32_t c : h1.col(a)) {
                row.push_back(cc(c, d));
            }
        }
    }

    CssCodeSpec c;
    c.name = "hgp_" + std::to_string(n1) + "x" + std::to_string(n2);
    c.num_qubits = n;
    c.hx = SparseBinaryMatrix::from_rows(std::move(hx_rows), n);
    c.hz = SparseBinaryMatrix::from_rows(std::move(hz_rows), n);
    c.logical_z = sparse_from_logicals(css_logical_z(c.hx, c.hz), n);
    c.validate();
    return c;
}

SparseBinaryMatrix ldpc_34_check_matrix() {
    static const char *rows[9] = {
        "001101000010", "010100100001", "000000011011", "000010100110", "100001000101",
        "011000001100", "100110001000", "010011010000", "101000110000",
    };
    std::vector<std::vector<uint32_t>> supports(9);
    for (size_t i = 0; i < 9; i++) {
        for (uint32_t j = 0; j < 12; j++) {
            if (rows[i][j] == '1') {
                supports[i].push_back(j);
            }
        }
    }
    return SparseBinaryMatrix::from_rows(std::move(supports), 12);
}

SparseBinaryMatrix parse_check_matrix(const std::string &text) {
    std::vector<std::vector<uint32_t>> rows;
    size_t num_cols = 0;
    size_t pos = 0;
    while (pos < text.size()) {
        size_t end = text.find('\n', pos);
        if (end == std::string::npos) {
            end = text.size();
        }
        std::string line = text.substr(pos, end - pos);
        pos = end + 1;
        std::vector<uint32_t> support;
        uint32_t col = 0;
        bool any = false;
        for (char ch : line) {
            if (ch == '0' || ch == '1') {
                if (ch == '1') {
                    support.push_back(col);
                }
                col++;
                any = true;
            } else if (ch != ' ' && ch != '\t' && ch != '\r' && ch != ',') {
                throw std::invalid_argument("bad character in check matrix");
            }
        }
        if (!any) {
            continue;
        }
        if (num_cols == 0) {
            num_cols = col;
        } else if (col != num_cols) {
            throw std::invalid_argument("ragged check matrix rows");
        }
        rows.push_back(std::move(support));
    }
    if (rows.empty()) {
        throw std::invalid_argument("empty check matrix");
    }
    return SparseBinaryMatrix::from_rows(std::move(rows), num_cols);
}

DetectorErrorModel phenomenological_dem(const CssCodeSpec &code, size_t rounds, double p_data, double p_meas) {
    if (rounds < 1) {
        throw std::invalid_argument("need at least one round");
    }
    auto check_rate = [](double p, const char *what) {
        if (p != 0.0 && (!(p > 0.0) || !(p <= 0.5))) {
            throw std::invalid_argument(std::string(what) + " outside {0} U (0, 0.5]");
        }
    };
    check_rate(p_data, "p_data");
    check_rate(p_meas, "p_meas");

    size_t n = code.num_qubits;
    size_t checks = code.hz.num_rows();
    size_t num_detectors = checks * rounds;
    auto det = [checks](size_t t, size_t c) { return (uint32_t)(t * checks + c); };

    std::vector<std::vector<uint32_t>> det_cols;
    std::vector<std::vector<uint32_t>> obs_cols;
    std::vector<double> priors;

    if (p_data > 0.0) {
        for (size_t t = 0; t < rounds; t++) {
            for (size_t q = 0; q < n; q++) {
                std::vector<uint32_t> dets;
                for (uint32_t c : code.hz.col(q)) {
                    dets.push_back(det(t, c));
                }
                std::vector<uint32_t> obs;
                for (uint32_t l : code.logical_z.col(q)) {
                    obs.push_back(l);
                }
                det_cols.push_back(std::move(dets));
                obs_cols.push_back(std::move(obs));
                priors.push_back(p_data);
            }
        }
    }
    if (p_meas > 0.0) {
        for (size_t t = 0; t + 1 < rounds; t++) {
            for (size_t c = 0; c < checks; c++) {
                det_cols.push_back({det(t, c), det(t + 1, c)});
                obs_cols.push_back({});
                priors.push_back(p_meas);
            }
        }
    }

    std::vector<uint32_t> times(num_detectors);
    for (size_t t = 0; t < rounds; t++) {
        for (size_t c = 0; c < checks; c++) {
            times[det(t, c)] = (uint32_t)t;
        }
    }

    return make_dem(num_detectors, code.num_logicals(), std::move(det_cols), std::move(obs_cols), std::move(priors),
                    std::move(times));
}

}  // namespace clusterps
