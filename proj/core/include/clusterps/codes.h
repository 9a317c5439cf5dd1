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

#ifndef CLUSTERPS_CODES_H
#define CLUSTERPS_CODES_H

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "clusterps/dem.h"
#include "clusterps/sparse.h"

namespace clusterps {

/// CSS stabilizer code over X/Z check supports, with a basis of Z logical
/// operators. Construction validates commutation and logical independence.
struct CssCodeSpec {
    std::string name;
    size_t num_qubits = 0;
    SparseBinaryMatrix hx;         // X-type checks (rows) over qubits (cols)
    SparseBinaryMatrix hz;         // Z-type checks
    SparseBinaryMatrix logical_z;  // k x n
    size_t num_logicals() const { return logical_z.num_rows(); }

    /// hx hz^T = 0, every logical row commutes with hx and is independent of
    /// the hz row space, and the logical count equals
    /// n - rank(hx) - rank(hz). Throws std::invalid_argument on failure.
    void validate() const;
};

/// Length-d repetition code: chain Z checks, no X checks, logical Z = all
/// qubits.
CssCodeSpec repetition_code(size_t distance);

/// Rotated surface code on a distance x distance grid, one logical qubit.
CssCodeSpec rotated_surface_code(size_t distance);

/// (x exponent, y exponent) of one monomial term.
using Monomial = std::pair<uint32_t, uint32_t>;

/// Bivariate bicycle code on the group Z_l x Z_m with check polynomials
/// a and b: hx = [A | B], hz = [B^T | A^T]. Exponents are reduced mod l / m;
/// repeated terms after reduction are rejected. Logical operators are
/// computed from the kernel/coset structure.
CssCodeSpec bivariate_bicycle_code(size_t l, size_t m, std::vector<Monomial> a, std::vector<Monomial> b);

/// Hypergraph product of two classical parity check matrices.
CssCodeSpec hgp_code(const SparseBinaryMatrix &h1, const SparseBinaryMatrix &h2);

/// Built-in 9x12 (3,4)-regular classical parity check matrix. Its hypergraph
/// product with itself gives a [[225, 9]] quantum code.
SparseBinaryMatrix ldpc_34_check_matrix();

/// Parses a classical check matrix from text: one row per line of 0/1 digits,
/// optionally whitespace separated.
SparseBinaryMatrix parse_check_matrix(const std::string &text);

/// Z-basis memory experiment under phenomenological noise. Detectors compare
/// consecutive Z-check measurements over `rounds` noisy rounds (the first
/// round against the ideal initial value), closed by a perfect data readout.
/// Mechanisms are per-round data X errors with prior p_data (flipping the
/// detectors of the checks the qubit participates in, at that round) and
/// per-round measurement flips with prior p_meas (flipping the check's
/// detector at rounds t and t+1). A zero rate omits that mechanism family.
/// Observables are the logical Z supports applied to the final readout.
DetectorErrorModel phenomenological_dem(const CssCodeSpec &code, size_t rounds, double p_data, double p_meas);

}  // namespace clusterps

#endif
