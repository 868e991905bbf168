// Copyright 2026 The Kraus QPT Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "qpt/channel.hpp"
#include "qpt/rng.hpp"

namespace qpt {

// Single-qubit Pauli eigenstates in ensemble order.
enum class PauliLabel { kXPlus = 0, kXMinus, kYPlus, kYMinus, kZPlus, kZMinus };

inline constexpr int kMaxPauliQubits = 5;

Matrix pauli_eigenprojector(PauliLabel label);

// Member `index` of the n-qubit product ensemble. Indices enumerate label
// tuples lexicographically with qubit 0 as the most significant digit, so
// index = sum_q label_q * 6^(n-1-q).
Matrix pauli_product_projector(int n_qubits, std::size_t index);

// Label string such as "x+z-" for an ensemble index.
std::string pauli_product_label(int n_qubits, std::size_t index);

std::size_t pauli_ensemble_size(int n_qubits);

// 6^n probes and 6^n measurements; both sets are the same projectors.
struct PauliEnsemble {
    int n_qubits = 0;
    std::vector<DensityMatrix> probes;
    std::vector<Matrix> measurements;
};

// Throws InvalidArgument for n < 1 or n > kMaxPauliQubits (the explicit
// matrices would not fit in memory).
PauliEnsemble pauli_ensemble(int n_qubits);

// exp(-i H) with H = (X + X^dagger) / 2.
Matrix unitary_from_generator(const Matrix& x);

// X has independent real and imaginary parts uniform on [-1, 1].
Matrix random_unitary(Eigen::Index dim, Rng& rng);

// Rank-r channel {w_l U_l} with uniform (0, 1] weights normalised so that
// sum w_l^2 = 1. Requires 1 <= rank <= dim^2.
KrausStack random_process(Eigen::Index dim, int rank, Rng& rng);

}  // namespace qpt
