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

#include "qpt/dv_ensemble.hpp"

#include <cmath>
#include <sstream>

#include "qpt/linalg.hpp"

namespace qpt {

Matrix pauli_eigenprojector(PauliLabel label) {
    const double s = 1.0 / std::sqrt(2.0);
    const Complex i(0.0, 1.0);
    Vector v(2);
    switch (label) {
        case PauliLabel::kXPlus: v << s, s; break;
        case PauliLabel::kXMinus: v << s, -s; break;
        case PauliLabel::kYPlus: v << s, i * s; break;
        case PauliLabel::kYMinus: v << s, -i * s; break;
        case PauliLabel::kZPlus: v << 1.0, 0.0; break;
        case PauliLabel::kZMinus: v << 0.0, 1.0; break;
    }
    return v * v.adjoint();
}

std::size_t pauli_ensemble_size(int n_qubits) {
    std::size_t size = 1;
    for (int q = 0; q < n_qubits; ++q) {
        size *= 6;
    }
    return size;
}

Matrix pauli_product_projector(int n_qubits, std::size_t index) {
    if (n_qubits < 1) {
        throw InvalidArgument("number of qubits must be >= 1");
    }
    if (index >= pauli_ensemble_size(n_qubits)) {
        throw InvalidArgument("Pauli ensemble index out of range");
    }
    std::vector<int> digits(static_cast<std::size_t>(n_qubits));
    for (int q = n_qubits - 1; q >= 0; --q) {
        digits[static_cast<std::size_t>(q)] = static_cast<int>(index % 6);
        index /= 6;
    }
    Matrix out = pauli_eigenprojector(static_cast<PauliLabel>(digits[0]));
    for (int q = 1; q < n_qubits; ++q) {
        out = linalg::kron(out, pauli_eigenprojector(static_cast<PauliLabel>(digits[static_cast<std::size_t>(q)])));
    }
    return out;
}

std::string pauli_product_label(int n_qubits, std::size_t index) {
    static constexpr const char* kNames[] = {"x+", "x-", "y+", "y-", "z+", "z-"};
    std::string out;
    std::size_t base = pauli_ensemble_size(n_qubits - 1);
    for (int q = 0; q < n_qubits; ++q) {
        out += kNames[(index / base) % 6];
        base = base > 1 ? base / 6 : 1;
    }
    return out;
}

PauliEnsemble pauli_ensemble(int n_qubits) {
    if (n_qubits < 1 || n_qubits > kMaxPauliQubits) {
        std::ostringstream msg;
        msg << "Pauli ensemble for " << n_qubits << " qubits is not supported (1 <= n <= " << kMaxPauliQubits
            << "; larger ensembles exceed memory)";
        throw InvalidArgument(msg.str());
    }
    PauliEnsemble ens;
    ens.n_qubits = n_qubits;
    const std::size_t size = pauli_ensemble_size(n_qubits);
    ens.probes.reserve(size);
    ens.measurements.reserve(size);
    for (std::size_t idx = 0; idx < size; ++idx) {
        Matrix p = pauli_product_projector(n_qubits, idx);
        ens.probes.emplace_back(p);
        ens.measurements.push_back(std::move(p));
    }
    return ens;
}

Matrix unitary_from_generator(const Matrix& x) {
    return linalg::expm_minus_i(0.5 * (x + x.adjoint()));
}

Matrix random_unitary(Eigen::Index dim, Rng& rng) {
    if (dim < 1) {
        throw InvalidArgument("random_unitary: dimension must be >= 1");
    }
    Matrix x(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r) {
        for (Eigen::Index c = 0; c < dim; ++c) {
            const double re = rng.uniform(-1.0, 1.0);
            const double im = rng.uniform(-1.0, 1.0);
            x(r, c) = Complex(re, im);
        }
    }
    return unitary_from_generator(x);
}

KrausStack random_process(Eigen::Index dim, int rank, Rng& rng) {
    if (rank < 1 || rank > dim * dim) {
        std::ostringstream msg;
        msg << "random_process: rank " << rank << " outside [1, " << dim * dim << "]";
        throw InvalidArgument(msg.str());
    }
    std::vector<double> weights(static_cast<std::size_t>(rank));
    double norm2 = 0.0;
    for (auto& w : weights) {
        w = 1.0 - rng.uniform(0.0, 1.0);  // (0, 1]
        norm2 += w * w;
    }
    std::vector<Matrix> blocks;
    blocks.reserve(weights.size());
    for (double w : weights) {
        blocks.push_back((w / std::sqrt(norm2)) * random_unitary(dim, rng));
    }
    return KrausStack(blocks);
}

}  // namespace qpt
