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

#include "qpt/types.hpp"

// Dense complex helpers shared by every module.
//
// Flattening convention: all matrix <-> vector flattening is row-major,
// i.e. vec(A)[r * cols + c] = A(r, c). Tensor products are Kronecker
// products with the first factor as the slow (outer) index.

namespace qpt::linalg {

Matrix kron(const Matrix& a, const Matrix& b);

// Row-major flattening and its inverse.
Vector flatten(const Matrix& m);
Matrix unflatten(const Vector& v, Eigen::Index rows, Eigen::Index cols);

// Largest absolute entry of m - m^dagger.
double hermiticity_defect(const Matrix& m);
Matrix hermitize(const Matrix& m);

// exp(-i H) for Hermitian H via eigendecomposition.
Matrix expm_minus_i(const Matrix& hermitian);

// Principal square root of a Hermitian PSD matrix. Eigenvalues below
// -clip_tol raise NumericalError; those in [-clip_tol, 0) are set to zero.
Matrix psd_sqrt(const Matrix& hermitian, double clip_tol = kValidityTol);

// Ascending eigenvalues of a Hermitian matrix.
RealVector hermitian_eigenvalues(const Matrix& hermitian);

// Entrywise sum of moduli.
double l1_norm(const Matrix& m);

}  // namespace qpt::linalg
