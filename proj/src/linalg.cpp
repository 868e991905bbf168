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

#include "qpt/linalg.hpp"

#include <cmath>
#include <sstream>

namespace qpt::linalg {

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
        for (Eigen::Index c = 0; c < a.cols(); ++c) {
            out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
        }
    }
    return out;
}

Vector flatten(const Matrix& m) {
    Vector v(m.size());
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            v(r * m.cols() + c) = m(r, c);
        }
    }
    return v;
}

Matrix unflatten(const Vector& v, Eigen::Index rows, Eigen::Index cols) {
    if (v.size() != rows * cols) {
        throw DimensionError("unflatten: vector length does not match shape");
    }
    Matrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            m(r, c) = v(r * cols + c);
        }
    }
    return m;
}

double hermiticity_defect(const Matrix& m) {
    if (m.rows() != m.cols()) {
        throw DimensionError("hermiticity_defect: matrix is not square");
    }
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

Matrix hermitize(const Matrix& m) {
    return 0.5 * (m + m.adjoint());
}

Matrix expm_minus_i(const Matrix& hermitian) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(hermitian);
    const Vector phases = (eig.eigenvalues().cast<Complex>() * Complex(0.0, -1.0)).array().exp();
    return eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint();
}

Matrix psd_sqrt(const Matrix& hermitian, double clip_tol) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(hermitian);
    RealVector w = eig.eigenvalues();
    if (w.size() > 0 && w.minCoeff() < -clip_tol) {
        std::ostringstream msg;
        msg << "matrix is not positive semidefinite: smallest eigenvalue " << w.minCoeff();
        throw NumericalError(msg.str());
    }
    w = w.cwiseMax(0.0).cwiseSqrt();
    return eig.eigenvectors() * w.cast<Complex>().asDiagonal() * eig.eigenvectors().adjoint();
}

RealVector hermitian_eigenvalues(const Matrix& hermitian) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(hermitian, Eigen::EigenvaluesOnly);
    return eig.eigenvalues();
}

double l1_norm(const Matrix& m) {
    return m.cwiseAbs().sum();
}

}  // namespace qpt::linalg
