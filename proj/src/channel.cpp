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

#include "qpt/channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "qpt/linalg.hpp"

namespace qpt {

namespace {

Eigen::Index exact_sqrt(Eigen::Index n) {
    auto r = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(n))));
    return r * r == n ? r : -1;
}

}  // namespace

DensityMatrix::DensityMatrix(Matrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) {
        throw DimensionError("density matrix must be square");
    }
}

DensityMatrix DensityMatrix::validated(Matrix m, const Tolerances& tol) {
    DensityMatrix rho(std::move(m));
    if (linalg::hermiticity_defect(rho.m_) > tol.exact) {
        throw InvalidArgument("density matrix is not Hermitian");
    }
    if (std::abs(rho.m_.trace() - Complex(1.0)) > tol.exact) {
        throw InvalidArgument("density matrix does not have unit trace");
    }
    if (linalg::hermitian_eigenvalues(rho.m_).minCoeff() < -tol.exact) {
        throw InvalidArgument("density matrix is not positive semidefinite");
    }
    return rho;
}

DensityMatrix DensityMatrix::pure(const Vector& psi) {
    const Vector v = psi / psi.norm();
    return DensityMatrix(v * v.adjoint());
}

double DensityMatrix::purity() const {
    return (m_ * m_).trace().real();
}

KrausStack::KrausStack(const std::vector<Matrix>& blocks) {
    if (blocks.empty()) {
        throw InvalidArgument("a Kraus stack needs at least one operator");
    }
    const Eigen::Index n = blocks.front().rows();
    stacked_.resize(n * static_cast<Eigen::Index>(blocks.size()), n);
    for (std::size_t l = 0; l < blocks.size(); ++l) {
        if (blocks[l].rows() != n || blocks[l].cols() != n) {
            throw DimensionError("Kraus operators must all be N x N with the same N");
        }
        stacked_.middleRows(static_cast<Eigen::Index>(l) * n, n) = blocks[l];
    }
}

KrausStack KrausStack::from_stacked(Matrix stacked) {
    if (stacked.cols() == 0 || stacked.rows() % stacked.cols() != 0) {
        throw DimensionError("stacked Kraus matrix must be kN x N");
    }
    KrausStack k;
    k.stacked_ = std::move(stacked);
    return k;
}

std::vector<Matrix> KrausStack::blocks() const {
    std::vector<Matrix> out;
    out.reserve(static_cast<std::size_t>(count()));
    for (Eigen::Index l = 0; l < count(); ++l) {
        out.emplace_back(block(l));
    }
    return out;
}

bool KrausStack::is_trace_preserving(double tol) const {
    return tp_defect(*this) <= tol;
}

ChoiMatrix::ChoiMatrix(Matrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) {
        throw DimensionError("Choi matrix must be square");
    }
    dim_ = exact_sqrt(m_.rows());
    if (dim_ < 1) {
        throw DimensionError("Choi matrix size must be N^2 x N^2");
    }
}

DensityMatrix apply_kraus(const KrausStack& kraus, const DensityMatrix& rho) {
    if (kraus.dim() != rho.dim()) {
        throw DimensionError("apply_kraus: Kraus dimension does not match state dimension");
    }
    const Matrix left = kraus.stacked() * rho.matrix();
    Matrix out = Matrix::Zero(rho.dim(), rho.dim());
    const Eigen::Index n = kraus.dim();
    for (Eigen::Index l = 0; l < kraus.count(); ++l) {
        out.noalias() += left.middleRows(l * n, n) * kraus.block(l).adjoint();
    }
    return DensityMatrix(std::move(out));
}

ChoiMatrix kraus_to_choi(const KrausStack& kraus) {
    const Eigen::Index n = kraus.dim();
    // Column l holds |K_l>>; |K>>[i * N + o] = K(o, i).
    Matrix vecs(n * n, kraus.count());
    for (Eigen::Index l = 0; l < kraus.count(); ++l) {
        const auto k = kraus.block(l);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index o = 0; o < n; ++o) {
                vecs(i * n + o, l) = k(o, i);
            }
        }
    }
    return ChoiMatrix(vecs * vecs.adjoint());
}

DensityMatrix choi_apply(const ChoiMatrix& choi, const DensityMatrix& rho) {
    const Eigen::Index n = choi.dim();
    if (rho.dim() != n) {
        throw DimensionError("choi_apply: Choi dimension does not match state dimension");
    }
    // out(o, o') = sum_{i, i'} rho(i', i) Phi[(i', o), (i, o')].
    const Matrix& phi = choi.matrix();
    Matrix out = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index ip = 0; ip < n; ++ip) {
            const Complex w = rho.matrix()(ip, i);
            if (w == Complex(0.0)) {
                continue;
            }
            out.noalias() += w * phi.block(ip * n, i * n, n, n);
        }
    }
    return DensityMatrix(std::move(out));
}

Matrix partial_trace_out(const Matrix& choi, Eigen::Index dim) {
    if (choi.rows() != dim * dim || choi.cols() != dim * dim) {
        throw DimensionError("partial_trace_out: matrix is not N^2 x N^2");
    }
    Matrix out(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        for (Eigen::Index ip = 0; ip < dim; ++ip) {
            out(i, ip) = choi.block(i * dim, ip * dim, dim, dim).trace();
        }
    }
    return out;
}

Matrix partial_trace_out(const ChoiMatrix& choi) {
    return partial_trace_out(choi.matrix(), choi.dim());
}

double tp_defect(const KrausStack& kraus) {
    return (kraus.gram() - Matrix::Identity(kraus.dim(), kraus.dim())).norm();
}

ProcessMetric process_fidelity(const ChoiMatrix& a, const ChoiMatrix& b, const Tolerances& tol) {
    if (a.dim() != b.dim()) {
        throw DimensionError("process_fidelity: Choi dimensions differ");
    }
    const double n = static_cast<double>(a.dim());
    const Eigen::Index size = a.matrix().rows();
    Eigen::SelfAdjointEigenSolver<Matrix> ea(linalg::hermitize(a.matrix()) / n);
    const Matrix bn = linalg::hermitize(b.matrix()) / n;
    if (ea.eigenvalues().minCoeff() < -tol.validity ||
        linalg::hermitian_eigenvalues(bn).minCoeff() < -tol.validity) {
        throw NumericalError("process_fidelity: Choi matrix is not positive semidefinite");
    }
    // Eigenvalues at rounding level are exact zeros in disguise; their square
    // roots would otherwise contribute O(1e-8) each.
    const double floor = static_cast<double>(size) * std::numeric_limits<double>::epsilon();
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < size; ++i) {
        if (ea.eigenvalues()(i) > floor) {
            keep.push_back(i);
        }
    }
    Matrix v(size, static_cast<Eigen::Index>(keep.size()));
    for (std::size_t c = 0; c < keep.size(); ++c) {
        v.col(static_cast<Eigen::Index>(c)) = ea.eigenvectors().col(keep[c]) * std::sqrt(ea.eigenvalues()(keep[c]));
    }
    // sqrt(A) B sqrt(A) has the nonzero spectrum of V^dagger B V with V = U sqrt(diag a).
    const RealVector w = linalg::hermitian_eigenvalues(linalg::hermitize(v.adjoint() * bn * v));
    double f = 0.0;
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        if (w(i) > floor) {
            f += std::sqrt(w(i));
        }
    }
    return ProcessMetric{std::clamp(f, 0.0, 1.0)};
}

int choi_rank(const ChoiMatrix& choi, double threshold) {
    const RealVector w = linalg::hermitian_eigenvalues(choi.matrix());
    return static_cast<int>((w.array() > threshold).count());
}

}  // namespace qpt
