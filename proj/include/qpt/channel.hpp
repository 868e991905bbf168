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

#include <vector>

#include "qpt/types.hpp"

// Process representations: Kraus stacks and Choi matrices.
//
// Choi convention. For a Kraus operator K on an N-dimensional space,
//   |K>> = (I (x) K) sum_i |i> (x) |i>,
// so the first tensor factor is the input space and the second the output
// space, and |K>>[i * N + o] = K(o, i). The Choi matrix of a stack is
//   Phi = sum_l |K_l>><<K_l|,
// and it acts on a state as rho' = Tr_in[(rho^T (x) I) Phi].

namespace qpt {

// N x N density matrix. The plain constructor does not validate (channel
// outputs of non-TP stacks are legitimately unnormalised); use validated()
// where the physical invariants must hold.
class DensityMatrix {
   public:
    DensityMatrix() = default;
    explicit DensityMatrix(Matrix m);

    // Throws InvalidArgument unless m is Hermitian, unit trace and PSD
    // within tol.exact.
    static DensityMatrix validated(Matrix m, const Tolerances& tol = {});

    // Pure state |psi><psi| after normalising psi.
    static DensityMatrix pure(const Vector& psi);

    const Matrix& matrix() const { return m_; }
    Eigen::Index dim() const { return m_.rows(); }
    Complex trace() const { return m_.trace(); }
    double purity() const;

   private:
    Matrix m_;
};

// Ordered list of k Kraus operators, stored as the stacked kN x N matrix
//   [K_1; K_2; ...; K_k].
class KrausStack {
   public:
    KrausStack() = default;

    // From individual N x N operators. Throws DimensionError on ragged input.
    explicit KrausStack(const std::vector<Matrix>& blocks);

    // From a stacked kN x N matrix.
    static KrausStack from_stacked(Matrix stacked);

    Eigen::Index dim() const { return stacked_.cols(); }
    Eigen::Index count() const { return dim() == 0 ? 0 : stacked_.rows() / dim(); }

    const Matrix& stacked() const { return stacked_; }
    auto block(Eigen::Index l) const { return stacked_.middleRows(l * dim(), dim()); }
    std::vector<Matrix> blocks() const;

    // sum_l K_l^dagger K_l, which equals stacked^dagger stacked.
    Matrix gram() const { return stacked_.adjoint() * stacked_; }

    bool is_trace_preserving(double tol = kValidityTol) const;

   private:
    Matrix stacked_;
};

// N^2 x N^2 Choi matrix on H_in (x) H_out.
class ChoiMatrix {
   public:
    ChoiMatrix() = default;
    // Throws DimensionError unless m is square with a perfect-square size.
    explicit ChoiMatrix(Matrix m);

    const Matrix& matrix() const { return m_; }
    // Hilbert-space dimension N (the matrix is N^2 x N^2).
    Eigen::Index dim() const { return dim_; }

   private:
    Matrix m_;
    Eigen::Index dim_ = 0;
};

struct ProcessMetric {
    double fidelity = 0.0;
    double infidelity() const { return 1.0 - fidelity; }
};

// sum_l K_l rho K_l^dagger.
DensityMatrix apply_kraus(const KrausStack& kraus, const DensityMatrix& rho);

ChoiMatrix kraus_to_choi(const KrausStack& kraus);

// Tr_in[(rho^T (x) I) Phi].
DensityMatrix choi_apply(const ChoiMatrix& choi, const DensityMatrix& rho);

// Partial trace over the output (second) factor; the identity for TP maps.
Matrix partial_trace_out(const ChoiMatrix& choi);
Matrix partial_trace_out(const Matrix& choi, Eigen::Index dim);

// || sum_l K_l^dagger K_l - I ||_F.
double tp_defect(const KrausStack& kraus);

// Uhlmann fidelity Tr sqrt(sqrt(A) B sqrt(A)) of the trace-normalised Choi
// matrices A = Phi_1 / N and B = Phi_2 / N, clamped to [0, 1]. Eigenvalues
// below -tol.validity raise NumericalError; smaller negative ones are clipped.
ProcessMetric process_fidelity(const ChoiMatrix& a, const ChoiMatrix& b, const Tolerances& tol = {});

// Number of Choi eigenvalues above threshold.
int choi_rank(const ChoiMatrix& choi, double threshold = kValidityTol);

}  // namespace qpt
