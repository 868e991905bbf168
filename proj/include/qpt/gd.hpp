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
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qpt/channel.hpp"
#include "qpt/dataset.hpp"
#include "qpt/rng.hpp"

// Kraus-operator reconstruction by gradient descent on the Stiefel manifold
// of stacked kN x N matrices K with K^dagger K = I.
//
// Loss over a batch B of (probe i, measurement j) entries:
//   L(K) = sum_{(i,j) in B} (d_ij - Tr[M_j sum_l K_l rho_i K_l^dagger])^2
//          + lambda * sum |K_entry|
// Each step normalises the conjugate gradient G' to unit Frobenius norm and
// applies the low-rank Cayley retraction
//   K' = K - eta A (I + eta/2 B^dagger A)^{-1} B^dagger K,
//   A = [G K], B = [K -G],
// which keeps K exactly on the manifold (trace preservation).

namespace qpt {

struct GdConfig {
    int kraus = 1;
    double eta0 = 0.1;
    double decay = 0.999;
    double lambda = 1e-3;
    int max_iters = 200;
    // 0 selects full-batch updates.
    std::size_t batch_size = 0;
    std::uint64_t seed = 0;
    double grad_norm_floor = 1e-12;
    // Early stop when the full-batch loss, evaluated every plateau_window
    // steps, changes by less than plateau_tol relative to its previous value.
    double plateau_tol = 1e-10;
    int plateau_window = 20;

    // Throws InvalidArgument when a field is out of range.
    void validate() const;
};

enum class StopReason { kMaxIters, kPlateau, kGradientFloor };

std::string to_string(StopReason reason);

struct FitTrace {
    // Loss on the batch used at each step, evaluated before the update.
    std::vector<double> loss;
    // tp_defect of the iterate after each step.
    std::vector<double> tp_defect;
    std::vector<double> iter_time_s;
    // (iterations completed, full-batch loss) at each plateau checkpoint.
    std::vector<std::pair<int, double>> full_loss;
    int iterations = 0;
    StopReason stop = StopReason::kMaxIters;
};

struct FitResult {
    KrausStack kraus;
    FitTrace trace;
};

// Precomputed view of a tomogram for repeated loss/gradient evaluation.
// Probes are stored as factors rho_i = F_i F_i^dagger, which makes pure
// probes cost O(kN^2) instead of O(kN^3).
class KrausObjective {
   public:
    explicit KrausObjective(const Tomogram& t);

    Eigen::Index dim() const { return dim_; }
    std::size_t num_probes() const { return factors_.size(); }
    std::size_t num_measurements() const { return meas_.size(); }

    double loss(const KrausStack& k, const BatchIndex& batch, double lambda) const;

    // Returns the loss and writes the kN x N conjugate gradient into grad.
    double loss_and_gradient(const KrausStack& k, const BatchIndex& batch, double lambda, Matrix& grad) const;

    // Noiseless predictions Tr[M_j E(rho_i)] for every entry.
    RealMatrix predictions(const KrausStack& k) const;

   private:
    double evaluate(const KrausStack& k, const BatchIndex& batch, double lambda, Matrix* grad) const;
    double evaluate_full(const KrausStack& k, double lambda, Matrix* grad) const;

    Eigen::Index dim_;
    std::vector<Matrix> factors_;
    std::vector<Matrix> meas_;
    // Row j = vec(M_j^T); <row, vec(sigma)> (no conjugation) = Tr[M_j sigma].
    Matrix meas_rows_;
    // Row j = vec(M_j).
    Matrix meas_flat_;
    const RealMatrix* data_;
};

double loss(const KrausStack& k, const Tomogram& t, const BatchIndex& batch, double lambda);

// Block l: -2 sum_{(i,j)} r_ij M_j K_l rho_i + lambda * sign(K_l), where
// r_ij is the residual and sign(z) = z / |z| (0 where |z| < 1e-15).
Matrix wirtinger_gradient(const KrausStack& k, const Tomogram& t, const BatchIndex& batch, double lambda);

// Low-rank Cayley retraction along the normalised gradient g. A singular
// inner system halves eta, up to 10 times, before raising NumericalError.
// If eta_used is non-null it receives the step actually taken.
KrausStack cayley_step(const KrausStack& k, const Matrix& g, double eta, double* eta_used = nullptr);

// K_l = U_l / sqrt(k) with U_l random unitaries.
KrausStack init_kraus(int k, Eigen::Index dim, Rng& rng);

// Runs gradient descent from init_kraus(cfg.kraus, ...) or from `init`.
FitResult fit(const Tomogram& t, const GdConfig& cfg, const std::optional<KrausStack>& init = std::nullopt);

}  // namespace qpt
