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

#include "qpt/gd.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "qpt/dv_ensemble.hpp"

namespace qpt {

namespace {

using RowMat = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Clock = std::chrono::steady_clock;

constexpr double kSignZero = 1e-15;
constexpr double kFactorDrop = 1e-14;
constexpr double kSingularRcond = 1e-14;
constexpr int kMaxStepHalvings = 10;
// Iterates whose TP defect drifts past this are re-orthonormalised.
constexpr double kDriftTol = 1e-10;

Matrix probe_factor(const Matrix& rho) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(rho);
    const RealVector& w = eig.eigenvalues();
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        if (w(i) > kFactorDrop) {
            keep.push_back(i);
        }
    }
    Matrix f(rho.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t c = 0; c < keep.size(); ++c) {
        f.col(static_cast<Eigen::Index>(c)) = eig.eigenvectors().col(keep[c]) * std::sqrt(w(keep[c]));
    }
    return f;
}

double l1_term(const Matrix& k, double lambda, Matrix* grad) {
    if (lambda == 0.0) {
        return 0.0;
    }
    double sum = 0.0;
    for (Eigen::Index c = 0; c < k.cols(); ++c) {
        for (Eigen::Index r = 0; r < k.rows(); ++r) {
            const double mag = std::abs(k(r, c));
            sum += mag;
            if (grad != nullptr && mag >= kSignZero) {
                (*grad)(r, c) += lambda * k(r, c) / mag;
            }
        }
    }
    return lambda * sum;
}

Matrix polar_orthonormalize(const Matrix& stacked) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(stacked.adjoint() * stacked);
    const RealVector inv_sqrt = eig.eigenvalues().cwiseSqrt().cwiseInverse();
    return stacked * (eig.eigenvectors() * inv_sqrt.cast<Complex>().asDiagonal() * eig.eigenvectors().adjoint());
}

}  // namespace

void GdConfig::validate() const {
    std::ostringstream msg;
    if (kraus < 1) msg << "number of Kraus operators must be >= 1; ";
    if (!(eta0 > 0.0)) msg << "eta0 must be > 0; ";
    if (!(decay > 0.0 && decay <= 1.0)) msg << "decay must lie in (0, 1]; ";
    if (!(lambda >= 0.0)) msg << "lambda must be >= 0; ";
    if (max_iters < 0) msg << "max_iters must be >= 0; ";
    if (!(grad_norm_floor >= 0.0)) msg << "grad_norm_floor must be >= 0; ";
    if (!(plateau_tol >= 0.0)) msg << "plateau_tol must be >= 0; ";
    if (plateau_window < 0) msg << "plateau_window must be >= 0; ";
    if (!msg.str().empty()) {
        throw InvalidArgument("invalid GdConfig: " + msg.str());
    }
}

std::string to_string(StopReason reason) {
    switch (reason) {
        case StopReason::kMaxIters: return "max_iters";
        case StopReason::kPlateau: return "plateau";
        case StopReason::kGradientFloor: return "gradient_floor";
    }
    return "max_iters";
}

KrausObjective::KrausObjective(const Tomogram& t) : dim_(t.dim), data_(&t.data) {
    t.validate();
    const Eigen::Index n2 = dim_ * dim_;
    factors_.reserve(t.probes.size());
    for (const auto& rho : t.probes.matrices) {
        factors_.push_back(probe_factor(rho));
    }
    meas_ = t.measurements.matrices;
    meas_rows_.resize(static_cast<Eigen::Index>(meas_.size()), n2);
    meas_flat_.resize(static_cast<Eigen::Index>(meas_.size()), n2);
    for (std::size_t j = 0; j < meas_.size(); ++j) {
        // Column-major storage of M^T and of M, laid out as rows.
        const Matrix mt = meas_[j].transpose();
        meas_rows_.row(static_cast<Eigen::Index>(j)) = Eigen::Map<const Vector>(mt.data(), n2).transpose();
        meas_flat_.row(static_cast<Eigen::Index>(j)) = Eigen::Map<const Vector>(meas_[j].data(), n2).transpose();
    }
}

double KrausObjective::loss(const KrausStack& k, const BatchIndex& batch, double lambda) const {
    return evaluate(k, batch, lambda, nullptr);
}

double KrausObjective::loss_and_gradient(const KrausStack& k, const BatchIndex& batch, double lambda,
                                         Matrix& grad) const {
    return evaluate(k, batch, lambda, &grad);
}

RealMatrix KrausObjective::predictions(const KrausStack& k) const {
    const Eigen::Index n = dim_;
    const Eigen::Index n2 = n * n;
    Matrix sigma_rows(static_cast<Eigen::Index>(factors_.size()), n2);
    for (std::size_t i = 0; i < factors_.size(); ++i) {
        const Matrix y = k.stacked() * factors_[i];
        Matrix sigma = Matrix::Zero(n, n);
        for (Eigen::Index l = 0; l < k.count(); ++l) {
            sigma.noalias() += y.middleRows(l * n, n) * y.middleRows(l * n, n).adjoint();
        }
        sigma_rows.row(static_cast<Eigen::Index>(i)) = Eigen::Map<const Vector>(sigma.data(), n2).transpose();
    }
    return (sigma_rows * meas_rows_.transpose()).real();
}

double KrausObjective::evaluate_full(const KrausStack& k, double lambda, Matrix* grad) const {
    const Eigen::Index n = dim_;
    const Eigen::Index n2 = n * n;
    const Eigen::Index kc = k.count();
    std::vector<Matrix> ys(factors_.size());
    Matrix sigma_rows(static_cast<Eigen::Index>(factors_.size()), n2);
    for (std::size_t i = 0; i < factors_.size(); ++i) {
        ys[i] = k.stacked() * factors_[i];
        Matrix sigma = Matrix::Zero(n, n);
        for (Eigen::Index l = 0; l < kc; ++l) {
            sigma.noalias() += ys[i].middleRows(l * n, n) * ys[i].middleRows(l * n, n).adjoint();
        }
        sigma_rows.row(static_cast<Eigen::Index>(i)) = Eigen::Map<const Vector>(sigma.data(), n2).transpose();
    }
    const RealMatrix residual = *data_ - (sigma_rows * meas_rows_.transpose()).real();
    double value = residual.squaredNorm();
    if (grad != nullptr) {
        grad->setZero(k.stacked().rows(), n);
        // Row i holds the column-major storage of R_i = sum_j r_ij M_j.
        const RowMat r_rows = residual.cast<Complex>() * meas_flat_;
        for (std::size_t i = 0; i < factors_.size(); ++i) {
            const Eigen::Map<const Matrix> r(r_rows.row(static_cast<Eigen::Index>(i)).data(), n, n);
            const Matrix f_adj = factors_[i].adjoint();
            for (Eigen::Index l = 0; l < kc; ++l) {
                grad->middleRows(l * n, n).noalias() -= 2.0 * (r * ys[i].middleRows(l * n, n)) * f_adj;
            }
        }
    }
    value += l1_term(k.stacked(), lambda, grad);
    return value;
}

double KrausObjective::evaluate(const KrausStack& k, const BatchIndex& batch, double lambda, Matrix* grad) const {
    if (k.dim() != dim_) {
        throw DimensionError("Kraus dimension does not match the tomogram dimension");
    }
    if (batch.is_full) {
        return evaluate_full(k, lambda, grad);
    }
    const Eigen::Index n = dim_;
    const Eigen::Index n2 = n * n;
    const Eigen::Index kc = k.count();
    if (grad != nullptr) {
        grad->setZero(k.stacked().rows(), n);
    }

    // Group entries by probe.
    std::vector<std::size_t> order(batch.pairs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return batch.pairs[a].first < batch.pairs[b].first; });

    double value = 0.0;
    Matrix sigma(n, n);
    Matrix r(n, n);
    std::size_t pos = 0;
    while (pos < order.size()) {
        const std::uint32_t probe = batch.pairs[order[pos]].first;
        if (probe >= factors_.size()) {
            throw InvalidArgument("batch probe index out of range");
        }
        const Matrix y = k.stacked() * factors_[probe];
        sigma.setZero();
        for (Eigen::Index l = 0; l < kc; ++l) {
            sigma.noalias() += y.middleRows(l * n, n) * y.middleRows(l * n, n).adjoint();
        }
        const Eigen::Map<const Vector> sigma_vec(sigma.data(), n2);
        r.setZero();
        for (; pos < order.size() && batch.pairs[order[pos]].first == probe; ++pos) {
            const std::uint32_t meas = batch.pairs[order[pos]].second;
            if (meas >= meas_.size()) {
                throw InvalidArgument("batch measurement index out of range");
            }
            const double pred = meas_rows_.row(meas).transpose().cwiseProduct(sigma_vec).sum().real();
            const double res = (*data_)(probe, meas) - pred;
            value += res * res;
            if (grad != nullptr) {
                r.noalias() += res * meas_[meas];
            }
        }
        if (grad != nullptr) {
            const Matrix f_adj = factors_[probe].adjoint();
            for (Eigen::Index l = 0; l < kc; ++l) {
                grad->middleRows(l * n, n).noalias() -= 2.0 * (r * y.middleRows(l * n, n)) * f_adj;
            }
        }
    }
    value += l1_term(k.stacked(), lambda, grad);
    return value;
}

double loss(const KrausStack& k, const Tomogram& t, const BatchIndex& batch, double lambda) {
    return KrausObjective(t).loss(k, batch, lambda);
}

Matrix wirtinger_gradient(const KrausStack& k, const Tomogram& t, const BatchIndex& batch, double lambda) {
    Matrix grad;
    KrausObjective(t).loss_and_gradient(k, batch, lambda, grad);
    return grad;
}

KrausStack cayley_step(const KrausStack& k, const Matrix& g, double eta, double* eta_used) {
    const Matrix& x = k.stacked();
    if (g.rows() != x.rows() || g.cols() != x.cols()) {
        throw DimensionError("cayley_step: gradient shape differs from the Kraus stack");
    }
    if (tp_defect(k) > kValidityTol) {
        throw InvalidArgument("cayley_step: Kraus stack is not on the Stiefel manifold");
    }
    const Eigen::Index n = x.cols();
    Matrix a(x.rows(), 2 * n);
    a << g, x;
    Matrix b(x.rows(), 2 * n);
    b << x, -g;
    const Matrix ba = b.adjoint() * a;
    const Matrix bx = b.adjoint() * x;
    for (int attempt = 0; attempt <= kMaxStepHalvings; ++attempt) {
        const Matrix inner = Matrix::Identity(2 * n, 2 * n) + (eta / 2.0) * ba;
        Eigen::PartialPivLU<Matrix> lu(inner);
        const double rcond = lu.rcond();
        if (std::isfinite(rcond) && rcond > kSingularRcond) {
            if (eta_used != nullptr) {
                *eta_used = eta;
            }
            return KrausStack::from_stacked(x - eta * (a * lu.solve(bx)));
        }
        eta /= 2.0;
    }
    throw NumericalError("cayley_step: retraction system singular after repeated step halving");
}

KrausStack init_kraus(int k, Eigen::Index dim, Rng& rng) {
    if (k < 1) {
        throw InvalidArgument("init_kraus: k must be >= 1");
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(k));
    std::vector<Matrix> blocks;
    blocks.reserve(static_cast<std::size_t>(k));
    for (int l = 0; l < k; ++l) {
        blocks.push_back(scale * random_unitary(dim, rng));
    }
    return KrausStack(blocks);
}

FitResult fit(const Tomogram& t, const GdConfig& cfg, const std::optional<KrausStack>& init) {
    cfg.validate();
    const KrausObjective objective(t);

    Rng rng(cfg.seed);
    Rng init_rng = rng.split();
    Rng batch_rng = rng.split();

    KrausStack k = init ? *init : init_kraus(cfg.kraus, t.dim, init_rng);
    if (k.dim() != t.dim) {
        throw DimensionError("fit: initial Kraus dimension does not match the tomogram");
    }
    if (tp_defect(k) > kValidityTol) {
        throw InvalidArgument("fit: initial Kraus stack is not trace preserving");
    }

    const std::size_t rows = objective.num_probes();
    const std::size_t cols = objective.num_measurements();
    const std::size_t total = rows * cols;
    BatchStream stream(rows, cols, cfg.batch_size == 0 ? total : cfg.batch_size, std::move(batch_rng));
    BatchIndex full_batch;
    full_batch.is_full = true;

    FitResult result;
    FitTrace& trace = result.trace;
    double eta = cfg.eta0;
    double last_checkpoint = std::numeric_limits<double>::quiet_NaN();
    Matrix grad;

    for (int it = 0; it < cfg.max_iters; ++it) {
        const auto start = Clock::now();
        const BatchIndex batch = stream.next();
        const double value = objective.loss_and_gradient(k, batch, cfg.lambda, grad);
        trace.loss.push_back(value);

        const double norm = grad.norm();
        const bool at_floor = !(norm >= cfg.grad_norm_floor) || norm == 0.0;
        if (!at_floor) {
            k = cayley_step(k, grad / norm, eta);
            if (tp_defect(k) > kDriftTol) {
                k = KrausStack::from_stacked(polar_orthonormalize(k.stacked()));
            }
            eta *= cfg.decay;
        }
        trace.tp_defect.push_back(tp_defect(k));
        trace.iter_time_s.push_back(std::chrono::duration<double>(Clock::now() - start).count());
        trace.iterations = it + 1;

        if (at_floor) {
            trace.stop = StopReason::kGradientFloor;
            break;
        }
        if (cfg.plateau_window > 0 && (it + 1) % cfg.plateau_window == 0) {
            const double full = objective.loss(k, full_batch, cfg.lambda);
            trace.full_loss.emplace_back(it + 1, full);
            if (std::isfinite(last_checkpoint) &&
                std::abs(full - last_checkpoint) <= cfg.plateau_tol * std::max(std::abs(last_checkpoint), 1e-300)) {
                trace.stop = StopReason::kPlateau;
                break;
            }
            last_checkpoint = full;
        }
    }
    result.kraus = std::move(k);
    return result;
}

}  // namespace qpt
