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

#include "qpt/pls.hpp"

#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>

#include "qpt/linalg.hpp"

namespace qpt {

namespace {

constexpr double kRankTol = 1e-10;

std::string descriptor_key(const OperatorSet& s) {
    std::ostringstream key;
    key << to_string(s.family) << ':' << s.n_qubits << ':' << s.cutoff << ':' << s.grid.re_min << ','
        << s.grid.re_max << ',' << s.grid.im_min << ',' << s.grid.im_max << ',' << s.grid.rows << ','
        << s.grid.cols << ':';
    for (std::size_t i : s.indices) {
        key << i << ',';
    }
    return key.str();
}

[[noreturn]] void throw_incomplete(Eigen::Index rank, Eigen::Index unknowns, std::size_t rows) {
    std::ostringstream msg;
    msg << "linear inversion needs informationally complete data: the sensing matrix has rank " << rank
        << " for " << unknowns << " unknowns (" << rows
        << " equations); subsampled (gamma < 1) or incomplete probe/measurement sets cannot be inverted";
    throw IncompleteDataError(msg.str());
}

std::shared_ptr<const Matrix> compute_pinv(const Matrix& s) {
    Eigen::BDCSVD<Matrix> svd(s, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RealVector& sv = svd.singularValues();
    const double cutoff = kRankTol * (sv.size() > 0 ? sv(0) : 0.0);
    Eigen::Index rank = 0;
    while (rank < sv.size() && sv(rank) > cutoff) {
        ++rank;
    }
    if (rank < s.cols()) {
        throw_incomplete(rank, s.cols(), static_cast<std::size_t>(s.rows()));
    }
    const RealVector inv = sv.cwiseInverse();
    return std::make_shared<const Matrix>(svd.matrixV() * inv.cast<Complex>().asDiagonal() *
                                          svd.matrixU().adjoint());
}

std::shared_ptr<const Matrix> cached_pinv(const OperatorSet& probes, const OperatorSet& meas) {
    const bool cacheable = probes.family != OperatorFamily::kExplicit && meas.family != OperatorFamily::kExplicit;
    if (!cacheable) {
        return compute_pinv(sensing_matrix(probes, meas));
    }
    static std::mutex mutex;
    static std::map<std::string, std::shared_ptr<const Matrix>> cache;
    const std::string key = descriptor_key(probes) + '|' + descriptor_key(meas);
    {
        std::lock_guard<std::mutex> lock(mutex);
        auto it = cache.find(key);
        if (it != cache.end()) {
            return it->second;
        }
    }
    auto pinv = compute_pinv(sensing_matrix(probes, meas));
    std::lock_guard<std::mutex> lock(mutex);
    return cache.emplace(key, std::move(pinv)).first->second;
}

Vector data_vector(const Tomogram& t) {
    // Row-major pair order matches the sensing-matrix rows.
    Vector d(t.data.size());
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < t.data.rows(); ++i) {
        for (Eigen::Index j = 0; j < t.data.cols(); ++j) {
            d(k++) = t.data(i, j);
        }
    }
    return d;
}

}  // namespace

std::string to_string(LsSolver solver) {
    return solver == LsSolver::kNormalEquations ? "normal-equations" : "pseudo-inverse";
}

LsSolver ls_solver_from_string(const std::string& name) {
    if (name == "pseudo-inverse") return LsSolver::kPseudoInverse;
    if (name == "normal-equations") return LsSolver::kNormalEquations;
    throw InvalidArgument("unknown least-squares solver '" + name + "'");
}

void PlsConfig::validate() const {
    if (dykstra_max_iters < 1) {
        throw InvalidArgument("dykstra_max_iters must be >= 1");
    }
    if (!(dykstra_tol > 0.0)) {
        throw InvalidArgument("dykstra_tol must be > 0");
    }
}

ChoiMatrix linear_inversion(const Tomogram& t, LsSolver solver) {
    t.validate();
    const Eigen::Index n2 = t.dim * t.dim;
    const Vector d = data_vector(t);
    Vector x;
    if (solver == LsSolver::kPseudoInverse) {
        x = *cached_pinv(t.probes, t.measurements) * d;
    } else {
        const Matrix s = sensing_matrix(t.probes, t.measurements);
        const Matrix gram = s.adjoint() * s;
        const RealVector w = linalg::hermitian_eigenvalues(gram);
        const double cutoff = kRankTol * kRankTol * std::max(w(w.size() - 1), 0.0);
        Eigen::Index rank = 0;
        for (Eigen::Index i = 0; i < w.size(); ++i) {
            rank += w(i) > cutoff ? 1 : 0;
        }
        if (rank < s.cols()) {
            throw_incomplete(rank, s.cols(), static_cast<std::size_t>(s.rows()));
        }
        x = gram.llt().solve(s.adjoint() * d);
    }
    return ChoiMatrix(linalg::hermitize(linalg::unflatten(x, n2, n2)));
}

ChoiMatrix project_cp(const ChoiMatrix& choi) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(choi.matrix());
    const RealVector w = eig.eigenvalues().cwiseMax(0.0);
    const Matrix& v = eig.eigenvectors();
    return ChoiMatrix(linalg::hermitize(v * w.cast<Complex>().asDiagonal() * v.adjoint()));
}

ChoiMatrix project_tp(const ChoiMatrix& choi) {
    const Eigen::Index n = choi.dim();
    const Matrix x = (Matrix::Identity(n, n) - partial_trace_out(choi)) / static_cast<double>(n);
    return ChoiMatrix(choi.matrix() + linalg::kron(x, Matrix::Identity(n, n)));
}

CptpProjection project_cptp(const ChoiMatrix& choi, const PlsConfig& cfg) {
    cfg.validate();
    const Eigen::Index size = choi.matrix().rows();
    Matrix x = choi.matrix();
    Matrix p = Matrix::Zero(size, size);
    Matrix q = Matrix::Zero(size, size);
    CptpProjection out;
    Matrix y = x;
    const Eigen::Index n = choi.dim();
    for (int cycle = 1; cycle <= cfg.dykstra_max_iters; ++cycle) {
        y = project_cp(ChoiMatrix(x + p)).matrix();
        p = x + p - y;
        Matrix next = project_tp(ChoiMatrix(y + q)).matrix();
        q = y + q - next;
        out.last_change = (next - x).norm();
        x = std::move(next);
        out.cycles = cycle;
        if (cfg.track_violations) {
            out.violations.push_back((x - project_cp(ChoiMatrix(x)).matrix()).norm());
        }
        const double tp_gap = (partial_trace_out(y, n) - Matrix::Identity(n, n)).norm();
        if (out.last_change < cfg.dykstra_tol && tp_gap < cfg.dykstra_tol) {
            out.converged = true;
            break;
        }
    }
    out.choi = ChoiMatrix(std::move(y));
    return out;
}

PlsResult fit_pls(const Tomogram& t, const PlsConfig& cfg) {
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();
    CptpProjection proj = project_cptp(linear_inversion(t, cfg.solver), cfg);
    PlsResult out;
    out.choi = std::move(proj.choi);
    out.converged = proj.converged;
    out.cycles = proj.cycles;
    out.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

}  // namespace qpt
