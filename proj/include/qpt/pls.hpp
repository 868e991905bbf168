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

#include <string>
#include <vector>

#include "qpt/channel.hpp"
#include "qpt/dataset.hpp"

// Projected least squares: a linear-inversion Choi estimate followed by a
// Frobenius projection onto the CPTP set, computed with Dykstra's
// alternating projections between the PSD cone and the TP affine subspace.

namespace qpt {

enum class LsSolver { kPseudoInverse, kNormalEquations };

std::string to_string(LsSolver solver);
LsSolver ls_solver_from_string(const std::string& name);

struct PlsConfig {
    int dykstra_max_iters = 1000;
    // Frobenius change of the iterate per cycle.
    double dykstra_tol = 1e-7;
    LsSolver solver = LsSolver::kPseudoInverse;
    // Record ||x - P_CP(x)||_F after every cycle (one extra eigendecomposition).
    bool track_violations = false;

    void validate() const;
};

// Hermitised least-squares solution of S vec(Phi) = d. Throws
// IncompleteDataError when S has rank below N^4, which is the case for
// subsampled or otherwise informationally incomplete data. Pseudo-inverses
// of descriptor-defined ensembles are cached and shared between calls.
ChoiMatrix linear_inversion(const Tomogram& t, LsSolver solver = LsSolver::kPseudoInverse);

// Nearest PSD matrix: negative eigenvalues clipped to zero.
ChoiMatrix project_cp(const ChoiMatrix& choi);

// Phi + X (x) I with X = (I - Tr_out Phi) / N.
ChoiMatrix project_tp(const ChoiMatrix& choi);

struct CptpProjection {
    // Final PSD iterate; TP up to the Dykstra tolerance once converged.
    ChoiMatrix choi;
    bool converged = false;
    int cycles = 0;
    double last_change = 0.0;
    std::vector<double> violations;
};

CptpProjection project_cptp(const ChoiMatrix& choi, const PlsConfig& cfg = {});

struct PlsResult {
    ChoiMatrix choi;
    bool converged = false;
    int cycles = 0;
    double wall_time_s = 0.0;
};

PlsResult fit_pls(const Tomogram& t, const PlsConfig& cfg = {});

}  // namespace qpt
