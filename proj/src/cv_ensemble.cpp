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

#include "qpt/cv_ensemble.hpp"

#include <cmath>
#include <sstream>

#include "qpt/linalg.hpp"

namespace qpt {

namespace {

void check_cutoff(int cutoff) {
    if (cutoff < 2) {
        throw InvalidArgument("Fock cutoff must be >= 2");
    }
}

double grid_coord(double lo, double hi, int count, int i) {
    return count > 1 ? lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1) : lo;
}

}  // namespace

Complex CvGrid::point(std::size_t index) const {
    const int r = static_cast<int>(index / static_cast<std::size_t>(cols));
    const int c = static_cast<int>(index % static_cast<std::size_t>(cols));
    return {grid_coord(re_min, re_max, rows, r), grid_coord(im_min, im_max, cols, c)};
}

std::vector<Complex> CvGrid::points() const {
    std::vector<Complex> out;
    out.reserve(size());
    for (std::size_t i = 0; i < size(); ++i) {
        out.push_back(point(i));
    }
    return out;
}

CvGrid default_probe_grid() {
    return CvGrid{-2.5, 2.5, -2.5, 2.5, 10, 10};
}

CvGrid default_measurement_grid() {
    return CvGrid{-3.0, 3.0, -3.0, 3.0, 10, 10};
}

Matrix annihilation(int cutoff) {
    check_cutoff(cutoff);
    Matrix a = Matrix::Zero(cutoff, cutoff);
    for (int n = 1; n < cutoff; ++n) {
        a(n - 1, n) = std::sqrt(static_cast<double>(n));
    }
    return a;
}

bool displacement_truncation_risk(Complex alpha, int cutoff) {
    return std::norm(alpha) > static_cast<double>(cutoff) / 4.0;
}

Matrix displacement(Complex alpha, int cutoff, std::vector<std::string>* warnings) {
    check_cutoff(cutoff);
    if (warnings != nullptr && displacement_truncation_risk(alpha, cutoff)) {
        std::ostringstream msg;
        msg << "displacement amplitude |" << alpha << "|^2 = " << std::norm(alpha) << " exceeds cutoff/4 = "
            << cutoff / 4.0 << "; truncation may distort D(alpha)";
        warnings->push_back(msg.str());
    }
    if (alpha == Complex(0.0)) {
        return Matrix::Identity(cutoff, cutoff);
    }
    const Matrix a = annihilation(cutoff);
    // The generator G = alpha a^dag - conj(alpha) a is anti-Hermitian, so
    // H = i G is Hermitian and D = exp(G) = exp(-i H).
    const Matrix gen = alpha * a.adjoint() - std::conj(alpha) * a;
    return linalg::expm_minus_i(Complex(0.0, 1.0) * gen);
}

Vector coherent_ket(Complex alpha, int cutoff) {
    Vector psi = displacement(alpha, cutoff).col(0);
    psi /= psi.norm();
    return psi;
}

DensityMatrix coherent_state(Complex alpha, int cutoff) {
    const Vector psi = coherent_ket(alpha, cutoff);
    return DensityMatrix(psi * psi.adjoint());
}

Matrix displaced_parity(Complex beta, int cutoff) {
    const Matrix d = displacement(beta, cutoff);
    Vector parity(cutoff);
    for (int n = 0; n < cutoff; ++n) {
        parity(n) = (n % 2 == 0) ? 1.0 : -1.0;
    }
    return linalg::hermitize(d * parity.asDiagonal() * d.adjoint());
}

Matrix snap(const std::vector<double>& theta, int cutoff) {
    check_cutoff(cutoff);
    if (theta.size() > static_cast<std::size_t>(cutoff)) {
        throw InvalidArgument("snap: more phases than Fock levels");
    }
    Vector diag = Vector::Ones(cutoff);
    for (std::size_t n = 0; n < theta.size(); ++n) {
        diag(static_cast<Eigen::Index>(n)) = std::polar(1.0, theta[n]);
    }
    return diag.asDiagonal();
}

std::vector<double> default_snap_phases() {
    constexpr double h = std::numbers::pi / 2.0;
    return {h, h, -h, -h, h, h};
}

KrausStack snap_displace_process(Complex alpha, const std::vector<double>& theta, int cutoff) {
    const Matrix k = displacement(alpha, cutoff) * snap(theta, cutoff) * displacement(-alpha, cutoff);
    return KrausStack(std::vector<Matrix>{k});
}

}  // namespace qpt
