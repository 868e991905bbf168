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
#include <numbers>
#include <string>
#include <vector>

#include "qpt/channel.hpp"

// Single-mode bosonic operators in a Fock space truncated to `cutoff`
// levels. Operators are built directly in the truncated space.

namespace qpt {

inline constexpr int kDefaultFockCutoff = 32;
inline constexpr double kDefaultSnapAlpha = 1.5;

// Rectangular grid of complex amplitudes. Point (r, c) has real part
// re_min + r * (re_max - re_min) / (rows - 1) and imaginary part
// im_min + c * (im_max - im_min) / (cols - 1); endpoints are included and
// points are enumerated row-major (index = r * cols + c).
struct CvGrid {
    double re_min = 0.0;
    double re_max = 0.0;
    double im_min = 0.0;
    double im_max = 0.0;
    int rows = 1;
    int cols = 1;

    std::size_t size() const { return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols); }
    Complex point(std::size_t index) const;
    std::vector<Complex> points() const;

    bool operator==(const CvGrid&) const = default;
};

// Coherent-probe grid: Re, Im alpha in [-2.5, 2.5], 10 x 10.
CvGrid default_probe_grid();
// Displaced-parity grid: Re, Im beta in [-3, 3], 10 x 10.
CvGrid default_measurement_grid();

// a |n> = sqrt(n) |n - 1>.
Matrix annihilation(int cutoff);

// True when |alpha|^2 > cutoff / 4, where truncation starts to distort D(alpha).
bool displacement_truncation_risk(Complex alpha, int cutoff);

// exp(alpha a^dagger - conj(alpha) a) of the truncated generator. When
// warnings is non-null a message is appended for amplitudes at truncation
// risk.
Matrix displacement(Complex alpha, int cutoff, std::vector<std::string>* warnings = nullptr);

// D(alpha)|0>, renormalised after truncation.
DensityMatrix coherent_state(Complex alpha, int cutoff);
Vector coherent_ket(Complex alpha, int cutoff);

// D(beta) P D(beta)^dagger with P = diag((-1)^n).
Matrix displaced_parity(Complex beta, int cutoff);

// diag(exp(i theta_n)); phases beyond theta.size() are zero.
Matrix snap(const std::vector<double>& theta, int cutoff);

std::vector<double> default_snap_phases();

// Single-Kraus stack D(alpha) S(theta) D(-alpha).
KrausStack snap_displace_process(Complex alpha = kDefaultSnapAlpha,
                                 const std::vector<double>& theta = default_snap_phases(),
                                 int cutoff = kDefaultFockCutoff);

}  // namespace qpt
