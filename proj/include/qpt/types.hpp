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

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qpt {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

// Tolerances used across the library. Every operation that checks an
// invariant takes a Tolerances argument defaulting to these values.
inline constexpr double kValidityTol = 1e-8;
inline constexpr double kExactTol = 1e-10;

struct Tolerances {
    // Physical validity: PSD clipping, TP defect of retracted stacks.
    double validity = kValidityTol;
    // Exactness: Hermiticity and unit trace of constructed states.
    double exact = kExactTol;
};

// Base class of every error raised by the library.
class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

// Operand shapes are inconsistent (Kraus vs state dimension, Choi sizes...).
class DimensionError : public Error {
   public:
    using Error::Error;
};

// Input violates a documented precondition (bad rank, gamma out of range...).
class InvalidArgument : public Error {
   public:
    using Error::Error;
};

// The data cannot support the requested reconstruction, e.g. linear
// inversion on an informationally incomplete probe/measurement subset.
class IncompleteDataError : public Error {
   public:
    using Error::Error;
};

// A numerical routine failed (singular retraction system, non-PSD input).
class NumericalError : public Error {
   public:
    using Error::Error;
};

// File format problems: malformed JSON, unknown schema_version, I/O failure.
class FormatError : public Error {
   public:
    using Error::Error;
};

}  // namespace qpt
