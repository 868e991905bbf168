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

#include <doctest.h>

#include <numbers>

#include "oracles.hpp"
#include "qpt/cv_ensemble.hpp"
#include "qpt/dv_ensemble.hpp"
#include "qpt/linalg.hpp"

using namespace qpt;

TEST_CASE("single-qubit Pauli projectors") {
    const PauliEnsemble e = pauli_ensemble(1);
    REQUIRE(e.probes.size() == 6);
    REQUIRE(e.measurements.size() == 6);
    Matrix z_plus = Matrix::Zero(2, 2);
    z_plus(0, 0) = 1.0;
    CHECK((e.probes[4].matrix() - z_plus).norm() < 1e-15);
    Matrix x_plus = Matrix::Constant(2, 2, Complex(0.5));
    CHECK((e.probes[0].matrix() - x_plus).norm() < 1e-15);
    for (const auto& p : e.probes) {
        CHECK(std::abs(p.purity() - 1.0) < 1e-10);
    }
    for (const auto& m : e.measurements) {
        CHECK((m * m - m).norm() < 1e-12);
        CHECK(std::abs(m.trace() - 1.0) < 1e-12);
    }
}

TEST_CASE("two-qubit ensemble order is lexicographic with qubit 0 first") {
    const PauliEnsemble e = pauli_ensemble(2);
    REQUIRE(e.probes.size() == 36);
    // (x+, z-) sits at 0 * 6 + 5.
    Matrix one = Matrix::Zero(2, 2);
    one(1, 1) = 1.0;
    Matrix expect = Matrix::Zero(4, 4);
    const Matrix xp = Matrix::Constant(2, 2, Complex(0.5));
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c)
                for (int d = 0; d < 2; ++d) expect(2 * a + c, 2 * b + d) = xp(a, b) * one(c, d);
    CHECK((e.probes[5].matrix() - expect).norm() < 1e-15);
    CHECK(pauli_product_label(2, 5) == "x+z-");
}

TEST_CASE("pauli ensemble size limits") {
    CHECK_THROWS_AS(pauli_ensemble(0), InvalidArgument);
    CHECK_THROWS_AS(pauli_ensemble(kMaxPauliQubits + 1), InvalidArgument);
    CHECK(pauli_ensemble_size(5) == 7776);
}

TEST_CASE("random unitaries") {
    CHECK((unitary_from_generator(Matrix::Zero(3, 3)) - Matrix::Identity(3, 3)).norm() == 0.0);
    Rng rng(1);
    for (int draw = 0; draw < 100; ++draw) {
        const Matrix u = random_unitary(1 + draw % 6, rng);
        CHECK((u.adjoint() * u - Matrix::Identity(u.rows(), u.rows())).norm() <= 1e-9);
    }
    Rng a(42);
    Rng b(42);
    CHECK(random_unitary(4, a) == random_unitary(4, b));
}

TEST_CASE("random processes") {
    Rng rng(9);
    for (int draw = 0; draw < 100; ++draw) {
        const KrausStack k = random_process(2 + draw % 3, 1 + draw % 4, rng);
        CHECK(tp_defect(k) <= 1e-9);
    }
    const KrausStack single = random_process(4, 1, rng);
    const RealVector w1 = linalg::hermitian_eigenvalues(kraus_to_choi(single).matrix());
    CHECK(std::abs(w1.maxCoeff() - 4.0) < 1e-8);
    CHECK(choi_rank(kraus_to_choi(single)) == 1);
    for (int draw = 0; draw < 5; ++draw) {
        CHECK(choi_rank(kraus_to_choi(random_process(4, 16, rng))) == 16);
    }
    CHECK_THROWS_AS(random_process(2, 0, rng), InvalidArgument);
    CHECK_THROWS_AS(random_process(2, 5, rng), InvalidArgument);
}

TEST_CASE("annihilation operator") {
    const Matrix a2 = annihilation(2);
    CHECK(a2(0, 1) == Complex(1.0));
    CHECK(a2(0, 0) == Complex(0.0));
    CHECK(a2(1, 0) == Complex(0.0));
    const int n = 8;
    const Matrix a = annihilation(n);
    const Matrix num = a.adjoint() * a;
    for (int i = 0; i < n; ++i) {
        CHECK(std::abs(num(i, i) - static_cast<double>(i)) < 1e-12);
    }
    const Matrix comm = a * a.adjoint() - a.adjoint() * a;
    Matrix expect = Matrix::Identity(n, n);
    expect(n - 1, n - 1) = -(n - 1.0);
    CHECK((comm - expect).norm() < 1e-12);
}

TEST_CASE("displacement") {
    CHECK(displacement(0.0, 32) == Matrix::Identity(32, 32));
    const Matrix d = displacement(1.5, 32);
    CHECK((d * displacement(-1.5, 32) - Matrix::Identity(32, 32)).norm() < 1e-8);
    CHECK(std::abs(displacement(1.0, 32)(0, 0) - std::exp(-0.5)) < 1e-8);
    std::vector<std::string> warnings;
    displacement(Complex(3.0, 0.0), 32, &warnings);
    CHECK(warnings.size() == 1);
    warnings.clear();
    displacement(Complex(2.0, 0.0), 32, &warnings);
    CHECK(warnings.empty());
}

TEST_CASE("coherent states follow the analytic Fock amplitudes") {
    Vector vac = Vector::Zero(32);
    vac(0) = 1.0;
    CHECK((coherent_state(0.0, 32).matrix() - vac * vac.adjoint()).norm() < 1e-15);
    const Vector ket = coherent_ket(1.5, 32);
    for (int n = 0; n <= 20; ++n) {
        CHECK(std::abs(ket(n) - test::coherent_amplitude(1.5, n)) < 1e-6);
    }
    CHECK(std::abs(coherent_state(1.5, 32).purity() - 1.0) < 1e-9);
    for (const Complex alpha : default_probe_grid().points()) {
        const Vector k = coherent_ket(alpha, 32);
        for (int n = 0; n <= 20; ++n) {
            CHECK(std::abs(k(n) - test::coherent_amplitude(alpha, n)) < 1e-6);
        }
    }
}

TEST_CASE("displaced parity") {
    Vector zero = Vector::Zero(16);
    zero(0) = 1.0;
    Vector one = Vector::Zero(16);
    one(1) = 1.0;
    const Matrix p0 = displaced_parity(0.0, 16);
    CHECK(std::abs((zero.adjoint() * p0 * zero)(0, 0) - 1.0) < 1e-12);
    CHECK(std::abs((one.adjoint() * p0 * one)(0, 0) + 1.0) < 1e-12);
    const Complex alpha(0.7, -1.1);
    const Matrix rho = coherent_state(alpha, 32).matrix();
    CHECK(std::abs(test::trace_product(displaced_parity(alpha, 32), rho) - 1.0) < 1e-6);
    const RealVector w = linalg::hermitian_eigenvalues(displaced_parity(Complex(1.0, 2.0), 32));
    CHECK(w.minCoeff() >= -1.0 - 1e-8);
    CHECK(w.maxCoeff() <= 1.0 + 1e-8);
}

TEST_CASE("displacement covariance on low-energy states") {
    Rng rng(6);
    const int n = 32;
    for (int draw = 0; draw < 5; ++draw) {
        Matrix low = Matrix::Zero(n, n);
        low.topLeftCorner(4, 4) = test::random_density(4, rng);
        const Complex beta(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
        const Matrix d = displacement(-beta, n);
        const Complex lhs = test::trace_product(displaced_parity(beta, n), low);
        const Complex rhs = test::trace_product(displaced_parity(0.0, n), d * low * d.adjoint());
        CHECK(std::abs(lhs - rhs) < 1e-7);
    }
}

TEST_CASE("snap gate") {
    CHECK(snap(std::vector<double>(5, 0.0), 8) == Matrix::Identity(8, 8));
    const Matrix s = snap({std::numbers::pi}, 4);
    CHECK(std::abs(s(0, 0) + 1.0) < 1e-15);
    CHECK(s(1, 1) == Complex(1.0));
    const Matrix s2 = snap(default_snap_phases(), 8);
    CHECK((s2.adjoint() * s2 - Matrix::Identity(8, 8)).norm() < 1e-15);
    CHECK_THROWS_AS(snap(std::vector<double>(9, 0.1), 8), InvalidArgument);
}

TEST_CASE("snap-displacement process") {
    const KrausStack zero_theta = snap_displace_process(1.5, std::vector<double>(6, 0.0), 32);
    CHECK((zero_theta.block(0) - Matrix::Identity(32, 32)).norm() < 1e-8);
    const KrausStack no_disp = snap_displace_process(0.0, default_snap_phases(), 32);
    CHECK(no_disp.block(0) == snap(default_snap_phases(), 32));
    const KrausStack def = snap_displace_process();
    CHECK(def.count() == 1);
    CHECK(tp_defect(def) <= 1e-6);
    CHECK(choi_rank(kraus_to_choi(def), 1e-6 * 32) == 1);
}

TEST_CASE("default CV grids") {
    const CvGrid p = default_probe_grid();
    CHECK(p.size() == 100);
    CHECK(p.point(0) == Complex(-2.5, -2.5));
    CHECK(p.point(99) == Complex(2.5, 2.5));
    // Row index runs over Re, column index over Im.
    CHECK(std::abs(p.point(1) - Complex(-2.5, -2.5 + 5.0 / 9.0)) < 1e-15);
    const CvGrid m = default_measurement_grid();
    CHECK(m.point(0) == Complex(-3.0, -3.0));
    CHECK(m.point(99) == Complex(3.0, 3.0));
}
