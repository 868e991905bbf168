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

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "qpt/dataset.hpp"
#include "qpt/dv_ensemble.hpp"
#include "qpt/linalg.hpp"

using namespace qpt;

namespace {

std::filesystem::path temp_path(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("qpt_unit_" + name);
}

KrausStack identity(Eigen::Index n) { return KrausStack({Matrix::Identity(n, n)}); }

}  // namespace

TEST_CASE("noiseless Pauli expectations") {
    Rng rng(0);
    const Tomogram t = synthesize(identity(2), OperatorSet::pauli(1), OperatorSet::pauli(1), 0.0, rng);
    // Probe z+ (4), measurement z+ (4) and x+ (0).
    CHECK(t.data(4, 4) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(t.data(4, 0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(t.kind == TomogramKind::kDv);
    REQUIRE(t.truth.has_value());
}

TEST_CASE("expectations agree with a per-entry oracle") {
    Rng rng(1);
    const KrausStack k = random_process(4, 3, rng);
    const OperatorSet probes = OperatorSet::pauli(2);
    const RealMatrix d = expectation_values(k, probes, probes);
    for (std::size_t i = 0; i < 36; i += 5) {
        const Matrix out = test::channel_by_loops(k.blocks(), probes.matrices[i]);
        for (std::size_t j = 0; j < 36; j += 7) {
            CHECK(std::abs(d(i, j) - test::trace_product(probes.matrices[j], out).real()) < 1e-12);
        }
    }
}

TEST_CASE("noise statistics") {
    Rng rng(2);
    const KrausStack k = random_process(4, 16, rng);
    const OperatorSet set = OperatorSet::pauli(2);
    const RealMatrix clean = expectation_values(k, set, set);
    const Tomogram t = synthesize(k, set, set, 1e-2, rng);
    const double mean = (t.data - clean).mean();
    CHECK(std::abs(mean) <= 3 * 1e-2 / std::sqrt(1296.0));
    const double sd = std::sqrt((t.data - clean).array().square().mean());
    CHECK(sd == doctest::Approx(1e-2).epsilon(0.1));
}

TEST_CASE("noisy values are not clipped") {
    Rng rng(3);
    const Tomogram t = synthesize(identity(2), OperatorSet::pauli(1), OperatorSet::pauli(1), 0.5, rng);
    CHECK((t.data.maxCoeff() > 1.0 || t.data.minCoeff() < 0.0));
}

TEST_CASE("subsample counts and determinism") {
    Rng rng(4);
    const KrausStack k = random_process(4, 2, rng);
    const Tomogram t = synthesize(k, OperatorSet::pauli(2), OperatorSet::pauli(2), 0.0, rng);
    Rng a(10);
    Rng b(10);
    const Tomogram s1 = subsample(t, 0.25, a);
    const Tomogram s2 = subsample(t, 0.25, b);
    CHECK(s1.data.rows() == 18);
    CHECK(s1.data.cols() == 18);
    CHECK(s1 == s2);
    Rng c(11);
    CHECK(subsample(t, 1.0, c) == t);
    const std::set<std::size_t> unique(s1.probes.indices.begin(), s1.probes.indices.end());
    CHECK(unique.size() == 18);
    for (std::size_t r = 0; r < 18; ++r) {
        for (std::size_t col = 0; col < 18; ++col) {
            CHECK(s1.data(r, col) == t.data(s1.probes.indices[r], s1.measurements.indices[col]));
        }
    }
    for (double gamma : {0.1, 0.3, 0.5, 0.8}) {
        Rng g(5);
        const Tomogram s = subsample(t, gamma, g);
        const double frac = static_cast<double>(s.num_entries()) / 1296.0;
        CHECK(frac >= 0.9 * gamma);
        CHECK(frac <= 1.1 * gamma);
    }
    Rng d(6);
    CHECK_THROWS_AS(subsample(t, 0.0, d), InvalidArgument);
    CHECK_THROWS_AS(subsample(t, 1.5, d), InvalidArgument);
    CHECK_THROWS_AS(subsample(t, 1e-4, d), InvalidArgument);
}

TEST_CASE("batch streams") {
    Rng rng(7);
    BatchStream full(6, 6, 36, rng.split());
    CHECK(full.full_batch());
    const BatchIndex all = full.next();
    CHECK(all.is_full);
    CHECK(all.size() == 36);

    BatchStream s1(7776, 7776, 256, Rng(3));
    BatchStream s2(7776, 7776, 256, Rng(3));
    for (int step = 0; step < 5; ++step) {
        const BatchIndex a = s1.next();
        const BatchIndex b = s2.next();
        CHECK(a.pairs == b.pairs);
        CHECK_FALSE(a.is_full);
        const std::set<IndexPair> unique(a.pairs.begin(), a.pairs.end());
        CHECK(unique.size() == 256);
        for (const auto& [i, j] : a.pairs) {
            CHECK(i < 7776);
            CHECK(j < 7776);
        }
    }
}

TEST_CASE("sensing matrix reproduces synthesized data") {
    Rng rng(8);
    for (int n : {1, 2}) {
        const Eigen::Index dim = Eigen::Index{1} << n;
        const OperatorSet set = OperatorSet::pauli(n);
        const Matrix s = sensing_matrix(set, set);
        CHECK(s.rows() == static_cast<Eigen::Index>(set.size() * set.size()));
        CHECK(s.cols() == dim * dim * dim * dim);
        for (int draw = 0; draw < 3; ++draw) {
            const KrausStack k = draw == 0 ? identity(dim) : random_process(dim, 1 + draw, rng);
            const Vector pred = s * linalg::flatten(kraus_to_choi(k).matrix());
            const RealMatrix d = expectation_values(k, set, set);
            CHECK(pred.imag().cwiseAbs().maxCoeff() < 1e-10);
            for (Eigen::Index i = 0; i < d.rows(); ++i) {
                for (Eigen::Index j = 0; j < d.cols(); ++j) {
                    CHECK(std::abs(pred(i * d.cols() + j).real() - d(i, j)) < 1e-9);
                }
            }
        }
    }
    const OperatorSet two = OperatorSet::pauli(2);
    const Matrix s2 = sensing_matrix(two, two);
    CHECK(s2.rows() == 1296);
    CHECK(s2.cols() == 256);
    CHECK(s2.colPivHouseholderQr().rank() == 256);
    CHECK_THROWS_AS(sensing_matrix(two, two, 1024), InvalidArgument);
}

TEST_CASE("tomogram JSON round trip") {
    Rng rng(9);
    const KrausStack k = random_process(4, 4, rng);
    const Tomogram dv = synthesize(k, OperatorSet::pauli(2), OperatorSet::pauli(2), 1e-2, rng);
    const auto path = temp_path("dv.json");
    save_tomogram(dv, path);
    const Tomogram back = load_tomogram(path);
    CHECK(back == dv);
    CHECK((back.data.array() == dv.data.array()).all());

    const KrausStack cvp = snap_displace_process(1.5, default_snap_phases(), 12);
    CvGrid g = default_probe_grid();
    g.rows = g.cols = 3;
    const Tomogram cv = synthesize(cvp, OperatorSet::coherent(g, 12), OperatorSet::displaced_parity(g, 12), 1e-2, rng);
    CHECK(cv.kind == TomogramKind::kCv);
    save_tomogram(cv, path);
    CHECK(load_tomogram(path) == cv);

    OperatorSet embedded = OperatorSet::pauli(1);
    embedded.embed = true;
    const Tomogram e = synthesize(identity(2), embedded, OperatorSet::pauli(1), 0.1, rng);
    save_tomogram(e, path);
    CHECK(load_tomogram(path) == e);
    std::filesystem::remove(path);
}

TEST_CASE("tomogram loading rejects bad files") {
    const auto path = temp_path("bad.json");
    {
        std::ofstream out(path);
        out << R"({"schema_version": 2, "kind": "dv"})";
    }
    CHECK_THROWS_AS(load_tomogram(path), FormatError);
    {
        std::ofstream out(path);
        out << "{not json";
    }
    CHECK_THROWS_AS(load_tomogram(path), FormatError);
    {
        std::ofstream out(path);
        out << R"({"schema_version": 1, "kind": "dv"})";
    }
    CHECK_THROWS_AS(load_tomogram(path), FormatError);
    CHECK_THROWS_AS(load_tomogram(temp_path("missing.json")), FormatError);
    std::filesystem::remove(path);
}

TEST_CASE("decimal doubles survive the round trip bit-exactly") {
    Rng rng(10);
    Tomogram t = synthesize(identity(2), OperatorSet::pauli(1), OperatorSet::pauli(1), 0.0, rng);
    t.data(0, 0) = 0.1;
    t.data(0, 1) = 1.0 / 3.0;
    t.data(1, 0) = 5e-324;
    t.data(1, 1) = -1.7976931348623157e308;
    t.data(2, 2) = std::nextafter(1.0, 2.0);
    const auto path = temp_path("bits.json");
    save_tomogram(t, path);
    const Tomogram back = load_tomogram(path);
    for (Eigen::Index i = 0; i < t.data.size(); ++i) {
        CHECK(std::bit_cast<std::uint64_t>(back.data(i)) == std::bit_cast<std::uint64_t>(t.data(i)));
    }
    std::filesystem::remove(path);
}

TEST_CASE("CSV export") {
    Rng rng(11);
    const Tomogram t = synthesize(identity(2), OperatorSet::pauli(1), OperatorSet::pauli(1), 0.0, rng);
    const auto path = temp_path("data.csv");
    export_csv(t, path);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "probe_index,measurement_index,value");
    int lines = 0;
    for (std::string line; std::getline(in, line);) ++lines;
    CHECK(lines == 36);
    std::filesystem::remove(path);
}

TEST_CASE("synthesize rejects mismatched dimensions") {
    Rng rng(12);
    CHECK_THROWS_AS(synthesize(identity(4), OperatorSet::pauli(1), OperatorSet::pauli(1), 0.0, rng), DimensionError);
    CHECK_THROWS(synthesize(identity(2), OperatorSet::pauli(1), OperatorSet::pauli(1), -1.0, rng));
}
