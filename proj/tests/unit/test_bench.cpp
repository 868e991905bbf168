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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qpt/bench.hpp"
#include "qpt/dv_ensemble.hpp"
#include "qpt/reconstruction.hpp"

using namespace qpt;

namespace {

SweepSpec small_noise_spec() {
    SweepSpec spec;
    spec.kind = SweepKind::kNoise;
    spec.grid = {1e-1, 1e-2};
    spec.seeds = {0, 1};
    spec.n_qubits = 1;
    spec.rank = 4;
    spec.kraus = {1, 4};
    spec.methods = {"gd", "pls"};
    spec.gd.max_iters = 40;
    return spec;
}

}  // namespace

TEST_CASE("sweep spec JSON round trip and validation") {
    const SweepSpec spec = small_noise_spec();
    const SweepSpec back = sweep_spec_from_json(to_json(spec));
    CHECK(back.grid == spec.grid);
    CHECK(back.seeds == spec.seeds);
    CHECK(back.kraus == spec.kraus);
    CHECK(back.methods == spec.methods);
    CHECK(back.gd.max_iters == 40);

    json_io::Json j = to_json(spec);
    j["seeds"] = 3;
    CHECK(sweep_spec_from_json(j).seeds == std::vector<std::uint64_t>{0, 1, 2});
    j["grid"] = json_io::Json::array();
    CHECK_THROWS_AS(sweep_spec_from_json(j), InvalidArgument);
    j = to_json(spec);
    j["kind"] = "bogus";
    CHECK_THROWS_AS(sweep_spec_from_json(j), FormatError);
    j = to_json(spec);
    j["methods"] = {"cs"};
    CHECK_THROWS_AS(sweep_spec_from_json(j), InvalidArgument);
}

TEST_CASE("rows are reproducible cell by cell and independent of jobs") {
    SweepSpec spec = small_noise_spec();
    const auto serial = run_sweep(spec);
    spec.jobs = 3;
    int sunk = 0;
    const auto parallel = run_sweep(spec, [&](const BenchRow&) { ++sunk; });
    REQUIRE(serial.size() == 2 * 2 * 3);
    CHECK(sunk == static_cast<int>(serial.size()));
    REQUIRE(parallel.size() == serial.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        CHECK(serial[i].method == parallel[i].method);
        CHECK(serial[i].k == parallel[i].k);
        CHECK(serial[i].infidelity == parallel[i].infidelity);
        CHECK(serial[i].iterations == parallel[i].iterations);
        CHECK(serial[i].error.empty());
    }
    const auto cell = run_cell(spec, 1e-2, 1);
    REQUIRE(cell.size() == 3);
    CHECK(cell[0].infidelity == serial[9].infidelity);
    CHECK(cell[2].infidelity == serial[11].infidelity);
}

TEST_CASE("gamma sweep records PLS incompleteness as a per-row failure") {
    SweepSpec spec;
    spec.kind = SweepKind::kGamma;
    spec.grid = {0.1, 1.0};
    spec.seeds = {0};
    spec.n_qubits = 2;
    spec.kraus = {4};
    spec.methods = {"gd", "pls"};
    spec.gd.max_iters = 20;
    const auto rows = run_sweep(spec);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].error.empty());
    CHECK(rows[1].method == "pls");
    CHECK(rows[1].error.find("informationally complete") != std::string::npos);
    CHECK(std::isnan(rows[1].infidelity));
    CHECK(rows[3].error.empty());
    const auto summary = summarize(rows);
    CHECK(summary[1].failures == 1);
}

TEST_CASE("timing sweep rows") {
    SweepSpec spec;
    spec.kind = SweepKind::kTiming;
    spec.grid = {2};
    spec.seeds = {0};
    spec.kraus = {3};
    spec.methods = {"gd", "pls"};
    spec.gd.batch_size = 256;
    spec.timing_subset = 20;
    spec.timing_iters = 3;
    const auto rows = run_sweep(spec);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].method == "gd");
    CHECK(rows[0].iterations == 3);
    CHECK(rows[0].wall_time_s > 0.0);
    CHECK(rows[1].method == "pls_cp");
    CHECK(rows[1].wall_time_s > 0.0);
}

TEST_CASE("summary statistics recompute from the CSV") {
    const SweepSpec spec = small_noise_spec();
    const auto rows = run_sweep(spec);
    const auto path = std::filesystem::temp_directory_path() / "qpt_unit_rows.csv";
    write_csv(rows, path);
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == kBenchCsvHeader);
    std::vector<BenchRow> parsed;
    while (std::getline(in, line)) {
        std::stringstream ss(line);
        std::string field;
        BenchRow r;
        std::getline(ss, field, ',');
        r.sweep_value = std::stod(field);
        std::getline(ss, field, ',');
        r.seed = std::stoull(field);
        std::getline(ss, r.method, ',');
        std::getline(ss, field, ',');
        r.k = std::stoi(field);
        std::getline(ss, field, ',');
        r.infidelity = std::stod(field);
        std::getline(ss, field, ',');
        r.iterations = std::stoi(field);
        std::getline(ss, field, ',');
        r.wall_time_s = std::stod(field);
        parsed.push_back(r);
    }
    REQUIRE(parsed.size() == rows.size());
    const auto a = summarize(rows);
    const auto b = summarize(parsed);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].mean_infidelity == b[i].mean_infidelity);
        CHECK(a[i].std_infidelity == b[i].std_infidelity);
    }
    const auto p = a.front();
    double mean = 0.0;
    for (const auto& r : rows)
        if (r.sweep_value == p.sweep_value && r.method == p.method && r.k == p.k) mean += r.infidelity / 2.0;
    CHECK(p.mean_infidelity == doctest::Approx(mean).epsilon(1e-14));
    std::filesystem::remove(path);
}

TEST_CASE("spearman") {
    CHECK(spearman({1, 2, 3, 4}, {10, 20, 30, 40}) == doctest::Approx(1.0));
    CHECK(spearman({1, 2, 3, 4}, {4, 3, 2, 1}) == doctest::Approx(-1.0));
    CHECK(spearman({1, 2, 3}, {1, 1, 2}) == doctest::Approx(std::sqrt(3.0) / 2.0));
    CHECK_THROWS_AS(spearman({1}, {1}), InvalidArgument);
}

TEST_CASE("reconstruction payloads convert to the same Choi matrix") {
    Rng rng(1);
    const KrausStack k = random_process(2, 2, rng);
    FitResult fr;
    fr.kraus = k;
    const json_io::Json gd = gd_reconstruction_json(fr, GdConfig{}, std::nullopt, 0.0);
    PlsResult pr;
    pr.choi = kraus_to_choi(k);
    const json_io::Json pls = pls_reconstruction_json(pr, PlsConfig{}, 0.5);
    CHECK(pls.at("fidelity").get<double>() == 0.5);
    CHECK(pls.at("method") == "pls");
    const double f = process_fidelity(choi_from_json(gd), choi_from_json(pls)).fidelity;
    CHECK(std::abs(f - 1.0) < 1e-8);
    CHECK_THROWS_AS(choi_from_json(json_io::Json{{"method", "cs"}}), FormatError);
    CHECK_THROWS_AS(choi_from_json(json_io::Json::object()), FormatError);
    CHECK(gd_config_from_json(to_json(GdConfig{})).eta0 == GdConfig{}.eta0);
    CHECK_THROWS_AS(gd_config_from_json(json_io::Json{{"eta0", "fast"}}), FormatError);
}
