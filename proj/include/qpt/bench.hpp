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

#include <cstdint>
#include <filesystem>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "qpt/gd.hpp"
#include "qpt/json_io.hpp"
#include "qpt/pls.hpp"
#include "qpt/reconstruction.hpp"

// Benchmark harness: noise, data-fraction and timing sweeps over seeds.
//
// Every cell (grid value, seed, method, k) derives its random streams from
// the seed and fixed tags only, so a row can be regenerated on its own.

namespace qpt {

enum class SweepKind { kNoise, kGamma, kTiming };

std::string to_string(SweepKind kind);

struct SweepSpec {
    SweepKind kind = SweepKind::kNoise;
    // Noise levels, data fractions, or qubit counts for timing.
    std::vector<double> grid;
    std::vector<std::uint64_t> seeds;
    int n_qubits = 2;
    // Rank of the random ground-truth process (capped at 4^n).
    int rank = 16;
    std::vector<int> kraus{16};
    // "gd" and/or "pls".
    std::vector<std::string> methods{"gd"};
    // Fixed noise level for gamma and timing sweeps.
    double noise = 1e-2;
    GdConfig gd;
    PlsConfig pls;
    // Timing sweeps: probes and measurements kept per axis, and the number
    // of timed GD iterations / CP projections per cell.
    std::size_t timing_subset = 256;
    int timing_iters = 5;
    int jobs = 1;

    void validate() const;
};

json_io::Json to_json(const SweepSpec& spec);
SweepSpec sweep_spec_from_json(const json_io::Json& j);
SweepSpec load_sweep_spec(const std::filesystem::path& path);

struct BenchRow {
    double sweep_value = 0.0;
    std::uint64_t seed = 0;
    std::string method;
    int k = 0;
    // NaN for timing rows and failed cells.
    double infidelity = 0.0;
    int iterations = 0;
    double wall_time_s = 0.0;
    // Empty on success.
    std::string error;
};

inline constexpr const char* kBenchCsvHeader = "sweep_value,seed,method,k,infidelity,iterations,wall_time_s";

// Rows of one (grid value, seed) cell, one per method and k. Failures are
// recorded in BenchRow::error and never thrown.
std::vector<BenchRow> run_cell(const SweepSpec& spec, double sweep_value, std::uint64_t seed);

// All cells, on up to spec.jobs threads. Each finished row is passed to
// sink under a lock; the returned rows are in grid, seed, method order.
std::vector<BenchRow> run_sweep(const SweepSpec& spec, const std::function<void(const BenchRow&)>& sink = {});

void write_csv_header(std::ostream& out);
void write_csv_row(std::ostream& out, const BenchRow& row);
void write_csv(const std::vector<BenchRow>& rows, const std::filesystem::path& path);

struct SummaryPoint {
    double sweep_value = 0.0;
    std::string method;
    int k = 0;
    int count = 0;
    int failures = 0;
    // Over successful rows; std is the sample standard deviation.
    double mean_infidelity = 0.0;
    double std_infidelity = 0.0;
    double mean_wall_time_s = 0.0;
    double mean_iterations = 0.0;
};

std::vector<SummaryPoint> summarize(const std::vector<BenchRow>& rows);
json_io::Json summary_json(const SweepSpec& spec, const std::vector<BenchRow>& rows);

// Spearman rank correlation with average ranks for ties.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace qpt
