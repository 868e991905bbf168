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

#include "qpt/bench.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <thread>

#include "qpt/dv_ensemble.hpp"

namespace qpt {

using json_io::Json;

namespace {

enum Tag : std::uint64_t {
    kTagProcess = 1,
    kTagNoise = 2,
    kTagSubsample = 3,
    kTagGd = 4,
    kTagTimingProbes = 5,
    kTagTimingMeasurements = 6,
    kTagTimingChoi = 7,
};

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::uint64_t bits(double v) { return std::bit_cast<std::uint64_t>(v); }

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

double median(std::vector<double> v) {
    if (v.empty()) {
        return kNaN;
    }
    std::sort(v.begin(), v.end());
    const std::size_t mid = v.size() / 2;
    return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

int capped_rank(int rank, int n_qubits) {
    const int max_rank = 1 << (2 * n_qubits);
    return std::min(rank, max_rank);
}

KrausStack ground_truth(const SweepSpec& spec, int n_qubits, std::uint64_t seed) {
    Rng rng = Rng::derive(seed, {kTagProcess, static_cast<std::uint64_t>(n_qubits)});
    return random_process(Eigen::Index{1} << n_qubits, capped_rank(spec.rank, n_qubits), rng);
}

std::uint64_t gd_seed(std::uint64_t seed, int k) {
    return Rng::derive(seed, {kTagGd, static_cast<std::uint64_t>(k)}).engine()();
}

BenchRow base_row(double value, std::uint64_t seed, std::string method, int k) {
    BenchRow row;
    row.sweep_value = value;
    row.seed = seed;
    row.method = std::move(method);
    row.k = k;
    row.infidelity = kNaN;
    return row;
}

template <typename F>
void guarded(BenchRow& row, F&& body) {
    try {
        body();
    } catch (const std::exception& e) {
        row.infidelity = kNaN;
        row.error = e.what();
    }
}

std::vector<BenchRow> reconstruct_rows(const SweepSpec& spec, const Tomogram& t, const KrausStack& truth,
                                       double value, std::uint64_t seed) {
    const ChoiMatrix truth_choi = kraus_to_choi(truth);
    std::vector<BenchRow> rows;
    for (const std::string& method : spec.methods) {
        if (method == "gd") {
            for (int k : spec.kraus) {
                BenchRow row = base_row(value, seed, "gd", k);
                guarded(row, [&] {
                    GdConfig cfg = spec.gd;
                    cfg.kraus = k;
                    cfg.seed = gd_seed(seed, k);
                    const auto start = std::chrono::steady_clock::now();
                    const FitResult fit_result = fit(t, cfg);
                    row.wall_time_s = seconds_since(start);
                    row.iterations = fit_result.trace.iterations;
                    row.infidelity = process_fidelity(kraus_to_choi(fit_result.kraus), truth_choi).infidelity();
                });
                rows.push_back(std::move(row));
            }
        } else {
            BenchRow row = base_row(value, seed, "pls", 0);
            guarded(row, [&] {
                const PlsResult pls = fit_pls(t, spec.pls);
                row.wall_time_s = pls.wall_time_s;
                row.iterations = pls.cycles;
                row.infidelity = process_fidelity(pls.choi, truth_choi).infidelity();
                if (!pls.converged) {
                    row.error = "CPTP projection did not converge";
                }
            });
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

std::vector<std::size_t> sample_indices(std::size_t population, std::size_t count, Rng rng) {
    std::vector<std::size_t> all(population);
    std::iota(all.begin(), all.end(), std::size_t{0});
    if (count >= population) {
        return all;
    }
    std::vector<std::size_t> out;
    out.reserve(count);
    std::sample(all.begin(), all.end(), std::back_inserter(out), count, rng.engine());
    return out;
}

std::vector<BenchRow> timing_rows(const SweepSpec& spec, double value, std::uint64_t seed) {
    const int n = static_cast<int>(std::lround(value));
    std::vector<BenchRow> rows;
    for (const std::string& method : spec.methods) {
        if (method == "gd") {
            for (int k : spec.kraus) {
                BenchRow row = base_row(value, seed, "gd", k);
                guarded(row, [&] {
                    const std::size_t ensemble = pauli_ensemble_size(n);
                    const OperatorSet probes = OperatorSet::pauli(
                        n, sample_indices(ensemble, spec.timing_subset, Rng::derive(seed, {kTagTimingProbes})));
                    const OperatorSet meas = OperatorSet::pauli(
                        n, sample_indices(ensemble, spec.timing_subset, Rng::derive(seed, {kTagTimingMeasurements})));
                    Rng noise_rng = Rng::derive(seed, {kTagNoise, bits(spec.noise)});
                    const Tomogram t = synthesize(ground_truth(spec, n, seed), probes, meas, spec.noise, noise_rng);
                    GdConfig cfg = spec.gd;
                    cfg.kraus = k;
                    cfg.seed = gd_seed(seed, k);
                    cfg.max_iters = spec.timing_iters;
                    cfg.plateau_window = 0;
                    const FitResult fit_result = fit(t, cfg);
                    row.iterations = fit_result.trace.iterations;
                    row.wall_time_s = median(fit_result.trace.iter_time_s);
                });
                rows.push_back(std::move(row));
            }
        } else {
            BenchRow row = base_row(value, seed, "pls_cp", 0);
            guarded(row, [&] {
                const KrausStack truth = ground_truth(spec, n, seed);
                const Eigen::Index size = Eigen::Index{1} << (2 * n);
                Rng rng = Rng::derive(seed, {kTagTimingChoi});
                Matrix noise(size, size);
                for (Eigen::Index c = 0; c < size; ++c) {
                    for (Eigen::Index r = 0; r < size; ++r) {
                        noise(r, c) = Complex(rng.normal(spec.noise), rng.normal(spec.noise));
                    }
                }
                const ChoiMatrix estimate(kraus_to_choi(truth).matrix() + 0.5 * (noise + noise.adjoint()));
                std::vector<double> times;
                for (int rep = 0; rep < spec.timing_iters; ++rep) {
                    const auto start = std::chrono::steady_clock::now();
                    const ChoiMatrix projected = project_cp(estimate);
                    times.push_back(seconds_since(start));
                }
                row.iterations = spec.timing_iters;
                row.wall_time_s = median(times);
            });
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::string to_string(SweepKind kind) {
    switch (kind) {
        case SweepKind::kNoise: return "noise";
        case SweepKind::kGamma: return "gamma";
        case SweepKind::kTiming: return "timing";
    }
    return "noise";
}

void SweepSpec::validate() const {
    if (grid.empty()) throw InvalidArgument("sweep grid must not be empty");
    if (seeds.empty()) throw InvalidArgument("sweep seeds must not be empty");
    if (methods.empty()) throw InvalidArgument("sweep methods must not be empty");
    for (const auto& m : methods) {
        if (m != "gd" && m != "pls") throw InvalidArgument("unknown sweep method '" + m + "'");
    }
    if (std::find(methods.begin(), methods.end(), "gd") != methods.end() && kraus.empty()) {
        throw InvalidArgument("gd sweeps need at least one Kraus count");
    }
    for (int k : kraus) {
        if (k < 1) throw InvalidArgument("Kraus counts must be >= 1");
    }
    if (kind != SweepKind::kTiming && (n_qubits < 1 || n_qubits > kMaxPauliQubits)) {
        throw InvalidArgument("n_qubits must lie in [1, 5]");
    }
    if (rank < 1) throw InvalidArgument("rank must be >= 1");
    if (!(noise >= 0.0)) throw InvalidArgument("noise must be >= 0");
    if (jobs < 1) throw InvalidArgument("jobs must be >= 1");
    if (timing_iters < 1) throw InvalidArgument("timing_iters must be >= 1");
    if (timing_subset < 1) throw InvalidArgument("timing_subset must be >= 1");
    for (double v : grid) {
        switch (kind) {
            case SweepKind::kNoise:
                if (!(v >= 0.0)) throw InvalidArgument("noise grid values must be >= 0");
                break;
            case SweepKind::kGamma:
                if (!(v > 0.0 && v <= 1.0)) throw InvalidArgument("gamma grid values must lie in (0, 1]");
                break;
            case SweepKind::kTiming:
                if (v != std::round(v) || v < 1 || v > kMaxPauliQubits + 1) {
                    throw InvalidArgument("timing grid values must be qubit counts in [1, 6]");
                }
                break;
        }
    }
    gd.validate();
    pls.validate();
}

Json to_json(const SweepSpec& spec) {
    return Json{{"kind", to_string(spec.kind)},
                {"grid", spec.grid},
                {"seeds", spec.seeds},
                {"n_qubits", spec.n_qubits},
                {"rank", spec.rank},
                {"kraus", spec.kraus},
                {"methods", spec.methods},
                {"noise", spec.noise},
                {"gd", to_json(spec.gd)},
                {"pls", to_json(spec.pls)},
                {"timing_subset", spec.timing_subset},
                {"timing_iters", spec.timing_iters},
                {"jobs", spec.jobs}};
}

SweepSpec sweep_spec_from_json(const Json& j) {
    if (!j.is_object()) {
        throw FormatError("sweep spec must be a JSON object");
    }
    SweepSpec spec;
    try {
        const std::string kind = j.at("kind").get<std::string>();
        if (kind == "noise") {
            spec.kind = SweepKind::kNoise;
        } else if (kind == "gamma") {
            spec.kind = SweepKind::kGamma;
        } else if (kind == "timing") {
            spec.kind = SweepKind::kTiming;
        } else {
            throw FormatError("unknown sweep kind '" + kind + "'");
        }
        spec.grid = j.at("grid").get<std::vector<double>>();
        if (j.at("seeds").is_number_integer()) {
            spec.seeds.resize(j.at("seeds").get<std::size_t>());
            std::iota(spec.seeds.begin(), spec.seeds.end(), std::uint64_t{0});
        } else {
            spec.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
        }
        if (j.contains("n_qubits")) spec.n_qubits = j.at("n_qubits").get<int>();
        if (j.contains("rank")) spec.rank = j.at("rank").get<int>();
        if (j.contains("kraus")) spec.kraus = j.at("kraus").get<std::vector<int>>();
        if (j.contains("methods")) spec.methods = j.at("methods").get<std::vector<std::string>>();
        if (j.contains("noise")) spec.noise = j.at("noise").get<double>();
        if (j.contains("gd")) spec.gd = gd_config_from_json(j.at("gd"), spec.gd);
        if (j.contains("pls")) spec.pls = pls_config_from_json(j.at("pls"), spec.pls);
        if (j.contains("timing_subset")) spec.timing_subset = j.at("timing_subset").get<std::size_t>();
        if (j.contains("timing_iters")) spec.timing_iters = j.at("timing_iters").get<int>();
        if (j.contains("jobs")) spec.jobs = j.at("jobs").get<int>();
    } catch (const Json::exception& e) {
        throw FormatError(std::string("malformed sweep spec: ") + e.what());
    }
    spec.validate();
    return spec;
}

SweepSpec load_sweep_spec(const std::filesystem::path& path) {
    return sweep_spec_from_json(json_io::read_file(path));
}

std::vector<BenchRow> run_cell(const SweepSpec& spec, double sweep_value, std::uint64_t seed) {
    if (spec.kind == SweepKind::kTiming) {
        return timing_rows(spec, sweep_value, seed);
    }
    try {
        const KrausStack truth = ground_truth(spec, spec.n_qubits, seed);
        const OperatorSet full = OperatorSet::pauli(spec.n_qubits);
        if (spec.kind == SweepKind::kNoise) {
            Rng noise_rng = Rng::derive(seed, {kTagNoise, bits(sweep_value)});
            const Tomogram t = synthesize(truth, full, full, sweep_value, noise_rng);
            return reconstruct_rows(spec, t, truth, sweep_value, seed);
        }
        // One noisy dataset per seed, shared by every data fraction.
        Rng noise_rng = Rng::derive(seed, {kTagNoise, bits(spec.noise)});
        const Tomogram t = synthesize(truth, full, full, spec.noise, noise_rng);
        Rng sub_rng = Rng::derive(seed, {kTagSubsample, bits(sweep_value)});
        return reconstruct_rows(spec, subsample(t, sweep_value, sub_rng), truth, sweep_value, seed);
    } catch (const std::exception& e) {
        std::vector<BenchRow> rows;
        for (const std::string& method : spec.methods) {
            if (method == "gd") {
                for (int k : spec.kraus) {
                    rows.push_back(base_row(sweep_value, seed, "gd", k));
                    rows.back().error = e.what();
                }
            } else {
                rows.push_back(base_row(sweep_value, seed, "pls", 0));
                rows.back().error = e.what();
            }
        }
        return rows;
    }
}

std::vector<BenchRow> run_sweep(const SweepSpec& spec, const std::function<void(const BenchRow&)>& sink) {
    spec.validate();
    struct Cell {
        double value;
        std::uint64_t seed;
    };
    std::vector<Cell> cells;
    for (double v : spec.grid) {
        for (std::uint64_t s : spec.seeds) {
            cells.push_back({v, s});
        }
    }
    std::vector<std::vector<BenchRow>> results(cells.size());
    std::atomic<std::size_t> next{0};
    std::mutex sink_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < cells.size(); i = next++) {
            results[i] = run_cell(spec, cells[i].value, cells[i].seed);
            if (sink) {
                std::lock_guard<std::mutex> lock(sink_mutex);
                for (const auto& row : results[i]) {
                    sink(row);
                }
            }
        }
    };
    const auto threads = static_cast<std::size_t>(std::min<std::size_t>(static_cast<std::size_t>(spec.jobs), cells.size()));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t i = 0; i < threads; ++i) {
            pool.emplace_back(worker);
        }
        for (auto& th : pool) {
            th.join();
        }
    }
    std::vector<BenchRow> rows;
    for (auto& r : results) {
        rows.insert(rows.end(), std::make_move_iterator(r.begin()), std::make_move_iterator(r.end()));
    }
    return rows;
}

void write_csv_header(std::ostream& out) { out << kBenchCsvHeader << '\n'; }

void write_csv_row(std::ostream& out, const BenchRow& row) {
    out << format_double(row.sweep_value) << ',' << row.seed << ',' << row.method << ',' << row.k << ','
        << format_double(row.infidelity) << ',' << row.iterations << ',' << format_double(row.wall_time_s) << '\n';
}

void write_csv(const std::vector<BenchRow>& rows, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw FormatError("cannot write " + path.string());
    }
    write_csv_header(out);
    for (const auto& row : rows) {
        write_csv_row(out, row);
    }
    if (!out) {
        throw FormatError("write failed for " + path.string());
    }
}

std::vector<SummaryPoint> summarize(const std::vector<BenchRow>& rows) {
    std::vector<SummaryPoint> points;
    std::vector<std::vector<const BenchRow*>> members;
    for (const auto& row : rows) {
        auto it = std::find_if(points.begin(), points.end(), [&](const SummaryPoint& p) {
            return p.sweep_value == row.sweep_value && p.method == row.method && p.k == row.k;
        });
        std::size_t idx = static_cast<std::size_t>(it - points.begin());
        if (it == points.end()) {
            SummaryPoint p;
            p.sweep_value = row.sweep_value;
            p.method = row.method;
            p.k = row.k;
            points.push_back(p);
            members.emplace_back();
        }
        members[idx].push_back(&row);
    }
    for (std::size_t i = 0; i < points.size(); ++i) {
        SummaryPoint& p = points[i];
        std::vector<double> inf;
        double wall = 0.0;
        double iters = 0.0;
        for (const BenchRow* r : members[i]) {
            ++p.count;
            if (!r->error.empty()) {
                ++p.failures;
                continue;
            }
            inf.push_back(r->infidelity);
            wall += r->wall_time_s;
            iters += r->iterations;
        }
        const auto ok = static_cast<double>(inf.size());
        if (inf.empty()) {
            p.mean_infidelity = p.std_infidelity = p.mean_wall_time_s = p.mean_iterations = kNaN;
            continue;
        }
        p.mean_infidelity = std::accumulate(inf.begin(), inf.end(), 0.0) / ok;
        double ss = 0.0;
        for (double v : inf) {
            ss += (v - p.mean_infidelity) * (v - p.mean_infidelity);
        }
        p.std_infidelity = inf.size() > 1 ? std::sqrt(ss / (ok - 1.0)) : 0.0;
        p.mean_wall_time_s = wall / ok;
        p.mean_iterations = iters / ok;
    }
    return points;
}

Json summary_json(const SweepSpec& spec, const std::vector<BenchRow>& rows) {
    Json points = Json::array();
    for (const auto& p : summarize(rows)) {
        points.push_back({{"sweep_value", p.sweep_value},
                          {"method", p.method},
                          {"k", p.k},
                          {"count", p.count},
                          {"failures", p.failures},
                          {"mean_infidelity", p.mean_infidelity},
                          {"std_infidelity", p.std_infidelity},
                          {"mean_wall_time_s", p.mean_wall_time_s},
                          {"mean_iterations", p.mean_iterations}});
    }
    Json failures = Json::array();
    for (const auto& r : rows) {
        if (!r.error.empty()) {
            failures.push_back({{"sweep_value", r.sweep_value},
                                {"seed", r.seed},
                                {"method", r.method},
                                {"k", r.k},
                                {"error", r.error}});
        }
    }
    return Json{{"schema_version", 1}, {"spec", to_json(spec)}, {"points", points}, {"failures", failures}};
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw InvalidArgument("spearman needs two equally long series of length >= 2");
    }
    auto ranks = [](const std::vector<double>& v) {
        std::vector<std::size_t> order(v.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
        std::vector<double> r(v.size());
        for (std::size_t i = 0; i < order.size();) {
            std::size_t j = i;
            while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) {
                ++j;
            }
            const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
            for (std::size_t m = i; m <= j; ++m) {
                r[order[m]] = avg;
            }
            i = j + 1;
        }
        return r;
    };
    const std::vector<double> rx = ranks(x);
    const std::vector<double> ry = ranks(y);
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) {
        return kNaN;
    }
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace qpt
