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

#include "qpt/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "qpt/dv_ensemble.hpp"
#include "qpt/json_io.hpp"
#include "qpt/linalg.hpp"

namespace qpt {

using json_io::Json;

namespace {

bool same_matrix(const Matrix& a, const Matrix& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() && (a.array() == b.array()).all();
}

std::vector<std::size_t> iota_indices(std::size_t n) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    return idx;
}

void check_indices(const std::vector<std::size_t>& indices, std::size_t ensemble) {
    for (auto i : indices) {
        if (i >= ensemble) {
            throw InvalidArgument("ensemble index out of range");
        }
    }
}

// Distinct sorted sample of `count` values from [0, n) (Floyd's algorithm).
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t count, Rng& rng) {
    std::unordered_set<std::size_t> chosen;
    chosen.reserve(count * 2);
    for (std::size_t j = n - count; j < n; ++j) {
        const std::size_t t = static_cast<std::size_t>(rng.index(j + 1));
        if (!chosen.insert(t).second) {
            chosen.insert(j);
        }
    }
    std::vector<std::size_t> out(chosen.begin(), chosen.end());
    std::sort(out.begin(), out.end());
    return out;
}

Json grid_to_json(const CvGrid& g) {
    return Json{{"re_min", g.re_min}, {"re_max", g.re_max}, {"im_min", g.im_min},
                {"im_max", g.im_max}, {"rows", g.rows},     {"cols", g.cols}};
}

CvGrid grid_from_json(const Json& j) {
    CvGrid g;
    g.re_min = j.at("re_min").get<double>();
    g.re_max = j.at("re_max").get<double>();
    g.im_min = j.at("im_min").get<double>();
    g.im_max = j.at("im_max").get<double>();
    g.rows = j.at("rows").get<int>();
    g.cols = j.at("cols").get<int>();
    if (g.rows < 1 || g.cols < 1) {
        throw FormatError("grid rows and cols must be positive");
    }
    return g;
}

OperatorFamily family_from_string(const std::string& s) {
    if (s == "pauli") return OperatorFamily::kPauli;
    if (s == "coherent") return OperatorFamily::kCoherent;
    if (s == "displaced_parity") return OperatorFamily::kDisplacedParity;
    if (s == "explicit") return OperatorFamily::kExplicit;
    throw FormatError("unknown operator family '" + s + "'");
}

Json operator_set_to_json(const OperatorSet& set) {
    Json j{{"type", to_string(set.family)}};
    switch (set.family) {
        case OperatorFamily::kPauli:
            j["n_qubits"] = set.n_qubits;
            break;
        case OperatorFamily::kCoherent:
        case OperatorFamily::kDisplacedParity:
            j["cutoff"] = set.cutoff;
            j["grid"] = grid_to_json(set.grid);
            break;
        case OperatorFamily::kExplicit:
            break;
    }
    if (set.family != OperatorFamily::kExplicit && !set.is_full_ensemble()) {
        j["indices"] = set.indices;
    }
    if (set.embed || set.family == OperatorFamily::kExplicit) {
        Json mats = Json::array();
        for (const auto& m : set.matrices) {
            mats.push_back(json_io::encode(m));
        }
        j["matrices"] = std::move(mats);
    }
    return j;
}

OperatorSet operator_set_from_json(const Json& j) {
    const OperatorFamily family = family_from_string(j.at("type").get<std::string>());
    std::vector<std::size_t> indices;
    if (j.contains("indices")) {
        indices = j.at("indices").get<std::vector<std::size_t>>();
    }
    std::vector<Matrix> embedded;
    if (j.contains("matrices")) {
        for (const auto& m : j.at("matrices")) {
            embedded.push_back(json_io::decode_matrix(m));
        }
    }
    OperatorSet set;
    switch (family) {
        case OperatorFamily::kPauli:
            if (!embedded.empty()) {
                set.family = family;
                set.n_qubits = j.at("n_qubits").get<int>();
                set.indices = indices.empty() ? iota_indices(pauli_ensemble_size(set.n_qubits)) : indices;
            } else {
                set = OperatorSet::pauli(j.at("n_qubits").get<int>(), indices);
            }
            break;
        case OperatorFamily::kCoherent:
        case OperatorFamily::kDisplacedParity: {
            const CvGrid grid = grid_from_json(j.at("grid"));
            const int cutoff = j.at("cutoff").get<int>();
            if (!embedded.empty()) {
                set.family = family;
                set.grid = grid;
                set.cutoff = cutoff;
                set.indices = indices.empty() ? iota_indices(grid.size()) : indices;
            } else if (family == OperatorFamily::kCoherent) {
                set = OperatorSet::coherent(grid, cutoff, indices);
            } else {
                set = OperatorSet::displaced_parity(grid, cutoff, indices);
            }
            break;
        }
        case OperatorFamily::kExplicit:
            return OperatorSet::explicit_set(std::move(embedded));
    }
    if (!embedded.empty()) {
        if (embedded.size() != set.indices.size()) {
            throw FormatError("embedded matrices do not match the retained indices");
        }
        set.matrices = std::move(embedded);
        set.embed = true;
    }
    return set;
}

}  // namespace

std::string to_string(TomogramKind kind) {
    return kind == TomogramKind::kCv ? "cv" : "dv";
}

std::string to_string(OperatorFamily family) {
    switch (family) {
        case OperatorFamily::kPauli: return "pauli";
        case OperatorFamily::kCoherent: return "coherent";
        case OperatorFamily::kDisplacedParity: return "displaced_parity";
        case OperatorFamily::kExplicit: return "explicit";
    }
    return "explicit";
}

std::size_t OperatorSet::ensemble_size() const {
    switch (family) {
        case OperatorFamily::kPauli: return pauli_ensemble_size(n_qubits);
        case OperatorFamily::kCoherent:
        case OperatorFamily::kDisplacedParity: return grid.size();
        case OperatorFamily::kExplicit: return matrices.size();
    }
    return matrices.size();
}

bool OperatorSet::is_full_ensemble() const {
    if (indices.size() != ensemble_size()) {
        return false;
    }
    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (indices[i] != i) {
            return false;
        }
    }
    return true;
}

OperatorSet OperatorSet::select(const std::vector<std::size_t>& positions) const {
    OperatorSet out = *this;
    out.indices.clear();
    out.matrices.clear();
    for (auto p : positions) {
        if (p >= size()) {
            throw InvalidArgument("operator selection out of range");
        }
        out.indices.push_back(indices[p]);
        out.matrices.push_back(matrices[p]);
    }
    if (family == OperatorFamily::kExplicit) {
        // Explicit sets have no ensemble to index into.
        out.indices = iota_indices(out.matrices.size());
    }
    return out;
}

OperatorSet OperatorSet::pauli(int n_qubits, std::vector<std::size_t> indices) {
    if (n_qubits < 1 || n_qubits > kMaxPauliQubits + 1) {
        throw InvalidArgument("Pauli operator set: unsupported number of qubits");
    }
    OperatorSet set;
    set.family = OperatorFamily::kPauli;
    set.n_qubits = n_qubits;
    const std::size_t ensemble = pauli_ensemble_size(n_qubits);
    if (indices.empty()) {
        if (n_qubits > kMaxPauliQubits) {
            throw InvalidArgument("full Pauli ensemble too large for memory; select a subset of indices");
        }
        indices = iota_indices(ensemble);
    }
    check_indices(indices, ensemble);
    set.indices = std::move(indices);
    set.matrices.reserve(set.indices.size());
    for (auto idx : set.indices) {
        set.matrices.push_back(pauli_product_projector(n_qubits, idx));
    }
    return set;
}

OperatorSet OperatorSet::coherent(const CvGrid& grid, int cutoff, std::vector<std::size_t> indices) {
    OperatorSet set;
    set.family = OperatorFamily::kCoherent;
    set.grid = grid;
    set.cutoff = cutoff;
    set.indices = indices.empty() ? iota_indices(grid.size()) : std::move(indices);
    check_indices(set.indices, grid.size());
    for (auto idx : set.indices) {
        set.matrices.push_back(coherent_state(grid.point(idx), cutoff).matrix());
    }
    return set;
}

OperatorSet OperatorSet::displaced_parity(const CvGrid& grid, int cutoff, std::vector<std::size_t> indices) {
    OperatorSet set;
    set.family = OperatorFamily::kDisplacedParity;
    set.grid = grid;
    set.cutoff = cutoff;
    set.indices = indices.empty() ? iota_indices(grid.size()) : std::move(indices);
    check_indices(set.indices, grid.size());
    for (auto idx : set.indices) {
        set.matrices.push_back(qpt::displaced_parity(grid.point(idx), cutoff));
    }
    return set;
}

OperatorSet OperatorSet::explicit_set(std::vector<Matrix> matrices) {
    OperatorSet set;
    set.family = OperatorFamily::kExplicit;
    set.indices = iota_indices(matrices.size());
    set.matrices = std::move(matrices);
    for (const auto& m : set.matrices) {
        if (m.rows() != m.cols() || m.rows() != set.matrices.front().rows()) {
            throw DimensionError("explicit operators must be square and share one dimension");
        }
    }
    return set;
}

bool OperatorSet::operator==(const OperatorSet& other) const {
    if (family != other.family || n_qubits != other.n_qubits || cutoff != other.cutoff || !(grid == other.grid) ||
        indices != other.indices || embed != other.embed || matrices.size() != other.matrices.size()) {
        return false;
    }
    for (std::size_t i = 0; i < matrices.size(); ++i) {
        if (!same_matrix(matrices[i], other.matrices[i])) {
            return false;
        }
    }
    return true;
}

void Tomogram::validate() const {
    if (data.rows() != static_cast<Eigen::Index>(probes.size()) ||
        data.cols() != static_cast<Eigen::Index>(measurements.size())) {
        throw DimensionError("tomogram data shape does not match probes x measurements");
    }
    if (!(noise_sigma >= 0.0)) {
        throw InvalidArgument("noise_sigma must be >= 0");
    }
    if (probes.dim() != dim || measurements.dim() != dim) {
        throw DimensionError("operator dimensions do not match the tomogram dimension");
    }
    if (truth && truth->dim() != dim) {
        throw DimensionError("ground-truth Kraus dimension does not match the tomogram dimension");
    }
}

bool Tomogram::operator==(const Tomogram& other) const {
    if (kind != other.kind || dim != other.dim || !(probes == other.probes) ||
        !(measurements == other.measurements) || noise_sigma != other.noise_sigma || seed != other.seed) {
        return false;
    }
    if (data.rows() != other.data.rows() || data.cols() != other.data.cols() ||
        !(data.array() == other.data.array()).all()) {
        return false;
    }
    if (truth.has_value() != other.truth.has_value()) {
        return false;
    }
    return !truth || same_matrix(truth->stacked(), other.truth->stacked());
}

RealMatrix expectation_values(const KrausStack& process, const OperatorSet& probes, const OperatorSet& measurements) {
    const Eigen::Index n = process.dim();
    if (probes.dim() != n || measurements.dim() != n) {
        throw DimensionError("synthesize: process, probe and measurement dimensions differ");
    }
    const auto np = static_cast<Eigen::Index>(probes.size());
    const auto nm = static_cast<Eigen::Index>(measurements.size());
    // Row i: vec(E(rho_i)); row j: vec(M_j^T). d = outputs * meas^T.
    Matrix outputs(np, n * n);
    for (Eigen::Index i = 0; i < np; ++i) {
        const Matrix out = apply_kraus(process, DensityMatrix(probes.matrices[static_cast<std::size_t>(i)])).matrix();
        outputs.row(i) = linalg::flatten(out).transpose();
    }
    Matrix meas(nm, n * n);
    for (Eigen::Index j = 0; j < nm; ++j) {
        meas.row(j) = linalg::flatten(measurements.matrices[static_cast<std::size_t>(j)].transpose()).transpose();
    }
    return (outputs * meas.transpose()).real();
}

Tomogram synthesize(const KrausStack& process, OperatorSet probes, OperatorSet measurements, double noise,
                    Rng& rng) {
    if (!(noise >= 0.0)) {
        throw InvalidArgument("noise level must be >= 0");
    }
    Tomogram t;
    t.kind = probes.family == OperatorFamily::kCoherent ? TomogramKind::kCv : TomogramKind::kDv;
    t.dim = process.dim();
    t.data = expectation_values(process, probes, measurements);
    t.probes = std::move(probes);
    t.measurements = std::move(measurements);
    t.noise_sigma = noise;
    t.truth = process;
    if (noise > 0.0) {
        for (Eigen::Index i = 0; i < t.data.rows(); ++i) {
            for (Eigen::Index j = 0; j < t.data.cols(); ++j) {
                t.data(i, j) += rng.normal(noise);
            }
        }
    }
    return t;
}

Tomogram subsample(const Tomogram& t, double gamma, Rng& rng) {
    if (!(gamma > 0.0 && gamma <= 1.0)) {
        throw InvalidArgument("subsample: gamma must lie in (0, 1]");
    }
    const double scale = std::sqrt(gamma);
    const auto keep_p = static_cast<std::size_t>(std::llround(scale * static_cast<double>(t.probes.size())));
    const auto keep_m = static_cast<std::size_t>(std::llround(scale * static_cast<double>(t.measurements.size())));
    if (keep_p == 0 || keep_m == 0) {
        std::ostringstream msg;
        msg << "subsample: gamma = " << gamma << " retains no probes or no measurements";
        throw InvalidArgument(msg.str());
    }
    const auto rows = sample_without_replacement(t.probes.size(), keep_p, rng);
    const auto cols = sample_without_replacement(t.measurements.size(), keep_m, rng);

    Tomogram out = t;
    out.probes = t.probes.select(rows);
    out.measurements = t.measurements.select(cols);
    out.data.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < cols.size(); ++c) {
            out.data(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                t.data(static_cast<Eigen::Index>(rows[r]), static_cast<Eigen::Index>(cols[c]));
        }
    }
    return out;
}

BatchIndex BatchIndex::full(std::size_t rows, std::size_t cols) {
    BatchIndex b;
    b.is_full = true;
    b.pairs.reserve(rows * cols);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            b.pairs.emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
        }
    }
    return b;
}

BatchStream::BatchStream(std::size_t rows, std::size_t cols, std::size_t batch_size, Rng rng)
    : rows_(rows), cols_(cols), batch_size_(batch_size), rng_(std::move(rng)) {
    if (batch_size == 0) {
        throw InvalidArgument("batch size must be >= 1");
    }
}

BatchIndex BatchStream::next() {
    if (full_batch()) {
        return BatchIndex::full(rows_, cols_);
    }
    BatchIndex b;
    for (auto flat : sample_without_replacement(rows_ * cols_, batch_size_, rng_)) {
        b.pairs.emplace_back(static_cast<std::uint32_t>(flat / cols_), static_cast<std::uint32_t>(flat % cols_));
    }
    return b;
}

Matrix sensing_matrix(const OperatorSet& probes, const OperatorSet& measurements, std::size_t max_bytes) {
    const Eigen::Index n = probes.dim();
    if (measurements.dim() != n) {
        throw DimensionError("sensing_matrix: probe and measurement dimensions differ");
    }
    const std::size_t rows = probes.size() * measurements.size();
    const auto cols = static_cast<std::size_t>(n * n * n * n);
    if (rows * cols * sizeof(Complex) > max_bytes) {
        std::ostringstream msg;
        msg << "sensing matrix of " << rows << " x " << cols << " entries exceeds the memory limit of " << max_bytes
            << " bytes";
        throw InvalidArgument(msg.str());
    }
    // Row (i, j) = vec(rho_i (x) M_j^T), so that row . vec(Phi) = Tr[(rho_i^T (x) M_j) Phi].
    Matrix s(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    Eigen::Index row = 0;
    for (const auto& rho : probes.matrices) {
        for (const auto& m : measurements.matrices) {
            s.row(row++) = linalg::flatten(linalg::kron(rho, m.transpose())).transpose();
        }
    }
    return s;
}

void save_tomogram(const Tomogram& t, const std::filesystem::path& path) {
    t.validate();
    Json j{{"schema_version", kTomogramSchemaVersion},
           {"kind", to_string(t.kind)},
           {"dim", t.dim},
           {"probes", operator_set_to_json(t.probes)},
           {"measurements", operator_set_to_json(t.measurements)},
           {"data", json_io::encode(t.data)},
           {"noise_sigma", t.noise_sigma},
           {"seed", t.seed}};
    if (t.truth) {
        j["truth"] = json_io::encode(*t.truth);
    }
    json_io::write_file(j, path);
}

Tomogram load_tomogram(const std::filesystem::path& path) {
    const Json j = json_io::read_file(path);
    if (!j.is_object() || !j.contains("schema_version")) {
        throw FormatError(path.string() + ": missing schema_version");
    }
    if (!j.at("schema_version").is_number_integer() || j.at("schema_version").get<int>() != kTomogramSchemaVersion) {
        throw FormatError(path.string() + ": unsupported schema_version " + j.at("schema_version").dump());
    }
    Tomogram t;
    try {
        const std::string kind = j.at("kind").get<std::string>();
        if (kind != "dv" && kind != "cv") {
            throw FormatError("unknown tomogram kind '" + kind + "'");
        }
        t.kind = kind == "cv" ? TomogramKind::kCv : TomogramKind::kDv;
        t.dim = j.at("dim").get<Eigen::Index>();
        t.probes = operator_set_from_json(j.at("probes"));
        t.measurements = operator_set_from_json(j.at("measurements"));
        t.data = json_io::decode_real_matrix(j.at("data"));
        t.noise_sigma = j.at("noise_sigma").get<double>();
        t.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("truth")) {
            t.truth = json_io::decode_kraus(j.at("truth"));
        }
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
    try {
        t.validate();
    } catch (const Error& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
    return t;
}

void export_csv(const Tomogram& t, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw FormatError("cannot write " + path.string());
    }
    out << "probe_index,measurement_index,value\n";
    char buf[64];
    for (Eigen::Index i = 0; i < t.data.rows(); ++i) {
        for (Eigen::Index j = 0; j < t.data.cols(); ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", t.data(i, j));
            out << t.probes.indices[static_cast<std::size_t>(i)] << ','
                << t.measurements.indices[static_cast<std::size_t>(j)] << ',' << buf << '\n';
        }
    }
}

}  // namespace qpt
