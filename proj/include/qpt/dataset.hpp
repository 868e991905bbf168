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
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qpt/channel.hpp"
#include "qpt/cv_ensemble.hpp"
#include "qpt/rng.hpp"

namespace qpt {

inline constexpr int kTomogramSchemaVersion = 1;

enum class TomogramKind { kDv, kCv };

enum class OperatorFamily {
    kPauli,            // n-qubit Pauli eigenstate products
    kCoherent,         // coherent-state probes on a CvGrid
    kDisplacedParity,  // displaced-parity observables on a CvGrid
    kExplicit,         // user-supplied matrices only
};

std::string to_string(TomogramKind kind);
std::string to_string(OperatorFamily family);

// Probe or measurement set. Families other than kExplicit are described by
// a small descriptor (family, size parameters, retained indices) and the
// matrices are rebuilt on load unless `embed` is set.
struct OperatorSet {
    OperatorFamily family = OperatorFamily::kExplicit;
    int n_qubits = 0;  // kPauli
    int cutoff = 0;    // kCoherent, kDisplacedParity
    CvGrid grid;       // kCoherent, kDisplacedParity
    // Ensemble members retained, in order. Always size() long.
    std::vector<std::size_t> indices;
    std::vector<Matrix> matrices;
    bool embed = false;

    std::size_t size() const { return matrices.size(); }
    Eigen::Index dim() const { return matrices.empty() ? 0 : matrices.front().rows(); }
    // Size of the full ensemble the indices refer to.
    std::size_t ensemble_size() const;
    bool is_full_ensemble() const;

    // Members at the given positions of this set (not ensemble indices).
    OperatorSet select(const std::vector<std::size_t>& positions) const;

    // Empty `indices` selects the whole ensemble.
    static OperatorSet pauli(int n_qubits, std::vector<std::size_t> indices = {});
    static OperatorSet coherent(const CvGrid& grid, int cutoff, std::vector<std::size_t> indices = {});
    static OperatorSet displaced_parity(const CvGrid& grid, int cutoff, std::vector<std::size_t> indices = {});
    static OperatorSet explicit_set(std::vector<Matrix> matrices);

    bool operator==(const OperatorSet& other) const;
};

struct Tomogram {
    TomogramKind kind = TomogramKind::kDv;
    Eigen::Index dim = 0;
    OperatorSet probes;
    OperatorSet measurements;
    // data(i, j): probe i, measurement j.
    RealMatrix data;
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;
    std::optional<KrausStack> truth;

    std::size_t num_entries() const { return static_cast<std::size_t>(data.size()); }
    // Throws DimensionError / InvalidArgument when the invariants fail.
    void validate() const;

    bool operator==(const Tomogram& other) const;
};

// Noiseless expectation values Tr[M_j E(rho_i)].
RealMatrix expectation_values(const KrausStack& process, const OperatorSet& probes, const OperatorSet& measurements);

// Data d_ij = Tr[M_j E(rho_i)] + eta_ij with eta_ij ~ N(0, noise) i.i.d.
// Values are not clipped. The process is stored as ground truth.
Tomogram synthesize(const KrausStack& process, OperatorSet probes, OperatorSet measurements, double noise,
                    Rng& rng);

// Retains round(sqrt(gamma) * P) probes and round(sqrt(gamma) * M)
// measurements chosen uniformly without replacement.
Tomogram subsample(const Tomogram& t, double gamma, Rng& rng);

using IndexPair = std::pair<std::uint32_t, std::uint32_t>;

struct BatchIndex {
    // (probe, measurement) pairs sorted by probe then measurement.
    std::vector<IndexPair> pairs;
    // All entries of the tomogram; enables the dense evaluation path.
    bool is_full = false;

    static BatchIndex full(std::size_t rows, std::size_t cols);
    std::size_t size() const { return pairs.size(); }
};

// Stream of mini-batches. Each step draws batch_size distinct entries
// uniformly; if batch_size >= rows * cols every step is the full set.
class BatchStream {
   public:
    BatchStream(std::size_t rows, std::size_t cols, std::size_t batch_size, Rng rng);

    BatchIndex next();
    bool full_batch() const { return batch_size_ >= rows_ * cols_; }

   private:
    std::size_t rows_;
    std::size_t cols_;
    std::size_t batch_size_;
    Rng rng_;
};

inline constexpr std::size_t kDefaultSensingMemoryLimit = std::size_t{1} << 30;

// One row per (i, j) in row-major pair order with S * vec(Phi) equal to
// Tr[M_j choi_apply(Phi, rho_i)] (vec is row-major). Throws
// InvalidArgument if the matrix would exceed max_bytes.
Matrix sensing_matrix(const OperatorSet& probes, const OperatorSet& measurements,
                      std::size_t max_bytes = kDefaultSensingMemoryLimit);

void save_tomogram(const Tomogram& t, const std::filesystem::path& path);
Tomogram load_tomogram(const std::filesystem::path& path);

// CSV with header "probe_index,measurement_index,value".
void export_csv(const Tomogram& t, const std::filesystem::path& path);

}  // namespace qpt
