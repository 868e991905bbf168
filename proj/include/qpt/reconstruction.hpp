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

#include <filesystem>
#include <optional>

#include "qpt/gd.hpp"
#include "qpt/json_io.hpp"
#include "qpt/pls.hpp"

// Reconstruction output files and recovery of a Choi matrix from any file
// the toolkit writes.

namespace qpt {

inline constexpr int kReconstructionSchemaVersion = 1;

json_io::Json to_json(const GdConfig& cfg);
// Fields absent from j keep the values of base.
GdConfig gd_config_from_json(const json_io::Json& j, GdConfig base = {});

json_io::Json to_json(const PlsConfig& cfg);
PlsConfig pls_config_from_json(const json_io::Json& j, PlsConfig base = {});

json_io::Json gd_reconstruction_json(const FitResult& result, const GdConfig& cfg, std::optional<double> fidelity,
                                     double wall_time_s);
json_io::Json pls_reconstruction_json(const PlsResult& result, const PlsConfig& cfg, std::optional<double> fidelity);

// Choi matrix of a tomogram's embedded truth, a gd Kraus payload or a pls
// Choi payload. Throws FormatError when the file carries none of these.
ChoiMatrix choi_from_json(const json_io::Json& j);
ChoiMatrix load_choi(const std::filesystem::path& path);

}  // namespace qpt
