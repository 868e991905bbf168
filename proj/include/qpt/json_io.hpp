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

#include <json.hpp>

#include "qpt/channel.hpp"

// JSON encodings shared by the file formats. Complex matrices are nested
// row arrays of [re, im] pairs; real matrices are nested row arrays.

namespace qpt::json_io {

using Json = nlohmann::json;

Json encode(const Matrix& m);
Matrix decode_matrix(const Json& j);

Json encode(const RealMatrix& m);
RealMatrix decode_real_matrix(const Json& j);

Json encode(const KrausStack& k);
KrausStack decode_kraus(const Json& j);

Json read_file(const std::filesystem::path& path);
void write_file(const Json& j, const std::filesystem::path& path);

}  // namespace qpt::json_io
