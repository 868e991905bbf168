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

#include "qpt/json_io.hpp"

#include <fstream>
#include <vector>

namespace qpt::json_io {

namespace {

void require_array(const Json& j, const char* what) {
    if (!j.is_array()) {
        throw FormatError(std::string("expected an array for ") + what);
    }
}

}  // namespace

Json encode(const Matrix& m) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            row.push_back(Json::array({m(r, c).real(), m(r, c).imag()}));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix decode_matrix(const Json& j) {
    require_array(j, "complex matrix");
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = rows == 0 ? Eigen::Index{0} : static_cast<Eigen::Index>(j.at(0).size());
    Matrix m(rows, cols);
    try {
        for (Eigen::Index r = 0; r < rows; ++r) {
            const Json& row = j.at(static_cast<std::size_t>(r));
            require_array(row, "complex matrix row");
            if (static_cast<Eigen::Index>(row.size()) != cols) {
                throw FormatError("ragged complex matrix");
            }
            for (Eigen::Index c = 0; c < cols; ++c) {
                const Json& z = row.at(static_cast<std::size_t>(c));
                if (!z.is_array() || z.size() != 2) {
                    throw FormatError("complex entries must be [re, im] pairs");
                }
                m(r, c) = Complex(z.at(0).get<double>(), z.at(1).get<double>());
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("malformed complex matrix: ") + e.what());
    }
    return m;
}

Json encode(const RealMatrix& m) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            row.push_back(m(r, c));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

RealMatrix decode_real_matrix(const Json& j) {
    require_array(j, "real matrix");
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = rows == 0 ? Eigen::Index{0} : static_cast<Eigen::Index>(j.at(0).size());
    RealMatrix m(rows, cols);
    try {
        for (Eigen::Index r = 0; r < rows; ++r) {
            const Json& row = j.at(static_cast<std::size_t>(r));
            require_array(row, "real matrix row");
            if (static_cast<Eigen::Index>(row.size()) != cols) {
                throw FormatError("ragged real matrix");
            }
            for (Eigen::Index c = 0; c < cols; ++c) {
                m(r, c) = row.at(static_cast<std::size_t>(c)).get<double>();
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("malformed real matrix: ") + e.what());
    }
    return m;
}

Json encode(const KrausStack& k) {
    Json out = Json::array();
    for (Eigen::Index l = 0; l < k.count(); ++l) {
        out.push_back(encode(Matrix(k.block(l))));
    }
    return out;
}

KrausStack decode_kraus(const Json& j) {
    require_array(j, "Kraus operator list");
    std::vector<Matrix> blocks;
    for (const Json& m : j) {
        blocks.push_back(decode_matrix(m));
    }
    try {
        return KrausStack(blocks);
    } catch (const Error& e) {
        throw FormatError(std::string("invalid Kraus payload: ") + e.what());
    }
}

Json read_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw FormatError("cannot open " + path.string());
    }
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError("malformed JSON in " + path.string() + ": " + e.what());
    }
}

void write_file(const Json& j, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw FormatError("cannot write " + path.string());
    }
    out << j.dump() << '\n';
    if (!out) {
        throw FormatError("write failed for " + path.string());
    }
}

}  // namespace qpt::json_io
