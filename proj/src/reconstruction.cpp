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

#include "qpt/reconstruction.hpp"

namespace qpt {

using json_io::Json;

namespace {

template <typename T>
void read_field(const Json& j, const char* key, T& out) {
    if (j.contains(key)) {
        out = j.at(key).get<T>();
    }
}

}  // namespace

Json to_json(const GdConfig& cfg) {
    return Json{{"kraus", cfg.kraus},
                {"eta0", cfg.eta0},
                {"decay", cfg.decay},
                {"lambda", cfg.lambda},
                {"max_iters", cfg.max_iters},
                {"batch_size", cfg.batch_size},
                {"seed", cfg.seed},
                {"grad_norm_floor", cfg.grad_norm_floor},
                {"plateau_tol", cfg.plateau_tol},
                {"plateau_window", cfg.plateau_window}};
}

GdConfig gd_config_from_json(const Json& j, GdConfig base) {
    if (!j.is_object()) {
        throw FormatError("gd config must be a JSON object");
    }
    try {
        read_field(j, "kraus", base.kraus);
        read_field(j, "eta0", base.eta0);
        read_field(j, "decay", base.decay);
        read_field(j, "lambda", base.lambda);
        read_field(j, "max_iters", base.max_iters);
        read_field(j, "batch_size", base.batch_size);
        read_field(j, "seed", base.seed);
        read_field(j, "grad_norm_floor", base.grad_norm_floor);
        read_field(j, "plateau_tol", base.plateau_tol);
        read_field(j, "plateau_window", base.plateau_window);
    } catch (const Json::exception& e) {
        throw FormatError(std::string("malformed gd config: ") + e.what());
    }
    base.validate();
    return base;
}

Json to_json(const PlsConfig& cfg) {
    return Json{{"dykstra_max_iters", cfg.dykstra_max_iters},
                {"dykstra_tol", cfg.dykstra_tol},
                {"solver", to_string(cfg.solver)}};
}

PlsConfig pls_config_from_json(const Json& j, PlsConfig base) {
    if (!j.is_object()) {
        throw FormatError("pls config must be a JSON object");
    }
    try {
        read_field(j, "dykstra_max_iters", base.dykstra_max_iters);
        read_field(j, "dykstra_tol", base.dykstra_tol);
        if (j.contains("solver")) {
            base.solver = ls_solver_from_string(j.at("solver").get<std::string>());
        }
    } catch (const Json::exception& e) {
        throw FormatError(std::string("malformed pls config: ") + e.what());
    }
    base.validate();
    return base;
}

Json gd_reconstruction_json(const FitResult& result, const GdConfig& cfg, std::optional<double> fidelity,
                            double wall_time_s) {
    Json j{{"schema_version", kReconstructionSchemaVersion},
           {"method", "gd"},
           {"config", to_json(cfg)},
           {"kraus", json_io::encode(result.kraus)},
           {"trace",
            {{"loss", result.trace.loss},
             {"tp_defect", result.trace.tp_defect},
             {"iter_time_s", result.trace.iter_time_s}}},
           {"iterations", result.trace.iterations},
           {"stop_reason", to_string(result.trace.stop)},
           {"wall_time_s", wall_time_s}};
    if (fidelity) {
        j["fidelity"] = *fidelity;
    }
    return j;
}

Json pls_reconstruction_json(const PlsResult& result, const PlsConfig& cfg, std::optional<double> fidelity) {
    Json j{{"schema_version", kReconstructionSchemaVersion},
           {"method", "pls"},
           {"config", to_json(cfg)},
           {"choi", json_io::encode(result.choi.matrix())},
           {"converged", result.converged},
           {"wall_time_s", result.wall_time_s},
           {"projection_cycles", result.cycles},
           {"projection", "dykstra alternating CP/TP projections"}};
    if (fidelity) {
        j["fidelity"] = *fidelity;
    }
    return j;
}

ChoiMatrix choi_from_json(const Json& j) {
    if (!j.is_object()) {
        throw FormatError("expected a JSON object");
    }
    try {
        if (j.contains("method")) {
            const std::string method = j.at("method").get<std::string>();
            if (method == "gd") {
                return kraus_to_choi(json_io::decode_kraus(j.at("kraus")));
            }
            if (method == "pls") {
                return ChoiMatrix(json_io::decode_matrix(j.at("choi")));
            }
            throw FormatError("unknown reconstruction method '" + method + "'");
        }
        if (j.contains("truth")) {
            return kraus_to_choi(json_io::decode_kraus(j.at("truth")));
        }
    } catch (const Json::exception& e) {
        throw FormatError(std::string("malformed payload: ") + e.what());
    } catch (const DimensionError& e) {
        throw FormatError(std::string("invalid payload: ") + e.what());
    }
    throw FormatError("file carries no Kraus, Choi or ground-truth payload");
}

ChoiMatrix load_choi(const std::filesystem::path& path) {
    try {
        return choi_from_json(json_io::read_file(path));
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

}  // namespace qpt
