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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "qpt/json_io.hpp"

namespace {

namespace fs = std::filesystem;

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = qpt::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch() {
    const fs::path dir = fs::temp_directory_path() / "qpt_cli_unit";
    fs::create_directories(dir);
    return dir;
}

std::string p(const std::string& name) { return (scratch() / name).string(); }

double printed_fidelity(const std::string& out) {
    const auto pos = out.find("fidelity ");
    REQUIRE(pos != std::string::npos);
    return std::stod(out.substr(pos + 9));
}

}  // namespace

TEST_CASE("synth writes DV and CV tomograms") {
    auto r = run({"synth", "--kind", "dv", "--qubits", "2", "--rank", "16", "--noise", "0.01", "--seed", "7", "--out",
                  p("d.json")});
    CHECK(r.code == 0);
    const auto d = qpt::json_io::read_file(p("d.json"));
    CHECK(d.at("data").size() == 36);
    CHECK(d.at("data").at(0).size() == 36);
    CHECK(d.at("schema_version") == 1);

    r = run({"synth", "--kind", "cv", "--dim", "32", "--process", "snap-displace", "--noise", "0.01", "--seed", "1",
             "--out", p("c.json")});
    CHECK(r.code == 0);
    const auto c = qpt::json_io::read_file(p("c.json"));
    CHECK(c.at("data").size() == 100);
    CHECK(c.at("data").at(0).size() == 100);
    CHECK(c.at("kind") == "cv");
}

TEST_CASE("synth usage errors") {
    auto r = run({"synth", "--kind", "dv"});
    CHECK(r.code == 2);
    CHECK(r.err.find("Usage") != std::string::npos);
    CHECK(run({"synth", "--kind", "dv", "--dim", "8", "--out", p("x.json")}).code == 2);
    CHECK(run({"synth", "--kind", "qudit", "--out", p("x.json")}).code == 2);
    CHECK(run({"synth", "--kind", "cv", "--probe-grid", "ten", "--out", p("x.json")}).code == 2);
    CHECK(run({"bogus"}).code == 2);
    CHECK(run({}).code == 2);
    CHECK(run({"--help"}).code == 0);
}

TEST_CASE("reconstruct, fidelity and exit codes") {
    REQUIRE(run({"synth", "--kind", "dv", "--qubits", "1", "--rank", "2", "--noise", "0.01", "--out", p("one.json")})
                .code == 0);
    auto r = run({"reconstruct", "--method", "pls", "--data", p("one.json"), "--out", p("pls.json")});
    CHECK(r.code == 0);
    CHECK(printed_fidelity(r.out) > 0.9);
    CHECK(qpt::json_io::read_file(p("pls.json")).at("converged") == true);

    r = run({"reconstruct", "--method", "gd", "--kraus", "2", "--iters", "50", "--data", p("one.json"), "--out",
             p("gd.json")});
    CHECK(r.code == 0);
    const auto gd = qpt::json_io::read_file(p("gd.json"));
    CHECK(gd.at("trace").at("loss").size() == gd.at("iterations").get<std::size_t>());

    r = run({"fidelity", p("gd.json"), p("gd.json")});
    CHECK(r.code == 0);
    CHECK(r.out.find("fidelity 1.000000") != std::string::npos);
    CHECK(run({"fidelity", p("pls.json"), p("one.json")}).code == 0);

    REQUIRE(run({"synth", "--kind", "dv", "--qubits", "2", "--rank", "4", "--gamma", "0.1", "--out", p("sub.json")})
                .code == 0);
    r = run({"reconstruct", "--method", "pls", "--data", p("sub.json")});
    CHECK(r.code == 3);
    CHECK(r.err.find("informationally complete") != std::string::npos);

    CHECK(run({"fidelity", p("one.json"), p("sub.json")}).code == 3);
    CHECK(run({"reconstruct", "--method", "gd", "--lr", "-1", "--data", p("one.json")}).code == 2);
    CHECK(run({"reconstruct", "--method", "gd", "--data", p("missing.json")}).code == 2);
}

TEST_CASE("QPT_SEED overrides --seed") {
    ::setenv("QPT_SEED", "5", 1);
    REQUIRE(run({"synth", "--kind", "dv", "--qubits", "1", "--noise", "0.1", "--seed", "1", "--out", p("e1.json")})
                .code == 0);
    ::unsetenv("QPT_SEED");
    REQUIRE(run({"synth", "--kind", "dv", "--qubits", "1", "--noise", "0.1", "--seed", "5", "--out", p("e2.json")})
                .code == 0);
    CHECK(qpt::json_io::read_file(p("e1.json")) == qpt::json_io::read_file(p("e2.json")));
    ::setenv("QPT_SEED", "abc", 1);
    CHECK(run({"synth", "--kind", "dv", "--out", p("e3.json")}).code == 2);
    ::unsetenv("QPT_SEED");
}

TEST_CASE("identity versus bit flip") {
    const std::string id = p("id.json");
    const std::string flip = p("flip.json");
    qpt::json_io::Json a{{"schema_version", 1},
                         {"method", "gd"},
                         {"kraus", {{{{1.0, 0.0}, {0.0, 0.0}}, {{0.0, 0.0}, {1.0, 0.0}}}}}};
    qpt::json_io::Json b{{"schema_version", 1},
                         {"method", "gd"},
                         {"kraus", {{{{0.0, 0.0}, {1.0, 0.0}}, {{1.0, 0.0}, {0.0, 0.0}}}}}};
    qpt::json_io::write_file(a, id);
    qpt::json_io::write_file(b, flip);
    const auto r = run({"fidelity", id, flip});
    CHECK(r.code == 0);
    CHECK(std::abs(printed_fidelity(r.out)) < 1e-8);
}

TEST_CASE("parity map export") {
    REQUIRE(run({"synth", "--kind", "cv", "--dim", "8", "--alpha", "0.5", "--probe-grid", "3x3@1", "--meas-grid",
                 "3x3@1", "--noise", "0.01", "--out", p("small_cv.json")})
                .code == 0);
    const auto r = run({"reconstruct", "--method", "gd", "--iters", "5", "--data", p("small_cv.json"), "--parity-csv",
                        p("parity.csv"), "--fine-grid", "4", "--probe-index", "2"});
    CHECK(r.code == 0);
    std::ifstream in(p("parity.csv"));
    std::string header;
    std::getline(in, header);
    CHECK(header == "beta_re,beta_im,value");
    int lines = 0;
    for (std::string line; std::getline(in, line);) ++lines;
    CHECK(lines == 16);
    CHECK(run({"reconstruct", "--method", "gd", "--iters", "2", "--data", p("small_cv.json"), "--parity-csv",
               p("parity.csv"), "--probe-index", "99"})
              .code == 2);
}

TEST_CASE("benchmark subcommand") {
    const std::string spec = p("spec.json");
    qpt::json_io::write_file(qpt::json_io::Json{{"kind", "noise"},
                                                {"grid", {0.1}},
                                                {"seeds", 2},
                                                {"n_qubits", 1},
                                                {"rank", 2},
                                                {"kraus", {2}},
                                                {"methods", {"gd", "pls"}},
                                                {"gd", {{"max_iters", 10}}}},
                             spec);
    const auto r = run({"benchmark", "--spec", spec, "--out", p("rows.csv"), "--jobs", "2"});
    CHECK(r.code == 0);
    std::ifstream in(p("rows.csv"));
    std::string header;
    std::getline(in, header);
    CHECK(header == "sweep_value,seed,method,k,infidelity,iterations,wall_time_s");
    const auto summary = qpt::json_io::read_file(p("rows.csv") + ".summary.json");
    CHECK(summary.at("points").size() == 2);
    CHECK(run({"benchmark", "--spec", p("nope.json"), "--out", p("rows.csv")}).code == 2);
}
