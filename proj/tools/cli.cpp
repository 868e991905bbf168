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

#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <regex>

#include <CLI11.hpp>

#include "qpt/bench.hpp"
#include "qpt/cv_ensemble.hpp"
#include "qpt/dataset.hpp"
#include "qpt/dv_ensemble.hpp"
#include "qpt/gd.hpp"
#include "qpt/pls.hpp"
#include "qpt/reconstruction.hpp"

namespace qpt::cli {

namespace {

class UsageError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12f", v);
    return buf;
}

std::uint64_t effective_seed(std::uint64_t flag) {
    const char* env = std::getenv("QPT_SEED");
    if (env == nullptr || *env == '\0') {
        return flag;
    }
    try {
        std::size_t used = 0;
        const std::string text(env);
        const unsigned long long v = std::stoull(text, &used);
        if (used != text.size()) {
            throw std::invalid_argument("trailing characters");
        }
        return v;
    } catch (const std::exception&) {
        throw UsageError(std::string("QPT_SEED is not an unsigned integer: '") + env + "'");
    }
}

// "ROWSxCOLS@HALFWIDTH", e.g. "10x10@2.5" for a square grid over
// [-2.5, 2.5] x [-2.5, 2.5].
CvGrid parse_grid(const std::string& text) {
    static const std::regex pattern(R"((\d+)x(\d+)@([0-9]*\.?[0-9]+(?:[eE][-+]?\d+)?))");
    std::smatch m;
    if (!std::regex_match(text, m, pattern)) {
        throw UsageError("grid must look like ROWSxCOLS@HALFWIDTH, got '" + text + "'");
    }
    CvGrid g;
    g.rows = std::stoi(m[1]);
    g.cols = std::stoi(m[2]);
    const double half = std::stod(m[3]);
    if (g.rows < 1 || g.cols < 1 || !(half > 0.0)) {
        throw UsageError("grid needs positive sizes and half-width: '" + text + "'");
    }
    g.re_min = g.im_min = -half;
    g.re_max = g.im_max = half;
    return g;
}

struct SynthArgs {
    std::string kind;
    std::string out;
    std::string csv;
    std::uint64_t seed = 0;
    double noise = 0.0;
    double gamma = 1.0;
    bool embed = false;
    int qubits = 2;
    int rank = 1;
    int dim = kDefaultFockCutoff;
    std::string process = "snap-displace";
    double alpha = kDefaultSnapAlpha;
    std::vector<double> theta = default_snap_phases();
    std::string probe_grid = "10x10@2.5";
    std::string meas_grid = "10x10@3";
};

struct ReconstructArgs {
    std::string method;
    std::string data;
    std::string out;
    int kraus = 1;
    double lr = GdConfig{}.eta0;
    double decay = GdConfig{}.decay;
    double l1 = GdConfig{}.lambda;
    int iters = GdConfig{}.max_iters;
    std::size_t batch = 0;
    std::uint64_t seed = 0;
    int plateau_window = GdConfig{}.plateau_window;
    double plateau_tol = GdConfig{}.plateau_tol;
    std::string solver = "pseudo-inverse";
    int dykstra_iters = PlsConfig{}.dykstra_max_iters;
    double dykstra_tol = PlsConfig{}.dykstra_tol;
    std::string parity_csv;
    int fine_grid = 32;
    std::size_t probe_index = 0;
};

struct FidelityArgs {
    std::string a;
    std::string b;
};

struct BenchmarkArgs {
    std::string spec;
    std::string out;
    std::string summary;
    int jobs = 0;
};

int cmd_synth(const SynthArgs& a, const CLI::App& sub, std::ostream& out) {
    const bool dv = a.kind == "dv";
    const char* dv_only[] = {"--qubits", "--rank"};
    const char* cv_only[] = {"--dim", "--process", "--alpha", "--theta", "--probe-grid", "--meas-grid"};
    for (const char* flag : dv ? std::vector<const char*>(std::begin(cv_only), std::end(cv_only))
                               : std::vector<const char*>(std::begin(dv_only), std::end(dv_only))) {
        if (sub.count(flag) > 0) {
            throw UsageError(std::string(flag) + " is not valid with --kind " + a.kind);
        }
    }
    Rng rng(effective_seed(a.seed));
    Rng process_rng = rng.split();
    Rng noise_rng = rng.split();
    Rng subsample_rng = rng.split();

    KrausStack process;
    OperatorSet probes;
    OperatorSet meas;
    if (dv) {
        if (a.qubits < 1 || a.qubits > kMaxPauliQubits) {
            throw UsageError("--qubits must lie in [1, 5]");
        }
        const int max_rank = 1 << (2 * a.qubits);
        if (a.rank < 1 || a.rank > max_rank) {
            throw UsageError("--rank must lie in [1, 4^n]");
        }
        process = random_process(Eigen::Index{1} << a.qubits, a.rank, process_rng);
        probes = OperatorSet::pauli(a.qubits);
        meas = OperatorSet::pauli(a.qubits);
    } else {
        if (a.process != "snap-displace") {
            throw UsageError("unknown CV process '" + a.process + "'");
        }
        if (a.dim < 2) {
            throw UsageError("--dim must be >= 2");
        }
        process = snap_displace_process(a.alpha, a.theta, a.dim);
        probes = OperatorSet::coherent(parse_grid(a.probe_grid), a.dim);
        meas = OperatorSet::displaced_parity(parse_grid(a.meas_grid), a.dim);
    }
    if (!(a.noise >= 0.0)) {
        throw UsageError("--noise must be >= 0");
    }
    if (!(a.gamma > 0.0 && a.gamma <= 1.0)) {
        throw UsageError("--gamma must lie in (0, 1]");
    }
    probes.embed = a.embed;
    meas.embed = a.embed;
    Tomogram t = synthesize(process, std::move(probes), std::move(meas), a.noise, noise_rng);
    t.seed = effective_seed(a.seed);
    if (a.gamma < 1.0) {
        t = subsample(t, a.gamma, subsample_rng);
    }
    save_tomogram(t, a.out);
    if (!a.csv.empty()) {
        export_csv(t, a.csv);
    }
    out << "wrote " << a.out << " (" << t.data.rows() << " x " << t.data.cols() << " entries)\n";
    return kOk;
}

void write_parity_csv(const ReconstructArgs& a, const Tomogram& t, const ChoiMatrix& choi) {
    if (t.kind != TomogramKind::kCv) {
        throw UsageError("--parity-csv needs a CV tomogram");
    }
    if (a.fine_grid < 1) {
        throw UsageError("--fine-grid must be >= 1");
    }
    if (a.probe_index >= t.probes.size()) {
        throw UsageError("--probe-index out of range");
    }
    const DensityMatrix sigma = choi_apply(choi, DensityMatrix(t.probes.matrices[a.probe_index]));
    CvGrid fine = t.measurements.grid;
    fine.rows = fine.cols = a.fine_grid;
    std::ofstream csv(a.parity_csv);
    if (!csv) {
        throw FormatError("cannot write " + a.parity_csv);
    }
    csv << "beta_re,beta_im,value\n";
    char line[128];
    for (const Complex beta : fine.points()) {
        const double v = (displaced_parity(beta, static_cast<int>(t.dim)) * sigma.matrix()).trace().real();
        std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g\n", beta.real(), beta.imag(), v);
        csv << line;
    }
}

int cmd_reconstruct(const ReconstructArgs& a, std::ostream& out) {
    const Tomogram t = load_tomogram(a.data);
    std::optional<ChoiMatrix> truth;
    if (t.truth) {
        truth = kraus_to_choi(*t.truth);
    }
    json_io::Json result;
    ChoiMatrix estimate;
    std::optional<double> fidelity;
    if (a.method == "gd") {
        GdConfig cfg;
        cfg.kraus = a.kraus;
        cfg.eta0 = a.lr;
        cfg.decay = a.decay;
        cfg.lambda = a.l1;
        cfg.max_iters = a.iters;
        cfg.batch_size = a.batch;
        cfg.seed = effective_seed(a.seed);
        cfg.plateau_window = a.plateau_window;
        cfg.plateau_tol = a.plateau_tol;
        try {
            cfg.validate();
        } catch (const InvalidArgument& e) {
            throw UsageError(e.what());
        }
        const auto start = std::chrono::steady_clock::now();
        const FitResult fit_result = fit(t, cfg);
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        estimate = kraus_to_choi(fit_result.kraus);
        if (truth) {
            fidelity = process_fidelity(estimate, *truth).fidelity;
        }
        result = gd_reconstruction_json(fit_result, cfg, fidelity, wall);
        out << "iterations " << fit_result.trace.iterations << " (" << to_string(fit_result.trace.stop) << ")\n";
    } else {
        PlsConfig cfg;
        cfg.dykstra_max_iters = a.dykstra_iters;
        cfg.dykstra_tol = a.dykstra_tol;
        cfg.solver = ls_solver_from_string(a.solver);
        try {
            cfg.validate();
        } catch (const InvalidArgument& e) {
            throw UsageError(e.what());
        }
        if (t.dim > 8) {
            throw InvalidArgument("pls needs the dense sensing matrix, which is out of reach for dimension " +
                                  std::to_string(t.dim));
        }
        const PlsResult pls = fit_pls(t, cfg);
        estimate = pls.choi;
        if (truth) {
            fidelity = process_fidelity(estimate, *truth).fidelity;
        }
        result = pls_reconstruction_json(pls, cfg, fidelity);
        out << "converged " << (pls.converged ? "true" : "false") << " after " << pls.cycles << " cycles\n";
    }
    if (fidelity) {
        out << "fidelity " << fmt(*fidelity) << "\n";
        out << "infidelity " << fmt(1.0 - *fidelity) << "\n";
    }
    if (!a.out.empty()) {
        json_io::write_file(result, a.out);
    }
    if (!a.parity_csv.empty()) {
        write_parity_csv(a, t, estimate);
    }
    return kOk;
}

int cmd_fidelity(const FidelityArgs& a, std::ostream& out) {
    const ChoiMatrix x = load_choi(a.a);
    const ChoiMatrix y = load_choi(a.b);
    if (x.dim() != y.dim()) {
        throw DimensionError("the two processes act on different dimensions");
    }
    const double f = process_fidelity(x, y).fidelity;
    out << "fidelity " << fmt(f) << "\n";
    out << "infidelity " << fmt(1.0 - f) << "\n";
    return kOk;
}

int cmd_benchmark(const BenchmarkArgs& a, std::ostream& out) {
    SweepSpec spec = load_sweep_spec(a.spec);
    if (a.jobs > 0) {
        spec.jobs = a.jobs;
    }
    const std::vector<BenchRow> rows = run_sweep(spec);
    write_csv(rows, a.out);
    const std::string summary = a.summary.empty() ? a.out + ".summary.json" : a.summary;
    json_io::write_file(summary_json(spec, rows), summary);
    std::size_t failures = 0;
    for (const auto& r : rows) {
        failures += r.error.empty() ? 0 : 1;
    }
    out << "wrote " << rows.size() << " rows to " << a.out << " (" << failures << " failed), summary " << summary
        << "\n";
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Quantum process tomography toolkit", "qpt"};
    app.require_subcommand(1);

    SynthArgs synth;
    CLI::App* s = app.add_subcommand("synth", "Synthesize a tomogram dataset");
    s->add_option("--kind", synth.kind, "dv or cv")->required()->check(CLI::IsMember({"dv", "cv"}));
    s->add_option("--out", synth.out, "Output tomogram JSON")->required();
    s->add_option("--seed", synth.seed, "Random seed (QPT_SEED overrides)");
    s->add_option("--noise", synth.noise, "Gaussian noise standard deviation");
    s->add_option("--gamma", synth.gamma, "Fraction of data retained");
    s->add_flag("--embed", synth.embed, "Embed operator matrices in the file");
    s->add_option("--csv", synth.csv, "Also export the data as CSV");
    s->add_option("--qubits", synth.qubits, "Number of qubits (dv)");
    s->add_option("--rank", synth.rank, "Kraus rank of the random process (dv)");
    s->add_option("--dim", synth.dim, "Fock cutoff (cv)");
    s->add_option("--process", synth.process, "CV process (snap-displace)");
    s->add_option("--alpha", synth.alpha, "Displacement amplitude (cv)");
    s->add_option("--theta", synth.theta, "SNAP phases (cv)")->delimiter(',');
    s->add_option("--probe-grid", synth.probe_grid, "Probe grid ROWSxCOLS@HALFWIDTH (cv)");
    s->add_option("--meas-grid", synth.meas_grid, "Measurement grid ROWSxCOLS@HALFWIDTH (cv)");

    ReconstructArgs rec;
    CLI::App* r = app.add_subcommand("reconstruct", "Reconstruct a process from a tomogram");
    r->add_option("--method", rec.method, "gd or pls")->required()->check(CLI::IsMember({"gd", "pls"}));
    r->add_option("--data", rec.data, "Tomogram JSON")->required();
    r->add_option("--out", rec.out, "Reconstruction JSON");
    r->add_option("--kraus", rec.kraus, "Number of Kraus operators (gd)");
    r->add_option("--lr", rec.lr, "Initial step size (gd)");
    r->add_option("--decay", rec.decay, "Step-size decay per iteration (gd)");
    r->add_option("--l1", rec.l1, "L1 regularisation weight (gd)");
    r->add_option("--iters", rec.iters, "Maximum iterations (gd)");
    r->add_option("--batch", rec.batch, "Batch size, 0 for full batch (gd)");
    r->add_option("--seed", rec.seed, "Initialisation and batch seed (gd; QPT_SEED overrides)");
    r->add_option("--plateau-window", rec.plateau_window, "Iterations between plateau checks, 0 disables (gd)");
    r->add_option("--plateau-tol", rec.plateau_tol, "Relative full-batch loss change counted as plateau (gd)");
    r->add_option("--solver", rec.solver, "Least-squares solver (pls)")
        ->check(CLI::IsMember({"pseudo-inverse", "normal-equations"}));
    r->add_option("--dykstra-iters", rec.dykstra_iters, "Maximum projection cycles (pls)");
    r->add_option("--dykstra-tol", rec.dykstra_tol, "Projection convergence tolerance (pls)");
    r->add_option("--parity-csv", rec.parity_csv, "Write the displaced-parity map of one reconstructed output (cv)");
    r->add_option("--fine-grid", rec.fine_grid, "Points per axis of the parity map");
    r->add_option("--probe-index", rec.probe_index, "Probe whose output is mapped");

    FidelityArgs fid;
    CLI::App* f = app.add_subcommand("fidelity", "Process fidelity between two files");
    f->add_option("first", fid.a, "Tomogram or reconstruction JSON")->required();
    f->add_option("second", fid.b, "Tomogram or reconstruction JSON")->required();

    BenchmarkArgs bench;
    CLI::App* b = app.add_subcommand("benchmark", "Run a sweep described by a JSON spec");
    b->add_option("--spec", bench.spec, "Sweep spec JSON")->required();
    b->add_option("--out", bench.out, "Row CSV")->required();
    b->add_option("--summary", bench.summary, "Summary JSON (default: <out>.summary.json)");
    b->add_option("--jobs", bench.jobs, "Concurrent sweep cells (overrides the spec)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        if (code == 0) {
            return kOk;
        }
        const CLI::App* failing = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
        err << failing->help();
        return kUsage;
    }

    CLI::App* active = app.get_subcommands().front();
    try {
        if (active == s) return cmd_synth(synth, *s, out);
        if (active == r) return cmd_reconstruct(rec, out);
        if (active == f) return cmd_fidelity(fid, out);
        return cmd_benchmark(bench, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n" << active->help();
        return kUsage;
    } catch (const IncompleteDataError& e) {
        err << "error: " << e.what() << "\n";
        return kIncompatible;
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << "\n";
        return kIncompatible;
    } catch (const DimensionError& e) {
        err << "error: " << e.what() << "\n";
        return kIncompatible;
    } catch (const NumericalError& e) {
        err << "error: " << e.what() << "\n";
        return kNumerical;
    } catch (const FormatError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kNumerical;
    }
}

}  // namespace qpt::cli
