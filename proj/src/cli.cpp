// Copyright 2026 The homotomo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "homotomo/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "homotomo/errors.hpp"
#include "homotomo/estimators.hpp"
#include "homotomo/kernels.hpp"
#include "homotomo/measurement.hpp"
#include "homotomo/metrics.hpp"
#include "homotomo/states.hpp"

namespace homotomo::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void write_text(const fs::path &path, const std::string &text) {
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
        throw DataError("cannot write " + path.string());
    }
    f << text;
    if (!f) {
        throw DataError("failed writing " + path.string());
    }
}

void write_json(const fs::path &path, const json &j) {
    write_text(path, j.dump(2) + "\n");
}

fs::path config_path(const fs::path &out) {
    return fs::path(out.string() + ".config.json");
}

struct Global {
    std::string pattern_cache;
    std::string isa = "auto";
};

json global_json(const Global &g) {
    return {{"pattern_cache", g.pattern_cache.empty() ? json() : json(g.pattern_cache)}, {"isa", g.isa}};
}

void write_config(const fs::path &out, const std::string &command, json args, const Global &g) {
    write_json(config_path(out), {{"command", command}, {"args", std::move(args)}, {"global", global_json(g)},
                                  {"format", "homotomo-config/1"}});
}

void apply_global(const Global &g) {
    if (!g.pattern_cache.empty()) {
        set_pattern_cache_path(g.pattern_cache);
    }
    if (g.isa == "scalar") {
        kernels::set_active_isa(kernels::Isa::scalar);
    } else if (g.isa == "avx2") {
        kernels::set_active_isa(kernels::Isa::avx2);
    } else if (g.isa != "auto") {
        throw UsageError("--isa must be auto, scalar or avx2");
    }
}

json parse_json_file(const fs::path &path) {
    std::ifstream f(path);
    if (!f) {
        throw DataError("cannot read " + path.string());
    }
    try {
        return json::parse(f);
    } catch (const json::parse_error &e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

/// A state argument: path to a state or report JSON file, or a state spec string.
HermitianMatrix load_matrix(const std::string &arg) {
    if (fs::is_regular_file(arg)) {
        json j = parse_json_file(arg);
        if (j.is_object() && j.contains("estimate")) {
            return hermitian_from_json(j["estimate"]);
        }
        return hermitian_from_json(j);
    }
    return make_state(StateSpec::parse(arg)).rho.hermitian();
}

DensityMatrix load_state(const std::string &arg) {
    if (fs::is_regular_file(arg)) {
        return density_from_json(parse_json_file(arg));
    }
    return make_state(StateSpec::parse(arg)).rho;
}

StateSpec spec_with_dim(const std::string &text, int dim) {
    StateSpec spec = StateSpec::parse(text);
    spec.dim = dim;
    return spec;
}

// simulate -----------------------------------------------------------------------------------

struct SimulateArgs {
    std::string state;
    long long n = -1;
    std::uint64_t seed = 0;
    double eta = 1.0;
    std::optional<std::uint64_t> noise_seed;
    int dim = 0;
    int workers = 1;
    std::string out;
    std::string state_out;
};

int run_simulate(const SimulateArgs &a, const Global &g, std::ostream &out) {
    if (a.n < 0) {
        throw UsageError("--n must be a non-negative integer");
    }
    if (!(a.eta > 0.0 && a.eta <= 1.0)) {
        throw UsageError("--eta must lie in (0, 1]");
    }
    if (a.workers < 1) {
        throw UsageError("--workers must be at least 1");
    }
    StateSpec spec = spec_with_dim(a.state, a.dim);
    PreparedState st = make_state(spec);
    Dataset ds = sample_homodyne(st.rho, static_cast<std::size_t>(a.n), a.seed, a.workers);
    ds.meta.source = spec.to_string();
    ds.meta.source_dim = st.rho.dim();
    if (a.eta < 1.0) {
        Dataset lossy = apply_efficiency(ds, a.eta, a.noise_seed.value_or(a.seed));
        ds = std::move(lossy);
    }
    write_dataset(ds, a.out);
    if (!a.state_out.empty()) {
        write_json(a.state_out, to_json(st.rho.hermitian()));
    }
    json args = {{"state", spec.to_string()},
                 {"dim", st.rho.dim()},
                 {"n", a.n},
                 {"seed", a.seed},
                 {"eta", a.eta},
                 {"noise_seed", a.eta < 1.0 ? json(a.noise_seed.value_or(a.seed)) : json()},
                 {"workers", a.workers},
                 {"out", a.out},
                 {"state_out", a.state_out.empty() ? json() : json(a.state_out)}};
    write_config(a.out, "simulate", args, g);
    out << "wrote " << ds.size() << " samples to " << a.out << "\n";
    return kExitOk;
}

// estimate -----------------------------------------------------------------------------------

struct EstimateArgs {
    std::string in;
    std::string method = "pattern";
    int N = 0;
    std::string rule;
    std::string truth;
    int max_iters = 2000;
    double tol = 1e-6;
    int restarts = 3;
    std::uint64_t mle_seed = 0;
    bool unsafe = false;
    bool strict = false;
    std::string out;
};

SieveConfig sieve_for(std::size_t n, Method method, int fixed_N, const std::string &rule_text) {
    if (fixed_N > 0 && !rule_text.empty()) {
        throw UsageError("--N and --rule are mutually exclusive");
    }
    if (fixed_N > 0) {
        return choose_truncation(std::max<std::size_t>(n, 1), TruncationRule::fixed, fixed_N);
    }
    TruncationRule rule = rule_text.empty()
                              ? (method == Method::pattern ? TruncationRule::pattern_rate : TruncationRule::mle_rate)
                              : parse_truncation_rule(rule_text);
    if (rule == TruncationRule::fixed) {
        throw UsageError("--rule fixed needs --N instead");
    }
    return choose_truncation(std::max<std::size_t>(n, 1), rule);
}

int run_estimate(const EstimateArgs &a, const Global &g, std::ostream &out) {
    std::vector<std::string> warnings;
    Dataset ds = read_dataset(a.in, &warnings);
    Method method = parse_method(a.method);
    if (ds.samples.empty()) {
        throw DomainError("empty dataset");
    }
    SieveConfig sieve = sieve_for(ds.size(), method, a.N, a.rule);
    MleOptions opts;
    opts.max_iters = a.max_iters;
    opts.tol = a.tol;
    opts.restarts = a.restarts;
    opts.seed = a.mle_seed;
    EstimateReport report;
    if (ds.meta.eta < 1.0) {
        report = estimate_with_efficiency(ds, sieve.N, method, opts, a.unsafe);
    } else if (method == Method::pattern) {
        report = pattern_estimate(ds, sieve.N);
    } else {
        report = sieved_mle(ds, sieve.N, opts);
    }
    report.sieve = sieve;
    if (sieve.warning) {
        report.warnings.push_back(*sieve.warning);
    }
    report.warnings.insert(report.warnings.begin(), warnings.begin(), warnings.end());
    if (!a.truth.empty()) {
        attach_truth(report, load_state(a.truth));
    }
    write_json(a.out, to_json(report));
    json args = {{"in", a.in},
                 {"method", a.method},
                 {"N", sieve.N},
                 {"rule", rule_name(sieve.rule)},
                 {"truth", a.truth.empty() ? json() : json(a.truth)},
                 {"max_iters", a.max_iters},
                 {"tol", a.tol},
                 {"restarts", a.restarts},
                 {"mle_seed", a.mle_seed},
                 {"unsafe", a.unsafe},
                 {"strict", a.strict},
                 {"out", a.out}};
    write_config(a.out, "estimate", args, g);
    for (const auto &w : report.warnings) {
        out << "warning: " << w << "\n";
    }
    out << "wrote " << method_name(method) << " estimate (N = " << sieve.N << ") to " << a.out << "\n";
    if (a.strict && report.mle && !report.mle->converged) {
        throw NumericalError("MLE did not converge (gradient norm " + std::to_string(report.mle->gradient_norm) + ")");
    }
    return kExitOk;
}

// evaluate -----------------------------------------------------------------------------------

struct EvaluateArgs {
    std::string a;
    std::string b;
    std::string out;
};

int run_evaluate(const EvaluateArgs &a, const Global &g, std::ostream &out) {
    HermitianMatrix ma = load_matrix(a.a);
    HermitianMatrix mb = load_matrix(a.b);
    QuadratureSpec spec = QuadratureSpec::for_dimension(std::max(ma.dim(), mb.dim()));
    auto physical = [](const HermitianMatrix &m) {
        ConstraintResiduals r = constraint_residuals(m);
        return r.min_eigenvalue >= -DensityMatrix::kPsdTolerance &&
               std::abs(r.trace_error) <= DensityMatrix::kTraceTolerance;
    };
    const bool pa = physical(ma), pb = physical(mb);
    HermitianMatrix da = pa ? ma : project_to_physical(ma).hermitian();
    HermitianMatrix db = pb ? mb : project_to_physical(mb).hermitian();
    QuadratureSpec q = QuadratureSpec::for_dimension(std::max(ma.dim(), mb.dim()));
    json result = {{"trace", trace_distance(ma, mb)},
                   {"hs", hs_distance(ma, mb)},
                   {"total_variation", total_variation(da, db, q)},
                   {"hellinger", hellinger(da, db, q)},
                   {"physical_a", pa},
                   {"physical_b", pb},
                   {"densities_from_projection", !(pa && pb)},
                   {"quadrature",
                    {{"x_max", q.x_max},
                     {"panels", static_cast<int>(std::ceil(2.0 * q.x_max / QuadratureSpec::kDefaultPanelWidth))},
                     {"panel_points", q.panel_points},
                     {"phi_points", q.phi_points}}}};
    write_json(a.out, result);
    write_config(a.out, "evaluate", {{"a", a.a}, {"b", a.b}, {"out", a.out}}, g);
    out << result.dump() << "\n";
    return kExitOk;
}

// sweep --------------------------------------------------------------------------------------

struct SweepArgs {
    std::string state;
    int dim = 0;
    std::vector<std::size_t> ns;
    std::vector<std::uint64_t> seeds;
    std::vector<std::string> methods = {"pattern", "mle"};
    std::string rule;
    int N = 0;
    int restarts = 3;
    int max_iters = 2000;
    int workers = 1;
    long long max_runs = -1;
    std::string out;
};

inline constexpr const char *kSweepHeader = "n,N,method,seed,trace_dist,hs_dist,hellinger";

struct Cell {
    std::size_t n;
    int N;
    Method method;
    std::uint64_t seed;

    std::string key() const {
        return std::to_string(n) + "," + std::to_string(N) + "," + std::string(method_name(method)) + "," +
               std::to_string(seed);
    }
};

std::string run_cell(const Cell &c, const DensityMatrix &truth, const SweepArgs &a) {
    Dataset ds = sample_homodyne(truth, c.n, c.seed);
    EstimateReport r;
    if (c.method == Method::pattern) {
        r = pattern_estimate(ds, c.N);
    } else {
        MleOptions o;
        o.restarts = a.restarts;
        o.max_iters = a.max_iters;
        o.seed = c.seed;
        r = sieved_mle(ds, c.N, o);
    }
    attach_truth(r, truth);
    char buf[128];
    std::snprintf(buf, sizeof buf, ",%.17g,%.17g,%.17g\n", r.distances_to_truth->trace, r.distances_to_truth->hs,
                  r.distances_to_truth->hellinger);
    return c.key() + buf;
}

/// Complete rows already on disk, keyed by their (n, N, method, seed) prefix. A trailing line
/// without a newline is dropped.
std::vector<std::string> existing_rows(const fs::path &path) {
    std::vector<std::string> rows;
    if (!fs::exists(path)) {
        return rows;
    }
    std::ifstream f(path, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    std::string text = ss.str();
    std::size_t pos = 0;
    bool header = true;
    while (true) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string::npos) {
            break;
        }
        std::string line = text.substr(pos, nl - pos);
        pos = nl + 1;
        if (header) {
            if (line != kSweepHeader) {
                throw DataError(path.string() + ": not a sweep file (unexpected header)");
            }
            header = false;
            continue;
        }
        if (std::count(line.begin(), line.end(), ',') == 6) {
            rows.push_back(line + "\n");
        }
    }
    return rows;
}

std::string row_key(const std::string &row) {
    std::size_t pos = 0;
    for (int i = 0; i < 4; ++i) {
        pos = row.find(',', pos) + 1;
    }
    return row.substr(0, pos - 1);
}

int run_sweep(const SweepArgs &a, const Global &g, std::ostream &out) {
    if (a.ns.empty() || a.seeds.empty() || a.methods.empty()) {
        throw UsageError("sweep needs non-empty --ns, --seeds and --methods");
    }
    if (a.workers < 1) {
        throw UsageError("--workers must be at least 1");
    }
    PreparedState st = make_state(spec_with_dim(a.state, a.dim));
    std::vector<Cell> cells;
    for (std::size_t n : a.ns) {
        if (n < 1) {
            throw UsageError("--ns entries must be positive");
        }
        for (const auto &m : a.methods) {
            Method method = parse_method(m);
            SieveConfig sieve = sieve_for(n, method, a.N, a.rule);
            for (std::uint64_t seed : a.seeds) {
                cells.push_back({n, sieve.N, method, seed});
            }
        }
    }

    std::vector<std::string> rows = existing_rows(a.out);
    std::map<std::string, std::string> done;
    for (const auto &r : rows) {
        done.emplace(row_key(r), r);
    }
    {
        std::string text = std::string(kSweepHeader) + "\n";
        for (const auto &r : rows) {
            text += r;
        }
        write_text(a.out, text);
    }
    std::vector<std::size_t> pending;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (!done.count(cells[i].key())) {
            pending.push_back(i);
        }
    }
    std::size_t budget = pending.size();
    if (a.max_runs >= 0) {
        budget = std::min(budget, static_cast<std::size_t>(a.max_runs));
    }

    json args = {{"state", StateSpec::parse(a.state).to_string()},
                 {"dim", st.rho.dim()},
                 {"ns", a.ns},
                 {"seeds", a.seeds},
                 {"methods", a.methods},
                 {"rule", a.rule.empty() ? json() : json(a.rule)},
                 {"N", a.N > 0 ? json(a.N) : json()},
                 {"restarts", a.restarts},
                 {"max_iters", a.max_iters},
                 {"out", a.out}};
    write_config(a.out, "sweep", args, g);

    std::vector<std::optional<std::string>> results(budget);
    std::vector<std::string> failures(budget);
    std::mutex mu;
    std::condition_variable cv;
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        while (true) {
            std::size_t k = next.fetch_add(1);
            if (k >= budget) {
                return;
            }
            std::string row, failure;
            try {
                row = run_cell(cells[pending[k]], st.rho, a);
            } catch (const std::exception &e) {
                failure = e.what();
            }
            std::lock_guard<std::mutex> lock(mu);
            if (failure.empty()) {
                results[k] = std::move(row);
            } else {
                failures[k] = failure;
                results[k] = std::string();
            }
            cv.notify_all();
        }
    };
    std::vector<std::thread> pool;
    const int threads = std::min<int>(a.workers, static_cast<int>(std::max<std::size_t>(budget, 1)));
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back(worker);
    }
    std::ofstream f(a.out, std::ios::binary | std::ios::app);
    std::string first_failure;
    for (std::size_t k = 0; k < budget; ++k) {
        std::unique_lock<std::mutex> lock(mu);
        cv.wait(lock, [&] { return results[k].has_value(); });
        if (!failures[k].empty()) {
            if (first_failure.empty()) {
                first_failure = cells[pending[k]].key() + ": " + failures[k];
            }
            continue;
        }
        if (first_failure.empty()) {
            f << *results[k];
            f.flush();
        }
    }
    for (auto &t : pool) {
        t.join();
    }
    if (!first_failure.empty()) {
        throw NumericalError("sweep cell failed: " + first_failure);
    }
    std::size_t remaining = pending.size() - budget;
    out << "sweep: " << cells.size() << " cells, " << (cells.size() - pending.size()) << " already present, "
        << budget << " computed";
    if (remaining > 0) {
        out << ", " << remaining << " left for a later run";
    }
    out << "\n";
    return kExitOk;
}

// pattern-table ------------------------------------------------------------------------------

struct PatternTableArgs {
    int max_index = 64;
    std::vector<int> triangle = {8, 16, 32, 64};
    std::string out;
};

int run_pattern_table(const PatternTableArgs &a, const Global &g, std::ostream &out) {
    if (a.max_index < 0) {
        throw UsageError("--max-index must be non-negative");
    }
    for (int n : a.triangle) {
        if (n < 1 || n > a.max_index + 1) {
            throw UsageError("--triangle entries must lie in [1, max-index + 1]");
        }
    }
    const PatternFunctionTable &table = shared_pattern_table(a.max_index);
    json sups = json::array();
    for (int j = 0; j <= a.max_index; ++j) {
        for (int k = 0; k <= j; ++k) {
            sups.push_back({{"k", k}, {"j", j}, {"sup", table.sup_norm(k, j)}});
        }
    }
    json tri = json::array();
    out << "N,triangle_sum\n";
    for (int n : a.triangle) {
        double s = table.triangle_sum(n);
        tri.push_back({{"N", n}, {"sum", s}});
        char buf[64];
        std::snprintf(buf, sizeof buf, "%d,%.17g\n", n, s);
        out << buf;
    }
    if (!a.out.empty()) {
        json j = {{"max_index", a.max_index},
                  {"grid", {{"x_max", table.grid_spec().x_max},
                            {"uniform_cells", table.grid_spec().uniform_cells},
                            {"refine_factor", table.grid_spec().refine_factor}}},
                  {"sup_norms", sups},
                  {"triangle_sums", tri}};
        write_json(a.out, j);
        write_config(a.out, "pattern-table", {{"max_index", a.max_index}, {"triangle", a.triangle}, {"out", a.out}},
                     g);
    }
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app{"homotomo: homodyne quantum state tomography", "homotomo"};
    app.require_subcommand(1);
    app.fallthrough();
    Global g;
    if (const char *env = std::getenv("HOMOTOMO_PATTERN_CACHE"); env != nullptr) {
        g.pattern_cache = env;
    }
    app.add_option("--pattern-cache", g.pattern_cache, "pattern table cache directory (default $HOMOTOMO_PATTERN_CACHE)");
    app.add_option("--isa", g.isa, "kernel instruction set: auto, scalar or avx2");

    SimulateArgs sim;
    auto *simulate = app.add_subcommand("simulate", "sample homodyne data from a state");
    simulate->add_option("--state", sim.state, "state spec, e.g. coherent:1.0")->required();
    simulate->add_option("--n", sim.n, "number of samples")->required();
    simulate->add_option("--seed", sim.seed, "sampler seed")->required();
    simulate->add_option("--eta", sim.eta, "detection efficiency in (0, 1]");
    simulate->add_option("--noise-seed", sim.noise_seed, "seed of the detector noise (default: --seed)");
    simulate->add_option("--dim", sim.dim, "Fock truncation (0 = automatic)");
    simulate->add_option("--workers", sim.workers, "sampling threads");
    simulate->add_option("--state-out", sim.state_out, "also write the truncated state as JSON");
    simulate->add_option("--out", sim.out, "dataset CSV")->required();

    EstimateArgs est;
    auto *estimate = app.add_subcommand("estimate", "reconstruct a density matrix from a dataset");
    estimate->add_option("--in", est.in, "dataset CSV")->required();
    estimate->add_option("--method", est.method, "pattern or mle")->check(CLI::IsMember({"pattern", "mle"}));
    estimate->add_option("--N", est.N, "fixed truncation dimension")->check(CLI::PositiveNumber);
    estimate->add_option("--rule", est.rule, "pattern_rate or mle_rate")
        ->check(CLI::IsMember({"pattern_rate", "mle_rate"}));
    estimate->add_option("--truth", est.truth, "state JSON or spec for distances");
    estimate->add_option("--max-iters", est.max_iters, "MLE iteration cap per restart");
    estimate->add_option("--tol", est.tol, "MLE gradient tolerance");
    estimate->add_option("--restarts", est.restarts, "MLE restarts");
    estimate->add_option("--mle-seed", est.mle_seed, "seed of random MLE starts");
    estimate->add_flag("--unsafe", est.unsafe, "allow the divergent inverse Bernoulli series (eta <= 1/2)");
    estimate->add_flag("--strict", est.strict, "exit 3 when the MLE does not converge");
    estimate->add_option("--out", est.out, "report JSON")->required();

    EvaluateArgs ev;
    auto *evaluate = app.add_subcommand("evaluate", "distances between two states");
    evaluate->add_option("--a", ev.a, "state or report JSON, or state spec")->required();
    evaluate->add_option("--b", ev.b, "state or report JSON, or state spec")->required();
    evaluate->add_option("--out", ev.out, "metrics JSON")->required();

    SweepArgs sw;
    auto *sweep = app.add_subcommand("sweep", "resumable grid of simulate/estimate/evaluate runs");
    sweep->add_option("--state", sw.state, "truth state spec")->required();
    sweep->add_option("--dim", sw.dim, "Fock truncation of the truth (0 = automatic)");
    sweep->add_option("--ns", sw.ns, "sample sizes, comma separated")->delimiter(',')->required();
    sweep->add_option("--seeds", sw.seeds, "seeds, comma separated")->delimiter(',')->required();
    sweep->add_option("--methods", sw.methods, "methods, comma separated")
        ->delimiter(',')
        ->check(CLI::IsMember({"pattern", "mle"}));
    sweep->add_option("--rule", sw.rule, "pattern_rate or mle_rate (default per method)")
        ->check(CLI::IsMember({"pattern_rate", "mle_rate"}));
    sweep->add_option("--N", sw.N, "fixed truncation dimension")->check(CLI::PositiveNumber);
    sweep->add_option("--restarts", sw.restarts, "MLE restarts");
    sweep->add_option("--max-iters", sw.max_iters, "MLE iteration cap per restart");
    sweep->add_option("--workers", sw.workers, "worker threads");
    sweep->add_option("--max-runs", sw.max_runs, "stop after this many new runs");
    sweep->add_option("--out", sw.out, "results CSV")->required();

    PatternTableArgs pt;
    auto *pattern = app.add_subcommand("pattern-table", "sup norms and triangle sums of the pattern functions");
    pattern->add_option("--max-index", pt.max_index, "largest tabulated index");
    pattern->add_option("--triangle", pt.triangle, "N values for triangle sums")->delimiter(',');
    pattern->add_option("--out", pt.out, "JSON output");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp &e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError &e) {
        app.exit(e, out, err);
        return kExitUsage;
    }

    try {
        apply_global(g);
        if (*simulate) {
            return run_simulate(sim, g, out);
        }
        if (*estimate) {
            return run_estimate(est, g, out);
        }
        if (*evaluate) {
            return run_evaluate(ev, g, out);
        }
        if (*sweep) {
            return run_sweep(sw, g, out);
        }
        if (*pattern) {
            return run_pattern_table(pt, g, out);
        }
    } catch (const UsageError &e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DomainError &e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DataError &e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const NumericalError &e) {
        err << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitUsage;
}

}  // namespace homotomo::cli
