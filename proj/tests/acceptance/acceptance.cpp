#include <app.hpp>
#include <liesym/errors.hpp>
#include <liesym/parallel.hpp>
#include <liesym/random.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using namespace liesym;
using namespace liesym::app;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool passed = false;
    std::string detail;
};

struct TraceRow {
    std::size_t step = 0;
    double mse = 0.0;
    double objective = 0.0;
    bool refined = false;
    double mse_after_refine = 0.0;
    double objective_after_refine = 0.0;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, sep)) out.push_back(cell);
    return out;
}

// Reads trace.csv; row 0 holds the empty-model state.
std::vector<TraceRow> read_trace(const fs::path& p) {
    std::istringstream in(slurp(p));
    std::string line;
    std::getline(in, line);
    const auto header = split(line, ',');
    auto col = [&](const std::string& name) {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw std::runtime_error("trace.csv lacks column " + name);
        return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t c_step = col("step"), c_mse = col("mse"), c_obj = col("objective"),
                      c_ref = col("refined"), c_mar = col("mse_after_refine"),
                      c_oar = col("objective_after_refine");
    std::vector<TraceRow> rows;
    while (std::getline(in, line)) {
        const auto cells = split(line, ',');
        TraceRow r;
        r.step = std::stoul(cells[c_step]);
        r.mse = std::stod(cells[c_mse]);
        r.objective = std::stod(cells[c_obj]);
        r.refined = cells[c_ref] == "1" || cells[c_ref] == "true";
        if (r.refined) {
            r.mse_after_refine = std::stod(cells[c_mar]);
            r.objective_after_refine = std::stod(cells[c_oar]);
        }
        rows.push_back(r);
    }
    return rows;
}

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

void report(int id, const Outcome& o, std::vector<int>& failed) {
    std::cout << "criterion " << id << ": " << (o.passed ? "PASS" : "FAIL") << "  " << o.detail
              << std::endl;
    if (!o.passed) failed.push_back(id);
}

const RunReport& find_row(const BenchResult& res, const std::string& name) {
    for (const auto& r : res.rows) {
        if (r.name == name) return r;
    }
    throw std::runtime_error("bench produced no row for " + name);
}

std::string summary(const RunReport& r) {
    std::string s = r.name + " mse=" + sci(r.mse) + " terms=" + std::to_string(r.n_base_terms);
    if (r.l2re) s += " l2re=" + sci(*r.l2re);
    s += " runtime=" + sci(r.runtime_seconds) + "s";
    return s;
}

// Smallest pooled MSE the trace reached with at most max_terms bases.
double best_mse_within(const std::vector<TraceRow>& trace, std::size_t max_terms) {
    double best = trace.front().mse;
    for (const auto& r : trace) {
        if (r.step == 0 || r.step > max_terms) continue;
        best = std::min(best, r.mse);
        if (r.refined) best = std::min(best, r.mse_after_refine);
    }
    return best;
}

// Decades of MSE gained in each block of ten additions, the raw material for
// judging the fast-drop / stall / resumed-progress shape by eye.
std::string regime_shape(const std::vector<TraceRow>& trace) {
    std::vector<double> mse{trace.front().mse};
    for (const auto& r : trace) {
        if (r.step > 0) mse.push_back(r.refined ? r.mse_after_refine : r.mse);
    }
    std::string out = "decades per 10 additions:";
    for (std::size_t i = 0; i + 1 < mse.size(); i += 10) {
        const std::size_t j = std::min(i + 10, mse.size() - 1);
        out += " " + sci(std::log10(mse[i] / mse[j]));
    }
    return out;
}

struct Planted {
    std::string label;
    double mse = 0.0;
    std::size_t terms = 0;
    double stationarity = 0.0;
    bool monotone = true;
};

// Targets from a random three-term model; the solver sees only the rows.
Planted planted_case(PdeKind pde, std::uint64_t seed, std::size_t total) {
    const Domain domain = Domain::default_for(pde);
    const Catalog catalog = default_catalog(pde, domain);
    Rng rng(seed);
    Model truth;
    truth.pde = pde;
    truth.domain = domain;
    for (int k = 0; k < 3; ++k) {
        const auto& fam = catalog[rng.next() % catalog.size()];
        truth.terms.push_back({fam, sample_params(*fam, 1, rng).front()});
        const double mag = rng.uniform(0.5, 1.5);
        truth.amplitudes.push_back(rng.uniform01() < 0.5 ? -mag : mag);
    }
    const IcProfile profile = IcProfile::defaults(ProfileKind::Sine);
    const IbvpProblem problem = build_problem(pde, profile, domain);
    TrainingSet rows = sample_training_set(problem, total, default_allocation(problem), seed);
    const Matrix F = design_matrix(truth, rows);
    const Vector a = Eigen::Map<const Vector>(truth.amplitudes.data(), 3);
    const Vector y = F * a;
    rows.targets.assign(y.data(), y.data() + y.size());

    SolverConfig cfg;
    cfg.seed = seed;
    cfg.mse_tol = 1e-10;
    cfg.max_terms = 15;
    cfg.ridge_lambda = 1e-10;
    const FitResult fit_result = fit(rows, catalog, cfg, pde, domain);

    Planted out;
    out.label = std::string(to_string(pde)) + " seed " + std::to_string(seed);
    for (std::size_t k = 0; k < 3; ++k) {
        out.label += k ? "+" : " [";
        out.label += truth.terms[k].family->id;
    }
    out.label += "]";
    out.mse = fit_result.mse;
    out.terms = fit_result.model.size();
    const Matrix G = design_matrix(fit_result.model, rows);
    const Vector b = Eigen::Map<const Vector>(fit_result.model.amplitudes.data(),
                                              static_cast<Eigen::Index>(fit_result.model.size()));
    out.stationarity = stationarity_ratio(G, y, b, cfg.ridge_lambda);
    double prev = fit_result.trace.initial_objective;
    for (const auto& r : fit_result.trace.records) {
        if (r.objective > prev * (1 + 1e-12)) out.monotone = false;
        if (r.refined && r.mse_after_refine > r.mse * (1 + 1e-12)) out.monotone = false;
        prev = r.refined ? r.objective_after_refine : r.objective;
    }
    return out;
}

std::vector<fs::path> csv_files(const fs::path& root) {
    std::vector<fs::path> out;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (e.is_regular_file() && e.path().extension() == ".csv") {
            out.push_back(fs::relative(e.path(), root));
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 3) {
        std::cerr << "usage: liesym_acceptance <suite.json> <work-dir> [--known-failure N]...\n";
        return 2;
    }
    const fs::path suite_path = argv[1];
    const fs::path work = argv[2];
    std::vector<int> known;
    for (int i = 3; i + 1 < argc; i += 2) {
        if (std::string(argv[i]) != "--known-failure") {
            std::cerr << "unknown option " << argv[i] << "\n";
            return 2;
        }
        known.push_back(std::stoi(argv[i + 1]));
    }
    if (const char* env = std::getenv("LIESYM_THREADS")) set_thread_count(std::stoul(env));
    fs::remove_all(work);
    fs::create_directories(work);

    using clock = std::chrono::steady_clock;
    auto seconds_since = [](clock::time_point t0) {
        return std::chrono::duration<double>(clock::now() - t0).count();
    };

    const BenchSuite suite = load_bench_suite(suite_path);
    std::cerr << "bench run A\n";
    const BenchResult run_a = run_bench(suite, work / "run_a", std::nullopt, std::cerr);
    std::cerr << "bench run B\n";
    const BenchResult run_b = run_bench(suite, work / "run_b", std::nullopt, std::cerr);

    std::cerr << "verify suite\n";
    const auto t_verify = clock::now();
    const auto checks = run_verify(VerifyOptions{});
    const double verify_seconds = seconds_since(t_verify);

    std::cerr << "planted oracles\n";
    std::vector<Planted> planted;
    for (PdeKind pde : {PdeKind::Heat, PdeKind::Wave}) {
        for (std::uint64_t seed : {1, 2, 3}) planted.push_back(planted_case(pde, seed, 3000));
    }

    std::vector<int> failures;
    std::map<std::string, std::vector<TraceRow>> traces;
    for (const auto& r : run_a.rows) traces[r.name] = read_trace(work / "run_a" / r.name / "trace.csv");

    {
        const auto& r = find_row(run_a, "heat_sine");
        report(1, {r.mse <= 1e-6 && r.n_base_terms <= 10 && r.runtime_seconds <= 60.0, summary(r)},
               failures);
    }
    {
        const auto& r = find_row(run_a, "wave_sine");
        const bool ok = r.mse <= 1e-6 && r.n_base_terms <= 10 && r.l2re && *r.l2re <= 2e-3;
        report(2, {ok, summary(r)}, failures);
    }
    {
        const auto& r = find_row(run_a, "heat_gaussian");
        const double mse25 = best_mse_within(traces.at(r.name), 25);
        const bool ok = mse25 <= 5e-6 && r.l2re && *r.l2re <= 1e-2;
        report(3, {ok, summary(r) + " mse_at_25_terms=" + sci(mse25)}, failures);
    }
    {
        const auto& r = find_row(run_a, "heat_step");
        const bool ok = r.mse <= 1e-4 && r.n_base_terms <= 80 && r.l2re && *r.l2re <= 2e-2;
        report(4, {ok, summary(r) + "; regimes: " + regime_shape(traces.at(r.name))}, failures);
    }
    {
        bool ok = verify_seconds <= 30.0;
        std::size_t failed_checks = 0;
        std::string first_failure;
        for (const auto& c : checks) {
            if (!c.passed) {
                ++failed_checks;
                if (first_failure.empty()) first_failure = c.name + " (" + c.detail + ")";
            }
        }
        ok = ok && failed_checks == 0;
        double worst_model = 0.0;
        std::string worst_name;
        for (const auto& r : run_a.rows) {
            const Model m = model_from_json(slurp(work / "run_a" / r.name / "model.json"));
            const auto grid = interior_grid(m.domain, 50, 50);
            const double res = pde_residual(
                m.pde,
                [&](double x, double t) {
                    double v = 0.0;
                    for (std::size_t k = 0; k < m.size(); ++k) {
                        v += m.amplitudes[k] * eval_chain_value(m.terms[k].chain(), x, t);
                    }
                    return v;
                },
                grid, FdOptions::high_order(m.pde));
            if (!(res <= worst_model)) {
                worst_model = res;
                worst_name = r.name;
            }
        }
        ok = ok && worst_model < 1e-5;
        std::string detail = std::to_string(checks.size() - failed_checks) + "/" +
                             std::to_string(checks.size()) + " checks in " + sci(verify_seconds) +
                             "s; worst model residual " + sci(worst_model) + " (" + worst_name + ")";
        if (!first_failure.empty()) detail += "; first failure " + first_failure;
        report(5, {ok, detail}, failures);
    }
    {
        double worst = 0.0;
        std::string where;
        for (const auto& r : run_a.rows) {
            if (!(r.stationarity <= worst)) {
                worst = r.stationarity;
                where = r.name;
            }
        }
        for (const auto& p : planted) {
            if (!(p.stationarity <= worst)) {
                worst = p.stationarity;
                where = p.label;
            }
        }
        report(6, {worst < 1e-8, "max ratio " + sci(worst) + " (" + where + ")"}, failures);
    }
    {
        std::vector<std::string> broken;
        std::size_t additions = 0, refinements = 0;
        for (const auto& [name, trace] : traces) {
            double prev = trace.front().objective;
            bool ok = true;
            for (std::size_t i = 1; i < trace.size(); ++i) {
                const auto& r = trace[i];
                ++additions;
                if (r.objective > prev * (1 + 1e-12)) ok = false;
                prev = r.objective;
                if (r.refined) {
                    ++refinements;
                    if (r.mse_after_refine > r.mse * (1 + 1e-12)) ok = false;
                    prev = r.objective_after_refine;
                }
            }
            if (!ok) broken.push_back(name);
        }
        for (const auto& p : planted) {
            if (!p.monotone) broken.push_back(p.label);
        }
        std::string detail = std::to_string(additions) + " additions, " + std::to_string(refinements) +
                             " refinements checked";
        for (const auto& b : broken) detail += "; violated in " + b;
        report(7, {broken.empty(), detail}, failures);
    }
    {
        bool ok = true;
        std::string detail;
        std::size_t heat_runs = 0;
        for (const auto& r : run_a.rows) {
            if (r.pde != PdeKind::Heat) continue;
            ++heat_runs;
            if (!r.max_principle || !r.max_principle->holds) ok = false;
            if (r.max_principle) {
                detail += r.name + " " + sci(r.max_principle->grid_error) + "<=" +
                          sci(r.max_principle->ibc_error) + "+5e-3*" + sci(r.max_principle->ref_scale) +
                          (r.max_principle->holds ? "; " : " (violated); ");
            }
        }
        report(8, {ok && heat_runs > 0, detail}, failures);
    }
    {
        bool ok = true;
        std::string detail;
        for (const auto& p : planted) {
            const bool case_ok = p.mse < 1e-10 && p.terms <= 15;
            ok = ok && case_ok;
            detail += p.label + " mse=" + sci(p.mse) + " terms=" + std::to_string(p.terms) + "; ";
        }
        report(9, {ok, detail}, failures);
    }
    {
        const auto files_a = csv_files(work / "run_a");
        const auto files_b = csv_files(work / "run_b");
        std::vector<std::string> differing;
        if (files_a != files_b) differing.push_back("file lists differ");
        for (const auto& f : files_a) {
            if (fs::exists(work / "run_b" / f) && slurp(work / "run_a" / f) != slurp(work / "run_b" / f)) {
                differing.push_back(f.string());
            }
        }
        const bool failures_equal = run_a.failures.size() == run_b.failures.size();
        std::string detail = std::to_string(files_a.size()) + " CSV files compared";
        for (const auto& d : differing) detail += "; differs: " + d;
        if (!run_a.failures.empty()) {
            detail += "; " + std::to_string(run_a.failures.size()) + " failed cases";
        }
        report(10, {differing.empty() && failures_equal && run_a.failures.empty(), detail}, failures);
    }

    int unexpected = 0;
    for (int id : failures) {
        const bool is_known = std::find(known.begin(), known.end(), id) != known.end();
        std::cout << "criterion " << id << " failed" << (is_known ? " (known failure)" : "") << std::endl;
        if (!is_known) ++unexpected;
    }
    for (int id : known) {
        if (std::find(failures.begin(), failures.end(), id) == failures.end()) {
            std::cout << "criterion " << id << " is listed as a known failure but passed" << std::endl;
        }
    }
    std::cout << (10 - failures.size()) << "/10 criteria passed" << std::endl;
    return unexpected == 0 ? 0 : 1;
}
