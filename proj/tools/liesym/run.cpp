#include "app.hpp"

#include <liesym/errors.hpp>
#include <liesym/linalg.hpp>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

namespace liesym::app {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

class CsvWriter {
public:
    explicit CsvWriter(const fs::path& path) : out_(path, std::ios::binary | std::ios::trunc) {
        if (!out_) throw ConfigError("cannot write " + path.string());
    }

    CsvWriter& cell(const std::string& s) {
        sep();
        if (s.find_first_of(",\"\n") == std::string::npos) {
            out_ << s;
        } else {
            out_ << '"';
            for (char c : s) {
                if (c == '"') out_ << '"';
                out_ << c;
            }
            out_ << '"';
        }
        return *this;
    }
    CsvWriter& cell(double v) { return cell(format_double(v)); }
    CsvWriter& cell(std::size_t v) { return cell(std::to_string(v)); }
    CsvWriter& empty() {
        sep();
        return *this;
    }
    void end() {
        out_ << '\n';
        first_ = true;
    }

private:
    void sep() {
        if (!first_) out_ << ',';
        first_ = false;
    }

    std::ofstream out_;
    bool first_ = true;
};

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << text;
}

double row_coordinate(const TrainingSet& rows, std::size_t i) {
    const auto id = rows.components[i];
    return id == ComponentId::LeftEdge || id == ComponentId::RightEdge ? rows.t[i] : rows.x[i];
}

double stationarity_of(const Model& model, const TrainingSet& rows, const SolverConfig& solver) {
    Matrix F = design_matrix(model, rows);
    Vector y = Eigen::Map<const Vector>(rows.targets.data(), static_cast<Eigen::Index>(rows.size()));
    if (!solver.component_weights.empty()) {
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const auto it = solver.component_weights.find(rows.components[i]);
            const double w = it == solver.component_weights.end() ? 1.0 : std::sqrt(it->second);
            F.row(static_cast<Eigen::Index>(i)) *= w;
            y[static_cast<Eigen::Index>(i)] *= w;
        }
    }
    const Vector a = Eigen::Map<const Vector>(model.amplitudes.data(),
                                              static_cast<Eigen::Index>(model.amplitudes.size()));
    return stationarity_ratio(F, y, a, solver.ridge_lambda);
}

void write_trace(const fs::path& path, const FitTrace& trace) {
    CsvWriter csv(path);
    for (const char* h : {"step", "family", "score", "mse", "objective", "refined",
                          "mse_after_refine", "objective_after_refine", "refine_iterations",
                          "refine_warning"}) {
        csv.cell(std::string(h));
    }
    csv.end();
    csv.cell(std::size_t{0}).cell(std::string("")).empty().cell(trace.initial_mse)
        .cell(trace.initial_objective).cell(std::size_t{0}).empty().empty().empty().empty();
    csv.end();
    for (const auto& r : trace.records) {
        csv.cell(r.step).cell(r.family).cell(r.score).cell(r.mse).cell(r.objective)
            .cell(std::size_t{r.refined ? 1u : 0u});
        if (r.refined) {
            csv.cell(r.mse_after_refine).cell(r.objective_after_refine)
                .cell(static_cast<std::size_t>(r.refine_iterations))
                .cell(std::size_t{r.refine_warning ? 1u : 0u});
        } else {
            csv.empty().empty().empty().empty();
        }
        csv.end();
    }
}

void write_ibc_fit(const fs::path& path, const Model& model, const TrainingSet& rows) {
    const std::size_t M = model.terms.size();
    std::vector<std::vector<double>> contrib(M, std::vector<double>(rows.size()));
    for (std::size_t k = 0; k < M; ++k) {
        eval_family_rows(*model.terms[k].family, model.terms[k].params, rows, contrib[k]);
        for (double& v : contrib[k]) v *= model.amplitudes[k];
    }
    std::vector<std::size_t> order(rows.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (rows.components[a] != rows.components[b]) return rows.components[a] < rows.components[b];
        return row_coordinate(rows, a) < row_coordinate(rows, b);
    });

    CsvWriter csv(path);
    for (const char* h : {"component", "kind", "coord", "x", "t", "target", "prediction"}) {
        csv.cell(std::string(h));
    }
    for (std::size_t k = 0; k < M; ++k) csv.cell("term_" + std::to_string(k + 1));
    csv.end();
    for (std::size_t i : order) {
        double pred = 0.0;
        for (std::size_t k = 0; k < M; ++k) pred += contrib[k][i];
        csv.cell(std::string(to_string(rows.components[i])))
            .cell(std::string(rows.kinds[i] == ConditionKind::Value ? "value" : "dt"))
            .cell(row_coordinate(rows, i)).cell(rows.x[i]).cell(rows.t[i]).cell(rows.targets[i])
            .cell(pred);
        for (std::size_t k = 0; k < M; ++k) csv.cell(contrib[k][i]);
        csv.end();
    }
}

const char* kPlotScript = R"(import csv
import sys
from pathlib import Path

import matplotlib.pyplot as plt
import numpy as np

root = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).parent


def read(name):
    with open(root / name, newline="") as f:
        return list(csv.DictReader(f))


trace = read("trace.csv")
steps = [int(r["step"]) for r in trace]
mse = [float(r["mse"]) for r in trace]
fig, ax = plt.subplots()
ax.semilogy(steps, mse, marker=".")
for r in trace:
    if r["refined"] == "1":
        ax.semilogy([int(r["step"])] * 2, [float(r["mse"]), float(r["mse_after_refine"])], "r-")
ax.set_xlabel("number of bases")
ax.set_ylabel("IBC MSE")
fig.savefig(root / "trace.png", dpi=150)

ibc = read("ibc_fit.csv")
components = sorted({r["component"] for r in ibc})
fig, axes = plt.subplots(1, len(components), figsize=(4 * len(components), 3.5))
axes = np.atleast_1d(axes)
terms = [k for k in ibc[0].keys() if k.startswith("term_")]
for ax, comp in zip(axes, components):
    rows = [r for r in ibc if r["component"] == comp]
    s = [float(r["coord"]) for r in rows]
    for k in terms:
        ax.plot(s, [float(r[k]) for r in rows], color="tab:blue", alpha=0.25, lw=0.8)
    ax.plot(s, [float(r["target"]) for r in rows], "k-", lw=2, label="target")
    ax.plot(s, [float(r["prediction"]) for r in rows], "r--", lw=1.5, label="prediction")
    ax.set_title(comp)
axes[0].legend()
fig.tight_layout()
fig.savefig(root / "ibc_fit.png", dpi=150)

field = read("field.csv")
x = np.array([float(r["x"]) for r in field])
t = np.array([float(r["t"]) for r in field])
nx = len(np.unique(x))
shape = (len(x) // nx, nx)
fig, axes = plt.subplots(1, 3, figsize=(13, 3.5))
for ax, key in zip(axes, ["prediction", "reference", "abs_error"]):
    v = np.array([float(r[key]) for r in field]).reshape(shape)
    im = ax.pcolormesh(x.reshape(shape), t.reshape(shape), v, shading="auto")
    fig.colorbar(im, ax=ax)
    ax.set_title(key)
    ax.set_xlabel("x")
    ax.set_ylabel("t")
fig.tight_layout()
fig.savefig(root / "field.png", dpi=150)
)";

} // namespace

std::vector<double> component_fractions(const RunConfig& cfg, const IbvpProblem& problem) {
    if (cfg.allocation.empty()) return default_allocation(problem);
    std::vector<double> out;
    for (const auto& c : problem.components) {
        const auto it = cfg.allocation.find(c.id);
        if (it == cfg.allocation.end()) {
            throw ConfigError("collocation.allocation." + std::string(to_string(c.id)) +
                              ": required for this problem");
        }
        out.push_back(it->second);
    }
    if (cfg.allocation.size() != problem.components.size()) {
        throw ConfigError("collocation.allocation lists a component this problem does not have");
    }
    return out;
}

std::string report_to_json(const RunReport& r) {
    json terms = json::array();
    for (const auto& t : r.terms) {
        terms.push_back({{"family", t.family},
                         {"params", t.params},
                         {"amplitude", t.amplitude},
                         {"ibc_rms", t.ibc_rms}});
    }
    json doc = {{"name", r.name},
                {"pde", to_string(r.pde)},
                {"ibc_type", r.ibc_type},
                {"mse", r.mse},
                {"l2re", r.l2re ? json(*r.l2re) : json(nullptr)},
                {"runtime_seconds", r.runtime_seconds},
                {"n_base_terms", r.n_base_terms},
                {"n_parameters", r.n_parameters},
                {"parameter_accounting_ok", r.parameter_accounting_ok},
                {"stationarity", r.stationarity},
                {"terms", terms},
                {"symbolic", r.symbolic}};
    if (r.max_principle) {
        const auto& m = *r.max_principle;
        doc["max_principle"] = {{"grid_error", m.grid_error},
                                {"ibc_error", m.ibc_error},
                                {"ref_scale", m.ref_scale},
                                {"holds", m.holds}};
    }
    return doc.dump(2) + "\n";
}

SolveOutcome run_solve(const RunConfig& cfg, const fs::path& out_dir, std::ostream& log) {
    const IbvpProblem problem = build_problem(cfg.pde, cfg.profile, cfg.domain);
    const auto fractions = component_fractions(cfg, problem);
    SolveOutcome outcome;
    outcome.rows = sample_training_set(problem, cfg.collocation_points, fractions, cfg.collocation_seed);
    const Catalog catalog = build_catalog(cfg);

    log << "[" << cfg.name << "] fitting " << outcome.rows.size() << " IBC rows with "
        << catalog.size() << " families\n";
    outcome.fit = fit(outcome.rows, catalog, cfg.solver, cfg.pde, cfg.domain);
    Model& model = outcome.fit.model;
    model.config_hash = fnv1a_hex(cfg.canonical());

    RunReport& rep = outcome.report;
    rep.name = cfg.name;
    rep.pde = cfg.pde;
    rep.ibc_type = std::string(to_string(cfg.profile.kind));
    rep.mse = outcome.fit.mse;
    rep.runtime_seconds = outcome.fit.runtime_seconds;
    rep.n_base_terms = model.size();
    rep.n_parameters = model.parameter_count();
    std::size_t nonlinear = 0;
    for (const auto& t : model.terms) nonlinear += t.family->param_count();
    rep.parameter_accounting_ok = rep.n_parameters == model.size() + nonlinear;
    rep.stationarity = stationarity_of(model, outcome.rows, cfg.solver);
    rep.symbolic = render_symbolic(model);
    for (std::size_t k = 0; k < model.size(); ++k) {
        const auto& term = model.terms[k];
        std::vector<double> col(outcome.rows.size());
        eval_family_rows(*term.family, term.params, outcome.rows, col);
        double ss = 0.0;
        for (double v : col) ss += v * v;
        rep.terms.push_back({term.family->id, term.params, model.amplitudes[k],
                             std::abs(model.amplitudes[k]) *
                                 std::sqrt(ss / static_cast<double>(col.size()))});
    }

    const FourierReference reference = build_reference(problem, cfg.reference_modes);
    const Grid grid = closure_grid(cfg.domain, cfg.grid_nx, cfg.grid_nt);
    const auto ref_field = eval_reference(reference, grid);
    const auto pred_field = predict(model, grid.x, grid.t);
    try {
        rep.l2re = l2re(pred_field, ref_field);
    } catch (const MetricError&) {
        rep.l2re.reset();
    }
    if (cfg.pde == PdeKind::Heat) {
        MaxPrinciple mp;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            mp.grid_error = std::max(mp.grid_error, std::abs(pred_field[i] - ref_field[i]));
            mp.ref_scale = std::max(mp.ref_scale, std::abs(ref_field[i]));
        }
        std::vector<double> xs, ts;
        for (std::size_t i = 0; i < outcome.rows.size(); ++i) {
            if (outcome.rows.kinds[i] != ConditionKind::Value) continue;
            xs.push_back(outcome.rows.x[i]);
            ts.push_back(outcome.rows.t[i]);
        }
        const auto pred_rows = predict(model, xs, ts);
        for (std::size_t i = 0; i < xs.size(); ++i) {
            mp.ibc_error = std::max(mp.ibc_error,
                                    std::abs(pred_rows[i] - eval_reference(reference, xs[i], ts[i])));
        }
        mp.holds = mp.grid_error <= mp.ibc_error + 5e-3 * mp.ref_scale;
        rep.max_principle = mp;
    }

    log << "[" << cfg.name << "] mse=" << format_double(rep.mse)
        << " terms=" << rep.n_base_terms << " params=" << rep.n_parameters
        << " l2re=" << (rep.l2re ? format_double(*rep.l2re) : std::string("undefined"))
        << " fit_seconds=" << rep.runtime_seconds << "\n";

    if (out_dir.empty()) return outcome;
    fs::create_directories(out_dir);
    write_text(out_dir / "model.json", model_to_json(model) + "\n");
    write_trace(out_dir / "trace.csv", outcome.fit.trace);
    write_ibc_fit(out_dir / "ibc_fit.csv", model, outcome.rows);
    {
        CsvWriter csv(out_dir / "field.csv");
        for (const char* h : {"x", "t", "prediction", "reference", "abs_error"}) csv.cell(std::string(h));
        csv.end();
        for (std::size_t i = 0; i < grid.size(); ++i) {
            csv.cell(grid.x[i]).cell(grid.t[i]).cell(pred_field[i]).cell(ref_field[i])
                .cell(std::abs(pred_field[i] - ref_field[i]));
            csv.end();
        }
    }
    {
        CsvWriter csv(out_dir / "reference.csv");
        for (const char* h : {"x", "t", "value"}) csv.cell(std::string(h));
        csv.end();
        for (std::size_t i = 0; i < grid.size(); ++i) {
            csv.cell(grid.x[i]).cell(grid.t[i]).cell(ref_field[i]);
            csv.end();
        }
    }
    write_text(out_dir / "report.json", report_to_json(rep));
    if (cfg.plot_script) write_text(out_dir / "plot.py", kPlotScript);
    return outcome;
}

BenchSuite load_bench_suite(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open suite file " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": invalid JSON: " + e.what());
    }
    const std::string origin = path.string();
    if (!doc.is_object()) throw ConfigError(origin + ": expected an object");
    for (const auto& [key, value] : doc.items()) {
        if (key != "name" && key != "cases") throw ConfigError(origin + ": " + key + ": unknown key");
    }
    BenchSuite suite;
    suite.name = doc.value("name", path.stem().string());
    if (!doc.contains("cases")) return suite;
    if (!doc["cases"].is_array()) throw ConfigError(origin + ": cases: expected an array");
    const fs::path base = path.parent_path();
    for (std::size_t i = 0; i < doc["cases"].size(); ++i) {
        const auto& c = doc["cases"][i];
        const std::string cpath = origin + ": cases[" + std::to_string(i) + "]";
        BenchCase bc;
        if (c.is_string()) {
            bc.config = base / c.get<std::string>();
        } else if (c.is_object()) {
            for (const auto& [key, value] : c.items()) {
                if (key != "name" && key != "config") throw ConfigError(cpath + "." + key + ": unknown key");
            }
            if (!c.contains("config") || !c["config"].is_string()) {
                throw ConfigError(cpath + ".config: required string");
            }
            bc.config = base / c["config"].get<std::string>();
            if (c.contains("name")) {
                if (!c["name"].is_string()) throw ConfigError(cpath + ".name: expected a string");
                bc.name = c["name"].get<std::string>();
            }
        } else {
            throw ConfigError(cpath + ": expected a path or {name, config}");
        }
        if (bc.name.empty()) bc.name = bc.config.stem().string();
        for (const auto& other : suite.cases) {
            if (other.name == bc.name) throw ConfigError(cpath + ": duplicate case name " + bc.name);
        }
        suite.cases.push_back(std::move(bc));
    }
    return suite;
}

BenchResult run_bench(const BenchSuite& suite, const fs::path& out_dir,
                      std::optional<std::uint64_t> seed, std::ostream& log) {
    BenchResult result;
    fs::create_directories(out_dir);
    for (const auto& c : suite.cases) {
        RunConfig cfg;
        try {
            cfg = load_run_config(c.config);
            cfg.name = c.name;
            if (seed) apply_seed(cfg, *seed);
        } catch (const Error& e) {
            log << "[" << c.name << "] config error: " << e.what() << "\n";
            result.failures.push_back({c.name, "config", e.what()});
            continue;
        }
        try {
            result.rows.push_back(run_solve(cfg, out_dir / c.name, log).report);
        } catch (const ConfigError& e) {
            log << "[" << c.name << "] config error: " << e.what() << "\n";
            result.failures.push_back({c.name, "config", e.what()});
        } catch (const Error& e) {
            log << "[" << c.name << "] solver error: " << e.what() << "\n";
            result.failures.push_back({c.name, "solver", e.what()});
        }
    }

    {
        CsvWriter csv(out_dir / "bench_table.csv");
        for (const char* h : {"case", "pde", "ibc_type", "mse", "l2re", "n_base_terms", "n_parameters"}) {
            csv.cell(std::string(h));
        }
        csv.end();
        for (const auto& r : result.rows) {
            csv.cell(r.name).cell(std::string(to_string(r.pde))).cell(r.ibc_type).cell(r.mse);
            if (r.l2re) {
                csv.cell(*r.l2re);
            } else {
                csv.empty();
            }
            csv.cell(r.n_base_terms).cell(r.n_parameters);
            csv.end();
        }
    }
    {
        CsvWriter csv(out_dir / "bench_failures.csv");
        for (const char* h : {"case", "kind", "message"}) csv.cell(std::string(h));
        csv.end();
        for (const auto& f : result.failures) {
            csv.cell(f.name).cell(f.kind).cell(f.message);
            csv.end();
        }
    }
    {
        std::ostringstream md;
        md << "# " << suite.name << "\n\n"
           << "| PDE | IBC type | MSE (IBC) | L2RE (domain) | Runtime [s] | N_base_terms | N_parameters |\n"
           << "|---|---|---|---|---|---|---|\n";
        char buf[160];
        for (const auto& r : result.rows) {
            const std::string l2 = r.l2re ? [&] {
                char b[32];
                std::snprintf(b, sizeof b, "%.1e", *r.l2re);
                return std::string(b);
            }()
                                          : std::string("n/a");
            std::snprintf(buf, sizeof buf, "| %s | %s | %.1e | %s | %.1f | %zu | %zu |\n",
                          std::string(to_string(r.pde)).c_str(), r.ibc_type.c_str(), r.mse,
                          l2.c_str(), r.runtime_seconds, r.n_base_terms, r.n_parameters);
            md << buf;
        }
        if (!result.failures.empty()) {
            md << "\nFailures:\n\n";
            for (const auto& f : result.failures) md << "- " << f.name << " (" << f.kind << "): " << f.message << "\n";
        }
        write_text(out_dir / "bench_table.md", md.str());
    }
    return result;
}

void export_fields(const fs::path& model_path, std::size_t nx, std::size_t nt, const fs::path& out_csv) {
    std::ifstream in(model_path, std::ios::binary);
    if (!in) throw ConfigError("cannot open model file " + model_path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    const Model model = model_from_json(ss.str());
    const Grid grid = closure_grid(model.domain, nx, nt);
    const auto values = predict(model, grid.x, grid.t);
    if (out_csv.has_parent_path()) fs::create_directories(out_csv.parent_path());
    CsvWriter csv(out_csv);
    for (const char* h : {"x", "t", "value"}) csv.cell(std::string(h));
    csv.end();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        csv.cell(grid.x[i]).cell(grid.t[i]).cell(values[i]);
        csv.end();
    }
}

} // namespace liesym::app
