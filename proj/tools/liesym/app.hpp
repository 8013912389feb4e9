#pragma once

#include <liesym/bases.hpp>
#include <liesym/geometry.hpp>
#include <liesym/reference.hpp>
#include <liesym/solver.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace liesym::app {

enum ExitCode : int {
    kExitOk = 0,
    kExitConfig = 1,
    kExitSolverAbort = 2,
    kExitVerifyFailed = 3,
};

struct FamilySpec {
    std::string id;
    std::map<std::string, ParamBounds> bounds;
    std::map<std::string, SamplingRule> sampling;
};

struct RunConfig {
    std::string name;
    PdeKind pde = PdeKind::Heat;
    Domain domain;
    IcProfile profile;

    std::size_t collocation_points = 3000;
    std::map<ComponentId, double> allocation; // empty: default split
    std::uint64_t collocation_seed = 0;

    std::vector<FamilySpec> catalog; // empty: all default families
    SolverConfig solver;

    std::size_t reference_modes = 256;
    std::size_t grid_nx = 100;
    std::size_t grid_nt = 100;

    std::string output_directory;
    bool plot_script = false;

    /// Canonical JSON of the effective configuration (hashed into the model).
    std::string canonical() const;
};

/// Strict parse: unknown keys and wrong types raise ConfigError with the key path.
RunConfig parse_run_config(const std::string& text, const std::string& origin = "config");
RunConfig load_run_config(const std::filesystem::path& path);

/// Overrides the solver and collocation seeds together.
void apply_seed(RunConfig& cfg, std::uint64_t seed);

Catalog build_catalog(const RunConfig& cfg);

/// Collocation fractions in the problem's component order (the default split
/// when the config gives none).
std::vector<double> component_fractions(const RunConfig& cfg, const IbvpProblem& problem);

struct TermSummary {
    std::string family;
    std::vector<double> params;
    double amplitude = 0.0;
    double ibc_rms = 0.0; // rms of a_i f_i over the training rows
};

struct MaxPrinciple {
    double grid_error = 0.0; // max |f_LS - f_ref| on the domain grid
    double ibc_error = 0.0;  // max |f_LS - f_ref| on the value rows of the training set
    double ref_scale = 0.0;  // max |f_ref| on the grid
    bool holds = false;      // grid_error <= ibc_error + 5e-3 ref_scale
};

struct RunReport {
    std::string name;
    PdeKind pde = PdeKind::Heat;
    std::string ibc_type;
    double mse = 0.0;
    std::optional<double> l2re; // empty when the reference field is zero
    double runtime_seconds = 0.0;
    std::size_t n_base_terms = 0;
    std::size_t n_parameters = 0;
    bool parameter_accounting_ok = false;
    double stationarity = 0.0;
    std::optional<MaxPrinciple> max_principle; // heat only
    std::vector<TermSummary> terms;
    std::string symbolic;
};

struct SolveOutcome {
    RunReport report;
    FitResult fit;
    TrainingSet rows;
};

/// Fits, evaluates against the reference and writes model.json, trace.csv,
/// ibc_fit.csv, field.csv, reference.csv, report.json (and plot.py on request)
/// into out_dir when it is non-empty.
SolveOutcome run_solve(const RunConfig& cfg, const std::filesystem::path& out_dir,
                       std::ostream& log);

struct BenchCase {
    std::string name;
    std::filesystem::path config;
};

struct BenchSuite {
    std::string name;
    std::vector<BenchCase> cases;
};

BenchSuite load_bench_suite(const std::filesystem::path& path);

struct BenchFailure {
    std::string name;
    std::string kind; // config or solver
    std::string message;
};

struct BenchResult {
    std::vector<RunReport> rows;
    std::vector<BenchFailure> failures;
};

/// Runs every case into out_dir/<case>, then writes bench_table.csv,
/// bench_failures.csv and bench_table.md. Failing cases do not stop the suite.
BenchResult run_bench(const BenchSuite& suite, const std::filesystem::path& out_dir,
                      std::optional<std::uint64_t> seed, std::ostream& log);

struct VerifyOptions {
    std::uint64_t seed = 7;
    std::size_t draws_per_family = 100;
    std::size_t grid = 50;
    /// Replaces the gaussian_blob sharpness bounds with singular HeatT6 values.
    bool inject_singular_t6 = false;
};

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

std::vector<CheckResult> run_verify(const VerifyOptions& opts);

/// Evaluates a stored model on an nx by nt closure grid and writes x,t,value.
void export_fields(const std::filesystem::path& model_path, std::size_t nx, std::size_t nt,
                   const std::filesystem::path& out_csv);

/// Shortest round-trip decimal text, independent of the C locale.
std::string format_double(double v);

std::string report_to_json(const RunReport& report);

} // namespace liesym::app
