#include "app.hpp"

#include <liesym/errors.hpp>
#include <liesym/parallel.hpp>

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

namespace {

using namespace liesym;
using namespace liesym::app;

struct NullBuffer : std::streambuf {
    int overflow(int c) override { return c; }
};

std::pair<std::size_t, std::size_t> parse_grid_spec(const std::string& spec) {
    const auto sep = spec.find_first_of("x,");
    try {
        if (sep == std::string::npos) {
            const std::size_t n = std::stoul(spec);
            return {n, n};
        }
        return {std::stoul(spec.substr(0, sep)), std::stoul(spec.substr(sep + 1))};
    } catch (const std::exception&) {
        throw ConfigError("grid spec '" + spec + "' is not NX, NXxNT or NX,NT");
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App cli{"Lie-symmetry IBVP solver for the 1D heat and wave equations"};
    cli.require_subcommand(1);

    std::optional<std::uint64_t> seed;
    std::string out;
    std::size_t threads = 0;
    bool quiet = false;
    cli.add_option("--seed", seed, "Override the solver and collocation seeds");
    cli.add_option("--out", out, "Output directory (solve, bench) or file (export-fields)");
    cli.add_option("--threads", threads, "Worker threads (default: LIESYM_THREADS or 1)");
    cli.add_flag("--quiet", quiet, "Only print the final summary");

    std::string config_path;
    auto* solve = cli.add_subcommand("solve", "Fit one run config and write its artifacts");
    solve->add_option("config", config_path, "Run config (JSON)")->required();
    solve->fallthrough();

    std::string suite_path;
    auto* bench = cli.add_subcommand("bench", "Run every config of a suite and tabulate");
    bench->add_option("suite", suite_path, "Suite file (JSON)")->required();
    bench->fallthrough();

    VerifyOptions vopts;
    auto* verify = cli.add_subcommand("verify", "Check symmetry transforms and base families");
    verify->add_option("--draws", vopts.draws_per_family, "Parameter draws per family");
    verify->add_option("--grid", vopts.grid, "Interior grid nodes per axis");
    verify->add_flag("--inject-singular-t6", vopts.inject_singular_t6,
                     "Give gaussian_blob singular HeatT6 bounds (the check must fail)");
    verify->fallthrough();

    std::string model_path, grid_spec;
    auto* exportf = cli.add_subcommand("export-fields", "Evaluate a stored model on a grid");
    exportf->add_option("model", model_path, "Model file written by solve")->required();
    exportf->add_option("grid", grid_spec, "NX, NXxNT or NX,NT")->required();
    exportf->fallthrough();

    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = cli.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    NullBuffer null_buffer;
    std::ostream null_stream(&null_buffer);
    std::ostream& log = quiet ? null_stream : std::cerr;

    try {
        if (threads > 0) set_thread_count(threads);
        if (*solve) {
            RunConfig cfg = load_run_config(config_path);
            if (seed) apply_seed(cfg, *seed);
            std::filesystem::path dir = !out.empty() ? std::filesystem::path(out)
                                        : !cfg.output_directory.empty()
                                            ? std::filesystem::path(cfg.output_directory)
                                            : std::filesystem::path("out") / cfg.name;
            const auto outcome = run_solve(cfg, dir, log);
            std::cout << report_to_json(outcome.report);
            return kExitOk;
        }
        if (*bench) {
            const BenchSuite suite = load_bench_suite(suite_path);
            const std::filesystem::path dir = out.empty() ? std::filesystem::path("bench_out") : std::filesystem::path(out);
            const BenchResult result = run_bench(suite, dir, seed, log);
            std::cout << "cases=" << suite.cases.size() << " rows=" << result.rows.size()
                      << " failures=" << result.failures.size() << " table=" << (dir / "bench_table.csv").string()
                      << "\n";
            return kExitOk;
        }
        if (*verify) {
            if (seed) vopts.seed = *seed;
            const auto checks = run_verify(vopts);
            std::size_t failed = 0;
            for (const auto& c : checks) {
                std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << "  " << c.detail << "\n";
                failed += c.passed ? 0 : 1;
            }
            std::cout << checks.size() - failed << "/" << checks.size() << " checks passed\n";
            return failed == 0 ? kExitOk : kExitVerifyFailed;
        }
        if (*exportf) {
            const auto [nx, nt] = parse_grid_spec(grid_spec);
            const std::filesystem::path file = out.empty() ? std::filesystem::path("fields.csv") : std::filesystem::path(out);
            export_fields(model_path, nx, nt, file);
            log << "wrote " << file.string() << "\n";
            return kExitOk;
        }
    } catch (const SolverAbort& e) {
        std::cerr << "solver aborted: " << e.what() << "\n";
        return kExitSolverAbort;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const RankError& e) {
        std::cerr << "solver aborted: " << e.what() << "\n";
        return kExitSolverAbort;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitOk;
}
