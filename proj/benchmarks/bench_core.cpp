#include <benchmark/benchmark.h>

#include <liesym/bases.hpp>
#include <liesym/linalg.hpp>
#include <liesym/nlls.hpp>
#include <liesym/reference.hpp>
#include <liesym/solver.hpp>

#include <vector>

using namespace liesym;

namespace {

TrainingSet heat_rows(std::size_t total) {
    const auto problem =
        build_problem(PdeKind::Heat, IcProfile::defaults(ProfileKind::Gaussian), Domain::heat_default());
    return sample_training_set(problem, total, default_allocation(problem), 0);
}

Matrix random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
    Matrix m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = rng.uniform(-1.0, 1.0);
    return m;
}

void BM_FamilyColumn(benchmark::State& state) {
    const auto catalog = default_catalog(PdeKind::Heat, Domain::heat_default());
    const auto& family = *catalog[static_cast<std::size_t>(state.range(0))];
    const TrainingSet rows = heat_rows(3000);
    Rng rng(1);
    const auto params = sample_params(family, 64, rng);
    std::vector<double> column(rows.size());
    std::size_t k = 0;
    for (auto _ : state) {
        eval_family_rows(family, params[k++ % params.size()], rows, column);
        benchmark::DoNotOptimize(column.data());
    }
    state.SetLabel(family.id);
    state.SetItemsProcessed(state.iterations() * static_cast<long>(rows.size()));
}
BENCHMARK(BM_FamilyColumn)->DenseRange(0, 2);

void BM_CandidateScoring(benchmark::State& state) {
    const auto catalog = default_catalog(PdeKind::Heat, Domain::heat_default());
    const TrainingSet rows = heat_rows(3000);
    const std::size_t P = static_cast<std::size_t>(state.range(0));
    const double floor = default_norm_floor(rows.size());
    std::vector<double> column(rows.size());
    for (auto _ : state) {
        Rng rng(2);
        double best = 0.0;
        for (const auto& family : catalog) {
            for (const auto& p : sample_params(*family, P, rng)) {
                eval_family_rows(*family, p, rows, column);
                best = std::max(best, cosine_score(rows.targets, column, floor));
            }
        }
        benchmark::DoNotOptimize(best);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(P * catalog.size()));
}
BENCHMARK(BM_CandidateScoring)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_RidgeSolve(benchmark::State& state) {
    Rng rng(3);
    const Eigen::Index n = state.range(0);
    const Matrix F = random_matrix(rng, 3000, n);
    const Vector y = random_matrix(rng, 3000, 1).col(0);
    for (auto _ : state) benchmark::DoNotOptimize(ridge_solve(F, y, 0.1));
}
BENCHMARK(BM_RidgeSolve)->Arg(5)->Arg(20)->Arg(80);

void BM_VarProJacobian(benchmark::State& state) {
    const auto catalog = default_catalog(PdeKind::Heat, Domain::heat_default());
    const TrainingSet rows = heat_rows(3000);
    Rng rng(4);
    std::vector<BoundBase> active;
    for (long k = 0; k < state.range(0); ++k) {
        const auto& family = catalog[static_cast<std::size_t>(k) % catalog.size()];
        active.push_back({family, sample_params(*family, 1, rng).front()});
    }
    VarProObjective objective(rows, active, 0.1);
    const Vector theta = objective.initial_theta();
    for (auto _ : state) benchmark::DoNotOptimize(jacobian_fd(objective, theta, 1e-6));
    state.counters["parameters"] = static_cast<double>(theta.size());
}
BENCHMARK(BM_VarProJacobian)->Arg(5)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_ReferenceField(benchmark::State& state) {
    const auto problem =
        build_problem(PdeKind::Heat, IcProfile::defaults(ProfileKind::Step), Domain::heat_default());
    const auto ref = build_reference(problem, static_cast<std::size_t>(state.range(0)));
    const Grid grid = closure_grid(problem.domain, 100, 100);
    for (auto _ : state) benchmark::DoNotOptimize(eval_reference(ref, grid));
}
BENCHMARK(BM_ReferenceField)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

} // namespace
BENCHMARK_MAIN();
