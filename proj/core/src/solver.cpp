#include "liesym/solver.hpp"

#include "liesym/errors.hpp"
#include "liesym/parallel.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>

namespace liesym {

void SolverConfig::validate() const {
    if (!(mse_tol > 0)) throw ConfigError("solver.mse_tol must be positive");
    if (max_terms < 1) throw ConfigError("solver.max_terms must be >= 1");
    if (candidates_per_family < 1) throw ConfigError("solver.candidates_per_family must be >= 1");
    if (additions_per_refine < 1) throw ConfigError("solver.additions_per_refine must be >= 1");
    if (!(ridge_lambda >= 0) || !std::isfinite(ridge_lambda)) {
        throw ConfigError("solver.ridge_lambda must be finite and >= 0");
    }
    for (const auto& [id, w] : component_weights) {
        if (!(w > 0) || !std::isfinite(w)) {
            throw ConfigError("solver.component_weights." + std::string(to_string(id)) +
                              " must be positive");
        }
    }
    refine.validate();
}

std::size_t Model::parameter_count() const {
    std::size_t n = amplitudes.size();
    for (const auto& t : terms) n += t.params.size();
    return n;
}

void Model::validate() const {
    if (terms.size() != amplitudes.size()) {
        throw ConfigError("model has " + std::to_string(terms.size()) + " terms but " +
                          std::to_string(amplitudes.size()) + " amplitudes");
    }
}

namespace {

std::vector<double> row_weights(const TrainingSet& rows, const SolverConfig& cfg) {
    if (cfg.component_weights.empty()) return {};
    std::vector<double> w(rows.size(), 1.0);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto it = cfg.component_weights.find(rows.components[i]);
        if (it != cfg.component_weights.end()) w[i] = it->second;
    }
    return w;
}

struct Candidate {
    std::size_t family = 0;
    std::vector<double> params;
    double score = 0.0;
};

Candidate best_candidate(const TrainingSet& rows, const Catalog& catalog,
                         const std::vector<std::vector<std::vector<double>>>& draws,
                         const Vector& r, const Vector& sqrt_w, double norm_floor) {
    const std::size_t L = rows.size();
    std::vector<std::size_t> start(catalog.size() + 1, 0);
    for (std::size_t i = 0; i < catalog.size(); ++i) start[i + 1] = start[i] + draws[i].size();
    const std::size_t total = start.back();

    std::vector<double> scores(total, 0.0);
    const std::span<const double> rspan(r.data(), L);
    parallel_for(total, [&](std::size_t k) {
        std::size_t i = 0;
        while (k >= start[i + 1]) ++i;
        const auto& params = draws[i][k - start[i]];
        thread_local std::vector<double> column;
        column.resize(L);
        try {
            eval_family_rows(*catalog[i], params, rows, column);
        } catch (const DomainError&) {
            return;
        }
        if (sqrt_w.size() > 0) {
            for (std::size_t row = 0; row < L; ++row) column[row] *= sqrt_w[static_cast<Eigen::Index>(row)];
        }
        const double s = cosine_score(rspan, column, norm_floor);
        scores[k] = std::isfinite(s) ? s : 0.0;
    });

    // First index wins ties: lowest family, then lowest draw.
    std::size_t best = 0;
    for (std::size_t k = 1; k < total; ++k) {
        if (scores[k] > scores[best]) best = k;
    }
    Candidate c;
    while (best >= start[c.family + 1]) ++c.family;
    c.params = draws[c.family][best - start[c.family]];
    c.score = scores[best];
    return c;
}

} // namespace

FitResult fit(const TrainingSet& rows, const Catalog& catalog, const SolverConfig& cfg,
              PdeKind pde, const Domain& domain) {
    cfg.validate();
    if (catalog.empty()) throw ConfigError("fit needs a non-empty catalog");
    if (rows.size() == 0) throw ConfigError("fit needs a non-empty training set");
    for (const auto& f : catalog) {
        if (f->pde != pde) throw ConfigError("family '" + f->id + "' belongs to another equation");
    }

    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    auto elapsed = [&] { return std::chrono::duration<double>(clock::now() - t0).count(); };

    const std::size_t L = rows.size();
    const double Ld = static_cast<double>(L);
    const double lambda = cfg.ridge_lambda;
    const auto weights = row_weights(rows, cfg);
    Vector sqrt_w;
    Vector y = Eigen::Map<const Vector>(rows.targets.data(), static_cast<Eigen::Index>(L));
    if (!weights.empty()) {
        sqrt_w = Eigen::Map<const Vector>(weights.data(), static_cast<Eigen::Index>(L)).cwiseSqrt();
        y = y.cwiseProduct(sqrt_w);
    }
    const double norm_floor = default_norm_floor(L);

    FitResult result;
    Model& model = result.model;
    model.pde = pde;
    model.domain = domain;
    model.seed = cfg.seed;

    Matrix F(static_cast<Eigen::Index>(L), 0);
    Vector a;
    Vector r = y;
    double mse = r.squaredNorm() / Ld;
    double objective = r.squaredNorm();
    result.trace.initial_mse = mse;
    result.trace.initial_objective = objective;

    Rng rng(cfg.seed);
    auto finish = [&] {
        model.amplitudes.assign(a.data(), a.data() + a.size());
        result.mse = mse;
        result.objective = objective;
        result.runtime_seconds = elapsed();
        return result;
    };

    while (mse > cfg.mse_tol && model.terms.size() < cfg.max_terms) {
        for (std::size_t q = 0; q < cfg.additions_per_refine; ++q) {
            std::vector<std::vector<std::vector<double>>> draws;
            draws.reserve(catalog.size());
            for (const auto& fam : catalog) {
                draws.push_back(sample_params(*fam, cfg.candidates_per_family, rng));
            }
            Candidate best = best_candidate(rows, catalog, draws, r, sqrt_w, norm_floor);
            if (!(best.score > 0.0)) {
                throw SolverAbort("every candidate scored zero against the residual (mse=" +
                                  std::to_string(mse) + ", terms=" +
                                  std::to_string(model.terms.size()) + ")");
            }

            BoundBase base{catalog[best.family], best.params};
            Vector column(static_cast<Eigen::Index>(L));
            eval_family_rows(*base.family, base.params, rows,
                             std::span<double>(column.data(), L));
            if (sqrt_w.size() > 0) column = column.cwiseProduct(sqrt_w);
            F.conservativeResize(Eigen::NoChange, F.cols() + 1);
            F.col(F.cols() - 1) = column;
            model.terms.push_back(std::move(base));

            a = ridge_solve(F, y, lambda);
            const auto res = residual(y, F, a);
            r = res.r;
            mse = res.mse;
            objective = r.squaredNorm() + lambda * a.squaredNorm();
            if (!std::isfinite(mse)) throw SolverAbort("non-finite MSE after amplitude solve");

            TraceRecord rec;
            rec.step = model.terms.size();
            rec.family = model.terms.back().family->id;
            rec.score = best.score;
            rec.mse = mse;
            rec.objective = objective;
            rec.wall_seconds = elapsed();
            result.trace.records.push_back(rec);

            if (mse <= cfg.mse_tol || model.terms.size() == cfg.max_terms) return finish();
        }

        VarProObjective reduced(rows, model.terms, lambda, weights);
        const RefineResult refined = refine(reduced, cfg.refine);
        model.terms = refined.bases;
        VarProObjective after(rows, model.terms, lambda, weights);
        F = after.design(after.initial_theta());
        a = refined.amplitudes;
        const auto res = residual(y, F, a);
        r = res.r;
        mse = res.mse;
        objective = r.squaredNorm() + lambda * a.squaredNorm();
        if (!std::isfinite(mse)) throw SolverAbort("non-finite MSE after refinement");

        auto& rec = result.trace.records.back();
        rec.refined = true;
        rec.mse_after_refine = mse;
        rec.objective_after_refine = objective;
        rec.refine_iterations = refined.iterations;
        rec.refine_warning = refined.warning;
        rec.wall_seconds = elapsed();
    }
    return finish();
}

FitResult fit(const IbvpProblem& problem, const Catalog& catalog, const SolverConfig& cfg,
              std::size_t collocation_total, std::uint64_t collocation_seed) {
    const auto allocation = default_allocation(problem);
    const TrainingSet rows =
        sample_training_set(problem, collocation_total, allocation, collocation_seed);
    return fit(rows, catalog, cfg, problem.pde, problem.domain);
}

std::vector<double> predict(const Model& model, std::span<const double> xs,
                            std::span<const double> ts, EvalKind which) {
    model.validate();
    if (xs.size() != ts.size()) throw ConfigError("predict: x and t sizes differ");
    const double tol = 1e-12 * (1.0 + std::abs(model.domain.x_max) + std::abs(model.domain.t_max));
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!model.domain.contains(xs[i], ts[i], tol)) {
            throw DomainError("predict: point (" + std::to_string(xs[i]) + ", " +
                              std::to_string(ts[i]) + ") is outside the model domain");
        }
    }
    std::vector<double> out(xs.size(), 0.0);
    std::vector<double> buf(xs.size());
    for (std::size_t k = 0; k < model.terms.size(); ++k) {
        const auto& term = model.terms[k];
        eval_family_batch(*term.family, term.params, xs, ts, which, buf);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += model.amplitudes[k] * buf[i];
    }
    return out;
}

std::vector<std::vector<double>> term_contributions(const Model& model,
                                                    std::span<const double> xs,
                                                    std::span<const double> ts) {
    model.validate();
    std::vector<std::vector<double>> out;
    out.reserve(model.terms.size());
    for (std::size_t k = 0; k < model.terms.size(); ++k) {
        const auto& term = model.terms[k];
        auto v = eval_family_batch(*term.family, term.params, xs, ts, EvalKind::Value);
        for (double& e : v) e *= model.amplitudes[k];
        out.push_back(std::move(v));
    }
    return out;
}

std::string render_symbolic(const Model& model) {
    model.validate();
    if (model.terms.empty()) return "0";
    std::string out;
    for (std::size_t k = 0; k < model.terms.size(); ++k) {
        char amp[40];
        std::snprintf(amp, sizeof amp, "%.6g", model.amplitudes[k]);
        std::string a(amp);
        if (model.amplitudes[k] < 0) a = "(" + a + ")";
        if (k > 0) out += " + ";
        out += a + "*(" + render_chain(model.terms[k].chain()) + ")";
    }
    return out;
}

Matrix design_matrix(const Model& model, const TrainingSet& rows) {
    Matrix F(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(model.terms.size()));
    for (std::size_t k = 0; k < model.terms.size(); ++k) {
        const auto& term = model.terms[k];
        eval_family_rows(*term.family, term.params, rows,
                         std::span<double>(F.col(static_cast<Eigen::Index>(k)).data(), rows.size()));
    }
    return F;
}

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace liesym
