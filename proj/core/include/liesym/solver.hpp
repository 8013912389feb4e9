#pragma once

#include "liesym/bases.hpp"
#include "liesym/geometry.hpp"
#include "liesym/linalg.hpp"
#include "liesym/nlls.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace liesym {

struct SolverConfig {
    double mse_tol = 1e-6;
    std::size_t max_terms = 80;
    std::size_t candidates_per_family = 1000; // P
    std::size_t additions_per_refine = 5;     // R
    double ridge_lambda = 1e-1;
    std::uint64_t seed = 0;
    TrustRegionConfig refine;
    /// Optional per-component weights on the squared residual (default 1).
    std::map<ComponentId, double> component_weights;

    void validate() const;
};

/// One greedy addition, optionally followed by a global refinement.
struct TraceRecord {
    std::size_t step = 0;          // active-set size after the addition
    std::string family;
    double score = 0.0;            // best |cos| among the candidates
    double mse = 0.0;              // pooled MSE after the amplitude solve
    double objective = 0.0;        // ||r||^2 + lambda ||a||^2 after the solve
    bool refined = false;
    double mse_after_refine = 0.0;
    double objective_after_refine = 0.0;
    int refine_iterations = 0;
    bool refine_warning = false;
    double wall_seconds = 0.0;     // since the start of fit()
};

struct FitTrace {
    double initial_mse = 0.0;
    double initial_objective = 0.0;
    std::vector<TraceRecord> records;
};

/// f_LS = sum_i a_i f_i(x, t; theta_i). Solves the PDE for any parameters.
struct Model {
    PdeKind pde = PdeKind::Heat;
    Domain domain;
    std::vector<BoundBase> terms;
    std::vector<double> amplitudes;
    std::string config_hash;
    std::uint64_t seed = 0;

    std::size_t size() const { return terms.size(); }
    /// Amplitudes plus nonlinear parameters.
    std::size_t parameter_count() const;
    /// Throws ConfigError when term and amplitude counts differ.
    void validate() const;
};

struct FitResult {
    Model model;
    FitTrace trace;
    double mse = 0.0;
    double objective = 0.0;
    double runtime_seconds = 0.0;
};

/// Greedy selection with periodic variable-projection refinement:
/// while mse > mse_tol and |A| < max_terms, add R bases (each the best of P
/// draws per family by |cos| with the residual, amplitudes re-solved after
/// every addition, early return on tolerance or size) then refine all
/// nonlinear parameters jointly.
FitResult fit(const TrainingSet& rows, const Catalog& catalog, const SolverConfig& cfg,
              PdeKind pde, const Domain& domain);

/// Convenience overload: samples the training set from the problem first.
FitResult fit(const IbvpProblem& problem, const Catalog& catalog, const SolverConfig& cfg,
              std::size_t collocation_total = 3000, std::uint64_t collocation_seed = 0);

/// sum_i a_i * (base i or its partial) at each point. Throws DomainError for
/// points outside the closure of the model's domain.
std::vector<double> predict(const Model& model, std::span<const double> xs,
                            std::span<const double> ts, EvalKind which = EvalKind::Value);

/// Weighted per-term contributions a_i f_i at the points (row-major: term, point).
std::vector<std::vector<double>> term_contributions(const Model& model,
                                                    std::span<const double> xs,
                                                    std::span<const double> ts);

/// Closed-form text sum of a_i * (...), amplitudes to 6 significant digits.
std::string render_symbolic(const Model& model);

/// Design matrix of the model's terms on the training rows (row kinds honoured).
Matrix design_matrix(const Model& model, const TrainingSet& rows);

/// JSON document with the full family definitions, parameters and amplitudes;
/// doubles round-trip exactly.
std::string model_to_json(const Model& model);
Model model_from_json(const std::string& text);

/// Stable 64-bit FNV-1a hash in hex, used for configuration provenance.
std::string fnv1a_hex(const std::string& text);

} // namespace liesym
