#pragma once

#include "liesym/geometry.hpp"
#include "liesym/random.hpp"
#include "liesym/symmetry.hpp"

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace liesym {

/// How a family parameter becomes a transform parameter: a, ln p or -ln p.
/// Lets frequencies and scales be bounded and sampled on their natural axis.
enum class ParamMap { Identity, Log, NegLog };

std::string_view to_string(ParamMap map);
ParamMap parse_param_map(std::string_view name);

struct ParamSpec {
    std::string name;
    ParamBounds bounds;
    SamplingRule rule = SamplingRule::Uniform;
};

struct ChainStep {
    TransformId transform = TransformId::HeatT1;
    std::size_t param = 0;
    ParamMap map = ParamMap::Identity;
};

/// A parametrized base solution: seed plus transform chain template.
/// steps[0] acts first on the seed.
struct BaseFamily {
    std::string id;
    PdeKind pde = PdeKind::Heat;
    SeedId seed = SeedId::Constant;
    std::vector<ChainStep> steps;
    std::vector<ParamSpec> params;
    std::string description;

    std::size_t param_count() const { return params.size(); }
    std::size_t param_index(std::string_view name) const;

    /// Structural checks plus admissibility of every reachable transform
    /// parameter on the domain. Throws ConfigError.
    void validate(const Domain& domain) const;

    /// Throws ParameterError when a value is outside its bounds.
    void check_params(std::span<const double> values) const;

    /// Concrete chain for a parameter vector (no bounds check).
    TransformChain bind(std::span<const double> values) const;
};

using FamilyPtr = std::shared_ptr<const BaseFamily>;
using Catalog = std::vector<FamilyPtr>;

/// Heat: sine_mode, gaussian_blob, modulated_blob.
/// Wave: standing_wave, blob_pair.
Catalog default_catalog(PdeKind pde, const Domain& domain);

/// All families known for a pde (used to rebuild serialized models).
FamilyPtr find_family(const Catalog& catalog, std::string_view id);

/// Which derivative to evaluate.
enum class EvalKind { Value, DtValue, DxValue };

/// out[i] = family value (or partial) at (xs[i], ts[i]).
void eval_family_batch(const BaseFamily& family, std::span<const double> params,
                       std::span<const double> xs, std::span<const double> ts, EvalKind which,
                       std::span<double> out);

std::vector<double> eval_family_batch(const BaseFamily& family, std::span<const double> params,
                                      std::span<const double> xs, std::span<const double> ts,
                                      EvalKind which);

/// One design-matrix column: Value rows get values, TimeDerivative rows get u_t.
void eval_family_rows(const BaseFamily& family, std::span<const double> params,
                      const TrainingSet& rows, std::span<double> out);

/// P parameter vectors drawn within bounds; throws ConfigError for a
/// log-uniform parameter with lo <= 0.
std::vector<std::vector<double>> sample_params(const BaseFamily& family, std::size_t count,
                                               Rng& rng);

/// A family with fixed parameters: one member of the active set.
struct BoundBase {
    FamilyPtr family;
    std::vector<double> params;

    TransformChain chain() const { return family->bind(params); }
};

} // namespace liesym
