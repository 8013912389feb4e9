#pragma once

#include "liesym/errors.hpp"
#include "liesym/geometry.hpp"
#include "liesym/jet.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace liesym {

/// One-parameter point symmetries of u_t = u_xx (Heat*) and u_tt = u_xx (Wave*).
///
///   HeatT1  f(x - a, t)                    HeatT4  f(e^-a x, e^-2a t)
///   HeatT2  f(x, t - a)                    HeatT5  e^(-a x + a^2 t) f(x - 2 a t, t)
///   HeatT3  e^a f(x, t)                    HeatT6  (1+4at)^(-1/2) e^(-a x^2/(1+4at))
///                                                  f(x/(1+4at), t/(1+4at))
///   WaveT1  f(x - a, t)                    WaveT2  f(e^a x, e^a t)
enum class TransformId { HeatT1, HeatT2, HeatT3, HeatT4, HeatT5, HeatT6, WaveT1, WaveT2 };

enum class SamplingRule { Uniform, LogUniform };

enum class SeedId {
    Constant,      // 1
    HeatSineDecay, // sin(x) e^-t
    WaveStanding,  // sin(x) cos(t)
    WaveBlobPair,  // e^-(x-t)^2 + e^-(x+t)^2
};

std::string_view to_string(TransformId id);
TransformId parse_transform_id(std::string_view name);
std::string_view to_string(SeedId id);
SeedId parse_seed_id(std::string_view name);
std::string_view to_string(SamplingRule rule);
SamplingRule parse_sampling_rule(std::string_view name);

PdeKind pde_of(TransformId id);
/// Seeds valid for the given equation (Constant solves both).
std::vector<SeedId> seeds_for(PdeKind pde);
bool seed_solves(SeedId seed, PdeKind pde);

struct ParamBounds {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();

    bool contains(double v) const { return v >= lo && v <= hi; }
};

/// Default upper bound for the HeatT6 parameter.
inline constexpr double kHeatT6DefaultMax = 1e9;
/// Margin kept between the HeatT6 lower bound and its singular value.
inline constexpr double kHeatT6Margin = 1e-3;

/// Catalog entry for a transform: admissible parameters on a given domain.
struct LieTransform {
    TransformId id = TransformId::HeatT1;
    ParamBounds bounds;
    SamplingRule sampling = SamplingRule::Uniform;

    /// HeatT6 gets (-1/(4 t_max) + margin, t6_max] so that 1 + 4 a t > 0
    /// on the whole domain; every other transform is unbounded.
    static LieTransform make(TransformId id, const Domain& domain,
                             double t6_max = kHeatT6DefaultMax);

    /// Throws ParameterError for an out-of-bounds parameter.
    void check(double theta) const;
};

// ---------------------------------------------------------------------------
// Closed-form kernels. S is double (value only) or Jet (value + partials).

template <class S>
S eval_seed(SeedId seed, const S& x, const S& t) {
    using std::cos;
    using std::exp;
    using std::sin;
    switch (seed) {
    case SeedId::Constant: return S(1.0);
    case SeedId::HeatSineDecay: return sin(x) * exp(-t);
    case SeedId::WaveStanding: return sin(x) * cos(t);
    case SeedId::WaveBlobPair: {
        const S a = x - t;
        const S b = x + t;
        return exp(-(a * a)) + exp(-(b * b));
    }
    }
    return S(0.0);
}

/// Pulls the evaluation point through one transform: multiplies `factor` by the
/// transform's prefactor at (x, t) and replaces (x, t) by the inner arguments.
template <class S>
void transform_step(TransformId id, double theta, S& x, S& t, S& factor) {
    using std::exp;
    using std::sqrt;
    switch (id) {
    case TransformId::HeatT1:
    case TransformId::WaveT1: x = x - theta; return;
    case TransformId::HeatT2: t = t - theta; return;
    case TransformId::HeatT3: factor = factor * std::exp(theta); return;
    case TransformId::HeatT4: {
        const double s = std::exp(-theta);
        x = x * s;
        t = t * (s * s);
        return;
    }
    case TransformId::HeatT5: {
        factor = factor * exp(theta * theta * t - theta * x);
        x = x - (2.0 * theta) * t;
        return;
    }
    case TransformId::HeatT6: {
        const S s = 1.0 + (4.0 * theta) * t;
        if (!(value_of(s) > 0.0)) {
            throw DomainError("HeatT6 singular: 1 + 4*theta*t <= 0 (theta=" +
                              std::to_string(theta) + ", t=" + std::to_string(value_of(t)) + ")");
        }
        factor = factor * exp(-theta * x * x / s) / sqrt(s);
        x = x / s;
        t = t / s;
        return;
    }
    case TransformId::WaveT2: {
        const double s = std::exp(theta);
        x = x * s;
        t = t * s;
        return;
    }
    }
}

/// A seed with an ordered list of transforms. transforms[0] acts first on the
/// seed, so the function is T_{k} o ... o T_{1} o seed.
struct TransformChain {
    SeedId seed = SeedId::Constant;
    std::vector<TransformId> transforms;
    std::vector<double> params;

    template <class S>
    S evaluate(S x, S t) const {
        S factor(1.0);
        for (std::size_t k = transforms.size(); k-- > 0;) {
            transform_step(transforms[k], params[k], x, t, factor);
        }
        return factor * eval_seed(seed, x, t);
    }
};

/// Value and first partials of the chain at (x, t). Throws DomainError where a
/// transform is singular, ParameterError for a malformed chain.
Jet eval_chain(const TransformChain& chain, double x, double t);
double eval_chain_value(const TransformChain& chain, double x, double t);

/// Closed-form text for the chain, with parameters substituted (%.10g).
std::string render_chain(const TransformChain& chain);

// ---------------------------------------------------------------------------
// Function-level API.

/// Scalar field on (x, t) returning value and first partials.
using SolutionFn = std::function<Jet(double x, double t)>;

SolutionFn seed_function(SeedId seed);

/// Composes a transform onto f; partials propagate by the chain rule.
SolutionFn apply_transform(const LieTransform& transform, SolutionFn f, double theta);

// ---------------------------------------------------------------------------
// Independent finite-difference PDE check.

struct FdOptions {
    double step_x = 1e-4;
    double step_t = 1e-4;
    int order = 2; // 2 or 6 (central stencils)

    static FdOptions central(double step) { return {step, step, 2}; }
    /// Sixth-order stencils; heat gets a finer t step since u_t scales like u_xx.
    static FdOptions high_order(PdeKind pde) {
        return pde == PdeKind::Heat ? FdOptions{5e-4, 2e-5, 6} : FdOptions{5e-4, 5e-4, 6};
    }
};

/// n_x by n_t tensor grid strictly inside the domain (nodes at i/(n+1)).
std::vector<Point> interior_grid(const Domain& domain, std::size_t n_x, std::size_t n_t);

/// max |u_t - u_xx| (heat) or |u_tt - u_xx| (wave) over the grid, using
/// central differences of values only.
double pde_residual(PdeKind pde, const std::function<double(double, double)>& f,
                    std::span<const Point> grid, const FdOptions& fd);

} // namespace liesym
